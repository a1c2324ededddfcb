use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use neurodec::channel::{llr, sigma_from_ebno};
use neurodec::code::{load_code, CodeBundle, LinearCode};
use neurodec::decoder::{decode, DecoderSpec, ParamBundle, Parameters};
use neurodec::harness::{
    emit_csv, exhaustive_map_oracle, exhaustive_ml_oracle, run_ber_sweep, BerReport, StopRule, SweepConfig,
};
use neurodec::kv::KeyValues;
use neurodec::mrrd::{MrrdConfig, MrrdDecoder, MrrdExperiment};
use neurodec::training::{
    gradcheck, trace_csv, train_with, GradcheckConfig, LossKind, OptimizerKind, TrainManifest, Trainable,
};

#[derive(Parser, Debug)]
#[command(name = "neurodec", version, about = "Neural belief-propagation decoders: simulate, train, audit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Monte-Carlo BER sweep of one decoder.
    Ber(BerArgs),
    /// Train decoder parameters.
    Train(TrainArgs),
    /// Compare tape gradients with central finite differences.
    Gradcheck(GradcheckArgs),
    /// mRRD BER sweep with iteration and timing statistics.
    Mrrd(MrrdArgs),
    /// Decode a single frame and print per-iteration marginals.
    Decode(DecodeArgs),
    /// Construct a BCH code bundle.
    Codegen(CodegenArgs),
    /// Exhaustive MAP posteriors or ML codeword for a small code.
    Oracle(OracleArgs),
}

#[derive(Args, Debug)]
struct SimArgs {
    /// Eb/N0 points in dB: `4`, `1,2,3` or `lo:hi[:step]`.
    #[arg(long)]
    snr: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, default_value_t = 100)]
    min_frame_errors: u64,
    #[arg(long, default_value_t = 10_000_000)]
    max_frames: u64,
    /// Send the all-zero codeword instead of random codewords.
    #[arg(long)]
    zero_codeword: bool,
    /// CSV output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BerArgs {
    /// Built-in code name, `.alist` file or code manifest.
    #[arg(long)]
    code: String,
    /// Decoder preset or descriptor; taken from --params when omitted.
    #[arg(long)]
    spec: Option<String>,
    /// Parameter bundle produced by `train`.
    #[arg(long)]
    params: Option<PathBuf>,
    #[command(flatten)]
    sim: SimArgs,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[arg(long)]
    code: Option<String>,
    #[arg(long)]
    spec: Option<String>,
    /// Run manifest (key = value); flags given explicitly override it.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Initial parameter bundle (defaults to the classical decoder).
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long)]
    optimizer: Option<OptimizerKind>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    minibatch: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    loss: Option<LossKind>,
    #[arg(long)]
    snr_lo: Option<f64>,
    #[arg(long)]
    snr_hi: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Output parameter bundle.
    #[arg(long)]
    out: PathBuf,
    /// Loss trace CSV (step,loss,gamma).
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GradcheckArgs {
    #[arg(long, default_value = "hamming74")]
    code: String,
    #[arg(long, default_value = "bp-rnn")]
    spec: String,
    /// Iterations when --spec is a bare preset.
    #[arg(long, default_value_t = 3)]
    iterations: usize,
    #[arg(long, default_value_t = 100)]
    points: usize,
    #[arg(long, default_value_t = 1e-4)]
    h: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Also check the channel-LLR weights w_v and w̃_v.
    #[arg(long)]
    all_groups: bool,
    /// Exit nonzero when the maximum relative error exceeds this.
    #[arg(long, default_value_t = 1e-4)]
    tolerance: f64,
}

#[derive(Args, Debug)]
struct MrrdArgs {
    #[arg(long)]
    code: String,
    /// Experiment file (m, c, inner_iterations, inner_spec, inner_params, extrinsic_carry, seed).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    c: Option<usize>,
    #[arg(long)]
    inner_iterations: Option<usize>,
    /// Inner decoder preset or descriptor.
    #[arg(long)]
    spec: Option<String>,
    /// Inner decoder parameter bundle.
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long)]
    extrinsic_carry: bool,
    #[command(flatten)]
    sim: SimArgs,
}

#[derive(Args, Debug)]
struct DecodeArgs {
    #[arg(long)]
    code: String,
    #[arg(long, default_value = "bp")]
    spec: String,
    #[arg(long)]
    params: Option<PathBuf>,
    /// Channel LLRs, comma separated (log Pr(1)/Pr(0)).
    #[arg(long, conflicts_with = "received", allow_hyphen_values = true)]
    llr: Option<String>,
    /// Received BPSK values, comma separated; needs --snr.
    #[arg(long, requires = "snr", allow_hyphen_values = true)]
    received: Option<String>,
    #[arg(long)]
    snr: Option<f64>,
}

#[derive(Args, Debug)]
struct CodegenArgs {
    /// Field degree: length n = 2^m − 1.
    #[arg(long)]
    m: u32,
    /// Designed error-correcting capability.
    #[arg(long)]
    t: usize,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long)]
    code: String,
    /// `map` takes --llr and prints bitwise posteriors Pr(c_v = 1);
    /// `ml` takes --received and prints the ML codeword.
    #[arg(long, default_value = "map")]
    mode: String,
    #[arg(long, allow_hyphen_values = true)]
    llr: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    received: Option<String>,
}

fn parse_list(s: &str) -> anyhow::Result<Vec<f64>> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().with_context(|| format!("bad number '{x}'")))
        .collect()
}

fn parse_snrs(s: &str) -> anyhow::Result<Vec<f64>> {
    if s.contains(':') {
        let parts = s.split(':').map(|x| x.trim().parse::<f64>()).collect::<Result<Vec<_>, _>>()?;
        let (lo, hi, step) = match parts[..] {
            [lo, hi] => (lo, hi, 1.0),
            [lo, hi, step] => (lo, hi, step),
            _ => bail!("SNR range must be lo:hi or lo:hi:step"),
        };
        if step <= 0.0 || lo > hi {
            bail!("empty SNR range '{s}'");
        }
        let count = ((hi - lo) / step + 1e-9).floor() as usize;
        Ok((0..=count).map(|i| lo + i as f64 * step).collect())
    } else {
        parse_list(s)
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn load_bundle(path: &Path, bundle: &CodeBundle) -> anyhow::Result<ParamBundle> {
    let pb = ParamBundle::from_text(&read(path)?, bundle.code.graph())?;
    if pb.h_sha256 != bundle.code.h_hash() {
        bail!(
            "parameter bundle {} was trained for H {} but the code's H is {}",
            path.display(),
            pb.h_sha256,
            bundle.code.h_hash()
        );
    }
    Ok(pb)
}

/// Spec and parameters from flags: an explicit --spec wins for the spec,
/// parameters come from the bundle when given.
fn decoder_setup(spec: Option<&str>, params: Option<&Path>, bundle: &CodeBundle) -> anyhow::Result<(DecoderSpec, Parameters)> {
    let graph = bundle.code.graph();
    match (spec, params) {
        (spec, Some(path)) => {
            let pb = load_bundle(path, bundle)?;
            let spec = match spec {
                Some(s) => s.parse::<DecoderSpec>()?,
                None => pb.spec.clone(),
            };
            pb.params.check_shapes(&spec, graph)?;
            Ok((spec, pb.params))
        }
        (Some(s), None) => {
            let spec: DecoderSpec = s.parse()?;
            let p = Parameters::init(&spec, graph);
            Ok((spec, p))
        }
        (None, None) => bail!("--spec or --params is required"),
    }
}

fn sweep_config(sim: &SimArgs) -> anyhow::Result<SweepConfig> {
    let mut cfg = SweepConfig::new(parse_snrs(&sim.snr)?, sim.seed);
    cfg.workers = sim.workers;
    cfg.zero_codeword = sim.zero_codeword;
    cfg.stop = StopRule {
        min_frame_errors: sim.min_frame_errors,
        max_frames: sim.max_frames,
    };
    Ok(cfg)
}

fn emit_report(report: &BerReport, out: Option<&Path>) -> anyhow::Result<()> {
    let text = emit_csv(report);
    match out {
        Some(path) => write(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_ber(a: BerArgs) -> anyhow::Result<()> {
    let bundle = load_code(&a.code)?;
    let (spec, params) = decoder_setup(a.spec.as_deref(), a.params.as_deref(), &bundle)?;
    let decoder = neurodec::decoder::Decoder::new(spec, params, bundle.code.clone())?;
    let mut report = run_ber_sweep(&bundle.code, &decoder, &sweep_config(&a.sim)?)?;
    report.provenance.set("code_id", &bundle.id);
    if let Some(p) = &a.params {
        report.provenance.set("params", p.display());
    }
    emit_report(&report, a.sim.out.as_deref())
}

fn cmd_train(a: TrainArgs) -> anyhow::Result<()> {
    let mut kv = match &a.manifest {
        Some(p) => KeyValues::parse(&read(p)?)?,
        None => KeyValues::new(),
    };
    macro_rules! over {
        ($key:literal, $v:expr) => {
            if let Some(v) = &$v {
                kv.set($key, v);
            }
        };
    }
    over!("code", a.code);
    over!("spec", a.spec);
    over!("optimizer", a.optimizer);
    over!("learning_rate", a.lr);
    over!("minibatch_size", a.minibatch);
    over!("steps", a.steps);
    over!("loss", a.loss);
    over!("snr_lo", a.snr_lo);
    over!("snr_hi", a.snr_hi);
    over!("seed", a.seed);
    over!("workers", a.workers);
    let manifest = TrainManifest::from_kv(&kv)?;
    let bundle = load_code(&manifest.code)?;
    let graph = bundle.code.graph();
    let init = match &a.params {
        Some(p) => {
            let pb = load_bundle(p, &bundle)?;
            pb.params.check_shapes(&manifest.spec, graph)?;
            pb.params
        }
        None => Parameters::init(&manifest.spec, graph),
    };
    let started = Instant::now();
    let steps = manifest.config.optimizer.steps;
    let every = (steps / 20).max(1);
    let outcome = train_with(&bundle.code, &manifest.spec, &manifest.config, init, |row| {
        if row.step % every == 0 || row.step + 1 == steps {
            match row.gamma {
                Some(g) => eprintln!("step {} loss {:.6} gamma {:.6}", row.step, row.loss, g),
                None => eprintln!("step {} loss {:.6}", row.step, row.loss),
            }
        }
    })?;
    let pb = ParamBundle {
        code_id: bundle.id.clone(),
        h_sha256: bundle.code.h_hash(),
        spec: manifest.spec.clone(),
        params: outcome.params,
    };
    write(&a.out, &pb.to_text(graph))?;
    if let Some(t) = &a.trace {
        write(t, &trace_csv(&outcome.trace))?;
    }
    println!("steps = {steps}");
    if let Some(last) = outcome.trace.last() {
        println!("final_loss = {}", last.loss);
        if let Some(g) = last.gamma {
            println!("gamma = {g}");
        }
    }
    println!("seconds = {:.3}", started.elapsed().as_secs_f64());
    println!("params = {}", a.out.display());
    Ok(())
}

fn spec_arg(s: &str, iterations: usize) -> anyhow::Result<DecoderSpec> {
    Ok(match DecoderSpec::preset(s, iterations) {
        Ok(spec) => spec,
        Err(_) => s.parse()?,
    })
}

fn cmd_gradcheck(a: GradcheckArgs) -> anyhow::Result<()> {
    let bundle = load_code(&a.code)?;
    let spec = spec_arg(&a.spec, a.iterations)?;
    let cfg = GradcheckConfig {
        points: a.points,
        h: a.h,
        seed: a.seed,
        ..GradcheckConfig::default()
    };
    let trainable = if a.all_groups { Trainable::all() } else { Trainable::default() };
    let r = gradcheck(&bundle.code, &spec, &trainable, &cfg)?;
    println!("spec = {}", r.spec);
    println!("params = {}", r.num_params);
    println!("points = {}", r.points_checked);
    println!("kink_excluded = {}", r.kink_excluded);
    println!("max_abs_error = {:e}", r.max_abs_error);
    println!("max_rel_error = {:e}", r.max_rel_error);
    if r.max_rel_error > a.tolerance {
        bail!("max relative error {:e} exceeds tolerance {:e}", r.max_rel_error, a.tolerance);
    }
    Ok(())
}

fn cmd_mrrd(a: MrrdArgs) -> anyhow::Result<()> {
    let bundle = load_code(&a.code)?;
    let mut exp = match &a.config {
        Some(p) => MrrdExperiment::from_kv(&KeyValues::parse(&read(p)?)?)?,
        None => MrrdExperiment::from_kv(&KeyValues::new())?,
    };
    if let Some(m) = a.m {
        exp.m = m;
    }
    if let Some(c) = a.c {
        exp.c = c;
    }
    if let Some(i) = a.inner_iterations {
        exp.inner_iterations = i;
    }
    if let Some(s) = &a.spec {
        exp.inner_spec = spec_arg(s, exp.inner_iterations)?;
    }
    if let Some(p) = &a.params {
        exp.inner_params = Some(p.display().to_string());
    }
    exp.extrinsic_carry |= a.extrinsic_carry;
    let params = match &exp.inner_params {
        Some(p) => load_bundle(Path::new(p), &bundle)?.params,
        None => Parameters::init(&exp.inner_spec, bundle.code.graph()),
    };
    let mut cfg = MrrdConfig::new(exp.m, exp.c, exp.inner_iterations, exp.inner_spec.clone(), params)?;
    cfg.extrinsic_carry = exp.extrinsic_carry;
    let decoder = MrrdDecoder::new(bundle.code.clone(), cfg)?;
    let mut sweep = sweep_config(&a.sim)?;
    if a.config.is_some() && a.sim.seed == 0 {
        sweep.seed = exp.seed;
    }
    let started = Instant::now();
    let mut report = run_ber_sweep(&bundle.code, &decoder, &sweep)?;
    let secs = started.elapsed().as_secs_f64();
    let frames: u64 = report.points.iter().map(|p| p.frames).sum();
    report.provenance.set("code_id", &bundle.id);
    emit_report(&report, a.sim.out.as_deref())?;
    // wall-clock time is machine dependent, so it stays out of the CSV
    eprintln!("frames = {frames}");
    eprintln!("mean_decode_us = {:.3}", 1e6 * secs / frames.max(1) as f64);
    Ok(())
}

fn read_code(name: &str) -> anyhow::Result<LinearCode> {
    Ok(load_code(name)?.code)
}

fn cmd_decode(a: DecodeArgs) -> anyhow::Result<()> {
    let bundle = load_code(&a.code)?;
    let (spec, params) = decoder_setup(Some(&a.spec), a.params.as_deref(), &bundle)?;
    let l = match (&a.llr, &a.received, a.snr) {
        (Some(l), _, _) => parse_list(l)?,
        (None, Some(y), Some(snr)) => {
            let sigma = sigma_from_ebno(snr, bundle.code.rate())?;
            llr(&parse_list(y)?, sigma)?
        }
        _ => bail!("--llr or --received with --snr is required"),
    };
    let out = decode(&spec, &params, &bundle.code, &l)?;
    println!("spec = {spec}");
    for t in 0..out.iterations_used {
        let probs: Vec<String> = out.probabilities(t).iter().map(|p| p.to_string()).collect();
        println!("iteration {} marginals = {}", t + 1, probs.join(","));
    }
    let bits: Vec<String> = out.hard_decisions.iter().map(|b| b.to_string()).collect();
    println!("hard_decisions = {}", bits.join(""));
    println!("iterations_used = {}", out.iterations_used);
    println!("valid = {}", u8::from(out.valid));
    Ok(())
}

fn cmd_codegen(a: CodegenArgs) -> anyhow::Result<()> {
    let bundle = CodeBundle::bch(a.m, a.t)?;
    let manifest = bundle.write(&a.out)?;
    println!("id = {}", bundle.id);
    println!("n = {}", bundle.code.n());
    println!("k = {}", bundle.code.k());
    println!("h_sha256 = {}", bundle.code.h_hash());
    println!("manifest = {}", manifest.display());
    if bundle.code.k() <= 20 {
        let book = bundle.code.codebook()?;
        let ok = book.iter().all(|c| bundle.code.is_codeword(c).unwrap_or(false));
        println!("codebook_syndromes_zero = {}", u8::from(ok));
        if !ok {
            bail!("generated H fails the codebook syndrome check");
        }
    }
    Ok(())
}

fn cmd_oracle(a: OracleArgs) -> anyhow::Result<()> {
    let code = read_code(&a.code)?;
    match a.mode.as_str() {
        "map" => {
            let l = parse_list(a.llr.as_deref().context("--llr is required for map mode")?)?;
            let post: Vec<String> = exhaustive_map_oracle(&code, &l)?.iter().map(|p| p.to_string()).collect();
            println!("posteriors = {}", post.join(","));
        }
        "ml" => {
            let y = parse_list(a.received.as_deref().context("--received is required for ml mode")?)?;
            let bits: Vec<String> = exhaustive_ml_oracle(&code, &y)?.iter().map(|b| b.to_string()).collect();
            println!("codeword = {}", bits.join(""));
        }
        other => bail!("unknown oracle mode '{other}' (map or ml)"),
    }
    Ok(())
}

fn error_kind(e: &anyhow::Error) -> &'static str {
    if let Some(ne) = e.downcast_ref::<neurodec::Error>() {
        return ne.kind();
    }
    if e.chain().any(|c| c.downcast_ref::<std::io::Error>().is_some()) {
        return "io";
    }
    "invalid-argument"
}

fn error_line(kind: &str, msg: &str) -> String {
    let flat = msg.replace('\n', " ").replace('"', "'");
    format!("error kind={kind} message=\"{}\"", flat.trim())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let msg = e.render().to_string();
            let first = msg.lines().next().unwrap_or("usage error").trim_start_matches("error: ");
            eprintln!("{}", error_line("usage", first));
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Ber(a) => cmd_ber(a),
        Command::Train(a) => cmd_train(a),
        Command::Gradcheck(a) => cmd_gradcheck(a),
        Command::Mrrd(a) => cmd_mrrd(a),
        Command::Decode(a) => cmd_decode(a),
        Command::Codegen(a) => cmd_codegen(a),
        Command::Oracle(a) => cmd_oracle(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", error_line(error_kind(&e), &format!("{e:#}")));
            ExitCode::FAILURE
        }
    }
}
