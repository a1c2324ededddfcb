//! Named code bundles: built-in constructions and manifest files pointing at
//! alist matrices.

use std::fs;
use std::path::{Path, PathBuf};

use super::alist::{emit_alist, parse_alist};
use super::gf2m::{bch_generator_poly, Gf2Poly, Gf2mField};
use super::linear::{cyclic_parity_matrix, LinearCode};
use super::matrix::BinaryMatrix;
use crate::error::{Error, Result};
use crate::kv::KeyValues;

/// A code plus the metadata every report carries about it.
#[derive(Clone, Debug)]
pub struct CodeBundle {
    pub id: String,
    pub construction: String,
    pub code: LinearCode,
}

impl CodeBundle {
    pub fn new(id: impl Into<String>, construction: impl Into<String>, h: BinaryMatrix) -> Result<Self> {
        Ok(CodeBundle {
            id: id.into(),
            construction: construction.into(),
            code: LinearCode::new(h)?,
        })
    }

    /// Narrow-sense BCH code of length 2^m − 1 with designed distance 2t + 1,
    /// H built from the cyclic parity polynomial.
    pub fn bch(m: u32, t: usize) -> Result<Self> {
        let field = Gf2mField::new(m)?;
        let g = bch_generator_poly(&field, t)?;
        let n = field.order();
        let k = n - g.degree().expect("generator is nonzero");
        let h = cyclic_parity_matrix(&g, n)?;
        Self::new(
            format!("bch_{n}_{k}"),
            format!("cyclic m={m} t={t} prim={:#x} g={}", field.primitive_poly(), g.to_hex()),
            h,
        )
    }

    pub fn manifest(&self, alist_file: &str) -> KeyValues {
        let mut kv = KeyValues::new();
        kv.set("id", &self.id)
            .set("n", self.code.n())
            .set("k", self.code.k())
            .set("alist", alist_file)
            .set("construction", &self.construction)
            .set("h_sha256", self.code.h_hash());
        kv
    }

    /// Writes `<dir>/<id>.alist` and `<dir>/<id>.code`; returns the manifest path.
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
        let alist_name = format!("{}.alist", self.id);
        let alist_path = dir.join(&alist_name);
        fs::write(&alist_path, emit_alist(self.code.h())).map_err(|e| Error::io(alist_path.display().to_string(), e))?;
        let manifest_path = dir.join(format!("{}.code", self.id));
        fs::write(&manifest_path, self.manifest(&alist_name).emit())
            .map_err(|e| Error::io(manifest_path.display().to_string(), e))?;
        Ok(manifest_path)
    }

    /// Reads a manifest; the alist path is resolved relative to the manifest.
    pub fn read_manifest(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let kv = KeyValues::parse(&text)?;
        let alist_rel = kv.require("alist")?;
        let alist_path = path.parent().unwrap_or(Path::new(".")).join(alist_rel);
        let alist = fs::read_to_string(&alist_path).map_err(|e| Error::io(alist_path.display().to_string(), e))?;
        let bundle = Self::new(
            kv.require("id")?,
            kv.get("construction").unwrap_or("alist"),
            parse_alist(&alist)?,
        )?;
        for (key, actual) in [("n", bundle.code.n()), ("k", bundle.code.k())] {
            if let Some(declared) = kv.parse_value::<usize>(key)? {
                if declared != actual {
                    return Err(Error::Parse(format!(
                        "manifest declares {key} = {declared} but the matrix gives {actual}"
                    )));
                }
            }
        }
        Ok(bundle)
    }
}

/// Names accepted by [`builtin`].
pub const BUILTIN_CODES: &[&str] = &[
    "hamming74",
    "hamming74_std",
    "rep3",
    "rep3_cyclic",
    "spc4",
    "bch_15_11",
    "bch_63_45",
    "bch_63_36",
    "bch_127_99",
    "bch_127_64",
];

/// Built-in codes. `hamming74` is the cyclic form (g = x³+x+1) so that it
/// admits shift/doubling automorphisms; `hamming74_std` is the classical
/// H whose column j is the binary expansion of j.
pub fn builtin(name: &str) -> Result<CodeBundle> {
    match name {
        "hamming74" => {
            let g = Gf2Poly::from_bits(0b1011);
            CodeBundle::new("hamming74", "cyclic m=3 t=1 g=0xb", cyclic_parity_matrix(&g, 7)?)
        }
        "hamming74_std" => CodeBundle::new(
            "hamming74_std",
            "binary-expansion columns",
            BinaryMatrix::from_row_support(7, &[vec![0, 2, 4, 6], vec![1, 2, 5, 6], vec![3, 4, 5, 6]])?,
        ),
        "rep3" => CodeBundle::new("rep3", "repetition, path H", BinaryMatrix::from_dense(2, 3, &[1, 1, 0, 0, 1, 1])?),
        "rep3_cyclic" => CodeBundle::new(
            "rep3_cyclic",
            "repetition, all three weight-2 checks",
            BinaryMatrix::from_dense(3, 3, &[1, 1, 0, 0, 1, 1, 1, 0, 1])?,
        ),
        "spc4" => CodeBundle::new("spc4", "single parity check", BinaryMatrix::from_dense(1, 4, &[1, 1, 1, 1])?),
        "bch_15_11" => CodeBundle::bch(4, 1),
        "bch_63_45" => CodeBundle::bch(6, 3),
        "bch_63_36" => CodeBundle::bch(6, 5),
        "bch_127_99" => CodeBundle::bch(7, 4),
        "bch_127_64" => CodeBundle::bch(7, 10),
        other => Err(Error::InvalidArgument(format!(
            "unknown code '{other}' (built-ins: {})",
            BUILTIN_CODES.join(", ")
        ))),
    }
}

/// Resolves a built-in name, an `.alist` file or a manifest file.
pub fn load_code(spec: &str) -> Result<CodeBundle> {
    if BUILTIN_CODES.contains(&spec) {
        return builtin(spec);
    }
    let path = Path::new(spec);
    if !path.exists() {
        return builtin(spec);
    }
    if path.extension().and_then(|e| e.to_str()) == Some("alist") {
        let text = fs::read_to_string(path).map_err(|e| Error::io(spec, e))?;
        let id = path.file_stem().and_then(|s| s.to_str()).unwrap_or("alist").to_string();
        return CodeBundle::new(id, format!("alist {}", path.display()), parse_alist(&text)?);
    }
    CodeBundle::read_manifest(path)
}
