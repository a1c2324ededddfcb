//! Gradient training of decoder parameters through the unrolled decoder.

pub mod batch;
pub mod gradcheck;
pub mod loss;
pub mod optim;
pub mod tape;
pub mod train;

pub use batch::{sample_batch, Batch};
pub use gradcheck::{gradcheck, GradcheckConfig, GradcheckReport};
pub use loss::{cross_entropy, loss_from_totals, multiloss, LossConfig, LossKind};
pub use optim::{Optimizer, OptimizerConfig, OptimizerKind};
pub use tape::{Branch, Tape, Var};
pub use train::{
    backward, batch_gradient, check_finite, forward_with_tape, frame_loss, trace_csv, train, train_with, Trainable, TrainConfig,
    TrainManifest, TraceRow, TrainOutcome,
};
