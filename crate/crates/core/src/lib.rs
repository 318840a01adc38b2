//! Self-contained single-image super-resolution stack built around a
//! symmetric large-kernel attention network: a small f64 tensor engine with
//! reverse-mode differentiation, the network itself, static efficiency
//! accounting (parameters, multiply-accumulates, receptive fields), image
//! I/O with bicubic resampling and Y-channel quality metrics, and a two-stage
//! training harness that runs end-to-end at desk scale.

pub mod analysis;
pub mod dataset;
pub mod error;
pub mod image;
pub mod metrics;
pub mod model;
pub mod optim;
pub mod resample;
pub mod tape;
pub mod tensor;
pub mod training;

pub use dataset::{load_dataset, SrDataset};
pub use error::{Result, SvanError};
pub use image::{load_png, save_png, ImageRgb8};
pub use model::{
    init_params, load_params, save_params, Arrangement, SvanConfig, SvanParams, IMAGE_CHANNELS,
};
pub use optim::{adam_step, AdamState};
pub use tape::{Tape, VarId};
pub use tensor::{
    add, conv2d, gelu, hadamard, l1_loss, l2_loss, pixel_norm, pixel_shuffle, pixel_unshuffle,
    read_tensor, write_tensor, ConvSpec, PadMode, Tensor4,
};
pub use training::{
    default_protocol, evaluate, lr_at, parse_run_config, train, EvalReport, LossKind, RunConfig,
    Schedule, StagePlan, TrainLog, TrainOptions,
};
