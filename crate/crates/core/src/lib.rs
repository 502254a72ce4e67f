//! Reversible denoising and lifting color transforms for lossless image
//! compression, with entropy estimators, per-slot transform selection and an
//! internal Golomb-Rice coder for bitrate measurement.

pub mod cli;
pub mod codec;
pub mod container;
pub mod denoise;
pub mod descriptor;
pub mod error;
pub mod estimate;
pub mod imageio;
pub mod lifting;
pub mod plane;
pub mod select;
pub mod series;
pub mod synth;
pub mod transforms;

pub use denoise::FilterSpec;
pub use descriptor::{SlotChoice, TransformDescriptor, TransformKind};
pub use error::{Error, Result};
pub use plane::{ColorImage, Plane, Role};
