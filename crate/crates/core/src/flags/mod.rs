//! Target images, gray-level fitness and genome evaluation.

mod evaluate;
mod image;
mod targets;

pub use evaluate::{evaluate, regression_image, EvalError, ModelVariant};
pub use image::{discretize, similarity, GrayImage, ImageError, PgmFormat};
pub use targets::{make_target, TargetKind};
