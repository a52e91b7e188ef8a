//! A small dense-network engine: forward pass, backpropagation, losses, Adam,
//! Glorot initialization and a finite-difference gradient checker.

mod adam;
pub mod gradcheck;
mod io;
mod layer;
pub mod loss;
mod net;

use thiserror::Error;

pub use adam::{AdamConfig, AdamState};
pub use io::{MODEL_MAGIC, MODEL_VERSION};
pub use layer::{sigmoid, softmax_f64, Activation, DenseLayer, Real};
pub use net::{Activations, DenseNet, Gradients, LayerGrads};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetError {
    #[error("dimension mismatch: expected {expected} values, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid dimensions: {0}")]
    InvalidDims(String),
    #[error("non-finite gradient in layer {layer} {block}")]
    NonFiniteGradient { layer: usize, block: &'static str },
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),
}
