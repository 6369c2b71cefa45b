//! Differentiable dense models: classifiers, autoencoders, a minimal
//! trainer, and the portable text weight format.
//!
//! Models are immutable after construction/training and safe to share
//! read-only across concurrent solver runs.

mod activation;
mod autoencoder;
pub mod io;
mod network;
mod train;

pub use activation::Activation;
pub use autoencoder::DenseAutoencoder;
pub use network::{DenseLayer, DenseNetwork};
pub use train::{train_autoencoder, train_classifier, TrainConfig, TrainReport};
