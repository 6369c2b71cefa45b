//! Contrastive explanations for differentiable classifiers.
//!
//! Given an input and the class a model assigns it, this crate computes:
//!
//! - a **pertinent positive**: a minimal sub-part of the input that is
//!   sufficient on its own to receive the same class, and
//! - a **pertinent negative**: a minimal set of additions that would flip
//!   the class, so their absence supports the current one.
//!
//! Both are found by minimizing a hinge loss on the model's prediction
//! scores plus an elastic-net penalty (and optionally an autoencoder
//! reconstruction penalty that keeps perturbed inputs near the data
//! manifold), using projected FISTA over mode-specific feasible boxes with
//! an outer search over the loss weight.
//!
//! Module map:
//!
//! - [`model`] — dense networks and autoencoders with analytic input
//!   gradients, a minimal trainer, and the text weight format.
//! - [`objective`] — the PN/PP hinge losses and the smooth objective parts
//!   with their gradients.
//! - [`solver`] — shrinkage-thresholding, feasible-space projection,
//!   projected FISTA, and the c-search.
//! - [`explain`] — per-example orchestration, narratives, and the
//!   explanation record schema.
//! - [`eval`] — batch evaluation of class retention/switch rates.
//! - [`toydata`] — deterministic toy datasets.
//!
//! Batch entry points ([`explain::explain_batch`], [`eval::evaluate`]) run
//! data-parallel across examples when the `parallel` feature (default) is
//! enabled; `*_seq` variants are always available.

pub mod error;
pub mod eval;
pub mod explain;
pub mod model;
pub mod objective;
pub mod solver;
pub mod toydata;

pub use error::{Error, Result};
pub use eval::{evaluate, evaluate_seq, report_from_explanations, EvalReport, EvalRow, EvalSummary};
pub use explain::{
    explain, explain_batch, explain_batch_seq, render_narrative, Explanation, ExplanationRecord,
    SpaceSpec,
};
pub use model::{
    train_autoencoder, train_classifier, Activation, DenseAutoencoder, DenseLayer, DenseNetwork,
    TrainConfig, TrainReport,
};
pub use objective::{
    argmax, hinge_loss, loss_pn, loss_pp, meets_margin, smooth_gradient, smooth_objective,
    Example, Mode, ObjectiveParams,
};
pub use solver::{
    c_search, elastic_net_value, fista_minimize, fista_run, shrink, CandidateLogEntry,
    FeasibleSpace, PerturbationResult, SolverConfig,
};
