//! Big Five prediction by per-pole SVD models.
//!
//! Each pole of a trait (e.g. extrovert / introvert) gets its own model: a
//! sample of that pole's documents becomes a z-scored pseudo-rate matrix
//! `A ≈ U S V'`. A test document is appended to each model's matrix, the word
//! factors are re-derived by fold-in, and the pole whose `V` moves by the
//! larger Frobenius norm claims the document.

mod classifier;
mod model;
pub mod persist;
mod svd;
pub mod synthetic;

pub use classifier::{
    evaluate, evaluate_seeds, train_classifier, DecisionRule, DimensionClassifier, EvalResult, MultiSeedEval,
    Prediction, SplitProtocol, TIE_TOLERANCE,
};
pub use model::{
    fit_pole_model, fold_in_v, norm_delta, sample_pole_documents, FitConfig, SvdModel, DEFAULT_RANK,
    DEFAULT_SAMPLE_SIZE, DEFAULT_VOCAB_SIZE,
};
pub use svd::{apply_sign_convention, orthonormality_error, truncated_svd, TruncatedSvd};
