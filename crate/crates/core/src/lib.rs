//! Affective-state inference from short informal text.
//!
//! The crate is organised as a pipeline:
//!
//! - [`lexicons`]: unipolar and weighted (semantic differential) word lists,
//!   plus the bundled wish and preference lexicons.
//! - [`textprep`]: tokenization, corpora, rare-word removal, vocabularies and
//!   document-word count matrices.
//! - [`normalize`]: repetition damping, digamma length normalization and
//!   z-score standardization.
//! - [`scoring`]: lexicon scores, ranked reports and Osgood profiles.
//! - [`personality`]: per-pole SVD models and the norm-delta classifier for
//!   Big Five dimensions.

pub mod error;
pub mod lexicons;
pub mod normalize;
pub mod personality;
pub mod scoring;
pub mod textprep;

pub use error::{Error, Result};
