//! Symbolic-compression pipeline for automatic modulation classification.
//!
//! The stages, in dataflow order:
//!
//! 1. [`siggen`] synthesizes modulated I/Q segments and adds calibrated AWGN.
//! 2. [`features`] extracts 21 statistics (amplitude moments plus
//!    higher-order cumulants) per segment.
//! 3. [`discretize`] maps the retained features into 17 single-letter
//!    tokens via equal-frequency bins.
//! 4. [`shortlist`] prunes the ten candidate labels to a top-k list with a
//!    nearest-centroid ranker (or oracle/file providers).
//! 5. [`prompt`] assembles the constrained multiple-choice prompt with one
//!    worked exemplar per option.
//! 6. [`llm`] sends the prompt to a chat-completion endpoint or a
//!    deterministic mock and parses the reply.
//! 7. [`eval`] orchestrates whole datasets, sweeps the ablation axes, and
//!    emits JSON/CSV/SVG reports.

pub mod csvio;
pub mod discretize;
pub mod error;
pub mod eval;
pub mod features;
pub mod labels;
pub mod llm;
pub mod prompt;
pub mod shortlist;
pub mod siggen;
pub mod svg;

pub use error::{Error, Result};
pub use labels::ModulationLabel;
