//! Distributional preference inference for LLM judges.
//!
//! LLM judges emit token distributions, not just a decoded verdict. This
//! crate extracts discrete judgment distributions from judge logprob
//! records and derives pointwise, pairwise, and listwise preferences from
//! them, alongside evaluation metrics, distributional diagnostics, and a
//! seeded synthetic judge for desk-scale verification.
//!
//! Modules follow the pipeline:
//!
//! - [`dist`]: judgment spaces, probability vectors, summary statistics.
//! - [`extract`]: logprob records to distributions.
//! - [`pointwise`]: the eight score-distribution comparison methods.
//! - [`pairwise`]: both presentation orders, pre/post aggregation.
//! - [`listwise`]: preferences from ranked-list runs.
//! - [`metrics`]: accuracy with tie credit, MSE, tie analysis.
//! - [`diagnostics`]: multimodality, Wasserstein alignment, position bias,
//!   intransitivity, granularity sensitivity.
//! - [`sim`]: synthetic judge and the discretization bound harness.
//!
//! The `parallel` feature (default) backs the batch entry points with
//! rayon; disabling it swaps in plain iterators with identical output.

pub mod diagnostics;
pub mod dist;
pub mod error;
pub mod extract;
pub mod listwise;
pub mod metrics;
pub mod pairwise;
pub mod parallel;
pub mod pointwise;
pub mod preference;
pub mod record;
pub mod sim;

pub use dist::{DeltaDistribution, JudgmentDistribution, JudgmentSpace};
pub use error::{Error, Result};
pub use extract::{ExtractionSpec, LogprobRecord, Setting};
pub use preference::{MethodId, Preference};
