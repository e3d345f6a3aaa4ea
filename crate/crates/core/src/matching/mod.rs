//! Template matching of a local map against a global map.
//!
//! Four scorers are available: SSD and SAD (lower is better), zero-mean NCC,
//! and WNCC, a center-weighted correlation that discounts the noisy rim of
//! ground-built local maps. [`match_template`] evaluates every placement;
//! [`match_template_parallel`] does the same across threads.

mod kernel;
mod score;
mod search;

pub use kernel::{make_kernel, KernelKind, WeightKernel};
pub use score::{
    score_ncc, score_sad, score_ssd, score_wncc, template_mean, window_mean, Method,
    PreparedTemplate,
};
pub use search::{heat_color, match_template, match_template_parallel, MatchResult, ScoreField};
