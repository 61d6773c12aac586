//! Compositionality metrics, selection statistics, and correlation tooling.

pub mod corr;
pub mod disent;
pub mod edit;
pub mod sampling;
pub mod topsim;
pub mod weights;

pub use corr::{average_ranks, pearson, permutation_pvalue, spearman};
pub use disent::{bosdis, context_independence, posdis};
pub use edit::levenshtein;
pub use sampling::sample_expert_topsim_distributions;
pub use topsim::topsim;
pub use weights::{expert_weights, weight_entropy, weight_skew, WeightDistribution};
