//! Hybrid product recommendation for transaction data.
//!
//! The pipeline combines four signals:
//!
//! * explicit ratings compared with a restricted cosine (optionally weighted by
//!   how often the user bought each item),
//! * implicit ratings built from purchase counts and inverse item frequency,
//! * a purchase precedence index that drops candidates nobody ever bought
//!   after the items the target already owns,
//! * association rules mined with FP-growth that expand the candidate list.
//!
//! [`eval`] holds the top-N precision/recall harness and [`corpus`] the CSV
//! formats and a synthetic generator with planted user classes.

pub mod cli;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod implicit;
pub mod recommender;
pub mod rules;
pub mod sequence;
pub mod similarity;

pub use corpus::{Dataset, ItemId, Profile, RatingRecord, SyntheticConfig, Transaction, UserId};
pub use error::{Error, Result};
pub use eval::{EvalReport, ExperimentConfig};
pub use implicit::IifTable;
pub use recommender::{Recommendation, Recommender, RecommenderConfig, Source};
pub use rules::{AssociationRule, FrequentItemset, FrequentItemsets, ItemSet};
pub use sequence::PrecedenceIndex;
pub use similarity::{Mode, NeighborList, UserVector};

/// Canonical rating scale upper bound. Ratings live in `[0, MAX_RATING]`.
pub const MAX_RATING: f64 = 10.0;

/// Ratings at or above this value count as relevant / recommendable.
pub const RELEVANCE_THRESHOLD: f64 = 7.0;
