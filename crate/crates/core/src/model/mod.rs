//! Core domain types: agents, objects, preferences, weights, problems, and
//! matchings, plus parsing, weight classification, and exhaustive matching
//! enumeration.

mod enumerate;
mod files;
mod ids;
pub(crate) mod index;
mod matching;
mod preference;
mod problem;
mod weights;

pub use enumerate::{enumerate_matchings, MatchingIter};
pub use files::{parse_matching, parse_problem, serialize_matching, serialize_problem};
pub use ids::{AgentId, ObjectId};
pub use matching::{validate_matching, Matching, MatchingViolation};
pub use preference::{Desirability, Preference};
pub use problem::Problem;
pub use weights::{classify_weights, consistent_orderings, WeightClass, WeightProfile};
