//! Allocation of indivisible objects to weighted agents.
//!
//! This crate implements a toolkit for studying matchings of agents to
//! objects when agents carry voting weights:
//!
//! - [`model`] — problems, matchings, weight-profile classification, and
//!   exhaustive matching enumeration;
//! - [`popularity`] — pairwise popularity margins, w-popularity verdicts,
//!   Pareto/non-wastefulness predicates, and popularity digraphs;
//! - [`mechanisms`] — serial dictatorships, agent-proposing deferred
//!   acceptance, and a registry of piecewise reference mechanisms;
//! - [`axioms`] — exhaustive audits of a mechanism against
//!   strategy-proofness, w-popularity, non-wastefulness, Pareto efficiency,
//!   dispute-resolution preservation, and two-agent conflict consistency;
//! - [`equilibrium`] — pure Nash equilibria of the preference-reporting
//!   game a mechanism induces;
//! - [`constructions`] — ready-made problem fixtures with machine-checkable
//!   expected facts.
//!
//! All verdicts rest on exact integer arithmetic: weights are positive
//! integers and popularity margins are signed sums of weights, so ties are
//! exact. The scalar type is generic (see [`Scalar`]); [`Weight`] is the
//! default used by the file formats and the CLI.

pub mod axioms;
pub mod constructions;
pub mod equilibrium;
mod error;
pub mod mechanisms;
pub mod model;
pub mod popularity;

use std::fmt;

use num_integer::Integer;
use num_traits::{FromPrimitive, Signed, ToPrimitive};

pub use error::{Error, Result};

/// Default weight scalar. File formats parse weights into this type.
pub type Weight = i64;

/// Weight scalar bound: exact signed integer arithmetic.
///
/// Margins are sums and differences of agent weights compared against zero,
/// so the scalar must be an exact integer type — `i32`, `i64`, `i128`, or an
/// arbitrary-precision integer. Floating-point types do not qualify: they
/// would corrupt zero margins, and a zero margin (a tie) is meaningful.
pub trait Scalar:
    Integer + Signed + FromPrimitive + ToPrimitive + Clone + fmt::Debug + fmt::Display
{
}

impl<T> Scalar for T where
    T: Integer + Signed + FromPrimitive + ToPrimitive + Clone + fmt::Debug + fmt::Display
{
}

/// Resource caps for the exhaustive operations.
///
/// Every enumeration (matchings, agent orderings, preference universes,
/// report profiles, audit families) is bounded; exceeding a bound yields
/// [`Error::Resource`], never silent truncation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Limits {
    /// Cap on the number of matchings enumerated per problem.
    pub max_matchings: u64,
    /// Cap on the number of weight-consistent agent orderings.
    pub max_orderings: u64,
    /// Cap on report-profile spaces (reporting games) and audit families.
    pub max_profiles: u64,
    /// Cap on the object count when generating a full preference universe.
    pub max_universe_objects: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_matchings: 10_000_000,
            max_orderings: 10_000,
            max_profiles: 1_000_000,
            max_universe_objects: 4,
        }
    }
}

impl Limits {
    /// Returns a copy with `max_universe_objects` raised to at least `m`.
    pub fn with_universe_objects(&self, m: usize) -> Self {
        let mut out = self.clone();
        out.max_universe_objects = out.max_universe_objects.max(m);
        out
    }
}
