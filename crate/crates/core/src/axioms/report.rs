use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::axioms::preference_universe;
use crate::mechanisms::Mechanism;
use crate::model::{AgentId, Matching, ObjectId, Preference, Problem};
use crate::popularity::{is_w_popular, pareto_improves, popularity_margin, Weighting};
use crate::{Error, Limits, Result, Scalar};

/// The audited axioms.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axiom {
    StrategyProofness,
    WPopularity,
    NonWastefulness,
    ParetoEfficiency,
    PreservesDisputeResolutions,
    TwoAgentConsistentConflictResolution,
    WPopularInEquilibrium,
}

impl Axiom {
    pub fn as_str(&self) -> &'static str {
        match self {
            Axiom::StrategyProofness => "strategy-proofness",
            Axiom::WPopularity => "w-popularity",
            Axiom::NonWastefulness => "non-wastefulness",
            Axiom::ParetoEfficiency => "pareto-efficiency",
            Axiom::PreservesDisputeResolutions => "preserves-dispute-resolutions",
            Axiom::TwoAgentConsistentConflictResolution => {
                "two-agent-consistent-conflict-resolution"
            }
            Axiom::WPopularInEquilibrium => "w-popular-in-equilibrium",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Axiom {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "strategy-proofness" => Axiom::StrategyProofness,
            "w-popularity" => Axiom::WPopularity,
            "non-wastefulness" => Axiom::NonWastefulness,
            "pareto-efficiency" | "pareto" => Axiom::ParetoEfficiency,
            "preserves-dispute-resolutions" | "dispute-resolutions" => {
                Axiom::PreservesDisputeResolutions
            }
            "two-agent-consistent-conflict-resolution" | "two-agent-cccr" => {
                Axiom::TwoAgentConsistentConflictResolution
            }
            "w-popular-in-equilibrium" => Axiom::WPopularInEquilibrium,
            other => {
                return Err(Error::invalid("axiom", format!("unknown axiom `{other}`")))
            }
        })
    }
}

/// Serializes a margin scalar as a 64-bit integer.
mod scalar_i64 {
    use super::*;
    use serde::{de::Error as _, ser::Error as _, Deserializer, Serializer};

    pub fn serialize<W: Scalar, S: Serializer>(
        value: &W,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let v = value
            .to_i64()
            .ok_or_else(|| S::Error::custom("margin does not fit a 64-bit integer"))?;
        serializer.serialize_i64(v)
    }

    pub fn deserialize<'de, W: Scalar, D: Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<W, D::Error> {
        let v = i64::deserialize(deserializer)?;
        W::from_i64(v).ok_or_else(|| D::Error::custom("margin does not fit the scalar type"))
    }
}

/// Self-contained counterexample payload. Every variant embeds the problems
/// and matchings needed to re-verify the violation from scratch.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
#[serde(bound(serialize = "W: Scalar", deserialize = "W: Scalar"))]
pub enum AuditWitness<W: Scalar> {
    /// `agent` strictly gains by reporting `misreport` at `problem`.
    StrategyProofness {
        problem: Problem<W>,
        agent: AgentId,
        misreport: Preference,
        truthful_outcome: Matching,
        misreport_outcome: Matching,
    },
    /// A w-popular matching exists at `problem` (`popular_witness`), yet the
    /// mechanism's `outcome` is beaten by `challenger` with the given margin.
    WPopularity {
        problem: Problem<W>,
        outcome: Matching,
        popular_witness: Matching,
        challenger: Matching,
        #[serde(with = "scalar_i64")]
        margin: W,
    },
    /// `agent` prefers `object`, which has spare capacity under `outcome`.
    NonWastefulness {
        problem: Problem<W>,
        outcome: Matching,
        agent: AgentId,
        object: ObjectId,
    },
    /// `improvement` Pareto improves upon the mechanism's `outcome`.
    ParetoEfficiency {
        problem: Problem<W>,
        outcome: Matching,
        improvement: Matching,
    },
    /// `agent` loses `object` to `rival` at `problem` and still gets nothing
    /// after reporting only `object`, yet in `reduced` the mechanism fails
    /// to award `object` to `rival` with `agent` unassigned.
    DisputeResolutions {
        problem: Problem<W>,
        agent: AgentId,
        rival: AgentId,
        object: ObjectId,
        reduced: Problem<W>,
        reduced_outcome: Matching,
    },
    /// Both `agent` and `rival` want only `object`; the mechanism splits
    /// `{object, ∅}` between them under both capacity vectors but picks
    /// different winners.
    TwoAgentConsistentConflictResolution {
        problem: Problem<W>,
        alternative_capacities: BTreeMap<ObjectId, u32>,
        agent: AgentId,
        rival: AgentId,
        object: ObjectId,
        outcome: Matching,
        alternative_outcome: Matching,
    },
    /// `profile` is a pure Nash equilibrium of the reporting game at
    /// `problem` whose outcome is not w-popular although `popular_witness`
    /// is.
    WPopularInEquilibrium {
        problem: Problem<W>,
        profile: BTreeMap<AgentId, Preference>,
        outcome: Matching,
        popular_witness: Matching,
        challenger: Matching,
        #[serde(with = "scalar_i64")]
        margin: W,
    },
}

// Witnesses dwarf the empty variant; reports are built once per audit, so
// the imbalance is harmless.
#[allow(clippy::large_enum_variant)]
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "witness", rename_all = "kebab-case")]
#[serde(bound(serialize = "W: Scalar", deserialize = "W: Scalar"))]
pub enum AuditVerdict<W: Scalar> {
    HoldsOnFamily,
    Counterexample(AuditWitness<W>),
}

/// Result of auditing one axiom for one mechanism over one problem family.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(bound(serialize = "W: Scalar", deserialize = "W: Scalar"))]
pub struct AuditReport<W: Scalar> {
    pub axiom: Axiom,
    pub mechanism: String,
    pub family: String,
    pub instances_checked: u64,
    /// Quantification notes, e.g. which capacity vectors were sampled.
    pub notes: Vec<String>,
    #[serde(flatten)]
    pub verdict: AuditVerdict<W>,
}

impl<W: Scalar> AuditReport<W> {
    pub fn holds(&self) -> bool {
        matches!(self.verdict, AuditVerdict::HoldsOnFamily)
    }

    pub fn witness(&self) -> Option<&AuditWitness<W>> {
        match &self.verdict {
            AuditVerdict::HoldsOnFamily => None,
            AuditVerdict::Counterexample(w) => Some(w),
        }
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))
    }
}

/// Outcome of replaying a report's witness through the predicates.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ReplayOutcome {
    /// The counterexample re-verifies exactly.
    Confirmed,
    /// The report holds on its family; there is no witness to replay.
    NothingToReplay,
    /// The witness does not reproduce; the report is stale or corrupt.
    Mismatch(String),
}

/// Re-verifies a counterexample witness against the mechanism that
/// allegedly produced it. Every claim the witness makes — recorded outcomes,
/// preference comparisons, margins, equilibrium stability — is recomputed.
pub fn replay<W: Scalar>(
    report: &AuditReport<W>,
    mechanism: &dyn Mechanism<W>,
    limits: &Limits,
) -> Result<ReplayOutcome> {
    let Some(witness) = report.witness() else {
        return Ok(ReplayOutcome::NothingToReplay);
    };
    let mismatch = |msg: &str| Ok(ReplayOutcome::Mismatch(msg.to_string()));

    match witness {
        AuditWitness::StrategyProofness {
            problem,
            agent,
            misreport,
            truthful_outcome,
            misreport_outcome,
        } => {
            if mechanism.evaluate(problem)? != *truthful_outcome {
                return mismatch("truthful outcome differs");
            }
            let deviated = problem.with_preference(agent, misreport.clone())?;
            if mechanism.evaluate(&deviated)? != *misreport_outcome {
                return mismatch("misreport outcome differs");
            }
            let pref = problem.preference(agent).unwrap();
            if !pref.strictly_prefers(
                misreport_outcome.assigned(agent),
                truthful_outcome.assigned(agent),
            ) {
                return mismatch("misreport is not strictly improving");
            }
        }
        AuditWitness::WPopularity {
            problem,
            outcome,
            popular_witness,
            challenger,
            margin,
        } => {
            if mechanism.evaluate(problem)? != *outcome {
                return mismatch("outcome differs");
            }
            if !is_w_popular(problem, popular_witness, Weighting::Weighted, limits)?.holds() {
                return mismatch("popular witness is not w-popular");
            }
            let recomputed = popularity_margin(problem, challenger, outcome, Weighting::Weighted)?;
            if recomputed != *margin || !recomputed.is_positive() {
                return mismatch("challenger margin differs");
            }
        }
        AuditWitness::NonWastefulness {
            problem,
            outcome,
            agent,
            object,
        } => {
            if mechanism.evaluate(problem)? != *outcome {
                return mismatch("outcome differs");
            }
            let spare =
                (outcome.load(object) as u32) < problem.capacity(object).unwrap_or(0);
            let wants = problem
                .preference(agent)
                .map(|p| p.strictly_prefers(Some(object), outcome.assigned(agent)))
                .unwrap_or(false);
            if !spare || !wants {
                return mismatch("pair is not wasteful");
            }
        }
        AuditWitness::ParetoEfficiency {
            problem,
            outcome,
            improvement,
        } => {
            if mechanism.evaluate(problem)? != *outcome {
                return mismatch("outcome differs");
            }
            if !pareto_improves(problem, improvement, outcome)? {
                return mismatch("improvement does not Pareto improve");
            }
        }
        AuditWitness::DisputeResolutions {
            problem,
            agent,
            rival,
            object,
            reduced,
            reduced_outcome,
        } => {
            let outcome = mechanism.evaluate(problem)?;
            if outcome.assigned(rival) != Some(object) {
                return mismatch("rival does not hold the object");
            }
            let pref = problem.preference(agent).unwrap();
            if !pref.strictly_prefers(Some(object), outcome.assigned(agent)) {
                return mismatch("agent does not envy the rival");
            }
            let insist = problem.with_preference(agent, Preference::only(object.clone()))?;
            if mechanism.evaluate(&insist)?.assigned(agent).is_some() {
                return mismatch("agent wins the object by insisting on it");
            }
            let replayed = mechanism.evaluate(reduced)?;
            if replayed != *reduced_outcome {
                return mismatch("reduced outcome differs");
            }
            let resolved = replayed.assigned(agent).is_none()
                && replayed.assigned(rival) == Some(object);
            if resolved {
                return mismatch("reduced problem resolves the dispute consistently");
            }
        }
        AuditWitness::TwoAgentConsistentConflictResolution {
            problem,
            alternative_capacities,
            agent,
            rival,
            object,
            outcome,
            alternative_outcome,
        } => {
            if mechanism.evaluate(problem)? != *outcome {
                return mismatch("outcome differs");
            }
            let alternative = problem.with_capacities(alternative_capacities.clone())?;
            if mechanism.evaluate(&alternative)? != *alternative_outcome {
                return mismatch("alternative outcome differs");
            }
            let splits = |m: &Matching| {
                let pair = (m.assigned(agent), m.assigned(rival));
                pair == (Some(object), None) || pair == (None, Some(object))
            };
            if !splits(outcome) || !splits(alternative_outcome) {
                return mismatch("outcomes do not split the object and the outside option");
            }
            if outcome.assigned(agent) == alternative_outcome.assigned(agent) {
                return mismatch("winner is consistent across capacities");
            }
        }
        AuditWitness::WPopularInEquilibrium {
            problem,
            profile,
            outcome,
            popular_witness,
            challenger,
            margin,
        } => {
            let reported = problem.with_preferences(profile.clone())?;
            if mechanism.evaluate(&reported)? != *outcome {
                return mismatch("equilibrium outcome differs");
            }
            // Stability: no unilateral deviation strictly improves any agent
            // under her true preference.
            let universe = preference_universe(problem.objects(), limits)?;
            for agent in problem.agents() {
                let truth = problem.preference(agent).unwrap();
                let current = outcome.assigned(agent);
                for alternative in &universe {
                    let deviated =
                        reported.with_preference(agent, alternative.clone())?;
                    let result = mechanism.evaluate(&deviated)?;
                    if truth.strictly_prefers(result.assigned(agent), current) {
                        return mismatch("profile is not a Nash equilibrium");
                    }
                }
            }
            if !is_w_popular(problem, popular_witness, Weighting::Weighted, limits)?.holds() {
                return mismatch("popular witness is not w-popular");
            }
            let recomputed = popularity_margin(problem, challenger, outcome, Weighting::Weighted)?;
            if recomputed != *margin || !recomputed.is_positive() {
                return mismatch("challenger margin differs");
            }
        }
    }
    Ok(ReplayOutcome::Confirmed)
}

/// Checks whether `matching` assigns `agent`/`rival` exactly `{object, ∅}`.
pub(crate) fn splits_object_and_outside(
    matching: &Matching,
    agent: &AgentId,
    rival: &AgentId,
    object: &ObjectId,
) -> bool {
    let pair = (matching.assigned(agent), matching.assigned(rival));
    pair == (Some(object), None) || pair == (None, Some(object))
}
