//! Deterministic mechanisms: serial dictatorships, agent-proposing deferred
//! acceptance, and a registry of piecewise reference mechanisms, behind one
//! uniform trait.
//!
//! Mechanism spec grammar (CLI and reports):
//! `sd:weights` | `sd:<id1,id2,…>` | `da:<priority-file>` |
//! `fixture:{dispute,wasteful,nonsp,da-counterexample}` | `wpopular:first` |
//! `constant:unassigned`.

mod fixtures;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

pub use fixtures::{
    da_counterexample_priorities, da_counterexample_problem, dispute_base_problem,
    fixture_mechanisms, nonsp_base_problem, wasteful_base_problem, DaCounterexampleFixture,
    DisputeFixture, NonSpFixture, WastefulFixture,
};

use crate::model::{AgentId, Matching, ObjectId, Problem};
use crate::popularity::{w_popular_set, Weighting};
use crate::{Error, Limits, Result, Scalar};

/// A deterministic map from problems to matchings. Implementations must be
/// pure: the same problem always yields the same matching, and the output
/// always satisfies the matching invariants.
pub trait Mechanism<W: Scalar> {
    /// Stable name in the mechanism spec grammar.
    fn name(&self) -> String;

    fn evaluate(&self, problem: &Problem<W>) -> Result<Matching>;
}

/// Serial dictatorship: following `ordering`, each agent takes her most
/// preferred acceptable object with remaining capacity, or stays unassigned.
pub fn serial_dictatorship<W: Scalar>(
    problem: &Problem<W>,
    ordering: &[AgentId],
) -> Result<Matching> {
    let mut seen = BTreeSet::new();
    for agent in ordering {
        if !problem.contains_agent(agent) {
            return Err(Error::precondition(format!(
                "ordering mentions unknown agent `{agent}`"
            )));
        }
        if !seen.insert(agent) {
            return Err(Error::precondition(format!(
                "ordering repeats agent `{agent}`"
            )));
        }
    }
    if seen.len() != problem.agent_count() {
        return Err(Error::precondition(
            "ordering must be a permutation of the problem's agents",
        ));
    }

    let objects = problem.objects();
    let mut remaining: Vec<u32> = objects
        .iter()
        .map(|o| problem.capacity(o).unwrap())
        .collect();
    let mut assignment = BTreeMap::new();
    for agent in ordering {
        let pick = problem
            .preference(agent)
            .unwrap()
            .ranked()
            .iter()
            .find_map(|obj| {
                let idx = objects.iter().position(|o| o == obj).unwrap();
                (remaining[idx] > 0).then_some((idx, obj.clone()))
            });
        match pick {
            Some((idx, obj)) => {
                remaining[idx] -= 1;
                assignment.insert(agent.clone(), Some(obj));
            }
            None => {
                assignment.insert(agent.clone(), None);
            }
        }
    }
    Ok(Matching::new(assignment))
}

/// The serial dictatorship under the canonical weight-consistent ordering
/// (weights non-increasing, ties broken by agent id).
pub fn weight_consistent_sd<W: Scalar>(problem: &Problem<W>) -> Result<Matching> {
    serial_dictatorship(problem, &problem.weights().canonical_order())
}

/// Deduplicated outcomes of the serial dictatorship under every ordering
/// consistent with the weight profile, in canonical matching order.
pub fn sd_consistent_outcomes<W: Scalar>(
    problem: &Problem<W>,
    limits: &Limits,
) -> Result<Vec<Matching>> {
    let orderings = crate::model::consistent_orderings(problem.weights(), limits)?;
    let mut outcomes = BTreeSet::new();
    for ordering in orderings {
        outcomes.insert(serial_dictatorship(problem, &ordering)?);
    }
    Ok(outcomes.into_iter().collect())
}

/// One strict priority order over all agents per object.
#[derive(Clone, PartialEq, Eq, Debug, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct PriorityStructure(pub BTreeMap<ObjectId, Vec<AgentId>>);

impl PriorityStructure {
    pub fn from_strs(priorities: &[(&str, &[&str])]) -> Self {
        PriorityStructure(
            priorities
                .iter()
                .map(|(obj, agents)| {
                    (
                        ObjectId::new(obj),
                        agents.iter().map(AgentId::new).collect(),
                    )
                })
                .collect(),
        )
    }

    fn validate<W: Scalar>(&self, problem: &Problem<W>) -> Result<()> {
        for object in problem.objects() {
            let Some(order) = self.0.get(object) else {
                return Err(Error::precondition(format!(
                    "priority structure missing object `{object}`"
                )));
            };
            let unique: BTreeSet<&AgentId> = order.iter().collect();
            if unique.len() != order.len()
                || order.len() != problem.agent_count()
                || !order.iter().all(|a| problem.contains_agent(a))
            {
                return Err(Error::precondition(format!(
                    "priority order for `{object}` must rank each agent exactly once"
                )));
            }
        }
        Ok(())
    }
}

/// Agent-proposing deferred acceptance. Agents propose down their acceptable
/// lists; each object tentatively holds up to its capacity of top-priority
/// proposers and rejects the rest; the tentative assignment on termination
/// is the outcome.
pub fn deferred_acceptance<W: Scalar>(
    problem: &Problem<W>,
    priorities: &PriorityStructure,
) -> Result<Matching> {
    priorities.validate(problem)?;

    let agents = problem.agents();
    let prio_rank: BTreeMap<&ObjectId, BTreeMap<&AgentId, usize>> = problem
        .objects()
        .iter()
        .map(|o| {
            (
                o,
                priorities.0[o]
                    .iter()
                    .enumerate()
                    .map(|(r, a)| (a, r))
                    .collect(),
            )
        })
        .collect();

    // next[i]: index into agent i's list of the next object to propose to.
    let mut next = vec![0usize; agents.len()];
    let mut holders: BTreeMap<&ObjectId, Vec<usize>> =
        problem.objects().iter().map(|o| (o, Vec::new())).collect();
    let mut queue: VecDeque<usize> = (0..agents.len()).collect();

    while let Some(ai) = queue.pop_front() {
        let agent = &agents[ai];
        let ranked = problem.preference(agent).unwrap().ranked();
        if next[ai] >= ranked.len() {
            continue;
        }
        let object = &ranked[next[ai]];
        next[ai] += 1;
        let held = holders.get_mut(object).unwrap();
        held.push(ai);
        if held.len() > problem.capacity(object).unwrap() as usize {
            let rank = &prio_rank[object];
            let (worst_pos, _) = held
                .iter()
                .enumerate()
                .max_by_key(|(_, a)| rank[&agents[**a]])
                .unwrap();
            let rejected = held.swap_remove(worst_pos);
            queue.push_back(rejected);
        }
    }

    let mut assignment: BTreeMap<AgentId, Option<ObjectId>> =
        agents.iter().map(|a| (a.clone(), None)).collect();
    for (object, held) in holders {
        for ai in held {
            assignment.insert(agents[ai].clone(), Some(object.clone()));
        }
    }
    Ok(Matching::new(assignment))
}

/// `sd:weights` — serial dictatorship under the canonical weight-consistent
/// ordering.
pub struct SdWeights;

impl<W: Scalar> Mechanism<W> for SdWeights {
    fn name(&self) -> String {
        "sd:weights".into()
    }

    fn evaluate(&self, problem: &Problem<W>) -> Result<Matching> {
        weight_consistent_sd(problem)
    }
}

/// `sd:<ids>` — serial dictatorship under a fixed agent ordering.
pub struct SdFixed {
    pub ordering: Vec<AgentId>,
}

impl SdFixed {
    pub fn from_strs(ordering: &[&str]) -> Self {
        SdFixed {
            ordering: ordering.iter().map(AgentId::new).collect(),
        }
    }
}

impl<W: Scalar> Mechanism<W> for SdFixed {
    fn name(&self) -> String {
        format!(
            "sd:{}",
            self.ordering
                .iter()
                .map(|a| a.as_str())
                .collect::<Vec<_>>()
                .join(",")
        )
    }

    fn evaluate(&self, problem: &Problem<W>) -> Result<Matching> {
        serial_dictatorship(problem, &self.ordering)
    }
}

/// `da:<name>` — deferred acceptance under a fixed priority structure.
pub struct Da {
    pub label: String,
    pub priorities: PriorityStructure,
}

impl<W: Scalar> Mechanism<W> for Da {
    fn name(&self) -> String {
        format!("da:{}", self.label)
    }

    fn evaluate(&self, problem: &Problem<W>) -> Result<Matching> {
        deferred_acceptance(problem, &self.priorities)
    }
}

/// `wpopular:first` — the canonically first w-popular matching when one
/// exists, the weight-consistent serial dictatorship otherwise. This is the
/// reference w-popular mechanism: by construction it is w-popular on every
/// family it can afford to search.
#[derive(Default)]
pub struct WPopularFirst {
    pub limits: Limits,
}


impl<W: Scalar> Mechanism<W> for WPopularFirst {
    fn name(&self) -> String {
        "wpopular:first".into()
    }

    fn evaluate(&self, problem: &Problem<W>) -> Result<Matching> {
        let set = w_popular_set(problem, Weighting::Weighted, &self.limits)?;
        match set.into_iter().next() {
            Some(first) => Ok(first),
            None => weight_consistent_sd(problem),
        }
    }
}

/// `constant:unassigned` — leaves every agent unassigned.
pub struct AllUnassigned;

impl<W: Scalar> Mechanism<W> for AllUnassigned {
    fn name(&self) -> String {
        "constant:unassigned".into()
    }

    fn evaluate(&self, problem: &Problem<W>) -> Result<Matching> {
        Ok(Matching::all_unassigned(problem))
    }
}

/// Every named mechanism this crate ships: the weight-consistent serial
/// dictatorship, the four piecewise reference mechanisms, and the reference
/// w-popular mechanism.
pub fn registry<W: Scalar>() -> Vec<Box<dyn Mechanism<W>>> {
    let mut out: Vec<Box<dyn Mechanism<W>>> = vec![Box::new(SdWeights)];
    out.extend(fixture_mechanisms());
    out.push(Box::new(WPopularFirst::default()));
    out
}

/// Resolves a mechanism spec string. `da:<name>` needs a priority structure;
/// the loader maps the name to one (the CLI reads a priority file).
pub fn mechanism_from_spec<W: Scalar>(
    spec: &str,
    da_loader: &dyn Fn(&str) -> Result<PriorityStructure>,
) -> Result<Box<dyn Mechanism<W>>> {
    let invalid = || Error::invalid("mechanism", format!("unknown mechanism spec `{spec}`"));
    let (kind, rest) = spec.split_once(':').ok_or_else(invalid)?;
    match (kind, rest) {
        ("sd", "weights") => Ok(Box::new(SdWeights)),
        ("sd", ids) if !ids.is_empty() => Ok(Box::new(SdFixed {
            ordering: ids.split(',').map(|s| AgentId::new(s.trim())).collect(),
        })),
        ("da", name) if !name.is_empty() => Ok(Box::new(Da {
            label: name.to_string(),
            priorities: da_loader(name)?,
        })),
        ("fixture", "dispute") => Ok(Box::new(DisputeFixture)),
        ("fixture", "wasteful") => Ok(Box::new(WastefulFixture::default())),
        ("fixture", "nonsp") => Ok(Box::new(NonSpFixture)),
        ("fixture", "da-counterexample") => Ok(Box::new(DaCounterexampleFixture)),
        ("wpopular", "first") => Ok(Box::new(WPopularFirst::default())),
        ("constant", "unassigned") => Ok(Box::new(AllUnassigned)),
        _ => Err(invalid()),
    }
}
