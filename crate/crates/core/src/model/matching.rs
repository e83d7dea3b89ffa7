use std::collections::BTreeMap;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::model::{AgentId, ObjectId, Problem};
use crate::Scalar;

/// A matching: every agent is mapped to an object or left unassigned.
///
/// The derived ordering (lexicographic over the sorted agent entries, with
/// unassigned before any object) is the canonical matching order used for
/// deterministic tie-breaking and set outputs throughout the crate.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Matching(BTreeMap<AgentId, Option<ObjectId>>);

impl Matching {
    pub fn new(assignment: BTreeMap<AgentId, Option<ObjectId>>) -> Self {
        Matching(assignment)
    }

    pub fn from_pairs(
        pairs: impl IntoIterator<Item = (AgentId, Option<ObjectId>)>,
    ) -> Self {
        Matching(pairs.into_iter().collect())
    }

    /// Literal constructor: `(agent, Some(object) | None)` pairs.
    pub fn from_strs(pairs: &[(&str, Option<&str>)]) -> Self {
        Matching(
            pairs
                .iter()
                .map(|(a, o)| (AgentId::new(a), o.map(ObjectId::new)))
                .collect(),
        )
    }

    /// All agents of `problem` unassigned.
    pub fn all_unassigned<W: Scalar>(problem: &Problem<W>) -> Self {
        Matching(
            problem
                .agents()
                .iter()
                .map(|a| (a.clone(), None))
                .collect(),
        )
    }

    pub fn assigned(&self, agent: &AgentId) -> Option<&ObjectId> {
        self.0.get(agent).and_then(|o| o.as_ref())
    }

    pub fn entry(&self, agent: &AgentId) -> Option<Option<&ObjectId>> {
        self.0.get(agent).map(|o| o.as_ref())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&AgentId, Option<&ObjectId>)> {
        self.0.iter().map(|(a, o)| (a, o.as_ref()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of agents assigned to `object`.
    pub fn load(&self, object: &ObjectId) -> usize {
        self.0.values().filter(|o| o.as_ref() == Some(object)).count()
    }

    /// One-line rendering `i1→o1, i2→∅` in the given agent order.
    pub fn render(&self, order: &[AgentId]) -> String {
        order
            .iter()
            .map(|a| match self.assigned(a) {
                Some(o) => format!("{a}→{o}"),
                None => format!("{a}→∅"),
            })
            .collect::<Vec<_>>()
            .join(", ")
    }
}

impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rendered: Vec<String> = self
            .0
            .iter()
            .map(|(a, o)| match o {
                Some(o) => format!("{a}→{o}"),
                None => format!("{a}→∅"),
            })
            .collect();
        write!(f, "{}", rendered.join(", "))
    }
}

impl Serialize for Matching {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            assignment: &'a BTreeMap<AgentId, Option<ObjectId>>,
        }
        Repr { assignment: &self.0 }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Matching {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            assignment: BTreeMap<String, Option<String>>,
        }
        let repr = Repr::deserialize(deserializer)?;
        if repr.assignment.keys().any(|k| k.is_empty()) {
            return Err(D::Error::custom("empty agent id in assignment"));
        }
        Ok(Matching(
            repr.assignment
                .into_iter()
                .map(|(a, o)| (AgentId::new(a), o.map(ObjectId::new)))
                .collect(),
        ))
    }
}

/// Why a matching is invalid for a problem.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum MatchingViolation {
    /// An agent of the problem has no entry.
    MissingAgent(AgentId),
    /// The matching mentions an agent the problem does not have.
    UnknownAgent(AgentId),
    /// An agent is assigned an object the problem does not have.
    UnknownObject { agent: AgentId, object: ObjectId },
    /// More agents sit on an object than its capacity allows.
    CapacityExceeded {
        object: ObjectId,
        assigned: usize,
        capacity: u32,
    },
}

impl fmt::Display for MatchingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatchingViolation::MissingAgent(a) => write!(f, "agent `{a}` has no entry"),
            MatchingViolation::UnknownAgent(a) => write!(f, "unknown agent `{a}`"),
            MatchingViolation::UnknownObject { agent, object } => {
                write!(f, "agent `{agent}` assigned unknown object `{object}`")
            }
            MatchingViolation::CapacityExceeded {
                object,
                assigned,
                capacity,
            } => write!(
                f,
                "object `{object}` holds {assigned} agents, capacity {capacity}"
            ),
        }
    }
}

/// Checks totality over agents, referential integrity, and capacities.
/// Verdict-valued: an invalid matching is a `MatchingViolation`, not an
/// [`enum@crate::Error`].
pub fn validate_matching<W: Scalar>(
    problem: &Problem<W>,
    matching: &Matching,
) -> Result<(), MatchingViolation> {
    for (agent, assigned) in matching.iter() {
        if !problem.contains_agent(agent) {
            return Err(MatchingViolation::UnknownAgent(agent.clone()));
        }
        if let Some(object) = assigned {
            if problem.capacity(object).is_none() {
                return Err(MatchingViolation::UnknownObject {
                    agent: agent.clone(),
                    object: object.clone(),
                });
            }
        }
    }
    for agent in problem.agents() {
        if matching.entry(agent).is_none() {
            return Err(MatchingViolation::MissingAgent(agent.clone()));
        }
    }
    for object in problem.objects() {
        let assigned = matching.load(object);
        let capacity = problem.capacity(object).unwrap();
        if assigned > capacity as usize {
            return Err(MatchingViolation::CapacityExceeded {
                object: object.clone(),
                assigned,
                capacity,
            });
        }
    }
    Ok(())
}
