use std::collections::{BTreeMap, BTreeSet};

use crate::model::{AgentId, ObjectId, Preference, WeightProfile};
use crate::{Error, Result, Scalar};

/// An allocation problem: weighted agents, capacitated objects, and strict
/// preferences over acceptable objects.
///
/// Problems are immutable after construction. The `with_*` methods produce
/// modified copies, which is how misreports and reduced problems are built.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Problem<W> {
    agents: Vec<AgentId>,
    objects: Vec<ObjectId>,
    capacities: BTreeMap<ObjectId, u32>,
    preferences: BTreeMap<AgentId, Preference>,
    weights: WeightProfile<W>,
    standing_assumptions: bool,
}

impl<W: Scalar> Problem<W> {
    /// Validates and assembles a problem. `agents` and `objects` fix the
    /// canonical file order; `preferences` must have exactly one entry per
    /// agent.
    pub fn new(
        agents: Vec<(AgentId, W)>,
        objects: Vec<(ObjectId, u32)>,
        preferences: BTreeMap<AgentId, Preference>,
    ) -> Result<Self> {
        let mut agent_ids = Vec::with_capacity(agents.len());
        let mut weight_map = BTreeMap::new();
        for (i, (id, w)) in agents.into_iter().enumerate() {
            if id.as_str().is_empty() {
                return Err(Error::invalid(format!("agents[{i}].id"), "empty id"));
            }
            if weight_map.insert(id.clone(), w).is_some() {
                return Err(Error::invalid(
                    format!("agents[{i}].id"),
                    format!("duplicate agent id `{id}`"),
                ));
            }
            agent_ids.push(id);
        }
        let weights = WeightProfile::new(weight_map)?;

        let mut object_ids = Vec::with_capacity(objects.len());
        let mut capacities = BTreeMap::new();
        for (i, (id, cap)) in objects.into_iter().enumerate() {
            if id.as_str().is_empty() {
                return Err(Error::invalid(format!("objects[{i}].id"), "empty id"));
            }
            if cap == 0 {
                return Err(Error::invalid(
                    format!("objects[{i}].capacity"),
                    "capacity must be positive",
                ));
            }
            if capacities.insert(id.clone(), cap).is_some() {
                return Err(Error::invalid(
                    format!("objects[{i}].id"),
                    format!("duplicate object id `{id}`"),
                ));
            }
            object_ids.push(id);
        }

        let agent_set: BTreeSet<&AgentId> = agent_ids.iter().collect();
        for agent in preferences.keys() {
            if !agent_set.contains(agent) {
                return Err(Error::invalid(
                    format!("preferences[{agent}]"),
                    format!("unknown agent `{agent}`"),
                ));
            }
        }
        for agent in &agent_ids {
            let Some(pref) = preferences.get(agent) else {
                return Err(Error::invalid(
                    "preferences",
                    format!("missing preference list for agent `{agent}`"),
                ));
            };
            for obj in pref.ranked() {
                if !capacities.contains_key(obj) {
                    return Err(Error::invalid(
                        format!("preferences[{agent}]"),
                        format!("unknown object `{obj}` in preference list"),
                    ));
                }
            }
        }

        let n = agent_ids.len();
        let m = object_ids.len();
        let standing_assumptions = n >= 3 && m >= n;

        Ok(Problem {
            agents: agent_ids,
            objects: object_ids,
            capacities,
            preferences,
            weights,
            standing_assumptions,
        })
    }

    /// Convenience constructor from string literals, used pervasively by
    /// fixtures and tests.
    pub fn from_parts(
        agents: &[(&str, W)],
        objects: &[(&str, u32)],
        preferences: &[(&str, &[&str])],
    ) -> Result<Self> {
        let prefs = preferences
            .iter()
            .map(|(agent, objs)| {
                Preference::new(objs.iter().map(ObjectId::new).collect())
                    .map(|p| (AgentId::new(agent), p))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        Problem::new(
            agents
                .iter()
                .map(|(id, w)| (AgentId::new(id), w.clone()))
                .collect(),
            objects
                .iter()
                .map(|(id, cap)| (ObjectId::new(id), *cap))
                .collect(),
            prefs,
        )
    }

    pub fn agents(&self) -> &[AgentId] {
        &self.agents
    }

    pub fn objects(&self) -> &[ObjectId] {
        &self.objects
    }

    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn capacity(&self, object: &ObjectId) -> Option<u32> {
        self.capacities.get(object).copied()
    }

    pub fn capacities(&self) -> &BTreeMap<ObjectId, u32> {
        &self.capacities
    }

    pub fn preference(&self, agent: &AgentId) -> Option<&Preference> {
        self.preferences.get(agent)
    }

    pub fn preferences(&self) -> &BTreeMap<AgentId, Preference> {
        &self.preferences
    }

    pub fn weights(&self) -> &WeightProfile<W> {
        &self.weights
    }

    pub fn weight(&self, agent: &AgentId) -> Option<&W> {
        self.weights.get(agent)
    }

    pub fn contains_agent(&self, agent: &AgentId) -> bool {
        self.weights.get(agent).is_some()
    }

    /// Whether the standing model assumptions hold: at least three agents
    /// and at least as many objects as agents. The library accepts problems
    /// either way; the acceptance suite requires the flag.
    pub fn standing_assumptions(&self) -> bool {
        self.standing_assumptions
    }

    /// Copy of this problem with one agent's preference replaced.
    pub fn with_preference(&self, agent: &AgentId, preference: Preference) -> Result<Self> {
        if !self.contains_agent(agent) {
            return Err(Error::precondition(format!("unknown agent `{agent}`")));
        }
        for obj in preference.ranked() {
            if !self.capacities.contains_key(obj) {
                return Err(Error::invalid(
                    format!("preferences[{agent}]"),
                    format!("unknown object `{obj}` in preference list"),
                ));
            }
        }
        let mut out = self.clone();
        out.preferences.insert(agent.clone(), preference);
        Ok(out)
    }

    /// Copy of this problem with all preferences replaced. The map must be
    /// total over agents. Agents, objects, and weights are untouched, so
    /// only the new preferences are validated.
    pub fn with_preferences(&self, preferences: BTreeMap<AgentId, Preference>) -> Result<Self> {
        for agent in preferences.keys() {
            if !self.preferences.contains_key(agent) {
                return Err(Error::invalid(
                    format!("preferences[{agent}]"),
                    format!("unknown agent `{agent}`"),
                ));
            }
        }
        if preferences.len() != self.agents.len() {
            let missing = self
                .agents
                .iter()
                .find(|a| !preferences.contains_key(a))
                .expect("some agent must be missing");
            return Err(Error::invalid(
                "preferences",
                format!("missing preference list for agent `{missing}`"),
            ));
        }
        for (agent, pref) in &preferences {
            for obj in pref.ranked() {
                if !self.capacities.contains_key(obj) {
                    return Err(Error::invalid(
                        format!("preferences[{agent}]"),
                        format!("unknown object `{obj}` in preference list"),
                    ));
                }
            }
        }
        let mut out = self.clone();
        out.preferences = preferences;
        Ok(out)
    }

    /// Copy of this problem with one object's capacity replaced.
    pub fn with_capacity(&self, object: &ObjectId, capacity: u32) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::invalid(
                format!("capacities[{object}]"),
                "capacity must be positive",
            ));
        }
        if !self.capacities.contains_key(object) {
            return Err(Error::precondition(format!("unknown object `{object}`")));
        }
        let mut out = self.clone();
        out.capacities.insert(object.clone(), capacity);
        Ok(out)
    }

    /// Copy of this problem with every capacity replaced.
    pub fn with_capacities(&self, capacities: BTreeMap<ObjectId, u32>) -> Result<Self> {
        if capacities.len() != self.capacities.len()
            || !capacities.keys().all(|o| self.capacities.contains_key(o))
        {
            return Err(Error::precondition(
                "capacity map must cover exactly the problem's objects",
            ));
        }
        if let Some((object, _)) = capacities.iter().find(|(_, c)| **c == 0) {
            return Err(Error::invalid(
                format!("capacities[{object}]"),
                "capacity must be positive",
            ));
        }
        let mut out = self.clone();
        out.capacities = capacities;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_and_flags_standing_assumptions() {
        let p: Problem<i64> = Problem::from_parts(
            &[("i1", 6), ("i2", 3), ("i3", 2)],
            &[("o1", 1), ("o2", 1), ("o3", 1)],
            &[
                ("i1", &["o1", "o2", "o3"]),
                ("i2", &["o1", "o2", "o3"]),
                ("i3", &["o1", "o2", "o3"]),
            ],
        )
        .unwrap();
        assert_eq!(p.agent_count(), 3);
        assert_eq!(p.object_count(), 3);
        assert!(p.standing_assumptions());
    }

    #[test]
    fn small_problem_is_flagged() {
        let p: Problem<i64> =
            Problem::from_parts(&[("i1", 1)], &[("o1", 1)], &[("i1", &[])]).unwrap();
        assert!(!p.standing_assumptions());
        assert!(p.preference(&AgentId::new("i1")).unwrap().is_empty());
    }

    #[test]
    fn unknown_object_in_preference_is_named() {
        let err: Result<Problem<i64>> = Problem::from_parts(
            &[("i1", 1)],
            &[("o1", 1)],
            &[("i1", &["oX"])],
        );
        let msg = err.unwrap_err().to_string();
        assert!(msg.contains("oX"), "{msg}");
    }

    #[test]
    fn duplicate_agent_id_rejected() {
        let err: Result<Problem<i64>> = Problem::from_parts(
            &[("i1", 1), ("i1", 2)],
            &[("o1", 1)],
            &[("i1", &[])],
        );
        assert!(err.is_err());
    }

    #[test]
    fn missing_preference_entry_rejected() {
        let err: Result<Problem<i64>> =
            Problem::from_parts(&[("i1", 1), ("i2", 1)], &[("o1", 1)], &[("i1", &[])]);
        let msg = err.unwrap_err().to_string();
        assert!(msg.contains("i2"), "{msg}");
    }
}
