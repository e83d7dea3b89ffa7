//! Exhaustive audits of a mechanism against the matching axioms.
//!
//! An audit quantifies over a finite [`ProblemFamily`] — a base problem
//! together with a set of free agents whose reports range over a preference
//! universe — and returns an [`AuditReport`]: either the axiom holds on the
//! whole family or a concrete counterexample witness. Witnesses embed full
//! problems and matchings and re-verify independently via [`replay`].

mod checks;
mod report;

use std::collections::BTreeSet;

pub use checks::{
    check_non_wastefulness, check_pareto, check_preserves_dispute_resolutions,
    check_strategy_proofness, check_two_agent_cccr, check_w_popularity,
};
pub use report::{replay, AuditReport, AuditVerdict, AuditWitness, Axiom, ReplayOutcome};

use crate::model::{AgentId, ObjectId, Preference, Problem};
use crate::{Error, Limits, Result, Scalar};

/// All strict preferences over every subset of `objects`: the empty list,
/// each singleton, and every longer arrangement. The count for `m` objects
/// is `Σ_{k=0..m} m!/(m−k)!`. Order is deterministic: by length, then
/// lexicographic in object position.
pub fn preference_universe(objects: &[ObjectId], limits: &Limits) -> Result<Vec<Preference>> {
    if objects.len() > limits.max_universe_objects {
        return Err(Error::resource(
            "preference universe objects",
            objects.len() as u64,
            limits.max_universe_objects as u64,
        ));
    }
    // Breadth-first by arrangement length keeps the order stable.
    let mut out = vec![Preference::empty()];
    let mut current: Vec<Vec<usize>> = vec![Vec::new()];
    for _len in 1..=objects.len() {
        let mut next = Vec::new();
        for prefix in &current {
            for i in 0..objects.len() {
                if !prefix.contains(&i) {
                    let mut arrangement = prefix.clone();
                    arrangement.push(i);
                    out.push(
                        Preference::new(
                            arrangement.iter().map(|&j| objects[j].clone()).collect(),
                        )
                        .expect("arrangement has no duplicates"),
                    );
                    next.push(arrangement);
                }
            }
        }
        current = next;
    }
    Ok(out)
}

/// A finite space of problems: a base problem plus a set of free agents
/// whose preferences range over a universe; everyone else keeps her base
/// report. Audits quantify over the family's instances in a fixed order.
#[derive(Clone, Debug)]
pub struct ProblemFamily<W> {
    name: String,
    base: Problem<W>,
    free: Vec<AgentId>,
    universe: Vec<Preference>,
}

impl<W: Scalar> ProblemFamily<W> {
    pub fn new(
        name: impl Into<String>,
        base: Problem<W>,
        free: Vec<AgentId>,
        universe: Vec<Preference>,
    ) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for agent in &free {
            if !base.contains_agent(agent) {
                return Err(Error::precondition(format!(
                    "free agent `{agent}` is not in the base problem"
                )));
            }
            if !seen.insert(agent.clone()) {
                return Err(Error::precondition(format!(
                    "free agent `{agent}` listed twice"
                )));
            }
        }
        if !free.is_empty() && universe.is_empty() {
            return Err(Error::precondition(
                "free agents need a non-empty preference universe",
            ));
        }
        for (i, pref) in universe.iter().enumerate() {
            for obj in pref.ranked() {
                if base.capacity(obj).is_none() {
                    return Err(Error::invalid(
                        format!("universe[{i}]"),
                        format!("unknown object `{obj}`"),
                    ));
                }
            }
        }
        let mut free = free;
        free.sort();
        Ok(ProblemFamily {
            name: name.into(),
            base,
            free,
            universe,
        })
    }

    /// The family containing exactly the base problem.
    pub fn single(name: impl Into<String>, base: Problem<W>) -> Self {
        ProblemFamily {
            name: name.into(),
            base,
            free: Vec::new(),
            universe: Vec::new(),
        }
    }

    /// Family with every agent free over the full preference universe of the
    /// base problem's objects.
    pub fn full(name: impl Into<String>, base: Problem<W>, limits: &Limits) -> Result<Self> {
        let universe = preference_universe(base.objects(), limits)?;
        let free = base.agents().to_vec();
        ProblemFamily::new(name, base, free, universe)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn base(&self) -> &Problem<W> {
        &self.base
    }

    pub fn free(&self) -> &[AgentId] {
        &self.free
    }

    pub fn universe(&self) -> &[Preference] {
        &self.universe
    }

    pub fn instance_count(&self) -> u128 {
        (self.universe.len() as u128)
            .checked_pow(self.free.len() as u32)
            .unwrap_or(u128::MAX)
            .max(1)
    }

    pub(crate) fn ensure_within(&self, limits: &Limits) -> Result<()> {
        let count = self.instance_count();
        if count > limits.max_profiles as u128 {
            return Err(Error::resource(
                "family instances",
                count.min(u64::MAX as u128) as u64,
                limits.max_profiles,
            ));
        }
        Ok(())
    }

    /// Instances in canonical order: free agents sorted by id, the last free
    /// agent's report varying fastest.
    pub fn instances(&self) -> impl Iterator<Item = Problem<W>> + '_ {
        let mut digits = vec![0usize; self.free.len()];
        let mut exhausted = false;
        std::iter::from_fn(move || {
            if exhausted {
                return None;
            }
            let mut problem = self.base.clone();
            for (agent, &d) in self.free.iter().zip(&digits) {
                problem = problem
                    .with_preference(agent, self.universe[d].clone())
                    .expect("universe preferences are valid for the base problem");
            }
            // Advance the odometer.
            exhausted = true;
            for d in digits.iter_mut().rev() {
                *d += 1;
                if *d < self.universe.len() {
                    exhausted = false;
                    break;
                }
                *d = 0;
            }
            if self.free.is_empty() {
                exhausted = true;
            }
            Some(problem)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Weight;

    fn objects(ids: &[&str]) -> Vec<ObjectId> {
        ids.iter().map(ObjectId::new).collect()
    }

    #[test]
    fn universe_counts_match_the_formula() {
        let limits = Limits::default();
        assert_eq!(
            preference_universe(&objects(&["a"]), &limits).unwrap().len(),
            2
        );
        assert_eq!(
            preference_universe(&objects(&["a", "b", "c"]), &limits)
                .unwrap()
                .len(),
            16
        );
        assert_eq!(
            preference_universe(&objects(&["a", "b", "c", "d"]), &limits)
                .unwrap()
                .len(),
            65
        );
    }

    #[test]
    fn universe_respects_the_object_cap() {
        let limits = Limits::default();
        let too_many = objects(&["a", "b", "c", "d", "e"]);
        assert!(matches!(
            preference_universe(&too_many, &limits),
            Err(Error::Resource { .. })
        ));
        let raised = limits.with_universe_objects(5);
        assert_eq!(preference_universe(&too_many, &raised).unwrap().len(), 326);
    }

    #[test]
    fn family_instances_cover_the_product() {
        let base: Problem<Weight> = Problem::from_parts(
            &[("i1", 2), ("i2", 1)],
            &[("a", 1)],
            &[("i1", &["a"]), ("i2", &[])],
        )
        .unwrap();
        let family = ProblemFamily::full("test", base, &Limits::default()).unwrap();
        assert_eq!(family.instance_count(), 4);
        let instances: Vec<_> = family.instances().collect();
        assert_eq!(instances.len(), 4);
        let unique: BTreeSet<String> = instances
            .iter()
            .map(|p| format!("{:?}", p.preferences()))
            .collect();
        assert_eq!(unique.len(), 4);
    }

    #[test]
    fn single_instance_family_yields_the_base() {
        let base: Problem<Weight> =
            Problem::from_parts(&[("i1", 1)], &[("a", 1)], &[("i1", &["a"])]).unwrap();
        let family = ProblemFamily::single("one", base.clone());
        assert_eq!(family.instance_count(), 1);
        let instances: Vec<_> = family.instances().collect();
        assert_eq!(instances, vec![base]);
    }
}
