//! The four piecewise reference mechanisms. Each one recognises a specific
//! problem family — fixed agents, objects, capacities, and weights, with the
//! preferences of designated free agents left open — applies its special
//! rule there, and falls back to the weight-consistent serial dictatorship
//! everywhere else.
//!
//! Together they separate the four mechanism axioms: each fails exactly one
//! of { w-popularity, dispute-resolution preservation, non-wastefulness,
//! strategy-proofness } on its own family while satisfying the other three.

use crate::mechanisms::{
    deferred_acceptance, weight_consistent_sd, Mechanism, PriorityStructure,
};
use crate::model::{AgentId, Matching, Problem};
use crate::popularity::{w_popular_set, Weighting};
use crate::{Limits, Result, Scalar};

fn w<W: Scalar>(value: i64) -> W {
    W::from_i64(value).expect("fixture weight fits the scalar type")
}

/// Base problem of the dispute family: six agents with weights
/// 20, 10, 5, 4, 3, 2 over six unit-capacity objects; `i1`, `i2` want
/// `a1 ≻ a2`, everyone else ranks all six objects in index order.
pub fn dispute_base_problem<W: Scalar>() -> Problem<W> {
    let full: &[&str] = &["a1", "a2", "a3", "a4", "a5", "a6"];
    Problem::from_parts(
        &[
            ("i1", w(20)),
            ("i2", w(10)),
            ("i3", w(5)),
            ("i4", w(4)),
            ("i5", w(3)),
            ("i6", w(2)),
        ],
        &[
            ("a1", 1),
            ("a2", 1),
            ("a3", 1),
            ("a4", 1),
            ("a5", 1),
            ("a6", 1),
        ],
        &[
            ("i1", &["a1", "a2"]),
            ("i2", &["a1", "a2"]),
            ("i3", full),
            ("i4", full),
            ("i5", full),
            ("i6", full),
        ],
    )
    .expect("dispute base problem is valid")
}

/// Base problem of the wasteful family: weights 7, 5, 3, 1 over four
/// unit-capacity objects; `i1`–`i3` want `a1 ≻ a2 ≻ a3`, `i4` wants `a4`.
pub fn wasteful_base_problem<W: Scalar>() -> Problem<W> {
    Problem::from_parts(
        &[("i1", w(7)), ("i2", w(5)), ("i3", w(3)), ("i4", w(1))],
        &[("a1", 1), ("a2", 1), ("a3", 1), ("a4", 1)],
        &[
            ("i1", &["a1", "a2", "a3"]),
            ("i2", &["a1", "a2", "a3"]),
            ("i3", &["a1", "a2", "a3"]),
            ("i4", &["a4"]),
        ],
    )
    .expect("wasteful base problem is valid")
}

/// Base problem of the non-strategy-proof family: weights 4, 3, 2 over three
/// unit-capacity objects, all agents reporting `a1 ≻ a2 ≻ a3`.
pub fn nonsp_base_problem<W: Scalar>() -> Problem<W> {
    Problem::from_parts(
        &[("i1", w(4)), ("i2", w(3)), ("i3", w(2))],
        &[("a1", 1), ("a2", 1), ("a3", 1)],
        &[
            ("i1", &["a1", "a2", "a3"]),
            ("i2", &["a1", "a2", "a3"]),
            ("i3", &["a1", "a2", "a3"]),
        ],
    )
    .expect("nonsp base problem is valid")
}

/// Priority structure of the deferred-acceptance counterexample: scrambled,
/// deliberately inconsistent with the weights (`a1` ranks the lightest agent
/// first).
pub fn da_counterexample_priorities() -> PriorityStructure {
    PriorityStructure::from_strs(&[
        ("a1", &["i3", "i2", "i1"]),
        ("a2", &["i1", "i2", "i3"]),
        ("a3", &["i2", "i3", "i1"]),
    ])
}

/// A problem where deferred acceptance under
/// [`da_counterexample_priorities`] returns a matching that is not w-popular
/// although a w-popular matching exists: `i1` and `i3` both want only `a1`,
/// and `a1`'s priority favours the lighter `i3`. Constructed for this crate;
/// verified by the audit suite.
pub fn da_counterexample_problem<W: Scalar>() -> Problem<W> {
    Problem::from_parts(
        &[("i1", w(4)), ("i2", w(3)), ("i3", w(2))],
        &[("a1", 1), ("a2", 1), ("a3", 1)],
        &[("i1", &["a1"]), ("i2", &[]), ("i3", &["a1"])],
    )
    .expect("da counterexample problem is valid")
}

fn same_shape<W: Scalar>(problem: &Problem<W>, base: &Problem<W>) -> bool {
    let agents_match = {
        let mut a: Vec<&AgentId> = problem.agents().iter().collect();
        let mut b: Vec<&AgentId> = base.agents().iter().collect();
        a.sort();
        b.sort();
        a == b
    };
    agents_match
        && problem.capacities() == base.capacities()
        && problem
            .agents()
            .iter()
            .all(|a| problem.weight(a) == base.weight(a))
}

/// Do all agents outside `free` report exactly the base preferences?
fn frozen_match<W: Scalar>(problem: &Problem<W>, base: &Problem<W>, free: &[&str]) -> bool {
    base.agents().iter().all(|agent| {
        free.iter().any(|f| agent.as_str() == *f)
            || problem.preference(agent) == base.preference(agent)
    })
}

/// Fails exactly dispute-resolution preservation: on its family it runs the
/// serial dictatorship with `i2` promoted over `i1`, so `i2` beats `i1` to
/// `a1` inside the family, yet the fallback dictatorship hands `a1` to the
/// heavier `i1` in every reduced two-agent problem.
pub struct DisputeFixture;

impl<W: Scalar> Mechanism<W> for DisputeFixture {
    fn name(&self) -> String {
        "fixture:dispute".into()
    }

    fn evaluate(&self, problem: &Problem<W>) -> Result<Matching> {
        let base = dispute_base_problem::<W>();
        if same_shape(problem, &base) && frozen_match(problem, &base, &["i1", "i2"]) {
            let order: Vec<AgentId> = ["i2", "i1", "i3", "i4", "i5", "i6"]
                .iter()
                .map(AgentId::new)
                .collect();
            return crate::mechanisms::serial_dictatorship(problem, &order);
        }
        weight_consistent_sd(problem)
    }
}

/// Fails exactly non-wastefulness: on its family, whenever no w-popular
/// matching exists, every agent except `i4` keeps her dictatorship
/// assignment and `i4` is left unassigned.
#[derive(Default)]
pub struct WastefulFixture {
    pub limits: Limits,
}


impl<W: Scalar> Mechanism<W> for WastefulFixture {
    fn name(&self) -> String {
        "fixture:wasteful".into()
    }

    fn evaluate(&self, problem: &Problem<W>) -> Result<Matching> {
        let base = wasteful_base_problem::<W>();
        if same_shape(problem, &base) && frozen_match(problem, &base, &["i4"]) {
            let popular = w_popular_set(problem, Weighting::Weighted, &self.limits)?;
            if popular.is_empty() {
                let sd = weight_consistent_sd(problem)?;
                let i4 = AgentId::new("i4");
                return Ok(Matching::from_pairs(sd.iter().map(|(agent, assigned)| {
                    let keep = if *agent == i4 {
                        None
                    } else {
                        assigned.cloned()
                    };
                    (agent.clone(), keep)
                })));
            }
        }
        weight_consistent_sd(problem)
    }
}

/// Fails exactly strategy-proofness: at its single special profile it swaps
/// the top two dictatorship assignments, so `i1` can recover `a1` by
/// misreporting.
pub struct NonSpFixture;

impl<W: Scalar> Mechanism<W> for NonSpFixture {
    fn name(&self) -> String {
        "fixture:nonsp".into()
    }

    fn evaluate(&self, problem: &Problem<W>) -> Result<Matching> {
        if *problem == nonsp_base_problem::<W>() {
            return Ok(Matching::from_strs(&[
                ("i1", Some("a2")),
                ("i2", Some("a1")),
                ("i3", Some("a3")),
            ]));
        }
        weight_consistent_sd(problem)
    }
}

/// Fails exactly w-popularity: deferred acceptance under a fixed priority
/// structure that ignores the weights. Applies to any problem over the
/// fixture's agents and objects with unit capacities.
pub struct DaCounterexampleFixture;

impl<W: Scalar> Mechanism<W> for DaCounterexampleFixture {
    fn name(&self) -> String {
        "fixture:da-counterexample".into()
    }

    fn evaluate(&self, problem: &Problem<W>) -> Result<Matching> {
        let shape = da_counterexample_problem::<W>();
        let ids_match = {
            let mut a: Vec<&AgentId> = problem.agents().iter().collect();
            let mut b: Vec<&AgentId> = shape.agents().iter().collect();
            a.sort();
            b.sort();
            a == b && problem.capacities() == shape.capacities()
        };
        if ids_match {
            return deferred_acceptance(problem, &da_counterexample_priorities());
        }
        weight_consistent_sd(problem)
    }
}

/// The four piecewise reference mechanisms.
pub fn fixture_mechanisms<W: Scalar>() -> Vec<Box<dyn Mechanism<W>>> {
    vec![
        Box::new(DaCounterexampleFixture),
        Box::new(DisputeFixture),
        Box::new(WastefulFixture::default()),
        Box::new(NonSpFixture),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ObjectId, Preference};
    use crate::Weight;

    #[test]
    fn dispute_fixture_promotes_i2_on_its_family() {
        let base = dispute_base_problem::<Weight>();
        let m = DisputeFixture.evaluate(&base).unwrap();
        assert_eq!(m.assigned(&AgentId::new("i2")), Some(&ObjectId::new("a1")));
        assert_eq!(m.assigned(&AgentId::new("i1")), Some(&ObjectId::new("a2")));
    }

    #[test]
    fn dispute_fixture_family_allows_any_i1_i2_reports() {
        let base = dispute_base_problem::<Weight>();
        let modified = base
            .with_preference(&AgentId::new("i1"), Preference::from_strs(&["a1"]))
            .unwrap();
        let m = DisputeFixture.evaluate(&modified).unwrap();
        // Still the promoted ordering: i2 takes a1 first.
        assert_eq!(m.assigned(&AgentId::new("i2")), Some(&ObjectId::new("a1")));
        assert_eq!(m.assigned(&AgentId::new("i1")), None);
    }

    #[test]
    fn dispute_fixture_falls_back_off_family() {
        let base = dispute_base_problem::<Weight>();
        let off = base
            .with_preference(&AgentId::new("i3"), Preference::from_strs(&["a1"]))
            .unwrap();
        let m = DisputeFixture.evaluate(&off).unwrap();
        assert_eq!(m, weight_consistent_sd(&off).unwrap());
        assert_eq!(m.assigned(&AgentId::new("i1")), Some(&ObjectId::new("a1")));
    }

    #[test]
    fn wasteful_fixture_leaves_i4_unassigned_at_its_base() {
        let base = wasteful_base_problem::<Weight>();
        let m = WastefulFixture::default().evaluate(&base).unwrap();
        assert_eq!(
            m,
            Matching::from_strs(&[
                ("i1", Some("a1")),
                ("i2", Some("a2")),
                ("i3", Some("a3")),
                ("i4", None),
            ])
        );
    }

    #[test]
    fn nonsp_fixture_swaps_the_top_pair_at_its_base() {
        let base = nonsp_base_problem::<Weight>();
        let m = NonSpFixture.evaluate(&base).unwrap();
        assert_eq!(
            m,
            Matching::from_strs(&[("i1", Some("a2")), ("i2", Some("a1")), ("i3", Some("a3"))])
        );
    }

    #[test]
    fn nonsp_fixture_is_the_dictatorship_elsewhere() {
        let base = nonsp_base_problem::<Weight>();
        let other = base
            .with_preference(&AgentId::new("i1"), Preference::from_strs(&["a1"]))
            .unwrap();
        let m = NonSpFixture.evaluate(&other).unwrap();
        assert_eq!(m, weight_consistent_sd(&other).unwrap());
        assert_eq!(m.assigned(&AgentId::new("i1")), Some(&ObjectId::new("a1")));
    }

    #[test]
    fn da_counterexample_misses_the_popular_matching() {
        let p = da_counterexample_problem::<Weight>();
        let m = DaCounterexampleFixture.evaluate(&p).unwrap();
        assert_eq!(m.assigned(&AgentId::new("i3")), Some(&ObjectId::new("a1")));
        let set = w_popular_set(&p, Weighting::Weighted, &Limits::default()).unwrap();
        assert!(!set.is_empty());
        assert!(!set.contains(&m));
    }
}
