//! Ready-made problem instances with machine-checkable expected facts:
//! the three-agent weight examples, the non-existence construction for
//! non-cumulatively-ordered weights, the manipulation construction for
//! profiles that are neither distinct nor essentially distinct, and the
//! base problems of the four piecewise reference mechanisms.

use std::collections::BTreeMap;

use crate::axioms::ProblemFamily;
use crate::mechanisms::{
    da_counterexample_problem, dispute_base_problem, mechanism_from_spec, nonsp_base_problem,
    wasteful_base_problem,
};
use crate::model::{classify_weights, AgentId, Matching, ObjectId, Preference, Problem, WeightProfile};
use crate::popularity::{w_popular_set, Weighting};
use crate::{Error, Limits, Result, Scalar};

/// A named problem with expected facts the test suite verifies against the
/// popularity and mechanism oracles.
#[derive(Clone, Debug)]
pub struct Fixture<W> {
    pub name: String,
    pub problem: Problem<W>,
    pub facts: Vec<ExpectedFact>,
}

/// A machine-checkable claim about a fixture problem.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ExpectedFact {
    /// No w-popular matching exists.
    WPopularSetEmpty,
    /// The w-popular set is exactly these matchings (canonical order).
    WPopularSetIsExactly(Vec<Matching>),
    /// The w-popular set has exactly this many elements.
    WPopularSetCount(usize),
    /// Every w-popular matching assigns `agent` to `object`.
    WPopularAllAssign { agent: AgentId, object: ObjectId },
    /// The named mechanism outputs exactly this matching here.
    MechanismOutputs { spec: String, expected: Matching },
    /// A w-popular matching exists, but the named mechanism's output is not
    /// one.
    MechanismMissesExistingPopular { spec: String },
}

/// Evaluates one expected fact against the oracles.
pub fn verify_fact<W: Scalar>(
    problem: &Problem<W>,
    fact: &ExpectedFact,
    limits: &Limits,
) -> Result<bool> {
    let no_da = |name: &str| -> Result<crate::mechanisms::PriorityStructure> {
        Err(Error::precondition(format!(
            "fixture facts do not reference priority files (got `{name}`)"
        )))
    };
    Ok(match fact {
        ExpectedFact::WPopularSetEmpty => {
            w_popular_set(problem, Weighting::Weighted, limits)?.is_empty()
        }
        ExpectedFact::WPopularSetIsExactly(expected) => {
            w_popular_set(problem, Weighting::Weighted, limits)? == *expected
        }
        ExpectedFact::WPopularSetCount(count) => {
            w_popular_set(problem, Weighting::Weighted, limits)?.len() == *count
        }
        ExpectedFact::WPopularAllAssign { agent, object } => {
            let set = w_popular_set(problem, Weighting::Weighted, limits)?;
            !set.is_empty() && set.iter().all(|m| m.assigned(agent) == Some(object))
        }
        ExpectedFact::MechanismOutputs { spec, expected } => {
            let mech = mechanism_from_spec::<W>(spec, &no_da)?;
            mech.evaluate(problem)? == *expected
        }
        ExpectedFact::MechanismMissesExistingPopular { spec } => {
            let mech = mechanism_from_spec::<W>(spec, &no_da)?;
            let outcome = mech.evaluate(problem)?;
            let set = w_popular_set(problem, Weighting::Weighted, limits)?;
            !set.is_empty() && !set.contains(&outcome)
        }
    })
}

/// Verifies every fact of a fixture, returning the first failing one.
pub fn verify_fixture<W: Scalar>(
    fixture: &Fixture<W>,
    limits: &Limits,
) -> Result<std::result::Result<(), ExpectedFact>> {
    for fact in &fixture.facts {
        if !verify_fact(&fixture.problem, fact, limits)? {
            return Ok(Err(fact.clone()));
        }
    }
    Ok(Ok(()))
}

fn common_three_agent_problem<W: Scalar>(weights: [i64; 3]) -> Problem<W> {
    let w = |v: i64| W::from_i64(v).expect("fixture weight fits the scalar type");
    Problem::from_parts(
        &[("i1", w(weights[0])), ("i2", w(weights[1])), ("i3", w(weights[2]))],
        &[("o1", 1), ("o2", 1), ("o3", 1)],
        &[
            ("i1", &["o1", "o2", "o3"]),
            ("i2", &["o1", "o2", "o3"]),
            ("i3", &["o1", "o2", "o3"]),
        ],
    )
    .expect("three-agent example is valid")
}

/// The two three-agent weight examples: under (6,3,2) the weight-ordered
/// dictatorship outcome is the unique w-popular matching; under (4,3,2) no
/// w-popular matching exists. The problems differ only in `i1`'s weight.
pub fn common_preference_examples<W: Scalar>() -> [Fixture<W>; 2] {
    let serial = Matching::from_strs(&[
        ("i1", Some("o1")),
        ("i2", Some("o2")),
        ("i3", Some("o3")),
    ]);
    [
        Fixture {
            name: "ex3-cumulative".into(),
            problem: common_three_agent_problem([6, 3, 2]),
            facts: vec![
                ExpectedFact::WPopularSetIsExactly(vec![serial.clone()]),
                ExpectedFact::MechanismOutputs {
                    spec: "sd:weights".into(),
                    expected: serial,
                },
            ],
        },
        Fixture {
            name: "ex3-noncumulative".into(),
            problem: common_three_agent_problem([4, 3, 2]),
            facts: vec![ExpectedFact::WPopularSetEmpty],
        },
    ]
}

/// For a weight profile that is not cumulatively ordered: unit capacities,
/// as many objects as agents, and identical preferences ranking the objects
/// in index order. No w-popular matching exists here.
pub fn nonexistence_instance<W: Scalar>(
    weights: &WeightProfile<W>,
) -> Result<Fixture<W>> {
    let class = classify_weights(weights)?;
    if class.cumulatively_ordered {
        return Err(Error::precondition(
            "weight profile is cumulatively ordered; the non-existence construction needs one that is not",
        ));
    }
    let n = weights.len();
    let objects: Vec<(ObjectId, u32)> = (1..=n)
        .map(|k| (ObjectId::new(format!("a{k}")), 1))
        .collect();
    let common =
        Preference::new(objects.iter().map(|(o, _)| o.clone()).collect()).expect("no duplicates");
    let problem = Problem::new(
        weights.iter().map(|(a, w)| (a.clone(), w.clone())).collect(),
        objects,
        weights
            .agents()
            .map(|a| (a.clone(), common.clone()))
            .collect(),
    )?;
    Ok(Fixture {
        name: "nonexistence".into(),
        problem,
        facts: vec![ExpectedFact::WPopularSetEmpty],
    })
}

/// The manipulation construction for a weight profile that is neither
/// distinct nor essentially distinct. Three relevant agents share the
/// preference `a1 ≻ a2 ≻ a3`; everyone else finds every object
/// unacceptable. At the base problem no w-popular matching exists; after
/// the designated misreporter restricts her report to `a2` alone, every
/// w-popular matching of the derived problem assigns her `a2`.
#[derive(Clone, Debug)]
pub struct ManipulationConstruction<W> {
    pub fixture: Fixture<W>,
    /// The three agents with acceptable objects, heaviest first.
    pub relevant: [AgentId; 3],
    /// The relevant agent whose misreport drives the argument (the first of
    /// the trio in canonical order).
    pub misreporter: AgentId,
    /// The object the misreporter insists on (`a2`).
    pub misreport_object: ObjectId,
    /// The base problem with the misreporter's preference replaced by
    /// `[a2]`.
    pub derived: Problem<W>,
    /// Expected size of the derived problem's w-popular set: two when the
    /// other two relevant agents have equal weight, one otherwise.
    pub derived_popular_count: usize,
}

impl<W: Scalar> ManipulationConstruction<W> {
    /// Facts expected of the derived problem.
    pub fn derived_facts(&self) -> Vec<ExpectedFact> {
        vec![
            ExpectedFact::WPopularSetCount(self.derived_popular_count),
            ExpectedFact::WPopularAllAssign {
                agent: self.misreporter.clone(),
                object: self.misreport_object.clone(),
            },
        ]
    }
}

pub fn manipulation_instance<W: Scalar>(
    weights: &WeightProfile<W>,
) -> Result<ManipulationConstruction<W>> {
    let class = classify_weights(weights)?;
    if class.distinct || class.essentially_distinct {
        return Err(Error::precondition(
            "weight profile is distinct or essentially distinct; the manipulation construction needs one that is neither",
        ));
    }
    let order = &class.canonical_order;
    let n = order.len();
    debug_assert!(n >= 3, "two-agent profiles are distinct or essentially distinct");
    let weight_at = |k: usize| weights.get(&order[k]).unwrap();

    // An internal tie (not confined to the last pair) pins the trio at the
    // tie; otherwise the tie is the last pair, whose combined weight the
    // third-from-last agent fails to cover, and the trio is the last three.
    let internal_tie = (0..n.saturating_sub(2)).find(|&k| weight_at(k) == weight_at(k + 1));
    let trio_start = internal_tie.unwrap_or(n - 3);
    let relevant = [
        order[trio_start].clone(),
        order[trio_start + 1].clone(),
        order[trio_start + 2].clone(),
    ];

    let m = n.max(3);
    let objects: Vec<(ObjectId, u32)> = (1..=m)
        .map(|k| (ObjectId::new(format!("a{k}")), 1))
        .collect();
    let trio_pref = Preference::from_strs(&["a1", "a2", "a3"]);
    let preferences: BTreeMap<AgentId, Preference> = weights
        .agents()
        .map(|a| {
            let pref = if relevant.contains(a) {
                trio_pref.clone()
            } else {
                Preference::empty()
            };
            (a.clone(), pref)
        })
        .collect();
    let problem = Problem::new(
        weights.iter().map(|(a, w)| (a.clone(), w.clone())).collect(),
        objects,
        preferences,
    )?;

    let misreporter = relevant[0].clone();
    let misreport_object = ObjectId::new("a2");
    let derived =
        problem.with_preference(&misreporter, Preference::only(misreport_object.clone()))?;
    let derived_popular_count =
        if weights.get(&relevant[1]) == weights.get(&relevant[2]) {
            2
        } else {
            1
        };

    Ok(ManipulationConstruction {
        fixture: Fixture {
            name: "manipulation".into(),
            problem,
            facts: vec![ExpectedFact::WPopularSetEmpty],
        },
        relevant,
        misreporter,
        misreport_object,
        derived,
        derived_popular_count,
    })
}

/// The base problems of the four piecewise reference mechanisms, with their
/// expected outputs and popularity facts.
pub fn independence_fixtures<W: Scalar>() -> Vec<Fixture<W>> {
    vec![
        Fixture {
            name: "thm2-dispute".into(),
            problem: dispute_base_problem(),
            facts: vec![
                ExpectedFact::WPopularSetEmpty,
                ExpectedFact::MechanismOutputs {
                    spec: "fixture:dispute".into(),
                    expected: Matching::from_strs(&[
                        ("i1", Some("a2")),
                        ("i2", Some("a1")),
                        ("i3", Some("a3")),
                        ("i4", Some("a4")),
                        ("i5", Some("a5")),
                        ("i6", Some("a6")),
                    ]),
                },
            ],
        },
        Fixture {
            name: "thm2-wasteful".into(),
            problem: wasteful_base_problem(),
            facts: vec![
                ExpectedFact::WPopularSetEmpty,
                ExpectedFact::MechanismOutputs {
                    spec: "fixture:wasteful".into(),
                    expected: Matching::from_strs(&[
                        ("i1", Some("a1")),
                        ("i2", Some("a2")),
                        ("i3", Some("a3")),
                        ("i4", None),
                    ]),
                },
            ],
        },
        Fixture {
            name: "thm2-nonsp".into(),
            problem: nonsp_base_problem(),
            facts: vec![
                ExpectedFact::WPopularSetEmpty,
                ExpectedFact::MechanismOutputs {
                    spec: "fixture:nonsp".into(),
                    expected: Matching::from_strs(&[
                        ("i1", Some("a2")),
                        ("i2", Some("a1")),
                        ("i3", Some("a3")),
                    ]),
                },
            ],
        },
        Fixture {
            name: "thm2-da".into(),
            problem: da_counterexample_problem(),
            facts: vec![ExpectedFact::MechanismMissesExistingPopular {
                spec: "fixture:da-counterexample".into(),
            }],
        },
    ]
}

/// All named static fixtures.
pub fn all_fixtures<W: Scalar>() -> Vec<Fixture<W>> {
    let mut out: Vec<Fixture<W>> = common_preference_examples().into();
    out.extend(independence_fixtures());
    out
}

/// The audit family of a piecewise reference mechanism, by short name
/// (`dispute`, `wasteful`, `nonsp`, `da-counterexample`).
///
/// The dispute family keeps `i1`, `i2` free over reports drawn from
/// `{nothing, only a1}` — the sub-universe on which the mechanism's claimed
/// axioms are separable; wider in-family universes would also break its
/// strategy-proofness through cross-branch deviations. The other three
/// families use the full preference universe of their objects.
pub fn independence_family<W: Scalar>(name: &str, limits: &Limits) -> Result<ProblemFamily<W>> {
    match name {
        "dispute" => ProblemFamily::new(
            "dispute-family",
            dispute_base_problem(),
            vec![AgentId::new("i1"), AgentId::new("i2")],
            vec![Preference::empty(), Preference::from_strs(&["a1"])],
        ),
        "wasteful" => {
            let base = wasteful_base_problem();
            let universe =
                crate::axioms::preference_universe(base.objects(), limits)?;
            ProblemFamily::new("wasteful-family", base, vec![AgentId::new("i4")], universe)
        }
        "nonsp" => ProblemFamily::full("nonsp-family", nonsp_base_problem(), limits),
        "da-counterexample" => ProblemFamily::full(
            "da-counterexample-family",
            da_counterexample_problem(),
            limits,
        ),
        other => Err(Error::invalid(
            "family",
            format!("unknown fixture family `{other}`"),
        )),
    }
}

/// The family around the manipulation construction: the three relevant
/// agents free over the full universe of the first three objects, everyone
/// else frozen at the all-unacceptable report.
pub fn manipulation_family<W: Scalar>(
    weights: &WeightProfile<W>,
    limits: &Limits,
) -> Result<ProblemFamily<W>> {
    let manipulation = manipulation_instance(weights)?;
    let first_three: Vec<ObjectId> = manipulation.fixture.problem.objects()[..3].to_vec();
    let universe = crate::axioms::preference_universe(&first_three, limits)?;
    ProblemFamily::new(
        "manipulation-family",
        manipulation.fixture.problem.clone(),
        manipulation.relevant.to_vec(),
        universe,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Weight;

    fn profile(weights: &[Weight]) -> WeightProfile<Weight> {
        WeightProfile::from_pairs(
            weights
                .iter()
                .enumerate()
                .map(|(i, w)| (AgentId::new(format!("i{}", i + 1)), *w)),
        )
        .unwrap()
    }

    #[test]
    fn weight_example_fixtures_verify() {
        for fixture in common_preference_examples::<Weight>() {
            assert_eq!(
                verify_fixture(&fixture, &Limits::default()).unwrap(),
                Ok(()),
                "fixture {} failed",
                fixture.name
            );
            assert!(fixture.problem.standing_assumptions());
        }
    }

    #[test]
    fn weight_example_problems_differ_only_in_the_first_weight() {
        let [cumulative, noncumulative] = common_preference_examples::<Weight>();
        assert_ne!(
            cumulative.problem.weight(&AgentId::new("i1")),
            noncumulative.problem.weight(&AgentId::new("i1"))
        );
        assert_eq!(
            cumulative.problem.preferences(),
            noncumulative.problem.preferences()
        );
    }

    #[test]
    fn nonexistence_rejects_cumulatively_ordered_profiles() {
        assert!(nonexistence_instance(&profile(&[6, 3, 2])).is_err());
    }

    #[test]
    fn nonexistence_instances_have_empty_popular_sets() {
        for weights in [vec![4, 3, 2], vec![1, 1, 1]] {
            let fixture = nonexistence_instance(&profile(&weights)).unwrap();
            assert_eq!(verify_fixture(&fixture, &Limits::default()).unwrap(), Ok(()));
        }
    }

    #[test]
    fn manipulation_rejects_distinct_and_essentially_distinct_profiles() {
        assert!(manipulation_instance(&profile(&[4, 3, 2])).is_err());
        assert!(manipulation_instance(&profile(&[5, 2, 1, 1])).is_err());
    }

    #[test]
    fn manipulation_equal_weights_select_the_internal_tie() {
        let manipulation = manipulation_instance(&profile(&[2, 2, 2])).unwrap();
        assert_eq!(manipulation.misreporter, AgentId::new("i1"));
        assert_eq!(manipulation.derived_popular_count, 2);
        assert_eq!(
            verify_fixture(&manipulation.fixture, &Limits::default()).unwrap(),
            Ok(())
        );
        for fact in manipulation.derived_facts() {
            assert!(
                verify_fact(&manipulation.derived, &fact, &Limits::default()).unwrap(),
                "derived fact {fact:?} failed"
            );
        }
    }

    #[test]
    fn manipulation_bottom_tie_uses_the_last_three_agents() {
        let manipulation = manipulation_instance(&profile(&[3, 2, 2])).unwrap();
        assert_eq!(
            manipulation.relevant,
            [AgentId::new("i1"), AgentId::new("i2"), AgentId::new("i3")]
        );
        assert_eq!(manipulation.derived_popular_count, 2);
        for fact in manipulation.derived_facts() {
            assert!(
                verify_fact(&manipulation.derived, &fact, &Limits::default()).unwrap(),
                "derived fact {fact:?} failed"
            );
        }
    }

    #[test]
    fn manipulation_unequal_others_give_a_unique_derived_popular_matching() {
        // Trio (3, 3, 1): the misreporter is the first tied agent, the other
        // two have unequal weights, so the derived set is a singleton.
        let manipulation = manipulation_instance(&profile(&[3, 3, 1])).unwrap();
        assert_eq!(manipulation.derived_popular_count, 1);
        assert_eq!(
            verify_fixture(&manipulation.fixture, &Limits::default()).unwrap(),
            Ok(())
        );
        for fact in manipulation.derived_facts() {
            assert!(
                verify_fact(&manipulation.derived, &fact, &Limits::default()).unwrap(),
                "derived fact {fact:?} failed"
            );
        }
    }

    #[test]
    fn manipulation_with_extra_agents_freezes_them_out() {
        // (9, 2, 2, 2): the internal tie starts at i2; i1 is irrelevant.
        let manipulation = manipulation_instance(&profile(&[9, 2, 2, 2])).unwrap();
        assert_eq!(
            manipulation.relevant,
            [AgentId::new("i2"), AgentId::new("i3"), AgentId::new("i4")]
        );
        assert!(manipulation
            .fixture
            .problem
            .preference(&AgentId::new("i1"))
            .unwrap()
            .is_empty());
        assert_eq!(
            verify_fixture(&manipulation.fixture, &Limits::default()).unwrap(),
            Ok(())
        );
    }

    #[test]
    fn independence_fixtures_verify() {
        for fixture in independence_fixtures::<Weight>() {
            assert_eq!(
                verify_fixture(&fixture, &Limits::default()).unwrap(),
                Ok(()),
                "fixture {} failed",
                fixture.name
            );
        }
    }

    #[test]
    fn independence_families_resolve() {
        let limits = Limits::default();
        for name in ["dispute", "wasteful", "nonsp", "da-counterexample"] {
            let family = independence_family::<Weight>(name, &limits).unwrap();
            assert!(family.instance_count() >= 1);
        }
        assert!(independence_family::<Weight>("unknown", &limits).is_err());
    }
}
