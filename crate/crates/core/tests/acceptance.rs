//! Acceptance suite. Each test covers one numbered criterion, prints one
//! pass/fail line, and enforces its time budget. Run with
//! `cargo test -p popmatch-core --test acceptance -- --nocapture`.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use popmatch_core::axioms::{
    check_non_wastefulness, check_preserves_dispute_resolutions, check_strategy_proofness,
    check_w_popularity, replay, AuditReport, Axiom, ProblemFamily, ReplayOutcome,
};
use popmatch_core::constructions::{
    independence_family, independence_fixtures, nonexistence_instance, common_preference_examples,
    manipulation_family, manipulation_instance, verify_fixture,
};
use popmatch_core::equilibrium::{
    check_equilibrium_outcome_uniqueness, check_w_popular_in_equilibrium,
};
use popmatch_core::mechanisms::{
    mechanism_from_spec, registry, Mechanism, SdFixed, SdWeights,
};
use popmatch_core::model::{
    classify_weights, enumerate_matchings, AgentId, Matching, ObjectId, Preference, Problem,
    WeightProfile,
};
use popmatch_core::popularity::{
    is_pareto_efficient, is_w_popular, popularity_margin, w_popular_set, Weighting,
};
use popmatch_core::{Limits, Weight};

fn finish(criterion: u8, description: &str, start: Instant, budget: Duration) {
    let elapsed = start.elapsed();
    println!("[acceptance] criterion {criterion}: PASS — {description} ({elapsed:.2?})");
    assert!(
        elapsed <= budget,
        "criterion {criterion} exceeded its {budget:?} budget: {elapsed:?}"
    );
}

fn weight_profile(weights: &[Weight]) -> WeightProfile<Weight> {
    WeightProfile::from_pairs(
        weights
            .iter()
            .enumerate()
            .map(|(i, w)| (AgentId::new(format!("i{}", i + 1)), *w)),
    )
    .unwrap()
}

fn random_preference(rng: &mut ChaCha8Rng, objects: &[ObjectId]) -> Preference {
    let mut subset: Vec<ObjectId> = objects
        .iter()
        .filter(|_| rng.gen_bool(0.75))
        .cloned()
        .collect();
    subset.shuffle(rng);
    Preference::new(subset).unwrap()
}

/// Unit-capacity problem with as many objects as weights and random
/// preferences.
fn random_problem(rng: &mut ChaCha8Rng, weights: &[Weight]) -> Problem<Weight> {
    let n = weights.len();
    let agents: Vec<(AgentId, Weight)> = weights
        .iter()
        .enumerate()
        .map(|(i, w)| (AgentId::new(format!("i{}", i + 1)), *w))
        .collect();
    let objects: Vec<(ObjectId, u32)> = (1..=n)
        .map(|k| (ObjectId::new(format!("a{k}")), 1))
        .collect();
    let object_ids: Vec<ObjectId> = objects.iter().map(|(o, _)| o.clone()).collect();
    let prefs: BTreeMap<AgentId, Preference> = agents
        .iter()
        .map(|(a, _)| (a.clone(), random_preference(rng, &object_ids)))
        .collect();
    Problem::new(agents, objects, prefs).unwrap()
}

/// Weights satisfying the cumulative condition by construction: each weight
/// is at least the sum of all later ones.
fn random_cumulative_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<Weight> {
    let mut reversed = Vec::with_capacity(n);
    let mut suffix: Weight = 0;
    for _ in 0..n {
        let w = (suffix + rng.gen_range(0..=2)).max(1);
        reversed.push(w);
        suffix += w;
    }
    reversed.reverse();
    reversed
}

fn random_noncumulative_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<Weight> {
    loop {
        let weights: Vec<Weight> = (0..n).map(|_| rng.gen_range(1..=6)).collect();
        let class = classify_weights(&weight_profile(&weights)).unwrap();
        if !class.cumulatively_ordered {
            return weights;
        }
    }
}

#[test]
fn criterion_1_weight_examples() {
    let start = Instant::now();
    let limits = Limits::default();
    let [cumulative, noncumulative] = common_preference_examples::<Weight>();

    let set = w_popular_set(&cumulative.problem, Weighting::Weighted, &limits).unwrap();
    let sd = SdWeights.evaluate(&cumulative.problem).unwrap();
    assert_eq!(set, vec![sd], "criterion 1: (6,3,2) must admit exactly the weight-ordered outcome");

    let set = w_popular_set(&noncumulative.problem, Weighting::Weighted, &limits).unwrap();
    assert!(set.is_empty(), "criterion 1: (4,3,2) must admit no w-popular matching");

    finish(
        1,
        "three-agent weight examples reproduce exactly",
        start,
        Duration::from_secs(1),
    );
}

#[test]
fn criterion_2_existence_suite() {
    let start = Instant::now();
    let limits = Limits::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);

    for trial in 0..200 {
        let n = if trial % 2 == 0 { 3 } else { 4 };
        let weights = random_cumulative_weights(&mut rng, n);
        let problem = random_problem(&mut rng, &weights);
        let outcome = SdWeights.evaluate(&problem).unwrap();
        let verdict = is_w_popular(&problem, &outcome, Weighting::Weighted, &limits).unwrap();
        assert!(
            verdict.holds(),
            "criterion 2: weight-ordered dictatorship not w-popular under cumulative weights {weights:?}"
        );
    }

    for trial in 0..200 {
        let n = if trial % 2 == 0 { 3 } else { 4 };
        let weights = random_noncumulative_weights(&mut rng, n);
        let fixture = nonexistence_instance(&weight_profile(&weights)).unwrap();
        let set = w_popular_set(&fixture.problem, Weighting::Weighted, &limits).unwrap();
        assert!(
            set.is_empty(),
            "criterion 2: non-existence construction admitted a w-popular matching for {weights:?}"
        );
    }

    finish(
        2,
        "400 random existence/non-existence instances behave as constructed",
        start,
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_3_efficiency_and_classification() {
    let start = Instant::now();
    let limits = Limits::default();
    // Same seed as criterion 2: the identical instance corpus.
    let mut rng = ChaCha8Rng::seed_from_u64(2);

    for trial in 0..200 {
        let n = if trial % 2 == 0 { 3 } else { 4 };
        let weights = random_cumulative_weights(&mut rng, n);
        let problem = random_problem(&mut rng, &weights);

        let class = classify_weights(&weight_profile(&weights)).unwrap();
        assert!(
            class.distinct || class.essentially_distinct,
            "criterion 3: cumulatively ordered profile {weights:?} is neither distinct nor essentially distinct"
        );

        for member in w_popular_set(&problem, Weighting::Weighted, &limits).unwrap() {
            assert!(
                is_pareto_efficient(&problem, &member, &limits).unwrap().holds(),
                "criterion 3: w-popular matching is not Pareto efficient on {weights:?}"
            );
        }
    }

    for trial in 0..200 {
        let n = if trial % 2 == 0 { 3 } else { 4 };
        let weights = random_noncumulative_weights(&mut rng, n);
        let fixture = nonexistence_instance(&weight_profile(&weights)).unwrap();
        for member in w_popular_set(&fixture.problem, Weighting::Weighted, &limits).unwrap() {
            assert!(
                is_pareto_efficient(&fixture.problem, &member, &limits)
                    .unwrap()
                    .holds(),
                "criterion 3: w-popular matching is not Pareto efficient"
            );
        }
    }

    finish(
        3,
        "w-popular members are Pareto efficient; cumulative profiles classify as expected",
        start,
        Duration::from_secs(90),
    );
}

/// The audit family for the four-agent essentially distinct profile: all
/// four agents free, reports ranging over the universe of the first three
/// objects (the fourth stays in the problem so objects do not outnumber
/// agents the wrong way round; misreport searches still use all four).
fn essentially_distinct_family(limits: &Limits) -> ProblemFamily<Weight> {
    let base: Problem<Weight> = Problem::from_parts(
        &[("i1", 5), ("i2", 2), ("i3", 1), ("i4", 1)],
        &[("a1", 1), ("a2", 1), ("a3", 1), ("a4", 1)],
        &[("i1", &[]), ("i2", &[]), ("i3", &[]), ("i4", &[])],
    )
    .unwrap();
    let first_three: Vec<ObjectId> = base.objects()[..3].to_vec();
    let universe = popmatch_core::axioms::preference_universe(&first_three, limits).unwrap();
    ProblemFamily::new(
        "essentially-distinct-5211",
        base,
        vec![
            AgentId::new("i1"),
            AgentId::new("i2"),
            AgentId::new("i3"),
            AgentId::new("i4"),
        ],
        universe,
    )
    .unwrap()
}

fn distinct_432_family(limits: &Limits) -> ProblemFamily<Weight> {
    let base: Problem<Weight> = Problem::from_parts(
        &[("i1", 4), ("i2", 3), ("i3", 2)],
        &[("a1", 1), ("a2", 1), ("a3", 1)],
        &[("i1", &[]), ("i2", &[]), ("i3", &[])],
    )
    .unwrap();
    ProblemFamily::full("distinct-432", base, limits).unwrap()
}

#[test]
fn criterion_4_dictatorship_characterization() {
    let start = Instant::now();
    let limits = Limits::default();

    // (ii) Exhaustive audits for a distinct and an essentially distinct
    // profile.
    for family in [distinct_432_family(&limits), essentially_distinct_family(&limits)] {
        let sp = check_strategy_proofness(&SdWeights, &family, &limits).unwrap();
        assert!(
            sp.holds(),
            "criterion 4: sd:weights failed strategy-proofness on {}",
            family.name()
        );
        let wp = check_w_popularity(&SdWeights, &family, &limits).unwrap();
        assert!(
            wp.holds(),
            "criterion 4: sd:weights failed w-popularity on {}",
            family.name()
        );
    }

    // (iii) Popular sets are dictatorship outcomes, with the size bounds per
    // weight class.
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for trial in 0..200 {
        let n = if trial % 2 == 0 { 3 } else { 4 };
        let weights: Vec<Weight> = (0..n).map(|_| rng.gen_range(1..=9)).collect();
        let problem = random_problem(&mut rng, &weights);
        let set = w_popular_set(&problem, Weighting::Weighted, &limits).unwrap();
        let outcomes =
            popmatch_core::mechanisms::sd_consistent_outcomes(&problem, &limits).unwrap();
        for member in &set {
            assert!(
                outcomes.contains(member),
                "criterion 4: w-popular matching is not a weight-consistent dictatorship outcome ({weights:?})"
            );
        }
        let class = classify_weights(&weight_profile(&weights)).unwrap();
        if class.distinct {
            assert!(set.len() <= 1, "criterion 4: more than one w-popular matching under distinct weights {weights:?}");
        }
        if class.essentially_distinct {
            assert!(set.len() <= 2, "criterion 4: more than two w-popular matchings under essentially distinct weights {weights:?}");
        }
    }

    finish(
        4,
        "weight-consistent dictatorships are strategy-proof, w-popular, and exhaust the popular sets",
        start,
        Duration::from_secs(300),
    );
}

#[test]
fn criterion_5_manipulation_families() {
    let start = Instant::now();
    let limits = Limits::default();

    for weights in [vec![2, 2, 2], vec![3, 2, 2]] {
        let profile = weight_profile(&weights);
        let manipulation = manipulation_instance(&profile).unwrap();
        assert_eq!(
            verify_fixture(&manipulation.fixture, &limits).unwrap(),
            Ok(()),
            "criterion 5: base construction facts failed for {weights:?}"
        );
        for fact in manipulation.derived_facts() {
            assert!(
                popmatch_core::constructions::verify_fact(&manipulation.derived, &fact, &limits)
                    .unwrap(),
                "criterion 5: derived fact {fact:?} failed for {weights:?}"
            );
        }

        // Every shipped mechanism that is w-popular on the family must be
        // manipulable there.
        let family = manipulation_family(&profile, &limits).unwrap();
        let mut popular_mechanisms = 0;
        for mechanism in registry::<Weight>() {
            let wp = check_w_popularity(mechanism.as_ref(), &family, &limits).unwrap();
            if wp.holds() {
                popular_mechanisms += 1;
                let sp =
                    check_strategy_proofness(mechanism.as_ref(), &family, &limits).unwrap();
                assert!(
                    !sp.holds(),
                    "criterion 5: {} is w-popular yet strategy-proof on the {weights:?} family",
                    mechanism.name()
                );
            }
        }
        assert!(
            popular_mechanisms >= 1,
            "criterion 5: no shipped mechanism is w-popular on the {weights:?} family; the implication was vacuous"
        );
    }

    finish(
        5,
        "no shipped w-popular mechanism is strategy-proof under tied weights",
        start,
        Duration::from_secs(120),
    );
}

#[test]
fn criterion_6_axiom_independence() {
    let start = Instant::now();
    let limits = Limits::default().with_universe_objects(6);

    // (mechanism spec, family, axiom it must fail).
    let table = [
        ("fixture:dispute", "dispute", Axiom::PreservesDisputeResolutions),
        ("fixture:wasteful", "wasteful", Axiom::NonWastefulness),
        ("fixture:nonsp", "nonsp", Axiom::StrategyProofness),
        ("fixture:da-counterexample", "da-counterexample", Axiom::WPopularity),
    ];

    let no_da = |name: &str| -> popmatch_core::Result<popmatch_core::mechanisms::PriorityStructure> {
        panic!("no priority files in the acceptance run: {name}")
    };

    type Check = fn(
        &dyn Mechanism<Weight>,
        &ProblemFamily<Weight>,
        &Limits,
    ) -> popmatch_core::Result<AuditReport<Weight>>;
    let checks: [(Axiom, Check); 4] = [
        (Axiom::StrategyProofness, |m, f, l| {
            check_strategy_proofness(m, f, l)
        }),
        (Axiom::WPopularity, |m, f, l| check_w_popularity(m, f, l)),
        (Axiom::NonWastefulness, |m, f, l| {
            check_non_wastefulness(m, f, l)
        }),
        (Axiom::PreservesDisputeResolutions, |m, f, l| {
            check_preserves_dispute_resolutions(m, f, l)
        }),
    ];

    for (spec, family_name, designated) in table {
        let mechanism = mechanism_from_spec::<Weight>(spec, &no_da).unwrap();
        let family = independence_family::<Weight>(family_name, &limits).unwrap();
        for (axiom, run) in checks {
            let report = run(mechanism.as_ref(), &family, &limits).unwrap();
            if axiom == designated {
                assert!(
                    !report.holds(),
                    "criterion 6: {spec} unexpectedly satisfies {axiom} on its family"
                );
            } else {
                assert!(
                    report.holds(),
                    "criterion 6: {spec} unexpectedly violates {axiom} on its family"
                );
            }

            let sd_report = run(&SdWeights, &family, &limits).unwrap();
            assert!(
                sd_report.holds(),
                "criterion 6: sd:weights violates {axiom} on the {family_name} family"
            );
        }
    }

    finish(
        6,
        "each reference mechanism fails exactly its designated axiom; the dictatorship passes all four",
        start,
        Duration::from_secs(300),
    );
}

#[test]
fn criterion_7_equilibrium_suite() {
    let start = Instant::now();
    let limits = Limits::default();

    // The distinct-weights family instances (n = 3 games fit the profile
    // cap; the four-agent family of criterion 4 does not and is excluded).
    let family = distinct_432_family(&limits);
    for problem in family.instances() {
        let report = check_w_popular_in_equilibrium(&SdWeights, &problem, &limits).unwrap();
        assert!(report.holds(), "criterion 7: sd:weights missed a popular matching in equilibrium");
        let uniqueness =
            check_equilibrium_outcome_uniqueness(&SdWeights, &problem, &limits).unwrap();
        assert!(
            !matches!(uniqueness, popmatch_core::equilibrium::EquilibriumUniqueness::Multiple(_)),
            "criterion 7: sd:weights produced multiple equilibrium outcomes"
        );
    }

    // Criterion 4(iii) instances with three agents. Equilibrium outcomes of
    // a fixed-order dictatorship are unique regardless of the weights;
    // w-popularity of those outcomes is guaranteed only for distinct or
    // essentially distinct profiles.
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for trial in 0..200 {
        let n = if trial % 2 == 0 { 3 } else { 4 };
        let weights: Vec<Weight> = (0..n).map(|_| rng.gen_range(1..=9)).collect();
        let problem = random_problem(&mut rng, &weights);
        if n > 3 {
            continue;
        }
        let uniqueness =
            check_equilibrium_outcome_uniqueness(&SdWeights, &problem, &limits).unwrap();
        assert!(!matches!(
            uniqueness,
            popmatch_core::equilibrium::EquilibriumUniqueness::Multiple(_)
        ));
        let class = classify_weights(&weight_profile(&weights)).unwrap();
        if class.distinct || class.essentially_distinct {
            let report = check_w_popular_in_equilibrium(&SdWeights, &problem, &limits).unwrap();
            assert!(report.holds());
        }
    }

    // The equal-weights witness: the fixed-order dictatorship reaches a
    // truthful equilibrium outcome that is beaten although w-popular
    // matchings exist. The margin is confirmed by an independent oracle.
    let problem: Problem<Weight> = Problem::from_parts(
        &[("i1", 2), ("i2", 2), ("i3", 2)],
        &[("a1", 1), ("a2", 1), ("a3", 1)],
        &[
            ("i1", &["a1", "a2", "a3"]),
            ("i2", &["a1", "a2", "a3"]),
            ("i3", &["a2", "a3"]),
        ],
    )
    .unwrap();
    let mechanism = SdFixed::from_strs(&["i1", "i2", "i3"]);
    let report = check_w_popular_in_equilibrium(&mechanism, &problem, &limits).unwrap();
    let Some(popmatch_core::axioms::AuditWitness::WPopularInEquilibrium {
        outcome,
        challenger,
        margin,
        ..
    }) = report.witness()
    else {
        panic!("criterion 7: expected an equilibrium counterexample for the equal-weights witness");
    };
    assert_eq!(independent_margin(&problem, challenger, outcome), 2);
    assert_eq!(margin.to_owned(), 2);

    let expected_popular = Matching::from_strs(&[
        ("i1", Some("a1")),
        ("i3", Some("a2")),
        ("i2", Some("a3")),
    ]);
    assert!(
        is_w_popular(&problem, &expected_popular, Weighting::Weighted, &limits)
            .unwrap()
            .holds(),
        "criterion 7: the documented popular matching is not w-popular"
    );

    finish(
        7,
        "equilibrium outcomes of weight-consistent dictatorships are unique and popular; the equal-weights witness fails",
        start,
        Duration::from_secs(120),
    );
}

/// Margin oracle independent of the library path: counts weights directly
/// off the preference lists.
fn independent_margin(problem: &Problem<Weight>, a: &Matching, b: &Matching) -> i64 {
    let mut total = 0i64;
    for agent in problem.agents() {
        let ranked = problem.preference(agent).unwrap().ranked();
        let rank = |assignment: Option<&ObjectId>| -> i64 {
            match assignment {
                None => ranked.len() as i64,
                Some(obj) => ranked
                    .iter()
                    .position(|o| o == obj)
                    .map(|r| r as i64)
                    .unwrap_or(i64::MAX),
            }
        };
        let ra = rank(a.assigned(agent));
        let rb = rank(b.assigned(agent));
        let w = *problem.weight(agent).unwrap();
        if ra < rb {
            total += w;
        } else if rb < ra {
            total -= w;
        }
    }
    total
}

/// Counting oracle independent of the enumeration path: straightforward
/// recursion over agents and remaining capacities.
fn recursive_count(problem: &Problem<Weight>) -> u64 {
    fn go(
        problem: &Problem<Weight>,
        agent_index: usize,
        remaining: &mut BTreeMap<ObjectId, u32>,
    ) -> u64 {
        if agent_index == problem.agent_count() {
            return 1;
        }
        let mut total = go(problem, agent_index + 1, remaining);
        for object in problem.objects().to_vec() {
            if remaining[&object] > 0 {
                *remaining.get_mut(&object).unwrap() -= 1;
                total += go(problem, agent_index + 1, remaining);
                *remaining.get_mut(&object).unwrap() += 1;
            }
        }
        total
    }
    let mut remaining = problem.capacities().clone();
    go(problem, 0, &mut remaining)
}

#[test]
fn criterion_8_oracle_cross_checks() {
    let start = Instant::now();
    let limits = Limits::default();
    let mut rng = ChaCha8Rng::seed_from_u64(8);

    // Enumeration counts match the independent recursive counter.
    let mut counted = 0;
    for _ in 0..60 {
        let n = rng.gen_range(1..=4);
        let m = rng.gen_range(1..=4);
        let agents: Vec<(AgentId, Weight)> = (1..=n)
            .map(|k| (AgentId::new(format!("i{k}")), rng.gen_range(1..=5)))
            .collect();
        let objects: Vec<(ObjectId, u32)> = (1..=m)
            .map(|k| (ObjectId::new(format!("a{k}")), rng.gen_range(1..=2)))
            .collect();
        let object_ids: Vec<ObjectId> = objects.iter().map(|(o, _)| o.clone()).collect();
        let prefs: BTreeMap<AgentId, Preference> = agents
            .iter()
            .map(|(a, _)| (a.clone(), random_preference(&mut rng, &object_ids)))
            .collect();
        let problem = Problem::new(agents, objects, prefs).unwrap();

        let enumerated = enumerate_matchings(&problem, &limits)
            .collect::<popmatch_core::Result<Vec<_>>>()
            .unwrap();
        assert_eq!(
            enumerated.len() as u64,
            recursive_count(&problem),
            "criterion 8: enumeration count disagrees with the recursive oracle"
        );
        counted += 1;
    }
    assert_eq!(counted, 60);

    // Margin antisymmetry over 10,000 random matching pairs.
    let mut pairs = 0;
    while pairs < 10_000 {
        let n = rng.gen_range(2..=4);
        let weights: Vec<Weight> = (0..n).map(|_| rng.gen_range(1..=9)).collect();
        let problem = random_problem(&mut rng, &weights);
        let all = enumerate_matchings(&problem, &limits)
            .collect::<popmatch_core::Result<Vec<_>>>()
            .unwrap();
        for _ in 0..500 {
            let a = &all[rng.gen_range(0..all.len())];
            let b = &all[rng.gen_range(0..all.len())];
            let ab = popularity_margin(&problem, a, b, Weighting::Weighted).unwrap();
            let ba = popularity_margin(&problem, b, a, Weighting::Weighted).unwrap();
            assert_eq!(ab + ba, 0, "criterion 8: margins are not antisymmetric");
            pairs += 1;
        }
    }

    // Every audit witness replays to the identical verdict after a JSON
    // round trip.
    let no_da = |name: &str| -> popmatch_core::Result<popmatch_core::mechanisms::PriorityStructure> {
        panic!("no priority files in the acceptance run: {name}")
    };
    let wide = limits.with_universe_objects(6);
    let mut replayed = 0;
    let reports: Vec<AuditReport<Weight>> = vec![
        check_strategy_proofness(
            mechanism_from_spec::<Weight>("fixture:nonsp", &no_da).unwrap().as_ref(),
            &independence_family("nonsp", &wide).unwrap(),
            &wide,
        )
        .unwrap(),
        check_non_wastefulness(
            mechanism_from_spec::<Weight>("fixture:wasteful", &no_da).unwrap().as_ref(),
            &independence_family("wasteful", &wide).unwrap(),
            &wide,
        )
        .unwrap(),
        check_w_popularity(
            mechanism_from_spec::<Weight>("fixture:da-counterexample", &no_da)
                .unwrap()
                .as_ref(),
            &independence_family("da-counterexample", &wide).unwrap(),
            &wide,
        )
        .unwrap(),
        check_preserves_dispute_resolutions(
            mechanism_from_spec::<Weight>("fixture:dispute", &no_da).unwrap().as_ref(),
            &independence_family("dispute", &wide).unwrap(),
            &wide,
        )
        .unwrap(),
    ];
    for report in reports {
        assert!(!report.holds(), "criterion 8: expected counterexample reports to replay");
        let round_tripped = AuditReport::<Weight>::from_json(&report.to_json()).unwrap();
        assert_eq!(round_tripped, report, "criterion 8: report JSON round trip changed the report");
        let mechanism = mechanism_from_spec::<Weight>(&report.mechanism, &no_da).unwrap();
        let outcome = replay(&round_tripped, mechanism.as_ref(), &wide).unwrap();
        assert_eq!(
            outcome,
            ReplayOutcome::Confirmed,
            "criterion 8: witness for {} did not replay",
            report.axiom
        );
        replayed += 1;
    }
    assert_eq!(replayed, 4);

    // Fixture corpus sanity: every expected fact holds.
    for fixture in common_preference_examples::<Weight>()
        .into_iter()
        .chain(independence_fixtures::<Weight>())
    {
        assert_eq!(
            verify_fixture(&fixture, &wide).unwrap(),
            Ok(()),
            "criterion 8: fixture {} facts failed",
            fixture.name
        );
    }

    finish(
        8,
        "enumeration counts, margin antisymmetry, and witness replays all agree with independent oracles",
        start,
        Duration::from_secs(120),
    );
}
