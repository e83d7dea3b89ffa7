//! The audit procedures. Each one scans a problem family in canonical
//! instance order and stops at the first counterexample, so reports are
//! deterministic for a fixed family.

use std::collections::BTreeMap;

use crate::axioms::report::splits_object_and_outside;
use crate::axioms::{
    preference_universe, AuditReport, AuditVerdict, AuditWitness, Axiom, ProblemFamily,
};
use crate::mechanisms::Mechanism;
use crate::model::{Matching, ObjectId, Preference, Problem};
use crate::popularity::{
    is_non_wasteful, is_pareto_efficient, w_popular_set, Verdict, Weighting,
};
use crate::{Limits, Result, Scalar};

fn report<W: Scalar>(
    axiom: Axiom,
    mechanism: &dyn Mechanism<W>,
    family: &ProblemFamily<W>,
    instances_checked: u64,
    notes: Vec<String>,
    verdict: AuditVerdict<W>,
) -> AuditReport<W> {
    AuditReport {
        axiom,
        mechanism: mechanism.name(),
        family: family.name().to_string(),
        instances_checked,
        notes,
        verdict,
    }
}

/// Searches every (instance, agent, misreport) triple for a strictly
/// profitable deviation. Misreports range over the full preference universe
/// of the problem's objects, minus the truthful report.
pub fn check_strategy_proofness<W: Scalar>(
    mechanism: &dyn Mechanism<W>,
    family: &ProblemFamily<W>,
    limits: &Limits,
) -> Result<AuditReport<W>> {
    family.ensure_within(limits)?;
    let misreports = preference_universe(family.base().objects(), limits)?;
    let mut checked = 0u64;
    for problem in family.instances() {
        checked += 1;
        let truthful = mechanism.evaluate(&problem)?;
        for agent in problem.agents() {
            let truth = problem.preference(agent).unwrap();
            for misreport in &misreports {
                if misreport == truth {
                    continue;
                }
                let deviated = problem.with_preference(agent, misreport.clone())?;
                let outcome = mechanism.evaluate(&deviated)?;
                if truth.strictly_prefers(outcome.assigned(agent), truthful.assigned(agent)) {
                    return Ok(report(
                        Axiom::StrategyProofness,
                        mechanism,
                        family,
                        checked,
                        vec![format!("misreports per agent: {}", misreports.len() - 1)],
                        AuditVerdict::Counterexample(AuditWitness::StrategyProofness {
                            problem: problem.clone(),
                            agent: agent.clone(),
                            misreport: misreport.clone(),
                            truthful_outcome: truthful,
                            misreport_outcome: outcome,
                        }),
                    ));
                }
            }
        }
    }
    Ok(report(
        Axiom::StrategyProofness,
        mechanism,
        family,
        checked,
        vec![format!("misreports per agent: {}", misreports.len() - 1)],
        AuditVerdict::HoldsOnFamily,
    ))
}

/// On every instance where a w-popular matching exists, the mechanism's
/// outcome must itself be w-popular.
pub fn check_w_popularity<W: Scalar>(
    mechanism: &dyn Mechanism<W>,
    family: &ProblemFamily<W>,
    limits: &Limits,
) -> Result<AuditReport<W>> {
    family.ensure_within(limits)?;
    let mut checked = 0u64;
    let mut vacuous = 0u64;
    for problem in family.instances() {
        checked += 1;
        let popular = w_popular_set(&problem, Weighting::Weighted, limits)?;
        if popular.is_empty() {
            vacuous += 1;
            continue;
        }
        let outcome = mechanism.evaluate(&problem)?;
        if popular.binary_search(&outcome).is_err() {
            // The outcome is beaten; find the strongest challenger.
            let verdict = crate::popularity::is_w_popular(
                &problem,
                &outcome,
                Weighting::Weighted,
                limits,
            )?;
            let Verdict::Fails(challenger) = verdict else {
                unreachable!("outcome outside the w-popular set must have a challenger");
            };
            return Ok(report(
                Axiom::WPopularity,
                mechanism,
                family,
                checked,
                Vec::new(),
                AuditVerdict::Counterexample(AuditWitness::WPopularity {
                    problem,
                    outcome,
                    popular_witness: popular[0].clone(),
                    challenger: challenger.matching,
                    margin: challenger.margin,
                }),
            ));
        }
    }
    Ok(report(
        Axiom::WPopularity,
        mechanism,
        family,
        checked,
        vec![format!("instances with no w-popular matching: {vacuous}")],
        AuditVerdict::HoldsOnFamily,
    ))
}

/// Every outcome must be non-wasteful.
pub fn check_non_wastefulness<W: Scalar>(
    mechanism: &dyn Mechanism<W>,
    family: &ProblemFamily<W>,
    limits: &Limits,
) -> Result<AuditReport<W>> {
    family.ensure_within(limits)?;
    let mut checked = 0u64;
    for problem in family.instances() {
        checked += 1;
        let outcome = mechanism.evaluate(&problem)?;
        if let Verdict::Fails((agent, object)) = is_non_wasteful(&problem, &outcome)? {
            return Ok(report(
                Axiom::NonWastefulness,
                mechanism,
                family,
                checked,
                Vec::new(),
                AuditVerdict::Counterexample(AuditWitness::NonWastefulness {
                    problem,
                    outcome,
                    agent,
                    object,
                }),
            ));
        }
    }
    Ok(report(
        Axiom::NonWastefulness,
        mechanism,
        family,
        checked,
        Vec::new(),
        AuditVerdict::HoldsOnFamily,
    ))
}

/// Every outcome must be Pareto efficient.
pub fn check_pareto<W: Scalar>(
    mechanism: &dyn Mechanism<W>,
    family: &ProblemFamily<W>,
    limits: &Limits,
) -> Result<AuditReport<W>> {
    family.ensure_within(limits)?;
    let mut checked = 0u64;
    for problem in family.instances() {
        checked += 1;
        let outcome = mechanism.evaluate(&problem)?;
        if let Verdict::Fails(improvement) = is_pareto_efficient(&problem, &outcome, limits)? {
            return Ok(report(
                Axiom::ParetoEfficiency,
                mechanism,
                family,
                checked,
                Vec::new(),
                AuditVerdict::Counterexample(AuditWitness::ParetoEfficiency {
                    problem,
                    outcome,
                    improvement,
                }),
            ));
        }
    }
    Ok(report(
        Axiom::ParetoEfficiency,
        mechanism,
        family,
        checked,
        Vec::new(),
        AuditVerdict::HoldsOnFamily,
    ))
}

/// Capacity vectors sampled when the axiom quantifies over reduced
/// capacities: all ones, and the original with the disputed object's
/// capacity forced to one.
fn reduced_capacity_samples<W: Scalar>(
    problem: &Problem<W>,
    object: &ObjectId,
) -> Vec<BTreeMap<ObjectId, u32>> {
    let all_ones: BTreeMap<ObjectId, u32> = problem
        .objects()
        .iter()
        .map(|o| (o.clone(), 1))
        .collect();
    let mut original = problem.capacities().clone();
    original.insert(object.clone(), 1);
    let mut samples = vec![all_ones];
    if !samples.contains(&original) {
        samples.push(original);
    }
    samples
}

/// If agent `i` envies agent `j` for object `a` and still receives nothing
/// after declaring `a` her only acceptable object, then in every tested
/// reduced problem — `i`, `j` wanting only `a`, everyone else wanting
/// nothing, one copy of `a` — the mechanism must leave `i` unassigned and
/// award `a` to `j`.
pub fn check_preserves_dispute_resolutions<W: Scalar>(
    mechanism: &dyn Mechanism<W>,
    family: &ProblemFamily<W>,
    limits: &Limits,
) -> Result<AuditReport<W>> {
    family.ensure_within(limits)?;
    let notes = vec![
        "reduced capacity vectors sampled: all-ones; original with the disputed object's capacity set to 1"
            .to_string(),
    ];
    let mut checked = 0u64;
    for problem in family.instances() {
        checked += 1;
        let outcome = mechanism.evaluate(&problem)?;
        for agent in problem.agents() {
            let pref = problem.preference(agent).unwrap();
            for rival in problem.agents() {
                if rival == agent {
                    continue;
                }
                let Some(object) = outcome.assigned(rival) else {
                    continue;
                };
                if !pref.strictly_prefers(Some(object), outcome.assigned(agent)) {
                    continue;
                }
                let insist = problem.with_preference(agent, Preference::only(object.clone()))?;
                if mechanism.evaluate(&insist)?.assigned(agent).is_some() {
                    continue;
                }
                // Premise holds; test the reduced problems.
                let mut reduced_prefs: BTreeMap<_, _> = problem
                    .agents()
                    .iter()
                    .map(|a| (a.clone(), Preference::empty()))
                    .collect();
                reduced_prefs.insert(agent.clone(), Preference::only(object.clone()));
                reduced_prefs.insert(rival.clone(), Preference::only(object.clone()));
                let reduced_base = problem.with_preferences(reduced_prefs)?;
                for capacities in reduced_capacity_samples(&problem, object) {
                    let reduced = reduced_base.with_capacities(capacities)?;
                    let reduced_outcome = mechanism.evaluate(&reduced)?;
                    let resolved = reduced_outcome.assigned(agent).is_none()
                        && reduced_outcome.assigned(rival) == Some(object);
                    if !resolved {
                        return Ok(report(
                            Axiom::PreservesDisputeResolutions,
                            mechanism,
                            family,
                            checked,
                            notes,
                            AuditVerdict::Counterexample(AuditWitness::DisputeResolutions {
                                problem: problem.clone(),
                                agent: agent.clone(),
                                rival: rival.clone(),
                                object: object.clone(),
                                reduced,
                                reduced_outcome,
                            }),
                        ));
                    }
                }
            }
        }
    }
    Ok(report(
        Axiom::PreservesDisputeResolutions,
        mechanism,
        family,
        checked,
        notes,
        AuditVerdict::HoldsOnFamily,
    ))
}

/// Capacity vectors sampled for the two-agent conflict check: the base and
/// all-ones vectors, each with the contested object's capacity forced to 1
/// and to 2.
fn cccr_capacity_samples<W: Scalar>(
    problem: &Problem<W>,
    object: &ObjectId,
) -> Vec<BTreeMap<ObjectId, u32>> {
    let mut samples: Vec<BTreeMap<ObjectId, u32>> = Vec::new();
    let all_ones: BTreeMap<ObjectId, u32> = problem
        .objects()
        .iter()
        .map(|o| (o.clone(), 1))
        .collect();
    for base in [problem.capacities().clone(), all_ones] {
        for cap in [1u32, 2] {
            let mut q = base.clone();
            q.insert(object.clone(), cap);
            if !samples.contains(&q) {
                samples.push(q);
            }
        }
    }
    samples
}

/// Whenever two agents who want only one object split `{object, ∅}` under
/// two capacity vectors, the winner must be the same under both.
pub fn check_two_agent_cccr<W: Scalar>(
    mechanism: &dyn Mechanism<W>,
    family: &ProblemFamily<W>,
    limits: &Limits,
) -> Result<AuditReport<W>> {
    family.ensure_within(limits)?;
    let notes = vec![
        "capacity vectors sampled: base and all-ones, each with the contested object's capacity set to 1 and 2"
            .to_string(),
    ];
    let mut checked = 0u64;
    for problem in family.instances() {
        checked += 1;
        for (ai, agent) in problem.agents().iter().enumerate() {
            for rival in problem.agents().iter().skip(ai + 1) {
                for object in problem.objects() {
                    let mut prefs = problem.preferences().clone();
                    prefs.insert(agent.clone(), Preference::only(object.clone()));
                    prefs.insert(rival.clone(), Preference::only(object.clone()));
                    let contested = problem.with_preferences(prefs)?;

                    let samples = cccr_capacity_samples(&problem, object);
                    let outcomes: Vec<(BTreeMap<ObjectId, u32>, Matching)> = samples
                        .into_iter()
                        .map(|q| {
                            let p = contested.with_capacities(q.clone())?;
                            Ok((q, mechanism.evaluate(&p)?))
                        })
                        .collect::<Result<_>>()?;

                    for (i, (qa, ma)) in outcomes.iter().enumerate() {
                        if !splits_object_and_outside(ma, agent, rival, object) {
                            continue;
                        }
                        for (qb, mb) in outcomes.iter().skip(i + 1) {
                            if !splits_object_and_outside(mb, agent, rival, object) {
                                continue;
                            }
                            if ma.assigned(agent) != mb.assigned(agent) {
                                let problem_a = contested.with_capacities(qa.clone())?;
                                return Ok(report(
                                    Axiom::TwoAgentConsistentConflictResolution,
                                    mechanism,
                                    family,
                                    checked,
                                    notes,
                                    AuditVerdict::Counterexample(
                                        AuditWitness::TwoAgentConsistentConflictResolution {
                                            problem: problem_a,
                                            alternative_capacities: qb.clone(),
                                            agent: agent.clone(),
                                            rival: rival.clone(),
                                            object: object.clone(),
                                            outcome: ma.clone(),
                                            alternative_outcome: mb.clone(),
                                        },
                                    ),
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(report(
        Axiom::TwoAgentConsistentConflictResolution,
        mechanism,
        family,
        checked,
        notes,
        AuditVerdict::HoldsOnFamily,
    ))
}
