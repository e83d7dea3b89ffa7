//! Preference-reporting games. A mechanism and a true problem induce a
//! strategic-form game: each agent's strategy set is the full preference
//! universe over the problem's objects, outcomes are the mechanism's
//! matchings at the reported profile, and payoffs are ordinal — an agent
//! compares outcomes with her true preference, with ties (in particular two
//! unassigned outcomes) treated as indifference.

use std::collections::BTreeMap;

use crate::axioms::{
    preference_universe, AuditReport, AuditVerdict, AuditWitness, Axiom, ProblemFamily,
};
use crate::mechanisms::Mechanism;
use crate::model::{AgentId, Matching, Preference, Problem};
use crate::popularity::{is_w_popular, w_popular_set, Verdict, Weighting};
use crate::{Error, Limits, Result, Scalar};

/// The game induced by `mechanism` at the true problem `problem`.
pub struct ReportingGame<'a, W: Scalar> {
    mechanism: &'a dyn Mechanism<W>,
    problem: &'a Problem<W>,
    universe: Vec<Preference>,
}

/// A strategy profile: one reported preference per agent.
pub type ReportProfile = BTreeMap<AgentId, Preference>;

impl<'a, W: Scalar> ReportingGame<'a, W> {
    pub fn new(
        mechanism: &'a dyn Mechanism<W>,
        problem: &'a Problem<W>,
        limits: &Limits,
    ) -> Result<Self> {
        let universe = preference_universe(problem.objects(), limits)?;
        let game = ReportingGame {
            mechanism,
            problem,
            universe,
        };
        let count = game.profile_count();
        if count > limits.max_profiles as u128 {
            return Err(Error::resource(
                "report profiles",
                count.min(u64::MAX as u128) as u64,
                limits.max_profiles,
            ));
        }
        Ok(game)
    }

    pub fn universe(&self) -> &[Preference] {
        &self.universe
    }

    pub fn profile_count(&self) -> u128 {
        (self.universe.len() as u128)
            .checked_pow(self.problem.agent_count() as u32)
            .unwrap_or(u128::MAX)
    }

    fn decode(&self, mut id: usize) -> Vec<usize> {
        let n = self.problem.agent_count();
        let u = self.universe.len();
        let mut digits = vec![0usize; n];
        for d in digits.iter_mut().rev() {
            *d = id % u;
            id /= u;
        }
        digits
    }

    fn profile_problem(&self, digits: &[usize]) -> Result<Problem<W>> {
        self.problem.with_preferences(self.profile_reports(digits))
    }

    fn profile_reports(&self, digits: &[usize]) -> ReportProfile {
        self.problem
            .agents()
            .iter()
            .zip(digits)
            .map(|(agent, &d)| (agent.clone(), self.universe[d].clone()))
            .collect()
    }

    /// Evaluates the mechanism at every profile. `scores[p * n + i]` is the
    /// desirability of agent `i`'s outcome at profile `p` under her true
    /// preference (lower is better, `u32::MAX` = unacceptable).
    fn tabulate(&self) -> Result<GameTable> {
        let n = self.problem.agent_count();
        let total = self.profile_count() as usize;
        let mut outcomes = Vec::with_capacity(total);
        let mut scores = Vec::with_capacity(total * n);
        let mut digits = vec![0usize; n];
        for _ in 0..total {
            let reported = self.profile_problem(&digits)?;
            let outcome = self.mechanism.evaluate(&reported)?;
            for agent in self.problem.agents() {
                let truth = self.problem.preference(agent).unwrap();
                let score = match truth.desirability(outcome.assigned(agent)) {
                    crate::model::Desirability::Ranked(r) => r as u32,
                    crate::model::Desirability::Outside => truth.ranked().len() as u32,
                    crate::model::Desirability::Unacceptable => u32::MAX,
                };
                scores.push(score);
            }
            outcomes.push(outcome);
            // Advance the profile odometer (last agent fastest).
            for d in digits.iter_mut().rev() {
                *d += 1;
                if *d < self.universe.len() {
                    break;
                }
                *d = 0;
            }
        }
        Ok(GameTable {
            agent_count: n,
            universe_size: self.universe.len(),
            outcomes,
            scores,
        })
    }

    /// All pure Nash equilibria, as report profiles in canonical profile
    /// order: no agent has a strictly improving unilateral deviation under
    /// her true preference.
    pub fn pure_nash_equilibria(&self) -> Result<Vec<ReportProfile>> {
        let table = self.tabulate()?;
        Ok(table
            .equilibrium_ids()
            .into_iter()
            .map(|id| self.profile_reports(&self.decode(id)))
            .collect())
    }

    /// Equilibrium outcomes, deduplicated, with one sample profile each.
    fn equilibrium_outcomes(&self) -> Result<Vec<(ReportProfile, Matching)>> {
        let table = self.tabulate()?;
        let mut seen: Vec<(ReportProfile, Matching)> = Vec::new();
        for id in table.equilibrium_ids() {
            let outcome = table.outcomes[id].clone();
            if !seen.iter().any(|(_, m)| *m == outcome) {
                seen.push((self.profile_reports(&self.decode(id)), outcome));
            }
        }
        Ok(seen)
    }
}

struct GameTable {
    agent_count: usize,
    universe_size: usize,
    outcomes: Vec<Matching>,
    scores: Vec<u32>,
}

impl GameTable {
    fn equilibrium_ids(&self) -> Vec<usize> {
        let n = self.agent_count;
        let u = self.universe_size;
        let total = self.outcomes.len();
        // stride[i]: distance between profiles differing only in agent i.
        let mut strides = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * u;
        }
        let mut out = Vec::new();
        'profiles: for id in 0..total {
            for (agent, stride) in strides.iter().enumerate() {
                let digit = (id / stride) % u;
                let here = self.scores[id * n + agent];
                let base = id - digit * stride;
                for alt in 0..u {
                    if alt == digit {
                        continue;
                    }
                    let rival = base + alt * stride;
                    if self.scores[rival * n + agent] < here {
                        continue 'profiles;
                    }
                }
            }
            out.push(id);
        }
        out
    }
}

/// Whether all pure Nash equilibria of the reporting game yield one outcome.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum EquilibriumUniqueness {
    /// The game has no pure Nash equilibrium.
    NoEquilibrium,
    /// Every equilibrium maps to this matching.
    Unique(Matching),
    /// At least two equilibrium outcomes differ; one sample profile each.
    Multiple(Vec<(ReportProfile, Matching)>),
}

impl EquilibriumUniqueness {
    pub fn is_unique(&self) -> bool {
        matches!(self, EquilibriumUniqueness::Unique(_))
    }
}

/// Enumerates the game's pure Nash equilibria and reports whether they all
/// map to the same matching. A game with no pure equilibrium is reported
/// distinctly.
pub fn check_equilibrium_outcome_uniqueness<W: Scalar>(
    mechanism: &dyn Mechanism<W>,
    problem: &Problem<W>,
    limits: &Limits,
) -> Result<EquilibriumUniqueness> {
    let game = ReportingGame::new(mechanism, problem, limits)?;
    let outcomes = game.equilibrium_outcomes()?;
    Ok(match outcomes.len() {
        0 => EquilibriumUniqueness::NoEquilibrium,
        1 => EquilibriumUniqueness::Unique(outcomes.into_iter().next().unwrap().1),
        _ => EquilibriumUniqueness::Multiple(outcomes),
    })
}

/// If a w-popular matching exists at the true problem, every pure Nash
/// equilibrium outcome must be w-popular. Vacuously holds when none exists
/// (noted in the report).
pub fn check_w_popular_in_equilibrium<W: Scalar>(
    mechanism: &dyn Mechanism<W>,
    problem: &Problem<W>,
    limits: &Limits,
) -> Result<AuditReport<W>> {
    let family = ProblemFamily::single("reporting-game", problem.clone());
    let make = |instances, notes, verdict| AuditReport {
        axiom: Axiom::WPopularInEquilibrium,
        mechanism: mechanism.name(),
        family: family.name().to_string(),
        instances_checked: instances,
        notes,
        verdict,
    };

    let popular = w_popular_set(problem, Weighting::Weighted, limits)?;
    if popular.is_empty() {
        return Ok(make(
            0,
            vec!["no w-popular matching exists: vacuous pass".to_string()],
            AuditVerdict::HoldsOnFamily,
        ));
    }

    let game = ReportingGame::new(mechanism, problem, limits)?;
    let table = game.tabulate()?;
    let equilibria = table.equilibrium_ids();
    let checked = equilibria.len() as u64;
    for id in &equilibria {
        let outcome = &table.outcomes[*id];
        if popular.binary_search(outcome).is_err() {
            let Verdict::Fails(challenger) =
                is_w_popular(problem, outcome, Weighting::Weighted, limits)?
            else {
                unreachable!("outcome outside the w-popular set must have a challenger");
            };
            return Ok(make(
                checked,
                vec![format!("pure Nash equilibria: {}", equilibria.len())],
                AuditVerdict::Counterexample(AuditWitness::WPopularInEquilibrium {
                    problem: problem.clone(),
                    profile: game.profile_reports(&game.decode(*id)),
                    outcome: outcome.clone(),
                    popular_witness: popular[0].clone(),
                    challenger: challenger.matching,
                    margin: challenger.margin,
                }),
            ));
        }
    }
    Ok(make(
        checked,
        vec![format!("pure Nash equilibria: {}", equilibria.len())],
        AuditVerdict::HoldsOnFamily,
    ))
}

/// True iff `profile` is a pure Nash equilibrium of the reporting game.
/// Used to re-verify enumerated equilibria independently of the table scan.
pub fn is_pure_nash<W: Scalar>(
    mechanism: &dyn Mechanism<W>,
    problem: &Problem<W>,
    profile: &ReportProfile,
    limits: &Limits,
) -> Result<bool> {
    let universe = preference_universe(problem.objects(), limits)?;
    let reported = problem.with_preferences(profile.clone())?;
    let outcome = mechanism.evaluate(&reported)?;
    for agent in problem.agents() {
        let truth = problem.preference(agent).unwrap();
        let current = outcome.assigned(agent);
        for alternative in &universe {
            let deviated = reported.with_preference(agent, alternative.clone())?;
            let result = mechanism.evaluate(&deviated)?;
            if truth.strictly_prefers(result.assigned(agent), current) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
