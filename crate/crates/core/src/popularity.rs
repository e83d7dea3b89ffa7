//! Pairwise popularity comparison and the predicates built on it:
//! w-popularity of a matching, the full w-popular set, Pareto efficiency,
//! non-wastefulness, and the popularity digraph.
//!
//! A matching `μ` is more (w-)popular than `μ'` when the agents strictly
//! preferring their `μ` assignment outweigh the agents strictly preferring
//! their `μ'` assignment. All comparisons quantify over every
//! capacity-feasible matching, including those assigning unacceptable
//! objects.

use std::fmt::Write as _;

use crate::model::index::ProblemIndex;
use crate::model::{AgentId, Matching, ObjectId, Problem};
use crate::{Limits, Result, Scalar};

/// Whose votes count how much: the problem's weight profile, or one vote
/// per agent. Unit weighting is exactly the weighted mode with all weights
/// equal to one.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Weighting {
    Weighted,
    Unit,
}

/// Outcome of a predicate together with an optional refuting witness.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Verdict<T> {
    Holds,
    Fails(T),
}

impl<T> Verdict<T> {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn witness(&self) -> Option<&T> {
        match self {
            Verdict::Holds => None,
            Verdict::Fails(w) => Some(w),
        }
    }
}

/// A matching more popular than the one under test, with its margin.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Challenger<W> {
    pub matching: Matching,
    pub margin: W,
}

/// Signed popularity margin of `a` over `b`: the total weight of agents
/// strictly preferring their `a`-assignment minus the total weight of agents
/// strictly preferring their `b`-assignment. Positive means `a` is more
/// (w-)popular than `b`.
pub fn popularity_margin<W: Scalar>(
    problem: &Problem<W>,
    a: &Matching,
    b: &Matching,
    weighting: Weighting,
) -> Result<W> {
    let index = ProblemIndex::new(problem);
    let ca = index.compact(a)?;
    let cb = index.compact(b)?;
    Ok(index.margin(&ca, &cb, weighting))
}

/// True iff no matching is more (w-)popular than `matching`. On failure the
/// witness is a challenger of maximal margin, ties broken by canonical
/// matching order.
pub fn is_w_popular<W: Scalar>(
    problem: &Problem<W>,
    matching: &Matching,
    weighting: Weighting,
    limits: &Limits,
) -> Result<Verdict<Challenger<W>>> {
    let index = ProblemIndex::new(problem);
    let target = index.compact(matching)?;
    let mut best: Option<(W, Vec<Option<u32>>)> = None;
    let mut seen: u64 = 0;
    for candidate in index.enumerate() {
        seen += 1;
        if seen > limits.max_matchings {
            return Err(crate::Error::resource(
                "matching enumeration",
                seen,
                limits.max_matchings,
            ));
        }
        let margin = index.margin(&candidate, &target, weighting);
        if !margin.is_positive() {
            continue;
        }
        let better = match &best {
            None => true,
            Some((m, incumbent)) => {
                margin > *m
                    || (margin == *m && index.expand(&candidate) < index.expand(incumbent))
            }
        };
        if better {
            best = Some((margin, candidate));
        }
    }
    Ok(match best {
        None => Verdict::Holds,
        Some((margin, compact)) => Verdict::Fails(Challenger {
            matching: index.expand(&compact),
            margin,
        }),
    })
}

/// Every (w-)popular matching of the problem, in canonical order. An empty
/// result means none exists.
pub fn w_popular_set<W: Scalar>(
    problem: &Problem<W>,
    weighting: Weighting,
    limits: &Limits,
) -> Result<Vec<Matching>> {
    let index = ProblemIndex::new(problem);
    let all = index.collect_all(limits.max_matchings)?;
    let mut popular = Vec::new();
    for candidate in &all {
        let beaten = all
            .iter()
            .any(|rival| index.margin(rival, candidate, weighting).is_positive());
        if !beaten {
            popular.push(index.expand(candidate));
        }
    }
    popular.sort();
    Ok(popular)
}

/// True iff `a` Pareto improves upon `b`: every agent weakly prefers her
/// `a`-assignment and at least one strictly does.
pub fn pareto_improves<W: Scalar>(
    problem: &Problem<W>,
    a: &Matching,
    b: &Matching,
) -> Result<bool> {
    let index = ProblemIndex::new(problem);
    let ca = index.compact(a)?;
    let cb = index.compact(b)?;
    Ok(index.pareto_improves(&ca, &cb))
}

/// True iff no matching Pareto improves upon `matching` (everyone weakly
/// better off, someone strictly). The witness is the first improving
/// matching in enumeration order.
pub fn is_pareto_efficient<W: Scalar>(
    problem: &Problem<W>,
    matching: &Matching,
    limits: &Limits,
) -> Result<Verdict<Matching>> {
    let index = ProblemIndex::new(problem);
    let target = index.compact(matching)?;
    let mut seen: u64 = 0;
    for candidate in index.enumerate() {
        seen += 1;
        if seen > limits.max_matchings {
            return Err(crate::Error::resource(
                "matching enumeration",
                seen,
                limits.max_matchings,
            ));
        }
        if index.pareto_improves(&candidate, &target) {
            return Ok(Verdict::Fails(index.expand(&candidate)));
        }
    }
    Ok(Verdict::Holds)
}

/// True iff no agent prefers an object with spare capacity to her own
/// assignment. The witness is the first such pair in canonical agent order.
pub fn is_non_wasteful<W: Scalar>(
    problem: &Problem<W>,
    matching: &Matching,
) -> Result<Verdict<(AgentId, ObjectId)>> {
    let index = ProblemIndex::new(problem);
    let compact = index.compact(matching)?;

    let mut load = vec![0u32; problem.object_count()];
    for assignment in compact.iter().flatten() {
        load[*assignment as usize] += 1;
    }

    for agent in problem.weights().canonical_order() {
        let ai = index.agent_index(&agent).unwrap();
        let current = index.desirability(ai, compact[ai]);
        for object in problem.preference(&agent).unwrap().ranked() {
            let oi = index.object_index(object).unwrap();
            if index.desirability(ai, Some(oi as u32)) >= current {
                break;
            }
            if load[oi] < index.capacities[oi] {
                return Ok(Verdict::Fails((agent.clone(), object.clone())));
            }
        }
    }
    Ok(Verdict::Holds)
}

/// The strict popularity relation over all matchings of a problem.
/// Nodes are sorted in canonical matching order; there is an edge
/// `from → to` exactly when `from` is more (w-)popular than `to`.
/// (w-)popular matchings are exactly the nodes with no incoming edge.
#[derive(Clone, Debug)]
pub struct PopularityDigraph {
    pub nodes: Vec<Matching>,
    pub edges: Vec<(usize, usize)>,
}

impl PopularityDigraph {
    pub fn in_degree(&self, node: usize) -> usize {
        self.edges.iter().filter(|(_, to)| *to == node).count()
    }

    /// True iff the relation contains a directed cycle.
    pub fn has_cycle(&self) -> bool {
        let n = self.nodes.len();
        let mut adjacency = vec![Vec::new(); n];
        for (from, to) in &self.edges {
            adjacency[*from].push(*to);
        }
        // 0 = unvisited, 1 = on stack, 2 = finished
        let mut state = vec![0u8; n];
        for start in 0..n {
            if state[start] != 0 {
                continue;
            }
            let mut stack = vec![(start, 0usize)];
            state[start] = 1;
            while let Some((node, next)) = stack.pop() {
                if next < adjacency[node].len() {
                    let succ = adjacency[node][next];
                    stack.push((node, next + 1));
                    match state[succ] {
                        0 => {
                            state[succ] = 1;
                            stack.push((succ, 0));
                        }
                        1 => return true,
                        _ => {}
                    }
                } else {
                    state[node] = 2;
                }
            }
        }
        false
    }

    /// DOT rendering with stable node ordering and canonical labels.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph popularity {\n");
        for (i, node) in self.nodes.iter().enumerate() {
            let _ = writeln!(out, "  n{i} [label=\"{node}\"];");
        }
        for (from, to) in &self.edges {
            let _ = writeln!(out, "  n{from} -> n{to};");
        }
        out.push_str("}\n");
        out
    }
}

/// Builds the full popularity digraph of a problem. Zero-margin pairs get
/// no edge in either direction: the relation is strict.
pub fn popularity_digraph<W: Scalar>(
    problem: &Problem<W>,
    weighting: Weighting,
    limits: &Limits,
) -> Result<PopularityDigraph> {
    let index = ProblemIndex::new(problem);
    let mut all = index.collect_all(limits.max_matchings)?;
    all.sort_by_key(|a| index.expand(a));

    let mut edges = Vec::new();
    for (i, a) in all.iter().enumerate() {
        for (j, b) in all.iter().enumerate().skip(i + 1) {
            let margin = index.margin(a, b, weighting);
            if margin.is_positive() {
                edges.push((i, j));
            } else if margin.is_negative() {
                edges.push((j, i));
            }
        }
    }
    Ok(PopularityDigraph {
        nodes: all.iter().map(|c| index.expand(c)).collect(),
        edges,
    })
}
