//! Internal index-based problem view. The exhaustive scans (popularity sets,
//! digraphs, audits) run on dense agent/object indices and small integer
//! ranks instead of id maps.

use std::collections::BTreeMap;

use crate::model::{AgentId, Matching, MatchingViolation, ObjectId, Problem};
use crate::popularity::Weighting;
use crate::{Error, Result, Scalar};

/// Rank value for an object the agent did not list. Compares equal for any
/// two unacceptable objects and worse than the outside option.
const UNRANKED: u32 = u32::MAX;

/// Assignment in index space: one entry per agent, `None` = unassigned.
pub(crate) type CompactAssignment = Vec<Option<u32>>;

pub(crate) struct ProblemIndex<'a, W> {
    pub agents: Vec<&'a AgentId>,
    pub objects: Vec<&'a ObjectId>,
    pub weights: Vec<W>,
    pub capacities: Vec<u32>,
    /// `rank[agent][object]`: preference position, or `UNRANKED`.
    rank: Vec<Vec<u32>>,
    /// Rank of the outside option per agent (= length of her list).
    outside: Vec<u32>,
    agent_pos: BTreeMap<&'a AgentId, usize>,
    object_pos: BTreeMap<&'a ObjectId, usize>,
}

impl<'a, W: Scalar> ProblemIndex<'a, W> {
    pub fn new(problem: &'a Problem<W>) -> Self {
        let agents: Vec<&AgentId> = problem.agents().iter().collect();
        let objects: Vec<&ObjectId> = problem.objects().iter().collect();
        let agent_pos: BTreeMap<&AgentId, usize> =
            agents.iter().enumerate().map(|(i, a)| (*a, i)).collect();
        let object_pos: BTreeMap<&ObjectId, usize> =
            objects.iter().enumerate().map(|(i, o)| (*o, i)).collect();

        let mut rank = vec![vec![UNRANKED; objects.len()]; agents.len()];
        let mut outside = vec![0u32; agents.len()];
        for (ai, agent) in agents.iter().enumerate() {
            let pref = problem.preference(agent).expect("total preference map");
            for (r, obj) in pref.ranked().iter().enumerate() {
                rank[ai][object_pos[obj]] = r as u32;
            }
            outside[ai] = pref.ranked().len() as u32;
        }

        ProblemIndex {
            weights: agents
                .iter()
                .map(|a| problem.weight(a).unwrap().clone())
                .collect(),
            capacities: objects
                .iter()
                .map(|o| problem.capacity(o).unwrap())
                .collect(),
            rank,
            outside,
            agent_pos,
            object_pos,
            agents,
            objects,
        }
    }

    pub fn agent_index(&self, agent: &AgentId) -> Option<usize> {
        self.agent_pos.get(agent).copied()
    }

    pub fn object_index(&self, object: &ObjectId) -> Option<usize> {
        self.object_pos.get(object).copied()
    }

    /// Rank of an assignment under the agent's preference; lower is better.
    #[inline]
    pub fn desirability(&self, agent: usize, assignment: Option<u32>) -> u32 {
        match assignment {
            Some(obj) => self.rank[agent][obj as usize],
            None => self.outside[agent],
        }
    }

    /// Signed popularity margin of `a` over `b`: total weight of agents
    /// strictly preferring their `a`-assignment minus total weight of agents
    /// strictly preferring their `b`-assignment.
    pub fn margin(&self, a: &[Option<u32>], b: &[Option<u32>], weighting: Weighting) -> W {
        let mut acc = W::zero();
        for agent in 0..self.agents.len() {
            let da = self.desirability(agent, a[agent]);
            let db = self.desirability(agent, b[agent]);
            if da == db {
                continue;
            }
            let w = match weighting {
                Weighting::Weighted => self.weights[agent].clone(),
                Weighting::Unit => W::one(),
            };
            if da < db {
                acc = acc + w;
            } else {
                acc = acc - w;
            }
        }
        acc
    }

    /// True iff `a` Pareto improves upon `b`: everyone weakly better off,
    /// someone strictly.
    pub fn pareto_improves(&self, a: &[Option<u32>], b: &[Option<u32>]) -> bool {
        let mut strict = false;
        for agent in 0..self.agents.len() {
            let da = self.desirability(agent, a[agent]);
            let db = self.desirability(agent, b[agent]);
            if da > db {
                return false;
            }
            if da < db {
                strict = true;
            }
        }
        strict
    }

    pub fn compact(&self, matching: &Matching) -> Result<CompactAssignment> {
        self.try_compact(matching).map_err(Error::Matching)
    }

    pub fn try_compact(
        &self,
        matching: &Matching,
    ) -> std::result::Result<CompactAssignment, MatchingViolation> {
        let mut out = vec![None; self.agents.len()];
        for (agent, assignment) in matching.iter() {
            let Some(ai) = self.agent_index(agent) else {
                return Err(MatchingViolation::UnknownAgent(agent.clone()));
            };
            if let Some(object) = assignment {
                let Some(oi) = self.object_index(object) else {
                    return Err(MatchingViolation::UnknownObject {
                        agent: agent.clone(),
                        object: object.clone(),
                    });
                };
                out[ai] = Some(oi as u32);
            }
        }
        for agent in &self.agents {
            if matching.entry(agent).is_none() {
                return Err(MatchingViolation::MissingAgent((*agent).clone()));
            }
        }
        let mut load = vec![0usize; self.objects.len()];
        for assignment in out.iter().flatten() {
            load[*assignment as usize] += 1;
        }
        for (oi, used) in load.iter().enumerate() {
            if *used > self.capacities[oi] as usize {
                return Err(MatchingViolation::CapacityExceeded {
                    object: self.objects[oi].clone(),
                    assigned: *used,
                    capacity: self.capacities[oi],
                });
            }
        }
        Ok(out)
    }

    pub fn expand(&self, compact: &[Option<u32>]) -> Matching {
        Matching::from_pairs(self.agents.iter().enumerate().map(|(ai, agent)| {
            (
                (*agent).clone(),
                compact[ai].map(|oi| self.objects[oi as usize].clone()),
            )
        }))
    }

    /// Iterator over every capacity-feasible assignment, each exactly once,
    /// in a fixed lexicographic order (per agent: unassigned first, then
    /// objects in problem order).
    pub fn enumerate(&self) -> Odometer {
        Odometer::new(self.agents.len(), self.capacities.clone())
    }

    /// Collects all feasible assignments, failing once more than `cap`
    /// exist.
    pub fn collect_all(&self, cap: u64) -> Result<Vec<CompactAssignment>> {
        let mut out = Vec::new();
        for assignment in self.enumerate() {
            if out.len() as u64 >= cap {
                return Err(Error::resource("matching enumeration", cap + 1, cap));
            }
            out.push(assignment);
        }
        Ok(out)
    }

}

/// Odometer over per-agent choices (0 = unassigned, `j` = object `j - 1`)
/// filtered by remaining capacity. Resetting a position to "unassigned" is
/// always feasible, so the carry logic visits every feasible assignment in
/// lexicographic order. Owns its capacity table and therefore does not
/// borrow the index it was created from.
pub(crate) struct Odometer {
    choices: Vec<usize>,
    used: Vec<u32>,
    capacities: Vec<u32>,
    started: bool,
    done: bool,
}

impl Odometer {
    pub fn new(agent_count: usize, capacities: Vec<u32>) -> Self {
        Odometer {
            choices: vec![0; agent_count],
            used: vec![0; capacities.len()],
            capacities,
            started: false,
            done: false,
        }
    }

    fn current(&self) -> CompactAssignment {
        self.choices
            .iter()
            .map(|&c| if c == 0 { None } else { Some((c - 1) as u32) })
            .collect()
    }

    fn advance(&mut self) -> bool {
        let m = self.capacities.len();
        if self.choices.is_empty() {
            return false;
        }
        let mut pos = self.choices.len() - 1;
        loop {
            let cur = self.choices[pos];
            if cur > 0 {
                self.used[cur - 1] -= 1;
            }
            let mut next = cur + 1;
            while next <= m && self.used[next - 1] >= self.capacities[next - 1] {
                next += 1;
            }
            if next <= m {
                self.choices[pos] = next;
                self.used[next - 1] += 1;
                return true;
            }
            self.choices[pos] = 0;
            if pos == 0 {
                return false;
            }
            pos -= 1;
        }
    }
}

impl Iterator for Odometer {
    type Item = CompactAssignment;

    fn next(&mut self) -> Option<CompactAssignment> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(self.current());
        }
        if self.advance() {
            Some(self.current())
        } else {
            self.done = true;
            None
        }
    }
}
