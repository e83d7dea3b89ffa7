use std::collections::BTreeMap;

use itertools::Itertools;

use crate::model::AgentId;
use crate::{Error, Limits, Result, Scalar};

/// Positive voting weight per agent.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeightProfile<W>(BTreeMap<AgentId, W>);

impl<W: Scalar> WeightProfile<W> {
    pub fn new(weights: BTreeMap<AgentId, W>) -> Result<Self> {
        for (agent, w) in &weights {
            if !w.is_positive() {
                return Err(Error::invalid(
                    format!("weights[{agent}]"),
                    format!("weight must be positive, got {w}"),
                ));
            }
        }
        Ok(WeightProfile(weights))
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (AgentId, W)>) -> Result<Self> {
        Self::new(pairs.into_iter().collect())
    }

    pub fn get(&self, agent: &AgentId) -> Option<&W> {
        self.0.get(agent)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&AgentId, &W)> {
        self.0.iter()
    }

    pub fn agents(&self) -> impl Iterator<Item = &AgentId> {
        self.0.keys()
    }

    /// Agents sorted by weight non-increasing, ties broken by id ascending.
    /// All "first agent such that…" logic in this crate uses this order.
    pub fn canonical_order(&self) -> Vec<AgentId> {
        let mut agents: Vec<&AgentId> = self.0.keys().collect();
        agents.sort_by(|a, b| {
            let wa = &self.0[*a];
            let wb = &self.0[*b];
            wb.cmp(wa).then_with(|| a.cmp(b))
        });
        agents.into_iter().cloned().collect()
    }

}

/// Classification of a weight profile on its canonical non-increasing order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeightClass {
    /// No two weights are equal.
    pub distinct: bool,
    /// Exactly one tie, between the two lightest agents, and the
    /// third-lightest weight covers their sum.
    pub essentially_distinct: bool,
    /// Every weight is at least the sum of all strictly later weights in
    /// the canonical order.
    pub cumulatively_ordered: bool,
    /// Weights non-increasing, ties broken by agent id ascending.
    pub canonical_order: Vec<AgentId>,
}

impl WeightClass {
    pub fn summary(&self) -> String {
        let mut parts = Vec::new();
        if self.distinct {
            parts.push("distinct");
        }
        if self.essentially_distinct {
            parts.push("essentially-distinct");
        }
        if self.cumulatively_ordered {
            parts.push("cumulatively-ordered");
        }
        if parts.is_empty() {
            parts.push("none");
        }
        parts.join(", ")
    }
}

/// Evaluates the three weight-profile predicates.
///
/// With fewer than three agents the missing index conditions are read as
/// vacuously true: a two-agent tie counts as essentially distinct, and a
/// singleton profile is distinct and cumulatively ordered.
pub fn classify_weights<W: Scalar>(profile: &WeightProfile<W>) -> Result<WeightClass> {
    if profile.is_empty() {
        return Err(Error::precondition("weight profile is empty"));
    }
    let order = profile.canonical_order();
    let w: Vec<&W> = order.iter().map(|a| profile.get(a).unwrap()).collect();
    let n = w.len();

    let distinct = (1..n).all(|i| w[i - 1] != w[i]);

    let essentially_distinct = if n < 2 {
        false
    } else {
        let head_strict = (1..n - 1).all(|i| w[i - 1] != w[i]);
        let last_tie = w[n - 2] == w[n - 1];
        let covered = if n >= 3 {
            *w[n - 3] >= w[n - 2].clone() + w[n - 1].clone()
        } else {
            true
        };
        head_strict && last_tie && covered
    };

    let cumulatively_ordered = {
        let mut suffix = W::zero();
        let mut ok = true;
        for wi in w.iter().rev() {
            if **wi < suffix {
                ok = false;
                break;
            }
            suffix = suffix + (*wi).clone();
        }
        ok
    };

    Ok(WeightClass {
        distinct,
        essentially_distinct,
        cumulatively_ordered,
        canonical_order: order,
    })
}

/// All agent orderings in which strictly heavier agents precede strictly
/// lighter ones. Agents of equal weight permute freely, so the count is the
/// product of the factorials of the tie-group sizes. Output order is
/// lexicographic with respect to the canonical order.
pub fn consistent_orderings<W: Scalar>(
    profile: &WeightProfile<W>,
    limits: &Limits,
) -> Result<Vec<Vec<AgentId>>> {
    let order = profile.canonical_order();

    // Contiguous runs of equal weight in the canonical order.
    let mut groups: Vec<Vec<AgentId>> = Vec::new();
    for agent in order {
        let w = profile.get(&agent).unwrap();
        match groups.last_mut() {
            Some(group) if profile.get(&group[0]).unwrap() == w => group.push(agent),
            _ => groups.push(vec![agent]),
        }
    }

    let mut count: u128 = 1;
    for g in &groups {
        for k in 1..=g.len() as u128 {
            count = count.saturating_mul(k);
        }
    }
    if count > limits.max_orderings as u128 {
        return Err(Error::resource(
            "consistent orderings",
            count.min(u64::MAX as u128) as u64,
            limits.max_orderings,
        ));
    }

    let mut result: Vec<Vec<AgentId>> = vec![Vec::new()];
    for group in &groups {
        let perms: Vec<Vec<AgentId>> = group
            .iter()
            .cloned()
            .permutations(group.len())
            .collect();
        let mut next = Vec::with_capacity(result.len() * perms.len());
        for prefix in &result {
            for perm in &perms {
                let mut ordering = prefix.clone();
                ordering.extend(perm.iter().cloned());
                next.push(ordering);
            }
        }
        result = next;
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn profile(weights: &[i64]) -> WeightProfile<i64> {
        WeightProfile::from_pairs(
            weights
                .iter()
                .enumerate()
                .map(|(i, w)| (AgentId::new(format!("i{}", i + 1)), *w)),
        )
        .unwrap()
    }

    #[test]
    fn classify_cumulative_distinct() {
        let c = classify_weights(&profile(&[6, 3, 2])).unwrap();
        assert!(c.distinct);
        assert!(!c.essentially_distinct);
        assert!(c.cumulatively_ordered);
    }

    #[test]
    fn classify_distinct_not_cumulative() {
        let c = classify_weights(&profile(&[4, 3, 2])).unwrap();
        assert!(c.distinct);
        assert!(!c.essentially_distinct);
        assert!(!c.cumulatively_ordered);
    }

    #[test]
    fn classify_essentially_distinct() {
        let c = classify_weights(&profile(&[5, 2, 1, 1])).unwrap();
        assert!(!c.distinct);
        assert!(c.essentially_distinct);
        assert!(c.cumulatively_ordered);
    }

    #[test]
    fn classify_all_tied() {
        let c = classify_weights(&profile(&[2, 2, 2])).unwrap();
        assert!(!c.distinct);
        assert!(!c.essentially_distinct);
        assert!(!c.cumulatively_ordered);
    }

    #[test]
    fn classify_rejects_empty() {
        let p = WeightProfile::<i64>::new(BTreeMap::new()).unwrap();
        assert!(classify_weights(&p).is_err());
    }

    #[test]
    fn rejects_nonpositive_weight() {
        let err = WeightProfile::from_pairs([(AgentId::new("i1"), 0i64)]);
        assert!(err.is_err());
    }

    #[test]
    fn canonical_order_breaks_ties_by_id() {
        let p = WeightProfile::from_pairs([
            (AgentId::new("z"), 2i64),
            (AgentId::new("a"), 2),
            (AgentId::new("m"), 5),
        ])
        .unwrap();
        let order: Vec<String> = p
            .canonical_order()
            .iter()
            .map(|a| a.as_str().to_string())
            .collect();
        assert_eq!(order, ["m", "a", "z"]);
    }

    #[test]
    fn orderings_no_ties() {
        let o = consistent_orderings(&profile(&[4, 3, 2]), &Limits::default()).unwrap();
        assert_eq!(o.len(), 1);
        let ids: Vec<_> = o[0].iter().map(|a| a.as_str().to_string()).collect();
        assert_eq!(ids, ["i1", "i2", "i3"]);
    }

    #[test]
    fn orderings_one_tie() {
        let o = consistent_orderings(&profile(&[5, 2, 1, 1]), &Limits::default()).unwrap();
        assert_eq!(o.len(), 2);
        assert_eq!(o[0][0].as_str(), "i1");
        assert_eq!(o[0][1].as_str(), "i2");
        assert_ne!(o[0][2], o[1][2]);
    }

    #[test]
    fn orderings_all_tied() {
        let o = consistent_orderings(&profile(&[2, 2, 2]), &Limits::default()).unwrap();
        assert_eq!(o.len(), 6);
    }

    #[test]
    fn orderings_cap() {
        let limits = Limits {
            max_orderings: 5,
            ..Limits::default()
        };
        let err = consistent_orderings(&profile(&[2, 2, 2]), &limits);
        assert!(matches!(err, Err(Error::Resource { .. })));
    }
}
