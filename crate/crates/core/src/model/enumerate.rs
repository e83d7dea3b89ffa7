use crate::model::index::{Odometer, ProblemIndex};
use crate::model::{Matching, Problem};
use crate::{Error, Limits, Result, Scalar};

/// Streams every capacity-feasible matching of `problem` exactly once, in a
/// deterministic order, including matchings that assign unacceptable objects
/// and the all-unassigned matching.
///
/// The stream is bounded by `limits.max_matchings`: once the cap would be
/// exceeded the iterator yields a single [`Error::Resource`] and stops.
/// Streams are independently restartable — call again for a fresh pass.
pub fn enumerate_matchings<'a, W: Scalar>(
    problem: &'a Problem<W>,
    limits: &Limits,
) -> MatchingIter<'a, W> {
    let index = ProblemIndex::new(problem);
    let odometer = index.enumerate();
    MatchingIter {
        index,
        odometer,
        yielded: 0,
        cap: limits.max_matchings,
        failed: false,
    }
}

pub struct MatchingIter<'a, W: Scalar> {
    index: ProblemIndex<'a, W>,
    odometer: Odometer,
    yielded: u64,
    cap: u64,
    failed: bool,
}

impl<W: Scalar> Iterator for MatchingIter<'_, W> {
    type Item = Result<Matching>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        let compact = self.odometer.next()?;
        if self.yielded >= self.cap {
            self.failed = true;
            return Some(Err(Error::resource(
                "matching enumeration",
                self.cap + 1,
                self.cap,
            )));
        }
        self.yielded += 1;
        Some(Ok(self.index.expand(&compact)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_matching;
    use std::collections::BTreeSet;

    #[test]
    fn one_agent_one_object_has_two_matchings() {
        let p: Problem<i64> =
            Problem::from_parts(&[("i1", 1)], &[("o1", 1)], &[("i1", &["o1"])]).unwrap();
        let all: Vec<_> = enumerate_matchings(&p, &Limits::default())
            .collect::<Result<Vec<_>>>()
            .unwrap();
        assert_eq!(all.len(), 2);
    }

    #[test]
    fn capacity_two_object_admits_four_matchings() {
        let p: Problem<i64> = Problem::from_parts(
            &[("i1", 1), ("i2", 1)],
            &[("o1", 2)],
            &[("i1", &["o1"]), ("i2", &["o1"])],
        )
        .unwrap();
        let all: Vec<_> = enumerate_matchings(&p, &Limits::default())
            .collect::<Result<Vec<_>>>()
            .unwrap();
        assert_eq!(all.len(), 4);
    }

    #[test]
    fn three_by_three_unit_caps_yield_34() {
        let p: Problem<i64> = Problem::from_parts(
            &[("i1", 1), ("i2", 1), ("i3", 1)],
            &[("o1", 1), ("o2", 1), ("o3", 1)],
            &[("i1", &["o1"]), ("i2", &[]), ("i3", &["o2", "o3"])],
        )
        .unwrap();
        let all: Vec<_> = enumerate_matchings(&p, &Limits::default())
            .collect::<Result<Vec<_>>>()
            .unwrap();
        assert_eq!(all.len(), 34);

        let unique: BTreeSet<_> = all.iter().cloned().collect();
        assert_eq!(unique.len(), all.len(), "duplicates in enumeration");
        for m in &all {
            assert!(validate_matching(&p, m).is_ok());
        }
    }

    #[test]
    fn cap_exceeded_is_an_explicit_error() {
        let p: Problem<i64> = Problem::from_parts(
            &[("i1", 1), ("i2", 1), ("i3", 1)],
            &[("o1", 1), ("o2", 1), ("o3", 1)],
            &[("i1", &[]), ("i2", &[]), ("i3", &[])],
        )
        .unwrap();
        let limits = Limits {
            max_matchings: 10,
            ..Limits::default()
        };
        let results: Vec<_> = enumerate_matchings(&p, &limits).collect();
        assert_eq!(results.len(), 11);
        assert!(results[..10].iter().all(|r| r.is_ok()));
        assert!(matches!(results[10], Err(Error::Resource { .. })));
    }
}
