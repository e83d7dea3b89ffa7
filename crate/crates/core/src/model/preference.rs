use serde::{Deserialize, Serialize};

use crate::model::ObjectId;

/// Strict preference of one agent: her acceptable objects, most- to
/// least-preferred. Objects not listed are unacceptable, and the outside
/// option (staying unassigned) ranks directly after the last listed object.
///
/// Unacceptable objects are mutually indifferent and rank below the outside
/// option; see [`Desirability`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Preference(Vec<ObjectId>);

impl Preference {
    /// Builds a preference from the ranked acceptable list. Duplicates are
    /// rejected; validity against a problem's object set is checked when the
    /// preference is attached to a problem.
    pub fn new(ranked: Vec<ObjectId>) -> crate::Result<Self> {
        for (i, obj) in ranked.iter().enumerate() {
            if ranked[..i].contains(obj) {
                return Err(crate::Error::invalid(
                    format!("preference[{i}]"),
                    format!("duplicate object `{obj}` in preference list"),
                ));
            }
        }
        Ok(Preference(ranked))
    }

    pub fn from_strs(ranked: &[&str]) -> Self {
        Preference::new(ranked.iter().map(ObjectId::new).collect())
            .expect("duplicate object in literal preference list")
    }

    /// The empty preference: every object is unacceptable.
    pub fn empty() -> Self {
        Preference(Vec::new())
    }

    /// Preference whose only acceptable object is `object`.
    pub fn only(object: ObjectId) -> Self {
        Preference(vec![object])
    }

    pub fn ranked(&self) -> &[ObjectId] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn accepts(&self, object: &ObjectId) -> bool {
        self.0.contains(object)
    }

    /// Position of `object` in the ranked list, if acceptable.
    pub fn rank_of(&self, object: &ObjectId) -> Option<usize> {
        self.0.iter().position(|o| o == object)
    }

    /// How this agent values an assignment (`None` = unassigned).
    pub fn desirability(&self, assignment: Option<&ObjectId>) -> Desirability {
        match assignment {
            None => Desirability::Outside,
            Some(obj) => match self.rank_of(obj) {
                Some(r) => Desirability::Ranked(r),
                None => Desirability::Unacceptable,
            },
        }
    }

    /// True iff the agent strictly prefers assignment `a` to assignment `b`.
    pub fn strictly_prefers(&self, a: Option<&ObjectId>, b: Option<&ObjectId>) -> bool {
        self.desirability(a) < self.desirability(b)
    }

    /// True iff the agent finds `a` at least as good as `b`.
    pub fn weakly_prefers(&self, a: Option<&ObjectId>, b: Option<&ObjectId>) -> bool {
        self.desirability(a) <= self.desirability(b)
    }
}

/// Value of an assignment under one agent's preference. Lower is better:
/// ranked objects in list order, then the outside option, then all
/// unacceptable objects (which tie with each other).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Desirability {
    Ranked(usize),
    Outside,
    Unacceptable,
}
