//! JSON file formats.
//!
//! Problem file:
//! `{"agents":[{"id":"i1","weight":6},…], "objects":[{"id":"o1","capacity":1},…],
//!   "preferences":{"i1":["o1","o2"],…}}`
//!
//! Matching file: `{"assignment":{"i1":"o1","i2":null,…}}`
//!
//! Serialization is canonical: agents and objects keep their declared order,
//! preference and assignment keys follow the agent order, output is pretty
//! JSON with a trailing newline. Canonical files round-trip byte-for-byte.

use std::collections::BTreeMap;

use indexmap::IndexMap;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::model::{AgentId, Matching, ObjectId, Preference, Problem};
use crate::{Error, Result, Scalar};

#[derive(Serialize, Deserialize)]
struct AgentEntry {
    id: String,
    weight: i64,
}

#[derive(Serialize, Deserialize)]
struct ObjectEntry {
    id: String,
    capacity: u32,
}

#[derive(Serialize, Deserialize)]
struct ProblemFile {
    agents: Vec<AgentEntry>,
    objects: Vec<ObjectEntry>,
    preferences: IndexMap<String, Vec<String>>,
}

impl ProblemFile {
    fn into_problem<W: Scalar>(self) -> Result<Problem<W>> {
        let mut agents = Vec::with_capacity(self.agents.len());
        for (i, entry) in self.agents.into_iter().enumerate() {
            if entry.weight <= 0 {
                return Err(Error::invalid(
                    format!("agents[{i}].weight"),
                    format!("weight must be positive, got {}", entry.weight),
                ));
            }
            let weight = W::from_i64(entry.weight).ok_or_else(|| {
                Error::invalid(
                    format!("agents[{i}].weight"),
                    "weight does not fit the scalar type",
                )
            })?;
            agents.push((AgentId::new(entry.id), weight));
        }
        let objects = self
            .objects
            .into_iter()
            .map(|e| (ObjectId::new(e.id), e.capacity))
            .collect();
        let mut preferences = BTreeMap::new();
        for (agent, ranked) in self.preferences {
            let pref = Preference::new(ranked.into_iter().map(ObjectId::new).collect())
                .map_err(|e| match e {
                    Error::Invalid { path, message } => {
                        Error::invalid(format!("preferences[{agent}].{path}"), message)
                    }
                    other => other,
                })?;
            if preferences.insert(AgentId::new(&agent), pref).is_some() {
                return Err(Error::invalid(
                    format!("preferences[{agent}]"),
                    "duplicate agent key",
                ));
            }
        }
        Problem::new(agents, objects, preferences)
    }

    fn from_problem<W: Scalar>(problem: &Problem<W>) -> Result<Self> {
        let mut agents = Vec::with_capacity(problem.agent_count());
        for agent in problem.agents() {
            let weight = problem.weight(agent).unwrap().to_i64().ok_or_else(|| {
                Error::invalid(
                    format!("weights[{agent}]"),
                    "weight does not fit a 64-bit integer",
                )
            })?;
            agents.push(AgentEntry {
                id: agent.as_str().to_string(),
                weight,
            });
        }
        let objects = problem
            .objects()
            .iter()
            .map(|o| ObjectEntry {
                id: o.as_str().to_string(),
                capacity: problem.capacity(o).unwrap(),
            })
            .collect();
        let preferences = problem
            .agents()
            .iter()
            .map(|a| {
                (
                    a.as_str().to_string(),
                    problem
                        .preference(a)
                        .unwrap()
                        .ranked()
                        .iter()
                        .map(|o| o.as_str().to_string())
                        .collect(),
                )
            })
            .collect();
        Ok(ProblemFile {
            agents,
            objects,
            preferences,
        })
    }
}

/// Parses a problem file, reporting the offending field on failure.
pub fn parse_problem<W: Scalar>(text: &str) -> Result<Problem<W>> {
    let file: ProblemFile =
        serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
    file.into_problem()
}

/// Canonical problem serialization; see the module docs.
pub fn serialize_problem<W: Scalar>(problem: &Problem<W>) -> Result<String> {
    let file = ProblemFile::from_problem(problem)?;
    let mut out = serde_json::to_string_pretty(&file).expect("problem file serializes");
    out.push('\n');
    Ok(out)
}

/// Parses a matching file. Validity against a problem is checked separately
/// with [`crate::model::validate_matching`].
pub fn parse_matching(text: &str) -> Result<Matching> {
    serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))
}

/// Canonical matching serialization: assignment keys in the problem's agent
/// order.
pub fn serialize_matching<W: Scalar>(problem: &Problem<W>, matching: &Matching) -> String {
    #[derive(Serialize)]
    struct Repr {
        assignment: IndexMap<String, Option<String>>,
    }
    let assignment = problem
        .agents()
        .iter()
        .map(|a| {
            (
                a.as_str().to_string(),
                matching.assigned(a).map(|o| o.as_str().to_string()),
            )
        })
        .collect();
    let mut out =
        serde_json::to_string_pretty(&Repr { assignment }).expect("matching serializes");
    out.push('\n');
    out
}

// Problems embedded in reports and witnesses use the same file schema.
impl<W: Scalar> Serialize for Problem<W> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let file = ProblemFile::from_problem(self)
            .map_err(|e| serde::ser::Error::custom(e.to_string()))?;
        file.serialize(serializer)
    }
}

impl<'de, W: Scalar> Deserialize<'de> for Problem<W> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let file = ProblemFile::deserialize(deserializer)?;
        file.into_problem().map_err(|e| D::Error::custom(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Weight;

    const EXAMPLE: &str = r#"{
  "agents": [
    { "id": "i1", "weight": 6 },
    { "id": "i2", "weight": 3 },
    { "id": "i3", "weight": 2 }
  ],
  "objects": [
    { "id": "o1", "capacity": 1 },
    { "id": "o2", "capacity": 1 },
    { "id": "o3", "capacity": 1 }
  ],
  "preferences": {
    "i1": ["o1", "o2", "o3"],
    "i2": ["o1", "o2", "o3"],
    "i3": ["o1", "o2", "o3"]
  }
}"#;

    #[test]
    fn parses_the_three_agent_example() {
        let p: Problem<Weight> = parse_problem(EXAMPLE).unwrap();
        assert_eq!(p.agent_count(), 3);
        assert_eq!(p.object_count(), 3);
        assert_eq!(*p.weight(&AgentId::new("i1")).unwrap(), 6);
    }

    #[test]
    fn problem_round_trips_bit_exactly() {
        let p: Problem<Weight> = parse_problem(EXAMPLE).unwrap();
        let text = serialize_problem(&p).unwrap();
        let reparsed: Problem<Weight> = parse_problem(&text).unwrap();
        assert_eq!(p, reparsed);
        assert_eq!(text, serialize_problem(&reparsed).unwrap());
    }

    #[test]
    fn matching_round_trips_bit_exactly() {
        let p: Problem<Weight> = parse_problem(EXAMPLE).unwrap();
        let m = Matching::from_strs(&[("i1", Some("o1")), ("i2", None), ("i3", Some("o3"))]);
        let text = serialize_matching(&p, &m);
        let reparsed = parse_matching(&text).unwrap();
        assert_eq!(m, reparsed);
        assert_eq!(text, serialize_matching(&p, &reparsed));
    }

    #[test]
    fn unknown_preference_object_is_reported_with_name() {
        let text = EXAMPLE.replace("\"o3\"\n", "\"oX\"\n").replace(
            r#""i3": ["o1", "o2", "o3"]"#,
            r#""i3": ["o1", "o2", "oX"]"#,
        );
        let err = parse_problem::<Weight>(&text).unwrap_err();
        assert!(err.to_string().contains("oX"), "{err}");
    }

    #[test]
    fn nonpositive_weight_is_rejected_with_path() {
        let text = EXAMPLE.replace("\"weight\": 3", "\"weight\": 0");
        let err = parse_problem::<Weight>(&text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("agents[1].weight"), "{msg}");
    }

    #[test]
    fn syntax_error_is_a_json_error() {
        let err = parse_problem::<Weight>("{not json").unwrap_err();
        assert!(matches!(err, Error::Json(_)));
    }
}
