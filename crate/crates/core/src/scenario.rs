//! Scenario files: JSON documents describing either a Cayley X-join
//! (`"kind": "cayley"`) or a plain generalized X-join (`"kind": "xjoin"`).
//! Elements and vertices are referred to by name; unknown keys are rejected.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::groups::{FiniteGroup, GroupSpec, Transversal};
use crate::perms::PartitionOfPoints;
use crate::synth::{CayleyScenario, SynthMode};
use crate::xjoin::XJoinInput;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScenarioFile {
    Cayley(CayleyFile),
    Xjoin(XJoinFile),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CayleyFile {
    pub base: CayleyData,
    /// Generators of the block stabilizer `H`.
    pub block_generators: Vec<String>,
    pub fiber: CayleyData,
    /// Images of fiber generators in the base group.
    pub theta: BTreeMap<String, String>,
    #[serde(default)]
    pub mode: SynthMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explicit: Option<ExplicitChoice>,
    #[serde(default = "yes")]
    pub collapse_allowed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub caps: Option<Caps>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputPaths>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CayleyData {
    pub group: GroupSpec,
    pub connection: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitChoice {
    pub reps: Vec<String>,
    pub transversal: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XJoinFile {
    pub base: NamedGraph,
    pub blocks: Vec<BlockFile>,
    #[serde(default = "yes")]
    pub collapse_allowed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub caps: Option<Caps>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputPaths>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockFile {
    pub label: String,
    pub vertices: Vec<String>,
    pub fiber: NamedGraph,
    /// Fiber vertex to base vertex.
    pub map: BTreeMap<String, String>,
}

/// A graph with edges given by vertex label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedGraph {
    pub vertices: Vec<String>,
    pub edges: Vec<[String; 2]>,
}

/// Default output locations, used when the command line gives none.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fibers_dir: Option<String>,
}

fn yes() -> bool {
    true
}

impl NamedGraph {
    pub fn to_graph(&self) -> Result<Graph> {
        let index: BTreeMap<&str, usize> =
            self.vertices.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        let edges = self
            .edges
            .iter()
            .map(|[a, b]| Ok((lookup(&index, a, "vertex")?, lookup(&index, b, "vertex")?)))
            .collect::<Result<Vec<_>>>()?;
        Graph::new(self.vertices.clone(), edges)
    }
}

fn lookup(index: &BTreeMap<&str, usize>, key: &str, what: &str) -> Result<usize> {
    index
        .get(key)
        .copied()
        .ok_or_else(|| Error::InvalidInput(format!("unknown {what} {key:?}")))
}

fn elements(g: &FiniteGroup, names: &[String]) -> Result<Vec<usize>> {
    names.iter().map(|n| g.element(n)).collect()
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<ScenarioFile> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("scenario: {e}")))
    }

    pub fn load(path: &Path) -> Result<ScenarioFile> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// Caps from the file, if any, on top of the defaults.
    pub fn caps(&self) -> Caps {
        match self {
            ScenarioFile::Cayley(c) => c.caps,
            ScenarioFile::Xjoin(x) => x.caps,
        }
        .unwrap_or_default()
    }

    pub fn output(&self) -> OutputPaths {
        match self {
            ScenarioFile::Cayley(c) => c.output.clone(),
            ScenarioFile::Xjoin(x) => x.output.clone(),
        }
        .unwrap_or_default()
    }
}

impl CayleyFile {
    pub fn to_scenario(&self, caps: Caps) -> Result<CayleyScenario> {
        let a = FiniteGroup::from_spec_with(&self.base.group, caps.group_order)?;
        let c = FiniteGroup::from_spec_with(&self.fiber.group, caps.group_order)?;
        let theta = self
            .theta
            .iter()
            .map(|(x, y)| Ok((c.element(x)?, a.element(y)?)))
            .collect::<Result<Vec<_>>>()?;
        let explicit = match &self.explicit {
            None => None,
            Some(ex) => {
                let reps = elements(&a, &ex.reps)?;
                let t: Transversal = ex
                    .transversal
                    .iter()
                    .map(|(h, t)| Ok((a.element(h)?, c.element(t)?)))
                    .collect::<Result<_>>()?;
                Some((reps, t))
            }
        };
        Ok(CayleyScenario {
            base_connection: elements(&a, &self.base.connection)?,
            block_generators: elements(&a, &self.block_generators)?,
            fiber_connection: elements(&c, &self.fiber.connection)?,
            base: a,
            fiber: c,
            theta,
            mode: self.mode,
            explicit,
            collapse_allowed: self.collapse_allowed,
            caps,
        })
    }
}

impl XJoinFile {
    pub fn to_input(&self) -> Result<XJoinInput> {
        let base = self.base.to_graph()?;
        let index: BTreeMap<&str, usize> =
            base.labels().iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        let mut blocks = Vec::new();
        let mut fibers = Vec::new();
        let mut lambdas = Vec::new();
        for block in &self.blocks {
            blocks.push(
                block
                    .vertices
                    .iter()
                    .map(|v| lookup(&index, v, "base vertex"))
                    .collect::<Result<Vec<_>>>()?,
            );
            let fiber = block.fiber.to_graph()?;
            let lambda = fiber
                .labels()
                .iter()
                .map(|y| match block.map.get(y) {
                    Some(x) => lookup(&index, x, "base vertex"),
                    None => Err(Error::InvalidInput(format!(
                        "block {}: fiber vertex {y:?} has no image",
                        block.label
                    ))),
                })
                .collect::<Result<Vec<_>>>()?;
            if let Some(extra) = block.map.keys().find(|k| fiber.index_of(k).is_none()) {
                return Err(Error::InvalidInput(format!(
                    "block {}: map mentions unknown fiber vertex {extra:?}",
                    block.label
                )));
            }
            fibers.push(fiber);
            lambdas.push(lambda);
        }
        Ok(XJoinInput {
            blocks: PartitionOfPoints::new(base.vertex_count(), blocks)?,
            block_labels: self.blocks.iter().map(|b| b.label.clone()).collect(),
            base,
            fibers,
            lambdas,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xjoin::generalized_xjoin;

    const EX22: &str = r#"{
      "kind": "xjoin",
      "base": {"vertices": ["1","2","3","4"],
               "edges": [["1","2"],["2","3"],["3","4"],["4","1"],["2","4"]]},
      "blocks": [
        {"label": "X", "vertices": ["1","3"],
         "fiber": {"vertices": ["a","b","c","d"], "edges": [["a","b"],["c","d"]]},
         "map": {"a":"1","b":"1","c":"3","d":"3"}},
        {"label": "X'", "vertices": ["2","4"],
         "fiber": {"vertices": ["e","f","g"], "edges": [["e","g"],["g","f"],["e","f"]]},
         "map": {"e":"2","f":"4","g":"4"}}
      ]
    }"#;

    #[test]
    fn xjoin_file_round_trip() {
        let file = ScenarioFile::from_json(EX22).unwrap();
        let ScenarioFile::Xjoin(x) = &file else { panic!("wrong kind") };
        let w = generalized_xjoin(&x.to_input().unwrap(), x.collapse_allowed).unwrap();
        assert_eq!((w.vertex_count(), w.edge_count()), (7, 17));
        assert_eq!(ScenarioFile::from_json(&file.to_json()).unwrap(), file);
    }

    #[test]
    fn cayley_file_parses() {
        let text = r#"{
          "kind": "cayley",
          "base": {"group": {"kind": "dihedral", "order": 6}, "connection": ["x","x2","y"]},
          "block_generators": ["x"],
          "fiber": {"group": {"kind": "elementary_abelian", "p": 3, "k": 2},
                    "connection": ["a","a2","b","b2"]},
          "theta": {"a": "x", "b": "e"},
          "caps": {"closure": 5000}
        }"#;
        let file = ScenarioFile::from_json(text).unwrap();
        assert_eq!(file.caps().closure, 5000);
        assert_eq!(file.caps().aut_vertices, Caps::default().aut_vertices);
        let ScenarioFile::Cayley(c) = file else { panic!("wrong kind") };
        let sc = c.to_scenario(Caps::default()).unwrap();
        assert_eq!(sc.mode, SynthMode::Search);
        assert_eq!(sc.base.order(), 6);
        assert_eq!(sc.fiber_connection.len(), 4);
    }

    #[test]
    fn unknown_keys_and_names_are_rejected() {
        let bad = EX22.replace("\"blocks\"", "\"colour\": 1, \"blocks\"");
        assert!(matches!(ScenarioFile::from_json(&bad), Err(Error::InvalidInput(_))));
        let bad = EX22.replace("\"a\":\"1\"", "\"a\":\"9\"");
        let ScenarioFile::Xjoin(x) = ScenarioFile::from_json(&bad).unwrap() else { panic!() };
        assert!(x.to_input().is_err());
        assert!(ScenarioFile::from_json("{ not json").is_err());
        assert!(ScenarioFile::from_json(r#"{"kind": "other"}"#).is_err());
    }
}
