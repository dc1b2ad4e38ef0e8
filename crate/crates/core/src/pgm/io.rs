use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Dataset, Distribution, FactorTable, MarkovModel};
use crate::error::{Error, Result};
use crate::graph::{CliqueSet, UndirectedGraph};

pub const FACTOR_INDEX_ORDER: &str = "first_scope_node_msb";
pub const DISTRIBUTION_BIT_ORDER: &str = "qubit0_lsb";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorEntry {
    pub scope: Vec<String>,
    pub values: Vec<f64>,
}

/// `{"index_order": "first_scope_node_msb", "cliques": [{"scope": [...], "values": [...]}]}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorFile {
    #[serde(default = "default_index_order")]
    pub index_order: String,
    pub cliques: Vec<FactorEntry>,
}

fn default_index_order() -> String {
    FACTOR_INDEX_ORDER.to_string()
}

impl FactorFile {
    pub fn from_model(m: &MarkovModel) -> Self {
        let g = m.graph();
        Self {
            index_order: default_index_order(),
            cliques: m
                .factors()
                .iter()
                .map(|f| FactorEntry {
                    scope: f.scope().iter().map(|&v| g.label(v).to_string()).collect(),
                    values: f.values().to_vec(),
                })
                .collect(),
        }
    }

    /// Rebuilds the model on `graph`; each entry's scope becomes a clique.
    pub fn into_model(self, graph: UndirectedGraph) -> Result<MarkovModel> {
        if self.index_order != FACTOR_INDEX_ORDER {
            return Err(Error::InvalidModel(format!("unsupported index_order {:?}", self.index_order)));
        }
        let mut scopes = Vec::with_capacity(self.cliques.len());
        let mut factors = Vec::with_capacity(self.cliques.len());
        for entry in self.cliques {
            let scope = entry
                .scope
                .iter()
                .map(|l| {
                    graph
                        .index_of(l)
                        .ok_or_else(|| Error::InvalidModel(format!("factor scope member {l:?} is not a node")))
                })
                .collect::<Result<Vec<_>>>()?;
            scopes.push(scope.clone());
            factors.push(FactorTable::new(scope, entry.values)?);
        }
        let cliques = CliqueSet::new(&graph, scopes)?;
        MarkovModel::new(graph, cliques, factors)
    }
}

pub fn read_factor_file(path: impl AsRef<Path>, graph: UndirectedGraph) -> Result<MarkovModel> {
    let path = path.as_ref();
    let file: FactorFile = serde_json::from_str(&fs::read_to_string(path)?).map_err(|e| {
        Error::MalformedFile { path: path.display().to_string(), reason: e.to_string() }
    })?;
    file.into_model(graph)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionFile {
    pub bit_order: String,
    pub n: usize,
    pub probs: Vec<f64>,
}

impl From<&Distribution> for DistributionFile {
    fn from(d: &Distribution) -> Self {
        Self { bit_order: DISTRIBUTION_BIT_ORDER.to_string(), n: d.n(), probs: d.probs().to_vec() }
    }
}

impl DistributionFile {
    pub fn into_distribution(self) -> Result<Distribution> {
        if self.bit_order != DISTRIBUTION_BIT_ORDER {
            return Err(Error::InvalidModel(format!("unsupported bit_order {:?}", self.bit_order)));
        }
        Distribution::new(self.n, self.probs)
    }
}

pub fn read_distribution(path: impl AsRef<Path>) -> Result<Distribution> {
    let path = path.as_ref();
    let file: DistributionFile = serde_json::from_str(&fs::read_to_string(path)?).map_err(|e| {
        Error::MalformedFile { path: path.display().to_string(), reason: e.to_string() }
    })?;
    file.into_distribution()
}

/// Parses one bitstring per line (variable 0 leftmost). Blank lines are skipped.
pub fn parse_dataset(text: &str) -> Result<Dataset> {
    let mut n = None;
    let mut samples = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let width = *n.get_or_insert(line.len());
        if line.len() != width {
            return Err(Error::InvalidModel(format!(
                "line {}: expected {width} bits, found {}",
                lineno + 1,
                line.len()
            )));
        }
        let mut s = 0u32;
        for (q, ch) in line.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => s |= 1 << q,
                _ => return Err(Error::InvalidModel(format!("line {}: invalid bit {ch:?}", lineno + 1))),
            }
        }
        samples.push(s);
    }
    Dataset::new(n.unwrap_or(0), samples)
}

pub fn read_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    parse_dataset(&fs::read_to_string(path)?)
}
