use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{AnyGraph, CliqueSet, DirectedAcyclicGraph, UndirectedGraph};
use crate::error::{Error, Result};

/// `{"directed": bool, "nodes": [...], "edges": [[a, b], ...]}`. Unknown keys
/// are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub directed: bool,
    pub nodes: Vec<String>,
    pub edges: Vec<[String; 2]>,
}

impl GraphFile {
    pub fn into_graph(self) -> Result<AnyGraph> {
        let edges: Vec<(String, String)> = self
            .edges
            .into_iter()
            .map(|[a, b]| (a, b))
            .collect();
        if self.directed {
            Ok(AnyGraph::Directed(DirectedAcyclicGraph::from_label_edges(self.nodes, &edges)?))
        } else {
            Ok(AnyGraph::Undirected(UndirectedGraph::from_label_edges(self.nodes, &edges)?))
        }
    }

    pub fn from_graph(g: &AnyGraph) -> Self {
        match g {
            AnyGraph::Undirected(g) => Self {
                directed: false,
                nodes: g.labels().to_vec(),
                edges: g
                    .edges()
                    .into_iter()
                    .map(|(u, v)| [g.label(u).to_string(), g.label(v).to_string()])
                    .collect(),
            },
            AnyGraph::Directed(d) => Self {
                directed: true,
                nodes: d.labels().to_vec(),
                edges: d
                    .edges()
                    .into_iter()
                    .map(|(p, c)| [d.label(p).to_string(), d.label(c).to_string()])
                    .collect(),
            },
        }
    }
}

fn malformed(path: &Path, reason: impl ToString) -> Error {
    Error::MalformedFile { path: path.display().to_string(), reason: reason.to_string() }
}

pub fn read_graph_file(path: impl AsRef<Path>) -> Result<AnyGraph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| malformed(path, e))?;
    let file: GraphFile = serde_json::from_str(&text).map_err(|e| malformed(path, e))?;
    file.into_graph().map_err(|e| malformed(path, e))
}

/// `{"cliques": [["A", "B"], ...]}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CliquesFile {
    pub cliques: Vec<Vec<String>>,
}

impl CliquesFile {
    pub fn from_set(host: &UndirectedGraph, set: &CliqueSet) -> Self {
        Self { cliques: set.to_labels(host) }
    }
}

pub fn read_cliques_file(path: impl AsRef<Path>, host: &UndirectedGraph) -> Result<CliqueSet> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| malformed(path, e))?;
    let file: CliquesFile = serde_json::from_str(&text).map_err(|e| malformed(path, e))?;
    CliqueSet::from_labels(host, &file.cliques).map_err(|e| malformed(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_undirected_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.json");
        fs::write(
            &path,
            r#"{"directed": false, "nodes": ["A","B","C","D"],
                "edges": [["A","B"],["B","C"],["A","C"],["C","D"]]}"#,
        )
        .unwrap();
        let g = read_graph_file(&path).unwrap().into_undirected().unwrap();
        assert_eq!(g.edge_count(), 4);
        let round = GraphFile::from_graph(&AnyGraph::Undirected(g.clone()));
        assert_eq!(round.into_graph().unwrap(), AnyGraph::Undirected(g));
    }

    #[test]
    fn rejects_unknown_keys_and_bad_edges() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.json");
        fs::write(&path, r#"{"directed": false, "nodes": ["A"], "edges": [], "weights": []}"#).unwrap();
        assert!(matches!(read_graph_file(&path), Err(Error::MalformedFile { .. })));
        fs::write(&path, r#"{"directed": true, "nodes": ["A","B"], "edges": [["A","B"],["B","A"]]}"#)
            .unwrap();
        assert!(matches!(read_graph_file(&path), Err(Error::MalformedFile { .. })));
        fs::write(&path, r#"{"directed": false, "nodes": ["A"], "edges": [["A","Q"]]}"#).unwrap();
        assert!(read_graph_file(&path).is_err());
        assert!(read_graph_file(dir.path().join("missing.json")).is_err());
    }
}
