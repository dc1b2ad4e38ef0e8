use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{io, numbered_labels, DirectedAcyclicGraph, UndirectedGraph};
use crate::error::{Error, Result};
use crate::seed;

/// Graph families used by the experiments. Generated nodes are labelled
/// `"1"`..`"n"` except for grids, whose nodes are `"r<row>c<col>"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphSpec {
    Grid { rows: usize, cols: usize },
    Loop { n: usize },
    ErdosRenyi { n: usize, p: f64, seed: u64 },
    TriangleChain { n: usize },
    Kgram { n: usize, k: usize },
    Complete { n: usize },
    FromFile { path: String },
}

#[derive(Clone, Debug, PartialEq)]
pub enum AnyGraph {
    Undirected(UndirectedGraph),
    Directed(DirectedAcyclicGraph),
}

impl AnyGraph {
    pub fn n(&self) -> usize {
        match self {
            AnyGraph::Undirected(g) => g.n(),
            AnyGraph::Directed(d) => d.n(),
        }
    }

    pub fn into_undirected(self) -> Result<UndirectedGraph> {
        match self {
            AnyGraph::Undirected(g) => Ok(g),
            AnyGraph::Directed(_) => Err(Error::InvalidGraph("expected an undirected graph".into())),
        }
    }

    pub fn into_directed(self) -> Result<DirectedAcyclicGraph> {
        match self {
            AnyGraph::Directed(d) => Ok(d),
            AnyGraph::Undirected(_) => Err(Error::InvalidGraph("expected a directed graph".into())),
        }
    }
}

fn positive(name: &str, v: usize) -> Result<()> {
    if v == 0 {
        Err(Error::InvalidGraph(format!("{name} must be at least 1")))
    } else {
        Ok(())
    }
}

pub fn generate_graph(spec: &GraphSpec) -> Result<AnyGraph> {
    use GraphSpec::*;
    let g = match *spec {
        Grid { rows, cols } => {
            positive("rows", rows)?;
            positive("cols", cols)?;
            let id = |r: usize, c: usize| r * cols + c;
            let labels = (0..rows)
                .flat_map(|r| (0..cols).map(move |c| format!("r{r}c{c}")))
                .collect();
            let mut edges = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    if c + 1 < cols {
                        edges.push((id(r, c), id(r, c + 1)));
                    }
                    if r + 1 < rows {
                        edges.push((id(r, c), id(r + 1, c)));
                    }
                }
            }
            AnyGraph::Undirected(UndirectedGraph::from_index_edges(labels, edges)?)
        }
        Loop { n } => {
            if n < 3 {
                return Err(Error::InvalidGraph("a loop needs at least 3 nodes".into()));
            }
            let edges = (0..n).map(|i| (i.min((i + 1) % n), i.max((i + 1) % n)));
            AnyGraph::Undirected(UndirectedGraph::numbered(n, edges)?)
        }
        ErdosRenyi { n, p, seed } => {
            positive("n", n)?;
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidGraph(format!("edge probability {p} outside [0, 1]")));
            }
            let mut rng = seed::rng(seed);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen::<f64>() < p {
                        edges.push((u, v));
                    }
                }
            }
            AnyGraph::Undirected(UndirectedGraph::numbered(n, edges)?)
        }
        TriangleChain { n } => {
            positive("n", n)?;
            let edges = (0..n).flat_map(|i| {
                [(i, i + 1), (i, i + 2)].into_iter().filter(move |&(_, j)| j < n)
            });
            AnyGraph::Undirected(UndirectedGraph::numbered(n, edges)?)
        }
        Kgram { n, k } => {
            positive("n", n)?;
            positive("k", k)?;
            let edges = (0..n).flat_map(|l| (l.saturating_sub(k - 1)..l).map(move |p| (p, l)));
            AnyGraph::Directed(DirectedAcyclicGraph::from_index_edges(numbered_labels(n), edges)?)
        }
        Complete { n } => {
            positive("n", n)?;
            let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
            AnyGraph::Undirected(UndirectedGraph::numbered(n, edges)?)
        }
        FromFile { ref path } => io::read_graph_file(path)?,
    };
    Ok(g)
}
