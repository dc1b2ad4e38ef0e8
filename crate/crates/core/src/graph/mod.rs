//! Undirected and directed acyclic graphs over labelled nodes, plus the
//! graph algorithms the models need: maximal cliques, moralization,
//! triangulation, chordality and acyclic orientation.
//!
//! Nodes are identified internally by their declaration index; labels are
//! kept for reporting and file IO.

mod chordal;
mod cliques;
mod generators;
mod io;

pub use chordal::{is_chordal, max_cardinality_order, orient_acyclic, triangulate};
pub use cliques::{maximal_cliques, CliqueSet};
pub use generators::{generate_graph, AnyGraph, GraphSpec};
pub use io::{read_cliques_file, read_graph_file, CliquesFile, GraphFile};

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::error::{Error, Result};

fn index_labels(labels: &[String]) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::with_capacity(labels.len());
    for (i, l) in labels.iter().enumerate() {
        if index.insert(l.clone(), i).is_some() {
            return Err(Error::InvalidGraph(format!("duplicate node label {l:?}")));
        }
    }
    Ok(index)
}

fn lookup(index: &HashMap<String, usize>, label: &str) -> Result<usize> {
    index
        .get(label)
        .copied()
        .ok_or_else(|| Error::InvalidGraph(format!("edge endpoint {label:?} is not a declared node")))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UndirectedGraph {
    labels: Vec<String>,
    adj: Vec<BTreeSet<usize>>,
}

impl UndirectedGraph {
    /// Builds a graph from index pairs. Duplicate edges are rejected, as are
    /// self-loops and out-of-range endpoints.
    pub fn from_index_edges<I>(labels: Vec<String>, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        index_labels(&labels)?;
        let n = labels.len();
        let mut adj = vec![BTreeSet::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge ({u}, {v}) out of range for {n} nodes")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop on {:?}", labels[u])));
            }
            if !adj[u].insert(v) {
                return Err(Error::InvalidGraph(format!(
                    "duplicate edge {:?}-{:?}",
                    labels[u], labels[v]
                )));
            }
            adj[v].insert(u);
        }
        Ok(Self { labels, adj })
    }

    pub fn from_label_edges(labels: Vec<String>, edges: &[(String, String)]) -> Result<Self> {
        let index = index_labels(&labels)?;
        let pairs = edges
            .iter()
            .map(|(a, b)| Ok((lookup(&index, a)?, lookup(&index, b)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_index_edges(labels, pairs)
    }

    /// Nodes labelled `"1"`..`"n"`.
    pub fn numbered<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::from_index_edges(numbered_labels(n), edges)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(&v)
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, nb)| nb.range(u + 1..).map(move |&v| (u, v)))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    /// True when every pair of `nodes` is adjacent.
    pub fn is_complete_on(&self, nodes: &[usize]) -> bool {
        nodes
            .iter()
            .enumerate()
            .all(|(i, &u)| nodes[i + 1..].iter().all(|&v| self.has_edge(u, v)))
    }

    pub(crate) fn with_extra_edges(&self, extra: &[(usize, usize)]) -> Self {
        let mut adj = self.adj.clone();
        for &(u, v) in extra {
            adj[u].insert(v);
            adj[v].insert(u);
        }
        Self { labels: self.labels.clone(), adj }
    }
}

pub(crate) fn numbered_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| i.to_string()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedAcyclicGraph {
    labels: Vec<String>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
}

impl DirectedAcyclicGraph {
    /// Builds a DAG from `(parent, child)` index pairs, rejecting cycles.
    pub fn from_index_edges<I>(labels: Vec<String>, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        index_labels(&labels)?;
        let n = labels.len();
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        for (p, c) in edges {
            if p >= n || c >= n {
                return Err(Error::InvalidGraph(format!("edge ({p}, {c}) out of range for {n} nodes")));
            }
            if p == c {
                return Err(Error::InvalidGraph(format!("self-loop on {:?}", labels[p])));
            }
            if parents[c].contains(&p) {
                return Err(Error::InvalidGraph(format!(
                    "duplicate edge {:?}->{:?}",
                    labels[p], labels[c]
                )));
            }
            parents[c].push(p);
            children[p].push(c);
        }
        parents.iter_mut().for_each(|p| p.sort_unstable());
        children.iter_mut().for_each(|c| c.sort_unstable());
        let dag = Self { labels, parents, children };
        if dag.try_topological_order().is_none() {
            return Err(Error::InvalidGraph("directed cycle".into()));
        }
        Ok(dag)
    }

    pub fn from_label_edges(labels: Vec<String>, edges: &[(String, String)]) -> Result<Self> {
        let index = index_labels(&labels)?;
        let pairs = edges
            .iter()
            .map(|(a, b)| Ok((lookup(&index, a)?, lookup(&index, b)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_index_edges(labels, pairs)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    /// Parents of `v` in ascending index order.
    pub fn parents(&self, v: usize) -> &[usize] {
        &self.parents[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// `(parent, child)` pairs sorted by child, then parent.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.parents
            .iter()
            .enumerate()
            .flat_map(|(c, ps)| ps.iter().map(move |&p| (p, c)))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(Vec::len).sum()
    }

    /// Kahn's algorithm, always releasing the lowest ready index first.
    pub fn topological_order(&self) -> Vec<usize> {
        self.try_topological_order()
            .expect("acyclic by construction")
    }

    fn try_topological_order(&self) -> Option<Vec<usize>> {
        let n = self.n();
        let mut indegree: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &c in &self.children[v] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// The undirected skeleton (directions dropped, nothing added).
    pub fn skeleton(&self) -> UndirectedGraph {
        UndirectedGraph::from_index_edges(self.labels.clone(), self.edges())
            .expect("a DAG skeleton is a simple graph")
    }

    /// Nodes reachable from `v` by following edges forward.
    pub fn descendants(&self, v: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::new();
        let mut queue: VecDeque<usize> = self.children[v].iter().copied().collect();
        while let Some(u) = queue.pop_front() {
            if seen.insert(u) {
                queue.extend(self.children[u].iter().copied());
            }
        }
        seen
    }
}

/// Connects every directed edge and marries every pair of co-parents.
pub fn moralize(dag: &DirectedAcyclicGraph) -> UndirectedGraph {
    let n = dag.n();
    let mut adj = vec![BTreeSet::new(); n];
    for child in 0..n {
        let pa = dag.parents(child);
        for (i, &p) in pa.iter().enumerate() {
            adj[p].insert(child);
            adj[child].insert(p);
            for &q in &pa[i + 1..] {
                adj[p].insert(q);
                adj[q].insert(p);
            }
        }
    }
    UndirectedGraph { labels: dag.labels.clone(), adj }
}
