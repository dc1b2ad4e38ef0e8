use super::UndirectedGraph;
use crate::error::{Error, Result};

/// A list of node subsets of some host graph. Members are stored as sorted
/// node indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueSet {
    cliques: Vec<Vec<usize>>,
}

impl CliqueSet {
    /// Wraps explicit cliques, checking each is a nonempty complete subgraph of `host`.
    pub fn new(host: &UndirectedGraph, cliques: Vec<Vec<usize>>) -> Result<Self> {
        let mut out = Vec::with_capacity(cliques.len());
        for mut c in cliques {
            c.sort_unstable();
            c.dedup();
            if c.is_empty() {
                return Err(Error::InvalidGraph("empty clique".into()));
            }
            if c.iter().any(|&v| v >= host.n()) {
                return Err(Error::InvalidGraph(format!("clique {c:?} out of range")));
            }
            if !host.is_complete_on(&c) {
                let names: Vec<&str> = c.iter().map(|&v| host.label(v)).collect();
                return Err(Error::InvalidGraph(format!("{names:?} is not a clique")));
            }
            out.push(c);
        }
        Ok(Self { cliques: out })
    }

    pub fn from_labels(host: &UndirectedGraph, cliques: &[Vec<String>]) -> Result<Self> {
        let idx = cliques
            .iter()
            .map(|c| {
                c.iter()
                    .map(|l| {
                        host.index_of(l).ok_or_else(|| {
                            Error::InvalidGraph(format!("clique member {l:?} is not a node"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(host, idx)
    }

    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> {
        self.cliques.iter().map(Vec::as_slice)
    }

    pub fn as_slice(&self) -> &[Vec<usize>] {
        &self.cliques
    }

    pub fn max_size(&self) -> usize {
        self.cliques.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Members of every clique as labels of `host`, sorted within each clique.
    pub fn to_labels(&self, host: &UndirectedGraph) -> Vec<Vec<String>> {
        self.cliques
            .iter()
            .map(|c| sorted_labels(host, c))
            .collect()
    }
}

fn sorted_labels(host: &UndirectedGraph, c: &[usize]) -> Vec<String> {
    let mut l: Vec<String> = c.iter().map(|&v| host.label(v).to_string()).collect();
    l.sort();
    l
}

/// Bron–Kerbosch with Tomita pivoting. Output is sorted lexicographically by
/// the sorted member labels of each clique.
pub fn maximal_cliques(g: &UndirectedGraph) -> CliqueSet {
    let mut found = Vec::new();
    let p: Vec<usize> = (0..g.n()).collect();
    bron_kerbosch(g, &mut Vec::new(), p, Vec::new(), &mut found);
    for c in &mut found {
        c.sort_unstable();
    }
    found.sort_by_cached_key(|c| sorted_labels(g, c));
    CliqueSet { cliques: found }
}

fn bron_kerbosch(
    g: &UndirectedGraph,
    r: &mut Vec<usize>,
    mut p: Vec<usize>,
    mut x: Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_empty() {
        if x.is_empty() && !r.is_empty() {
            out.push(r.clone());
        }
        return;
    }
    let pivot = p
        .iter()
        .chain(x.iter())
        .copied()
        .max_by_key(|&u| (p.iter().filter(|&&v| g.has_edge(u, v)).count(), std::cmp::Reverse(u)))
        .expect("p is nonempty");
    let candidates: Vec<usize> = p.iter().copied().filter(|&v| !g.has_edge(pivot, v)).collect();
    for v in candidates {
        let nb = g.neighbors(v);
        let p_next = p.iter().copied().filter(|u| nb.contains(u)).collect();
        let x_next = x.iter().copied().filter(|u| nb.contains(u)).collect();
        r.push(v);
        bron_kerbosch(g, r, p_next, x_next, out);
        r.pop();
        p.retain(|&u| u != v);
        x.push(v);
    }
}
