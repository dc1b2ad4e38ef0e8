//! Ising Hamiltonians built from Markov-network cliques, parameter counts for
//! the three model families, and circuit resource estimates.

mod resources;

pub use resources::{estimate_resources, mcry_cost, multi_rz_cost, AncillaMode, ResourceEstimate};

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{CliqueSet, DirectedAcyclicGraph};

/// One `Z⊗…⊗Z` term over a sorted, nonempty qubit subset.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IsingTerm {
    pub subset: Vec<usize>,
    pub coefficient_index: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsingHamiltonian {
    n: usize,
    terms: Vec<IsingTerm>,
}

impl IsingHamiltonian {
    /// Deduplicates `subsets` and orders them by size, then lexicographically.
    /// Coefficient indices follow that order.
    pub fn from_subsets<I>(n: usize, subsets: I) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<usize>>,
    {
        let mut unique = BTreeSet::new();
        for mut s in subsets {
            s.sort_unstable();
            s.dedup();
            if s.is_empty() || s.iter().any(|&q| q >= n) {
                return Err(Error::InvalidModel(format!("invalid term subset {s:?} for {n} qubits")));
            }
            unique.insert((s.len(), s));
        }
        let terms = unique
            .into_iter()
            .enumerate()
            .map(|(i, (_, subset))| IsingTerm { subset, coefficient_index: i })
            .collect();
        Ok(Self { n, terms })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[IsingTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn locality(&self) -> usize {
        self.terms.iter().map(|t| t.subset.len()).max().unwrap_or(0)
    }

    pub fn contains(&self, subset: &[usize]) -> bool {
        self.terms.iter().any(|t| t.subset == subset)
    }
}

/// Nonempty subsets of `clique` (sorted members), optionally capped in size.
pub(crate) fn clique_subsets(clique: &[usize], max_locality: Option<usize>) -> Vec<Vec<usize>> {
    let m = clique.len();
    let cap = max_locality.unwrap_or(m);
    (1u64..(1 << m))
        .filter(|mask| mask.count_ones() as usize <= cap)
        .map(|mask| (0..m).filter(|&i| mask >> i & 1 == 1).map(|i| clique[i]).collect())
        .collect()
}

/// Union over cliques of all their nonempty subsets, one coefficient per
/// distinct subset.
pub fn build_ising(n: usize, cliques: &CliqueSet, max_locality: Option<usize>) -> Result<IsingHamiltonian> {
    if max_locality == Some(0) {
        return Err(Error::InvalidConfig("max_locality must be at least 1".into()));
    }
    IsingHamiltonian::from_subsets(n, cliques.iter().flat_map(|c| clique_subsets(c, max_locality)))
}

/// Size of the full factor-table representation, `Σ_C 2^|C|`.
pub fn efficient_mn_size(cliques: &CliqueSet) -> u128 {
    cliques.iter().map(|c| 1u128 << c.len()).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Qcibm,
    Qcmrf,
    Bbqc,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Qcibm => "qcibm",
            ModelKind::Qcmrf => "qcmrf",
            ModelKind::Bbqc => "bbqc",
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qcibm" => Ok(ModelKind::Qcibm),
            "qcmrf" => Ok(ModelKind::Qcmrf),
            "bbqc" => Ok(ModelKind::Bbqc),
            _ => Err(Error::InvalidConfig(format!("unknown model {s:?}"))),
        }
    }
}

/// The structure each model family is built from.
#[derive(Clone, Copy, Debug)]
pub enum ModelStructure<'a> {
    Qubits(usize),
    Markov { n: usize, cliques: &'a CliqueSet, max_locality: Option<usize> },
    Bayes(&'a DirectedAcyclicGraph),
}

impl ModelStructure<'_> {
    pub fn n(&self) -> usize {
        match *self {
            ModelStructure::Qubits(n) => n,
            ModelStructure::Markov { n, .. } => n,
            ModelStructure::Bayes(d) => d.n(),
        }
    }
}

pub fn qcibm_param_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2 + 4 * n
}

pub fn bbqc_param_count(dag: &DirectedAcyclicGraph) -> usize {
    (0..dag.n()).map(|v| 1usize << dag.parents(v).len()).sum::<usize>() + 3 * dag.n()
}

/// Trainable parameter count, including the three basis-change angles per qubit.
pub fn count_params(kind: ModelKind, structure: ModelStructure<'_>) -> Result<usize> {
    match (kind, structure) {
        (ModelKind::Qcibm, ModelStructure::Qubits(n)) => Ok(qcibm_param_count(n)),
        (ModelKind::Qcmrf, ModelStructure::Markov { n, cliques, max_locality }) => {
            Ok(build_ising(n, cliques, max_locality)?.len() + 3 * n)
        }
        (ModelKind::Bbqc, ModelStructure::Bayes(dag)) => Ok(bbqc_param_count(dag)),
        (kind, _) => Err(Error::StructureMismatch(kind.name())),
    }
}
