//! Classical graphical models over binary variables: factor tables, Markov
//! and Bayesian networks with exact joint distributions, the random
//! benchmark generator, and exact / Gibbs sampling.

mod benchmark;
mod io;
mod sampling;

pub use benchmark::{generate_benchmark, random_markov_model, Benchmark, FACTOR_RANGE};
pub use io::{
    parse_dataset, read_dataset, read_distribution, read_factor_file, DistributionFile, FactorEntry,
    FactorFile,
};
pub use sampling::{gibbs_sample, site_conditional, GibbsConfig};

use std::sync::OnceLock;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{orient_acyclic, triangulate, CliqueSet, DirectedAcyclicGraph, UndirectedGraph};
use crate::MAX_EXACT_QUBITS;

const NORMALIZATION_TOL: f64 = 1e-9;

fn check_enumerable(n: usize) -> Result<()> {
    if n > MAX_EXACT_QUBITS {
        Err(Error::EnumerationBound { n, max: MAX_EXACT_QUBITS })
    } else {
        Ok(())
    }
}

/// Position of `vars` within a global assignment `x`, first variable as the
/// most significant bit.
#[inline]
pub(crate) fn local_index(vars: &[usize], x: usize) -> usize {
    vars.iter().fold(0, |acc, &v| (acc << 1) | (x >> v & 1))
}

/// Probability vector over `2^n` assignments; bit `q` of the index is variable `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    n: usize,
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(n: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != 1 << n {
            return Err(Error::SizeMismatch { expected: 1 << n, got: probs.len() });
        }
        if let Some(p) = probs.iter().find(|p| !(**p >= 0.0)) {
            return Err(Error::InvalidModel(format!("negative or NaN probability {p}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidModel(format!("probabilities sum to {total}")));
        }
        Ok(Self { n, probs })
    }

    /// Normalizes nonnegative weights.
    pub fn from_weights(n: usize, mut weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidModel("weights sum to zero".into()));
        }
        weights.iter_mut().for_each(|w| *w /= total);
        Self::new(n, weights)
    }

    /// Wraps a vector already known to be normalized (e.g. Born probabilities).
    pub(crate) fn from_normalized_unchecked(n: usize, probs: Vec<f64>) -> Self {
        debug_assert_eq!(probs.len(), 1 << n);
        Self { n, probs }
    }

    pub fn uniform(n: usize) -> Self {
        let d = 1usize << n;
        Self { n, probs: vec![1.0 / d as f64; d] }
    }

    pub fn point_mass(n: usize, x: usize) -> Self {
        let mut probs = vec![0.0; 1 << n];
        probs[x] = 1.0;
        Self { n, probs }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn into_probs(self) -> Vec<f64> {
        self.probs
    }

    /// Marginal probability that variable `v` equals 1.
    pub fn marginal_one(&self, v: usize) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .filter(|(x, _)| x >> v & 1 == 1)
            .map(|(_, p)| p)
            .sum()
    }

    /// Draws `shots` samples by inverse-CDF lookup.
    pub fn sample<R: Rng + ?Sized>(&self, shots: usize, rng: &mut R) -> Dataset {
        let cdf = cumulative(&self.probs);
        let samples = (0..shots).map(|_| draw(&cdf, rng) as u32).collect();
        Dataset { n: self.n, samples }
    }
}

pub(crate) fn cumulative(probs: &[f64]) -> Vec<f64> {
    probs
        .iter()
        .scan(0.0, |acc, &p| {
            *acc += p;
            Some(*acc)
        })
        .collect()
}

/// Inverse-CDF draw against an (unnormalized) cumulative table. Zero-mass
/// entries are never returned.
pub(crate) fn draw<R: Rng + ?Sized>(cdf: &[f64], rng: &mut R) -> usize {
    let total = *cdf.last().expect("nonempty cdf");
    let u = rng.gen::<f64>() * total;
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

/// Samples as assignment indices (bit `q` = variable `q`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dataset {
    n: usize,
    samples: Vec<u32>,
}

impl Dataset {
    pub fn new(n: usize, samples: Vec<u32>) -> Result<Self> {
        if n > MAX_EXACT_QUBITS {
            return Err(Error::EnumerationBound { n, max: MAX_EXACT_QUBITS });
        }
        if let Some(s) = samples.iter().find(|&&s| (s as usize) >> n != 0) {
            return Err(Error::InvalidModel(format!("sample {s} has more than {n} bits")));
        }
        Ok(Self { n, samples })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn samples(&self) -> &[u32] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; 1 << self.n];
        for &s in &self.samples {
            counts[s as usize] += 1;
        }
        counts
    }

    pub fn empirical(&self) -> Result<Distribution> {
        if self.samples.is_empty() {
            return Err(Error::InvalidModel("empty dataset".into()));
        }
        let total = self.samples.len() as f64;
        let probs = self.counts().into_iter().map(|c| c as f64 / total).collect();
        Ok(Distribution::from_normalized_unchecked(self.n, probs))
    }

    /// One bitstring per line; the leftmost character is variable 0.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.samples.len() * (self.n + 1));
        for &s in &self.samples {
            out.extend((0..self.n).map(|q| if s >> q & 1 == 1 { '1' } else { '0' }));
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FactorTable {
    scope: Vec<usize>,
    values: Vec<f64>,
}

impl FactorTable {
    /// `values[i]` is the factor at the local assignment `i`, whose most
    /// significant bit is `scope[0]`.
    pub fn new(scope: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if values.len() != 1 << scope.len() {
            return Err(Error::SizeMismatch { expected: 1 << scope.len(), got: values.len() });
        }
        if let Some(&v) = values.iter().find(|v| !(**v > 0.0)) {
            return Err(Error::NonPositiveFactor(v));
        }
        Ok(Self { scope, values })
    }

    pub fn scope(&self) -> &[usize] {
        &self.scope
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Factor value at a full assignment `x`.
    #[inline]
    pub fn at(&self, x: usize) -> f64 {
        self.values[local_index(&self.scope, x)]
    }

    pub fn energies(&self) -> Vec<f64> {
        self.values.iter().map(|v| -v.ln()).collect()
    }
}

/// Energy function `-ln(phi)` of a table of factor values.
pub fn energy_of(values: &[f64]) -> Result<Vec<f64>> {
    if let Some(&v) = values.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::NonPositiveFactor(v));
    }
    Ok(values.iter().map(|v| -v.ln()).collect())
}

#[derive(Debug)]
pub struct MarkovModel {
    graph: UndirectedGraph,
    cliques: CliqueSet,
    factors: Vec<FactorTable>,
    partition: OnceLock<f64>,
}

impl Clone for MarkovModel {
    fn clone(&self) -> Self {
        let partition = OnceLock::new();
        if let Some(&z) = self.partition.get() {
            let _ = partition.set(z);
        }
        Self {
            graph: self.graph.clone(),
            cliques: self.cliques.clone(),
            factors: self.factors.clone(),
            partition,
        }
    }
}

impl MarkovModel {
    /// One factor per clique; each factor's scope must cover exactly its clique.
    pub fn new(graph: UndirectedGraph, cliques: CliqueSet, factors: Vec<FactorTable>) -> Result<Self> {
        if factors.len() != cliques.len() {
            return Err(Error::SizeMismatch { expected: cliques.len(), got: factors.len() });
        }
        for (c, f) in cliques.iter().zip(&factors) {
            let mut scope = f.scope().to_vec();
            scope.sort_unstable();
            if scope != c {
                return Err(Error::InvalidModel(format!(
                    "factor scope {:?} does not match clique {:?}",
                    f.scope(),
                    c
                )));
            }
        }
        Ok(Self { graph, cliques, factors, partition: OnceLock::new() })
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn graph(&self) -> &UndirectedGraph {
        &self.graph
    }

    pub fn cliques(&self) -> &CliqueSet {
        &self.cliques
    }

    pub fn factors(&self) -> &[FactorTable] {
        &self.factors
    }

    /// Product of all factors at assignment `x`.
    pub fn unnormalized(&self, x: usize) -> f64 {
        self.factors.iter().map(|f| f.at(x)).product()
    }

    /// Partition function, computed on first use and cached.
    pub fn partition_constant(&self) -> Result<f64> {
        if let Some(&z) = self.partition.get() {
            return Ok(z);
        }
        check_enumerable(self.n())?;
        let z = (0..1usize << self.n()).map(|x| self.unnormalized(x)).sum();
        Ok(*self.partition.get_or_init(|| z))
    }

    pub fn partition_if_known(&self) -> Option<f64> {
        self.partition.get().copied()
    }
}

/// Exact Gibbs distribution of a Markov network by enumeration.
pub fn mn_joint(m: &MarkovModel) -> Result<Distribution> {
    check_enumerable(m.n())?;
    let weights: Vec<f64> = (0..1usize << m.n()).map(|x| m.unnormalized(x)).collect();
    let z: f64 = weights.iter().sum();
    let _ = m.partition.set(z);
    Ok(Distribution::from_normalized_unchecked(
        m.n(),
        weights.into_iter().map(|w| w / z).collect(),
    ))
}

/// Triangulate, then orient along a maximum-cardinality search: the Bayesian
/// network skeleton able to represent any distribution of the Markov network.
pub fn bn_from_mn(graph: &UndirectedGraph) -> DirectedAcyclicGraph {
    orient_acyclic(&triangulate(graph)).expect("triangulated graphs are chordal")
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalTable {
    node: usize,
    parents: Vec<usize>,
    p_one: Vec<f64>,
}

impl ConditionalTable {
    /// `p_one[i]` is `P(node = 1)` under parent assignment `i`, first parent
    /// as the most significant bit.
    pub fn new(node: usize, parents: Vec<usize>, p_one: Vec<f64>) -> Result<Self> {
        if p_one.len() != 1 << parents.len() {
            return Err(Error::SizeMismatch { expected: 1 << parents.len(), got: p_one.len() });
        }
        if let Some(p) = p_one.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidModel(format!("conditional probability {p} outside [0, 1]")));
        }
        Ok(Self { node, parents, p_one })
    }

    pub fn node(&self) -> usize {
        self.node
    }

    pub fn parents(&self) -> &[usize] {
        &self.parents
    }

    pub fn p_one(&self) -> &[f64] {
        &self.p_one
    }

    #[inline]
    pub fn prob(&self, x: usize) -> f64 {
        let p1 = self.p_one[local_index(&self.parents, x)];
        if x >> self.node & 1 == 1 {
            p1
        } else {
            1.0 - p1
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BayesModel {
    dag: DirectedAcyclicGraph,
    tables: Vec<ConditionalTable>,
}

impl BayesModel {
    /// `tables[v]` must describe node `v` with exactly the DAG's parents of `v`.
    pub fn new(dag: DirectedAcyclicGraph, tables: Vec<ConditionalTable>) -> Result<Self> {
        if tables.len() != dag.n() {
            return Err(Error::SizeMismatch { expected: dag.n(), got: tables.len() });
        }
        for (v, t) in tables.iter().enumerate() {
            if t.node != v || t.parents != dag.parents(v) {
                return Err(Error::InvalidModel(format!(
                    "table for {:?} does not match the DAG parents",
                    dag.label(v)
                )));
            }
        }
        Ok(Self { dag, tables })
    }

    /// Conditional probabilities drawn uniformly from `[0, 1)`.
    pub fn random<R: Rng + ?Sized>(dag: DirectedAcyclicGraph, rng: &mut R) -> Self {
        let tables = (0..dag.n())
            .map(|v| {
                let parents = dag.parents(v).to_vec();
                let p_one = (0..1usize << parents.len()).map(|_| rng.gen::<f64>()).collect();
                ConditionalTable { node: v, parents, p_one }
            })
            .collect();
        Self { dag, tables }
    }

    pub fn n(&self) -> usize {
        self.dag.n()
    }

    pub fn dag(&self) -> &DirectedAcyclicGraph {
        &self.dag
    }

    pub fn tables(&self) -> &[ConditionalTable] {
        &self.tables
    }
}

/// Product of the conditionals at every assignment.
pub fn bn_joint(b: &BayesModel) -> Result<Distribution> {
    check_enumerable(b.n())?;
    let probs = (0..1usize << b.n())
        .map(|x| b.tables.iter().map(|t| t.prob(x)).product())
        .collect();
    Ok(Distribution::from_normalized_unchecked(b.n(), probs))
}
