use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{clique_subsets, count_params, ModelKind, ModelStructure};
use crate::error::{Error, Result};
use crate::graph::DirectedAcyclicGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceEstimate {
    pub parameter_count: usize,
    pub qubit_count: usize,
    pub ancilla_count: usize,
    pub depth: usize,
    pub cnot_count: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AncillaMode {
    #[default]
    None,
    PerClique,
}

/// Depth and CNOT count of an ancilla-free MultiRZ on `k` qubits: a CNOT
/// ladder, one RZ, and the reversed ladder.
pub fn multi_rz_cost(k: usize) -> (usize, usize) {
    (2 * k - 1, 2 * (k - 1))
}

/// Depth and CNOT count of an RY with `controls` controls (all required to
/// be one). Single and double control are fixed anchors; beyond that each
/// extra control adds the same increment.
pub fn mcry_cost(controls: usize) -> (usize, usize) {
    match controls {
        0 => (1, 0),
        c => (4 + 10 * (c - 1), 2 + 6 * (c - 1)),
    }
}

/// Greedy list scheduler on per-qubit busy intervals.
///
/// Sequential gates start once every qubit they touch is free of all earlier
/// gates. Gates inside a commuting region may be slotted into any gap after
/// the region began.
struct Scheduler {
    busy: Vec<Vec<(usize, usize)>>,
    frontier: Vec<usize>,
    barrier: Vec<usize>,
    cnots: usize,
}

impl Scheduler {
    fn new(qubits: usize) -> Self {
        Self { busy: vec![Vec::new(); qubits], frontier: vec![0; qubits], barrier: vec![0; qubits], cnots: 0 }
    }

    fn occupy(&mut self, qubits: &[usize], start: usize, duration: usize) {
        for &q in qubits {
            let pos = self.busy[q].partition_point(|&(s, _)| s < start);
            self.busy[q].insert(pos, (start, start + duration));
            self.frontier[q] = self.frontier[q].max(start + duration);
        }
    }

    fn sequential(&mut self, qubits: &[usize], duration: usize) {
        let start = qubits.iter().map(|&q| self.frontier[q]).max().unwrap_or(0);
        self.occupy(qubits, start, duration);
    }

    fn begin_region(&mut self) {
        self.barrier.clone_from(&self.frontier);
    }

    fn is_free(&self, q: usize, start: usize, end: usize) -> bool {
        self.busy[q].iter().all(|&(s, e)| e <= start || s >= end)
    }

    /// Places a gate commuting with everything since `begin_region`, no
    /// earlier than `not_before`. Returns its start slot.
    fn commuting(&mut self, qubits: &[usize], duration: usize, not_before: usize) -> usize {
        let lower = qubits.iter().map(|&q| self.barrier[q]).max().unwrap_or(0).max(not_before);
        let mut candidates: BTreeSet<usize> = BTreeSet::from([lower]);
        for &q in qubits {
            candidates.extend(self.busy[q].iter().map(|&(_, e)| e).filter(|&e| e > lower));
        }
        let start = candidates
            .into_iter()
            .find(|&t| qubits.iter().all(|&q| self.is_free(q, t, t + duration)))
            .expect("the latest interval end is always free");
        self.occupy(qubits, start, duration);
        start
    }

    fn multi_rz(&mut self, subset: &[usize]) {
        let (depth, cnots) = multi_rz_cost(subset.len());
        self.commuting(subset, depth, 0);
        self.cnots += cnots;
    }

    fn layer(&mut self, n: usize) {
        for q in 0..n {
            self.sequential(&[q], 1);
        }
    }

    fn depth(&self) -> usize {
        self.frontier.iter().copied().max().unwrap_or(0)
    }
}

/// Pairings of `n` players in circle-method rounds.
fn round_robin(n: usize) -> Vec<(usize, usize)> {
    let m = n + n % 2;
    let mut pairs = Vec::new();
    for r in 0..m.saturating_sub(1) {
        let mut round = vec![(r, m - 1)];
        for i in 1..m / 2 {
            round.push(((r + i) % (m - 1), (r + m - 1 - i) % (m - 1)));
        }
        pairs.extend(
            round
                .into_iter()
                .filter(|&(a, b)| a < n && b < n)
                .map(|(a, b)| (a.min(b), a.max(b))),
        );
    }
    pairs
}

fn qcibm_schedule(n: usize) -> Scheduler {
    let mut s = Scheduler::new(n);
    s.layer(n);
    s.begin_region();
    for (a, b) in round_robin(n) {
        s.multi_rz(&[a, b]);
    }
    for q in 0..n {
        s.multi_rz(&[q]);
    }
    s.layer(n);
    s
}

/// Terms of each clique not yet emitted by an earlier clique, largest first;
/// each term is followed by its complement within the clique when available.
fn qcmrf_emission(cliques: &[Vec<usize>], max_locality: Option<usize>) -> Vec<Vec<Vec<usize>>> {
    let mut emitted: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut out = Vec::new();
    for clique in cliques {
        let mut owned: Vec<Vec<usize>> = clique_subsets(clique, max_locality)
            .into_iter()
            .filter(|s| !emitted.contains(s))
            .collect();
        owned.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        emitted.extend(owned.iter().cloned());
        let mut order = Vec::with_capacity(owned.len());
        let mut done = vec![false; owned.len()];
        for i in 0..owned.len() {
            if done[i] {
                continue;
            }
            done[i] = true;
            order.push(owned[i].clone());
            let complement: Vec<usize> = clique.iter().copied().filter(|q| !owned[i].contains(q)).collect();
            if let Some(j) = (i + 1..owned.len()).find(|&j| !done[j] && owned[j] == complement) {
                done[j] = true;
                order.push(complement);
            }
        }
        out.push(order);
    }
    out
}

fn qcmrf_schedule(n: usize, cliques: &[Vec<usize>], max_locality: Option<usize>, mode: AncillaMode) -> Scheduler {
    let ancillas: Vec<Option<usize>> = {
        let mut next = n;
        cliques
            .iter()
            .map(|c| {
                (mode == AncillaMode::PerClique && c.len() > 2).then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect()
    };
    let total = n + ancillas.iter().flatten().count();
    let mut s = Scheduler::new(total);
    s.layer(n);
    s.begin_region();
    for ((clique, terms), ancilla) in cliques.iter().zip(qcmrf_emission(cliques, max_locality)).zip(&ancillas) {
        match ancilla {
            None => terms.iter().for_each(|t| s.multi_rz(t)),
            Some(a) => gray_walk(&mut s, clique, &terms, *a),
        }
    }
    s.layer(n);
    s
}

/// Parity accumulation on a private ancilla: a Gray-code walk over the
/// clique's subsets toggles one member per step, an RZ on the ancilla
/// realizes each owned multi-qubit term, and the final parity is uncomputed.
fn gray_walk(s: &mut Scheduler, clique: &[usize], terms: &[Vec<usize>], ancilla: usize) {
    let owned: BTreeSet<&Vec<usize>> = terms.iter().filter(|t| t.len() >= 2).collect();
    for t in terms.iter().filter(|t| t.len() == 1) {
        s.multi_rz(t);
    }
    let m = clique.len();
    let mut current = 0usize;
    let mut after = 0;
    for i in 1..(1usize << m) {
        let gray = i ^ (i >> 1);
        let flipped = (gray ^ current).trailing_zeros() as usize;
        current = gray;
        after = s.commuting(&[clique[flipped], ancilla], 1, after) + 1;
        s.cnots += 1;
        let subset: Vec<usize> = (0..m).filter(|&b| current >> b & 1 == 1).map(|b| clique[b]).collect();
        if owned.contains(&subset) {
            after = s.commuting(&[ancilla], 1, after) + 1;
        }
    }
    for b in (0..m).filter(|&b| current >> b & 1 == 1) {
        after = s.commuting(&[clique[b], ancilla], 1, after) + 1;
        s.cnots += 1;
    }
}

fn bbqc_schedule(dag: &DirectedAcyclicGraph) -> Scheduler {
    let n = dag.n();
    let mut s = Scheduler::new(n);
    for v in dag.topological_order() {
        let parents = dag.parents(v);
        let c = parents.len();
        let (depth, cnots) = mcry_cost(c);
        let mut support = parents.to_vec();
        support.push(v);
        // `flipped` tracks which parents currently carry an X; config bit
        // (c - 1 - i) belongs to parent i.
        let mut flipped = vec![false; c];
        for config in 0..(1usize << c) {
            for (i, &p) in parents.iter().enumerate() {
                let want = config >> (c - 1 - i) & 1 == 0;
                if want != flipped[i] {
                    s.sequential(&[p], 1);
                    flipped[i] = want;
                }
            }
            s.sequential(&support, depth);
            s.cnots += cnots;
        }
    }
    s.layer(n);
    s
}

/// Qubits, parameters, scheduled depth and CNOT count of a model circuit
/// under full connectivity. Ancilla mode only affects QCMRF circuits.
pub fn estimate_resources(kind: ModelKind, structure: ModelStructure<'_>, mode: AncillaMode) -> Result<ResourceEstimate> {
    let parameter_count = count_params(kind, structure)?;
    let n = structure.n();
    let sched = match (kind, structure) {
        (ModelKind::Qcibm, ModelStructure::Qubits(n)) => qcibm_schedule(n),
        (ModelKind::Qcmrf, ModelStructure::Markov { n, cliques, max_locality }) => {
            qcmrf_schedule(n, cliques.as_slice(), max_locality, mode)
        }
        (ModelKind::Bbqc, ModelStructure::Bayes(dag)) => bbqc_schedule(dag),
        (kind, _) => return Err(Error::StructureMismatch(kind.name())),
    };
    let qubit_count = sched.busy.len();
    Ok(ResourceEstimate {
        parameter_count,
        qubit_count,
        ancilla_count: qubit_count - n,
        depth: sched.depth(),
        cnot_count: sched.cnots,
    })
}
