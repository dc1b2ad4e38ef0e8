//! Circuit builders for the three model families.
//!
//! Parameter layout: QCIBM/QCMRF put one coefficient per Ising term first (in
//! term order) and then three basis-change parameters per qubit. BBQC puts the
//! rotation angles of every node in topological order first, then the same
//! three-per-qubit block.

use serde::{Deserialize, Serialize};

pub use crate::hamiltonian::ModelKind;
use crate::error::{Error, Result};
use crate::graph::{CliqueSet, DirectedAcyclicGraph, UndirectedGraph};
use crate::hamiltonian::{build_ising, IsingHamiltonian, ModelStructure};
use crate::pgm::BayesModel;
use crate::simulator::{Circuit, Gate, ParamVector};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UfForm {
    /// `exp(i(ΓX + ΔY + ΣZ))` as a single gate.
    #[default]
    Exponential,
    /// Z, Y, Z one-parameter rotations; differentiable by shifts.
    Zyz,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnsatzSpec {
    pub kind: ModelKind,
    #[serde(default)]
    pub max_locality: Option<usize>,
    #[serde(default)]
    pub uf_form: UfForm,
}

impl AnsatzSpec {
    pub fn new(kind: ModelKind) -> Self {
        Self { kind, max_locality: None, uf_form: UfForm::Exponential }
    }

    pub fn build(&self, structure: ModelStructure<'_>) -> Result<Circuit> {
        match (self.kind, structure) {
            (ModelKind::Qcibm, ModelStructure::Qubits(n)) => build_qcibm(n, self.uf_form),
            (ModelKind::Qcmrf, ModelStructure::Markov { n, cliques, max_locality }) => {
                qcmrf_from_cliques(n, cliques, max_locality.or(self.max_locality), self.uf_form)
            }
            (ModelKind::Bbqc, ModelStructure::Bayes(dag)) => build_bbqc(dag, self.uf_form),
            (kind, _) => Err(Error::StructureMismatch(kind.name())),
        }
    }
}

fn push_uf(gates: &mut Vec<Gate>, n: usize, base: usize, form: UfForm) {
    for q in 0..n {
        let p = [base + 3 * q, base + 3 * q + 1, base + 3 * q + 2];
        match form {
            UfForm::Exponential => gates.push(Gate::Uf { qubit: q, params: p }),
            UfForm::Zyz => gates.extend([
                Gate::MultiRz { subset: vec![q], param: p[0] },
                Gate::Ry { qubit: q, param: p[1] },
                Gate::MultiRz { subset: vec![q], param: p[2] },
            ]),
        }
    }
}

fn ising_circuit(h: &IsingHamiltonian, kind: ModelKind, form: UfForm) -> Result<Circuit> {
    let n = h.n();
    let mut gates: Vec<Gate> = (0..n).map(Gate::Hadamard).collect();
    gates.extend(
        h.terms()
            .iter()
            .map(|t| Gate::MultiRz { subset: t.subset.clone(), param: t.coefficient_index }),
    );
    push_uf(&mut gates, n, h.len(), form);
    Circuit::with_kind(n, gates, h.len() + 3 * n, Some(kind))
}

/// All-to-all 2-local Ising circuit.
pub fn build_qcibm(n: usize, form: UfForm) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::InvalidConfig("qcibm needs at least one qubit".into()));
    }
    let subsets = (0..n).flat_map(|i| std::iter::once(vec![i]).chain((i + 1..n).map(move |j| vec![i, j])));
    ising_circuit(&IsingHamiltonian::from_subsets(n, subsets)?, ModelKind::Qcibm, form)
}

fn qcmrf_from_cliques(n: usize, cliques: &CliqueSet, max_locality: Option<usize>, form: UfForm) -> Result<Circuit> {
    ising_circuit(&build_ising(n, cliques, max_locality)?, ModelKind::Qcmrf, form)
}

/// One MultiRZ per term of the clique Hamiltonian.
pub fn build_qcmrf(
    graph: &UndirectedGraph,
    cliques: &CliqueSet,
    max_locality: Option<usize>,
    form: UfForm,
) -> Result<Circuit> {
    qcmrf_from_cliques(graph.n(), cliques, max_locality, form)
}

/// Parameter index of the first angle of every node.
fn bbqc_offsets(dag: &DirectedAcyclicGraph) -> Vec<usize> {
    let mut offsets = vec![0; dag.n()];
    let mut next = 0;
    for v in dag.topological_order() {
        offsets[v] = next;
        next += 1 << dag.parents(v).len();
    }
    offsets
}

/// RY on roots and parent-controlled RY on every other node in topological
/// order, then the basis-change layer.
pub fn build_bbqc(dag: &DirectedAcyclicGraph, form: UfForm) -> Result<Circuit> {
    let n = dag.n();
    let offsets = bbqc_offsets(dag);
    let mut gates = Vec::new();
    let mut angles = 0;
    for v in dag.topological_order() {
        let parents = dag.parents(v);
        let k = 1usize << parents.len();
        if parents.is_empty() {
            gates.push(Gate::Ry { qubit: v, param: offsets[v] });
        } else {
            gates.push(Gate::Ucry { target: v, controls: parents.to_vec(), params: (offsets[v]..offsets[v] + k).collect() });
        }
        angles += k;
    }
    push_uf(&mut gates, n, angles, form);
    Circuit::with_kind(n, gates, angles + 3 * n, Some(ModelKind::Bbqc))
}

/// Parameters reproducing `model` on its BBQC: `θ = 2·arccos(√(1 − p_one))`
/// and an identity basis change.
pub fn bbqc_params(model: &BayesModel) -> ParamVector {
    let dag = model.dag();
    let offsets = bbqc_offsets(dag);
    let angles: usize = (0..dag.n()).map(|v| 1usize << dag.parents(v).len()).sum();
    let mut values = vec![0.0; angles + 3 * dag.n()];
    for (v, t) in model.tables().iter().enumerate() {
        for (b, p) in t.p_one().iter().enumerate() {
            values[offsets[v] + b] = 2.0 * (1.0 - p).sqrt().acos();
        }
    }
    ParamVector::new(values).expect("angles are finite")
}
