//! Exact statevector simulation at logical-gate granularity.

mod gradient;

pub use gradient::{loss_gradient, probability_gradient, sampled_probability_gradient, GradientMode, Objective};

use std::collections::BTreeSet;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::ModelKind;
use rand::Rng;
use rand_distr::{Binomial, Distribution as _};

use crate::pgm::{cumulative, draw, Dataset, Distribution};
use crate::MAX_EXACT_QUBITS;

#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl Statevector {
    pub fn zero_state(n: usize) -> Result<Self> {
        if n > MAX_EXACT_QUBITS {
            return Err(Error::EnumerationBound { n, max: MAX_EXACT_QUBITS });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amplitudes })
    }

    pub fn from_amplitudes(n: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if n > MAX_EXACT_QUBITS {
            return Err(Error::EnumerationBound { n, max: MAX_EXACT_QUBITS });
        }
        if amplitudes.len() != 1 << n {
            return Err(Error::SizeMismatch { expected: 1 << n, got: amplitudes.len() });
        }
        let s = Self { n, amplitudes };
        if (s.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidCircuit(format!("state norm {} is not 1", s.norm())));
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    fn apply_single(&mut self, q: usize, m: [[Complex64; 2]; 2]) {
        let bit = 1 << q;
        for i in (0..self.amplitudes.len()).filter(|i| i & bit == 0) {
            let (a, b) = (self.amplitudes[i], self.amplitudes[i | bit]);
            self.amplitudes[i] = m[0][0] * a + m[0][1] * b;
            self.amplitudes[i | bit] = m[1][0] * a + m[1][1] * b;
        }
    }

    fn apply_hadamard(&mut self, q: usize) {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        self.apply_single(q, [[h, h], [h, -h]]);
    }

    fn apply_x(&mut self, q: usize) {
        let bit = 1 << q;
        for i in (0..self.amplitudes.len()).filter(|i| i & bit == 0) {
            self.amplitudes.swap(i, i | bit);
        }
    }

    /// Multiplies amplitude `x` by `exp(-i phase[x])`.
    fn apply_phases(&mut self, phase: &[f64]) {
        for (a, &p) in self.amplitudes.iter_mut().zip(phase) {
            *a *= Complex64::from_polar(1.0, -p);
        }
    }

    fn apply_multi_rz(&mut self, mask: usize, alpha: f64) {
        let even = Complex64::from_polar(1.0, -alpha);
        let odd = even.conj();
        for (x, a) in self.amplitudes.iter_mut().enumerate() {
            *a *= if (x & mask).count_ones() % 2 == 0 { even } else { odd };
        }
    }

    /// Applies a run of commuting MultiRZ gates given as `(mask, α)`.
    fn apply_diagonal_run(&mut self, run: &[(usize, f64)]) {
        if run.len() > self.n {
            self.apply_phases(&diagonal_phase(self.n, run));
        } else {
            run.iter().for_each(|&(mask, a)| self.apply_multi_rz(mask, a));
        }
    }

    fn apply_ucry(&mut self, target: usize, controls: &[usize], angles: &[f64]) {
        let bit = 1 << target;
        let c = controls.len();
        let rotations: Vec<[f64; 2]> = angles.iter().map(|t| [(t / 2.0).cos(), (t / 2.0).sin()]).collect();
        for i in (0..self.amplitudes.len()).filter(|i| i & bit == 0) {
            let config = controls
                .iter()
                .enumerate()
                .fold(0, |acc, (k, &q)| acc | ((i >> q) & 1) << (c - 1 - k));
            let [cos, sin] = rotations[config];
            let (a, b) = (self.amplitudes[i], self.amplitudes[i | bit]);
            self.amplitudes[i] = a * cos - b * sin;
            self.amplitudes[i | bit] = a * sin + b * cos;
        }
    }
}

/// `exp(i(ΓX + ΔY + ΣZ))` in closed form.
pub fn uf_matrix(gamma: f64, delta: f64, sigma: f64) -> [[Complex64; 2]; 2] {
    let r = (gamma * gamma + delta * delta + sigma * sigma).sqrt();
    let k = if r > 0.0 { r.sin() / r } else { 1.0 };
    let (nx, ny, nz) = (k * gamma, k * delta, k * sigma);
    let c = r.cos();
    [
        [Complex64::new(c, nz), Complex64::new(ny, nx)],
        [Complex64::new(-ny, nx), Complex64::new(c, -nz)],
    ]
}

pub fn ry_matrix(theta: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
    ]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Gate {
    Hadamard(usize),
    /// `exp(-iα Z⊗…⊗Z)` on a sorted qubit subset.
    MultiRz { subset: Vec<usize>, param: usize },
    Uf { qubit: usize, params: [usize; 3] },
    Ry { qubit: usize, param: usize },
    /// One angle per control configuration; the first control is the most
    /// significant bit of the configuration index.
    Ucry { target: usize, controls: Vec<usize>, params: Vec<usize> },
    PauliX(usize),
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::Hadamard(q) | Gate::PauliX(q) => vec![*q],
            Gate::MultiRz { subset, .. } => subset.clone(),
            Gate::Uf { qubit, .. } | Gate::Ry { qubit, .. } => vec![*qubit],
            Gate::Ucry { target, controls, .. } => {
                let mut v = controls.clone();
                v.push(*target);
                v
            }
        }
    }

    pub fn params(&self) -> Vec<usize> {
        match self {
            Gate::Hadamard(_) | Gate::PauliX(_) => Vec::new(),
            Gate::MultiRz { param, .. } | Gate::Ry { param, .. } => vec![*param],
            Gate::Uf { params, .. } => params.to_vec(),
            Gate::Ucry { params, .. } => params.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
    param_count: usize,
    kind: Option<ModelKind>,
}

impl Circuit {
    pub fn new(n: usize, gates: Vec<Gate>, param_count: usize) -> Result<Self> {
        Self::with_kind(n, gates, param_count, None)
    }

    /// BBQC circuits additionally enforce, up to the first basis-change gate,
    /// that every qubit is targeted at most once and never after serving as a
    /// control.
    pub fn with_kind(n: usize, gates: Vec<Gate>, param_count: usize, kind: Option<ModelKind>) -> Result<Self> {
        if n > MAX_EXACT_QUBITS {
            return Err(Error::EnumerationBound { n, max: MAX_EXACT_QUBITS });
        }
        let bad = |msg: String| Err(Error::InvalidCircuit(msg));
        for (i, g) in gates.iter().enumerate() {
            let qs = g.qubits();
            if qs.is_empty() {
                return bad(format!("gate {i} acts on no qubits"));
            }
            if qs.iter().any(|&q| q >= n) {
                return bad(format!("gate {i} addresses a qubit outside 0..{n}"));
            }
            if qs.iter().collect::<BTreeSet<_>>().len() != qs.len() {
                return bad(format!("gate {i} repeats a qubit"));
            }
            if g.params().iter().any(|&p| p >= param_count) {
                return bad(format!("gate {i} references a parameter beyond {param_count}"));
            }
            if let Gate::Ucry { controls, params, .. } = g {
                if params.len() != 1 << controls.len() {
                    return bad(format!("gate {i} needs {} angles", 1usize << controls.len()));
                }
            }
            if let Gate::MultiRz { subset, .. } = g {
                if subset.windows(2).any(|w| w[0] > w[1]) {
                    return bad(format!("gate {i} subset is not sorted"));
                }
            }
        }
        if kind == Some(ModelKind::Bbqc) {
            let mut targeted = vec![false; n];
            let mut controlled = vec![false; n];
            for g in &gates {
                let (target, controls): (usize, &[usize]) = match g {
                    Gate::Ry { qubit, .. } => (*qubit, &[]),
                    Gate::Ucry { target, controls, .. } => (*target, controls),
                    Gate::Uf { .. } | Gate::MultiRz { .. } => break,
                    _ => continue,
                };
                if targeted[target] || controlled[target] {
                    return bad(format!("qubit {target} violates the rotation ordering rules"));
                }
                targeted[target] = true;
                controls.iter().for_each(|&c| controlled[c] = true);
            }
        }
        Ok(Self { n, gates, param_count, kind })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn param_count(&self) -> usize {
        self.param_count
    }

    pub fn kind(&self) -> Option<ModelKind> {
        self.kind
    }

    /// Number of gates that read each parameter.
    pub(crate) fn param_uses(&self) -> Vec<usize> {
        let mut uses = vec![0; self.param_count];
        for p in self.gates.iter().flat_map(Gate::params) {
            uses[p] += 1;
        }
        uses
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParamVector {
    values: Vec<f64>,
}

impl ParamVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(format!("non-finite parameter {v}")));
        }
        Ok(Self { values })
    }

    pub fn zeros(len: usize) -> Self {
        Self { values: vec![0.0; len] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// In-place Walsh–Hadamard transform (unnormalized).
fn walsh_hadamard(v: &mut [f64]) {
    let mut h = 1;
    while h < v.len() {
        for block in v.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

fn mask_of(subset: &[usize]) -> usize {
    subset.iter().fold(0, |m, &q| m | 1 << q)
}

/// Accumulated phase `Σ_S α_S (-1)^{|x ∧ S|}` of a run of MultiRZ gates.
fn diagonal_phase(n: usize, run: &[(usize, f64)]) -> Vec<f64> {
    let mut coeff = vec![0.0; 1 << n];
    for &(mask, a) in run {
        coeff[mask] += a;
    }
    walsh_hadamard(&mut coeff);
    coeff
}

fn run_values(c: &Circuit, p: &[f64]) -> Result<Statevector> {
    if p.len() != c.param_count {
        return Err(Error::SizeMismatch { expected: c.param_count, got: p.len() });
    }
    let mut s = Statevector::zero_state(c.n)?;
    let mut run: Vec<(usize, f64)> = Vec::new();
    for g in &c.gates {
        if let Gate::MultiRz { subset, param } = g {
            run.push((mask_of(subset), p[*param]));
            continue;
        }
        if !run.is_empty() {
            s.apply_diagonal_run(&run);
            run.clear();
        }
        match g {
            Gate::Hadamard(q) => s.apply_hadamard(*q),
            Gate::PauliX(q) => s.apply_x(*q),
            Gate::Uf { qubit, params } => s.apply_single(*qubit, uf_matrix(p[params[0]], p[params[1]], p[params[2]])),
            Gate::Ry { qubit, param } => s.apply_single(*qubit, ry_matrix(p[*param])),
            Gate::Ucry { target, controls, params } => {
                let angles: Vec<f64> = params.iter().map(|&i| p[i]).collect();
                s.apply_ucry(*target, controls, &angles);
            }
            Gate::MultiRz { .. } => unreachable!(),
        }
    }
    if !run.is_empty() {
        s.apply_diagonal_run(&run);
    }
    Ok(s)
}

/// Applies the gates in order to `|0…0⟩`.
pub fn run_circuit(c: &Circuit, p: &ParamVector) -> Result<Statevector> {
    run_values(c, p.values())
}

pub fn born_distribution(s: &Statevector) -> Distribution {
    Distribution::from_normalized_unchecked(s.n, s.probabilities())
}

/// Born distribution of `c` at raw parameter values.
pub(crate) fn model_probs(c: &Circuit, p: &[f64]) -> Result<Vec<f64>> {
    Ok(run_values(c, p)?.probabilities())
}

/// Relative frequencies of `shots` draws from `probs`. Large shot counts are
/// split over halves of the index range by binomial draws.
pub(crate) fn sample_histogram<R: Rng + ?Sized>(probs: &[f64], shots: usize, rng: &mut R) -> Vec<f64> {
    let mut counts = vec![0u64; probs.len()];
    if shots < probs.len() {
        let cdf = cumulative(probs);
        for _ in 0..shots {
            counts[draw(&cdf, rng)] += 1;
        }
    } else {
        let mut prefix = Vec::with_capacity(probs.len() + 1);
        prefix.push(0.0);
        for p in probs {
            prefix.push(prefix.last().unwrap() + p.max(0.0));
        }
        split_counts(&prefix, 0, probs.len(), shots as u64, &mut counts, rng);
    }
    counts.into_iter().map(|c| c as f64 / shots as f64).collect()
}

fn split_counts<R: Rng + ?Sized>(prefix: &[f64], lo: usize, hi: usize, count: u64, out: &mut [u64], rng: &mut R) {
    if count == 0 {
        return;
    }
    if hi - lo == 1 {
        out[lo] = count;
        return;
    }
    let mid = lo + (hi - lo) / 2;
    let total = prefix[hi] - prefix[lo];
    let p = if total > 0.0 { ((prefix[mid] - prefix[lo]) / total).clamp(0.0, 1.0) } else { 0.5 };
    let left = Binomial::new(count, p).expect("p lies in [0, 1]").sample(rng);
    split_counts(prefix, lo, mid, left, out, rng);
    split_counts(prefix, mid, hi, count - left, out, rng);
}

pub fn sample_counts(d: &Distribution, shots: usize, seed: u64) -> Result<Dataset> {
    if shots == 0 {
        return Err(Error::InvalidConfig("shots must be at least 1".into()));
    }
    Ok(d.sample(shots, &mut crate::seed::rng(seed)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn hadamards(n: usize) -> Vec<Gate> {
        (0..n).map(Gate::Hadamard).collect()
    }

    #[test]
    fn single_qubit_phase() {
        let circ = Circuit::new(1, vec![Gate::Hadamard(0), Gate::MultiRz { subset: vec![0], param: 0 }], 1).unwrap();
        let a = 0.37;
        let s = run_circuit(&circ, &ParamVector::new(vec![a]).unwrap()).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitudes()[0] - Complex64::from_polar(r, -a)).norm() < 1e-14);
        assert!((s.amplitudes()[1] - Complex64::from_polar(r, a)).norm() < 1e-14);
        let d = born_distribution(&s);
        assert!((d.probs()[0] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn uf_half_pi_flips() {
        let circ = Circuit::new(1, vec![Gate::Uf { qubit: 0, params: [0, 1, 2] }], 3).unwrap();
        let p = ParamVector::new(vec![std::f64::consts::FRAC_PI_2, 0.0, 0.0]).unwrap();
        let s = run_circuit(&circ, &p).unwrap();
        assert!(s.amplitudes()[0].norm() < 1e-15);
        assert!((s.amplitudes()[1] - c(0.0, 1.0)).norm() < 1e-15);
        let id = uf_matrix(0.0, 0.0, 0.0);
        assert_eq!(id, [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]);
    }

    /// Uf against a truncated power series of exp(iA).
    #[test]
    fn uf_matches_series() {
        let mut rng = crate::seed::rng(3);
        for _ in 0..20 {
            let (g, d, s) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let a = [[c(0.0, s), c(d, g)], [c(-d, g), c(0.0, -s)]]; // iA
            let mul = |x: [[Complex64; 2]; 2], y: [[Complex64; 2]; 2]| {
                let mut z = [[c(0.0, 0.0); 2]; 2];
                for i in 0..2 {
                    for j in 0..2 {
                        z[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
                    }
                }
                z
            };
            let mut term = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
            let mut sum = term;
            for k in 1..60 {
                term = mul(term, a);
                term.iter_mut().flatten().for_each(|z| *z /= k as f64);
                sum.iter_mut().flatten().zip(term.iter().flatten()).for_each(|(x, y)| *x += y);
            }
            let m = uf_matrix(g, d, s);
            for (x, y) in m.iter().flatten().zip(sum.iter().flatten()) {
                assert!((x - y).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_params_give_uniform() {
        let mut gates = hadamards(3);
        gates.push(Gate::MultiRz { subset: vec![0, 1, 2], param: 0 });
        gates.extend((0..3).map(|q| Gate::Uf { qubit: q, params: [1 + 3 * q, 2 + 3 * q, 3 + 3 * q] }));
        let circ = Circuit::new(3, gates, 10).unwrap();
        let d = born_distribution(&run_circuit(&circ, &ParamVector::zeros(10)).unwrap());
        assert!(d.probs().iter().all(|p| (p - 0.125).abs() < 1e-14));
        let zero = Statevector::zero_state(3).unwrap();
        assert_eq!(born_distribution(&zero).probs()[0], 1.0);
    }

    #[test]
    fn circuit_validation() {
        assert!(Circuit::new(2, vec![Gate::Hadamard(2)], 0).is_err());
        assert!(Circuit::new(2, vec![Gate::MultiRz { subset: vec![0, 0], param: 0 }], 1).is_err());
        assert!(Circuit::new(2, vec![Gate::MultiRz { subset: vec![], param: 0 }], 1).is_err());
        assert!(Circuit::new(2, vec![Gate::Ry { qubit: 0, param: 1 }], 1).is_err());
        let short = Gate::Ucry { target: 1, controls: vec![0], params: vec![0] };
        assert!(Circuit::new(2, vec![short], 1).is_err());
        let ok = Circuit::new(2, vec![Gate::Ry { qubit: 0, param: 0 }], 1).unwrap();
        assert!(run_circuit(&ok, &ParamVector::zeros(2)).is_err());
        assert!(ParamVector::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn bbqc_ordering_rules() {
        let bbqc = Some(ModelKind::Bbqc);
        let twice = vec![Gate::Ry { qubit: 0, param: 0 }, Gate::Ry { qubit: 0, param: 1 }];
        assert!(Circuit::with_kind(1, twice.clone(), 2, bbqc).is_err());
        assert!(Circuit::with_kind(1, twice, 2, None).is_ok());
        let after_control = vec![
            Gate::Ucry { target: 1, controls: vec![0], params: vec![0, 1] },
            Gate::Ry { qubit: 0, param: 2 },
        ];
        assert!(Circuit::with_kind(2, after_control, 3, bbqc).is_err());
    }

    /// Dense 2^n × 2^n matrix of a uniformly controlled RY, built entry by entry.
    fn ucry_dense(n: usize, target: usize, controls: &[usize], angles: &[f64]) -> Vec<Vec<f64>> {
        let dim = 1 << n;
        let mut m = vec![vec![0.0; dim]; dim];
        for col in 0..dim {
            for row in 0..dim {
                if (row ^ col) & !(1 << target) != 0 {
                    continue;
                }
                let mut config = 0;
                for &q in controls {
                    config = config * 2 + ((col >> q) & 1);
                }
                let (s, cth) = (angles[config] / 2.0).sin_cos();
                let (r, c) = ((row >> target) & 1, (col >> target) & 1);
                m[row][col] = match (r, c) {
                    (0, 0) | (1, 1) => cth,
                    (0, 1) => -s,
                    _ => s,
                };
            }
        }
        m
    }

    #[test]
    fn ucry_matches_dense_oracle() {
        let mut rng = crate::seed::rng(11);
        for n in 1..=5 {
            for _ in 0..10 {
                let mut qubits: Vec<usize> = (0..n).collect();
                rand::seq::SliceRandom::shuffle(qubits.as_mut_slice(), &mut rng);
                let target = qubits[0];
                let controls: Vec<usize> = qubits[1..rng.gen_range(1..=n)].to_vec();
                let k = 1 << controls.len();
                let angles: Vec<f64> = (0..k).map(|_| rng.gen_range(-3.0..3.0)).collect();
                let phases: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
                let mut gates = hadamards(n);
                gates.extend((0..n).map(|q| Gate::MultiRz { subset: vec![q], param: k + q }));
                let before = Circuit::new(n, gates.clone(), k + n).unwrap();
                gates.push(Gate::Ucry { target, controls: controls.clone(), params: (0..k).collect() });
                let circ = Circuit::new(n, gates, k + n).unwrap();
                let p = ParamVector::new([angles.clone(), phases].concat()).unwrap();
                let psi = run_circuit(&before, &p).unwrap();
                let out = run_circuit(&circ, &p).unwrap();
                let m = ucry_dense(n, target, &controls, &angles);
                for (row, amp) in m.iter().zip(out.amplitudes()) {
                    let expect: Complex64 = row.iter().zip(psi.amplitudes()).map(|(&w, a)| a * w).sum();
                    assert!((expect - amp).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn fused_diagonal_matches_direct() {
        let mut rng = crate::seed::rng(5);
        let n = 4;
        let run: Vec<(usize, f64)> = (1..16).map(|m| (m, rng.gen_range(-3.0..3.0))).collect();
        let fast = diagonal_phase(n, &run);
        for (x, f) in fast.iter().enumerate() {
            let direct: f64 = run
                .iter()
                .map(|&(m, a)| if (x & m).count_ones() % 2 == 0 { a } else { -a })
                .sum();
            assert!((f - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn histograms_follow_the_distribution() {
        let probs = [0.5, 0.0, 0.125, 0.375];
        for shots in [3, 400_000] {
            let h = sample_histogram(&probs, shots, &mut crate::seed::rng(2));
            assert!((h.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert_eq!(h[1], 0.0);
            if shots > 4 {
                for (a, b) in h.iter().zip(probs) {
                    assert!((a - b).abs() < 5.0 * (b * (1.0 - b) / shots as f64).sqrt() + 1e-12);
                }
            }
        }
    }

    #[test]
    fn sample_counts_point_mass_and_band() {
        let d = Distribution::point_mass(3, 5);
        let ds = sample_counts(&d, 100, 1).unwrap();
        assert!(ds.samples().iter().all(|&x| x == 5));
        assert!(sample_counts(&d, 0, 1).is_err());
        let shots = 100_000;
        let ds = sample_counts(&Distribution::uniform(1), shots, 9).unwrap();
        let ones = ds.counts()[1] as f64;
        let sigma = (shots as f64 * 0.25).sqrt();
        assert!((ones - shots as f64 / 2.0).abs() < 3.0 * sigma);
        assert_eq!(ds, sample_counts(&Distribution::uniform(1), shots, 9).unwrap());
    }

    fn random_gate(n: usize) -> impl Strategy<Value = Gate> {
        let q = 0..n;
        prop_oneof![
            q.clone().prop_map(Gate::Hadamard),
            q.clone().prop_map(Gate::PauliX),
            proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 1..=n)
                .prop_map(|subset| Gate::MultiRz { subset, param: 0 }),
            q.clone().prop_map(|qubit| Gate::Uf { qubit, params: [1, 2, 3] }),
            q.prop_map(|qubit| Gate::Ry { qubit, param: 4 }),
        ]
    }

    proptest! {
        #[test]
        fn norm_is_preserved(
            gates in proptest::collection::vec(random_gate(4), 1..30),
            params in proptest::collection::vec(-4.0f64..4.0, 5),
        ) {
            let p = ParamVector::new(params).unwrap();
            for k in 1..=gates.len() {
                let circ = Circuit::new(4, gates[..k].to_vec(), 5).unwrap();
                let s = run_circuit(&circ, &p).unwrap();
                prop_assert!((s.norm() - 1.0).abs() < 1e-10);
            }
        }

        #[test]
        fn multi_rz_gates_commute(
            subsets in proptest::collection::vec(proptest::sample::subsequence((0..4usize).collect::<Vec<_>>(), 1..=4), 2..8),
            params in proptest::collection::vec(-4.0f64..4.0, 8),
            seed in 0u64..1000,
        ) {
            let build = |order: &[usize]| {
                let mut gates = hadamards(4);
                gates.extend(order.iter().map(|&i| Gate::MultiRz { subset: subsets[i].clone(), param: i }));
                gates.extend((0..4).map(|q| Gate::Uf { qubit: q, params: [7, 6, 5] }));
                Circuit::new(4, gates, 8).unwrap()
            };
            let mut order: Vec<usize> = (0..subsets.len()).collect();
            let p = ParamVector::new(params).unwrap();
            let a = run_circuit(&build(&order), &p).unwrap();
            rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut crate::seed::rng(seed));
            let b = run_circuit(&build(&order), &p).unwrap();
            for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
                prop_assert!((x - y).norm() < 1e-12);
            }
        }
    }
}
