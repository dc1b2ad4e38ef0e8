use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{model_probs, sample_histogram, Circuit, Gate, ParamVector};
use crate::error::{Error, Result};
use crate::seed::derived_rng;

/// Central-difference step for `ExactFd`.
pub const FD_STEP: f64 = 1e-4;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientMode {
    #[default]
    ExactFd,
    Shift,
}

/// A scalar loss of the model's Born probabilities.
pub trait Objective: Sync {
    fn value(&self, probs: &[f64]) -> f64;

    /// `∂L/∂P(x)` for every basis state.
    fn probability_gradient(&self, probs: &[f64]) -> Vec<f64>;
}

/// How to differentiate `P(θ)` with respect to one parameter by shifts.
#[derive(Clone, Copy, Debug)]
enum ShiftRule {
    /// Generator eigenvalues ±1.
    Phase,
    /// Generator eigenvalues ±1/2.
    Rotation,
    /// Generator eigenvalues ±1/2 and 0.
    Controlled,
}

impl ShiftRule {
    fn terms(self) -> Vec<(f64, f64)> {
        match self {
            ShiftRule::Phase => vec![(FRAC_PI_4, 1.0), (-FRAC_PI_4, -1.0)],
            ShiftRule::Rotation => vec![(FRAC_PI_2, 0.5), (-FRAC_PI_2, -0.5)],
            ShiftRule::Controlled => {
                let c1 = (SQRT_2 + 1.0) / (4.0 * SQRT_2);
                let c2 = (SQRT_2 - 1.0) / (4.0 * SQRT_2);
                let far = 3.0 * FRAC_PI_2;
                vec![(FRAC_PI_2, c1), (-FRAC_PI_2, -c1), (far, -c2), (-far, c2)]
            }
        }
    }
}

fn shift_rules(c: &Circuit) -> Result<Vec<Option<ShiftRule>>> {
    let uses = c.param_uses();
    if let Some(i) = uses.iter().position(|&u| u > 1) {
        return Err(Error::ShiftIncompatible(format!("parameter {i} drives several gates")));
    }
    let mut rules = vec![None; c.param_count()];
    for g in c.gates() {
        match g {
            Gate::MultiRz { param, .. } => rules[*param] = Some(ShiftRule::Phase),
            Gate::Ry { param, .. } => rules[*param] = Some(ShiftRule::Rotation),
            Gate::Ucry { controls, params, .. } => {
                let rule = if controls.is_empty() { ShiftRule::Rotation } else { ShiftRule::Controlled };
                params.iter().for_each(|&p| rules[p] = Some(rule));
            }
            Gate::Uf { .. } => {
                return Err(Error::ShiftIncompatible(
                    "exponential Uf gates have no two-point rule; build with the zyz form".into(),
                ))
            }
            Gate::Hadamard(_) | Gate::PauliX(_) => {}
        }
    }
    Ok(rules)
}

fn shifted(p: &[f64], i: usize, delta: f64) -> Vec<f64> {
    let mut q = p.to_vec();
    q[i] += delta;
    q
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `Σ_x w(x) ∂P(x)/∂θ_i` for every parameter. Unused parameters get 0.
pub fn probability_gradient(c: &Circuit, p: &ParamVector, weights: &[f64], mode: GradientMode) -> Result<Vec<f64>> {
    let dim = 1usize << c.n();
    if weights.len() != dim {
        return Err(Error::SizeMismatch { expected: dim, got: weights.len() });
    }
    if p.len() != c.param_count() {
        return Err(Error::SizeMismatch { expected: c.param_count(), got: p.len() });
    }
    let p = p.values();
    let rules: Vec<Vec<(f64, f64)>> = match mode {
        GradientMode::ExactFd => {
            let h = FD_STEP;
            vec![vec![(h, 0.5 / h), (-h, -0.5 / h)]; c.param_count()]
        }
        GradientMode::Shift => shift_rules(c)?
            .into_iter()
            .map(|r| r.map(ShiftRule::terms).unwrap_or_default())
            .collect(),
    };
    rules
        .par_iter()
        .enumerate()
        .map(|(i, terms)| {
            terms.iter().try_fold(0.0, |acc, &(delta, coeff)| {
                Ok(acc + coeff * dot(weights, &model_probs(c, &shifted(p, i, delta))?))
            })
        })
        .collect()
}

/// Shift-rule estimate of `Σ_x w(x) ∂P(x)/∂θ_i` where every shifted
/// distribution is replaced by a histogram of `shots` samples. Each shifted
/// circuit draws from its own stream derived from `seed`.
pub fn sampled_probability_gradient(
    c: &Circuit,
    p: &ParamVector,
    weights: &[f64],
    shots: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let dim = 1usize << c.n();
    if weights.len() != dim {
        return Err(Error::SizeMismatch { expected: dim, got: weights.len() });
    }
    if p.len() != c.param_count() {
        return Err(Error::SizeMismatch { expected: c.param_count(), got: p.len() });
    }
    if shots == 0 {
        return Err(Error::InvalidConfig("shots must be at least 1".into()));
    }
    let rules = shift_rules(c)?;
    rules
        .par_iter()
        .enumerate()
        .map(|(i, rule)| {
            let terms = rule.map(ShiftRule::terms).unwrap_or_default();
            terms.iter().enumerate().try_fold(0.0, |acc, (k, &(delta, coeff))| {
                let probs = model_probs(c, &shifted(p.values(), i, delta))?;
                let mut rng = derived_rng(seed, &[i as u64, k as u64]);
                Ok(acc + coeff * dot(weights, &sample_histogram(&probs, shots, &mut rng)))
            })
        })
        .collect()
}

/// Gradient of `loss` at `p` using exact Born probabilities.
///
/// `ExactFd` differentiates the loss itself by central differences; `Shift`
/// chains `∂L/∂P` with shift-rule derivatives of the probabilities.
pub fn loss_gradient(c: &Circuit, p: &ParamVector, loss: &dyn Objective, mode: GradientMode) -> Result<Vec<f64>> {
    match mode {
        GradientMode::ExactFd => {
            if p.len() != c.param_count() {
                return Err(Error::SizeMismatch { expected: c.param_count(), got: p.len() });
            }
            let h = FD_STEP;
            (0..c.param_count())
                .into_par_iter()
                .map(|i| {
                    let up = loss.value(&model_probs(c, &shifted(p.values(), i, h))?);
                    let down = loss.value(&model_probs(c, &shifted(p.values(), i, -h))?);
                    Ok((up - down) / (2.0 * h))
                })
                .collect()
        }
        GradientMode::Shift => {
            let probs = model_probs(c, p.values())?;
            probability_gradient(c, p, &loss.probability_gradient(&probs), mode)
        }
    }
}
