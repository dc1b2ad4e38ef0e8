//! Losses, the exact TV metric, Adam, and the training loop.

mod adam;
mod train;

pub use adam::AdamState;
pub use train::{train, window_average, EpochRecord, Init, TrainConfig, TrainHistory};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pgm::{Dataset, Distribution};
use crate::simulator::Objective;

pub const DEFAULT_KL_FLOOR: f64 = 1e-12;
pub const DEFAULT_MMD_BANDWIDTHS: [f64; 3] = [0.25, 10.0, 1000.0];

fn check_same_n(p: &Distribution, q: &Distribution) -> Result<()> {
    if p.n() != q.n() {
        return Err(Error::SizeMismatch { expected: p.n(), got: q.n() });
    }
    Ok(())
}

pub(crate) fn tv_probs(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// `½ Σ_x |p(x) − q(x)|`.
pub fn tv_distance(p: &Distribution, q: &Distribution) -> Result<f64> {
    check_same_n(p, q)?;
    Ok(tv_probs(p.probs(), q.probs()))
}

fn kl_probs(target: &[f64], model: &[f64], floor: f64) -> f64 {
    target
        .iter()
        .zip(model)
        .filter(|(t, _)| **t > 0.0)
        .map(|(t, m)| t * (t / m.max(floor)).ln())
        .sum()
}

/// `Σ_x t(x) ln(t(x) / max(m(x), floor))`, skipping states with `t(x) = 0`.
pub fn kl_divergence(target: &Distribution, model: &Distribution, floor: f64) -> Result<f64> {
    check_same_n(target, model)?;
    if !(floor > 0.0) {
        return Err(Error::InvalidConfig(format!("kl floor must be positive, got {floor}")));
    }
    Ok(kl_probs(target.probs(), model.probs(), floor))
}

/// Applies `⊗_q [[1, c], [c, 1]]` with `c = exp(−1/(2σ))` in place.
fn apply_kernel(v: &mut [f64], sigma: f64) {
    let c = (-1.0 / (2.0 * sigma)).exp();
    let mut h = 1;
    while h < v.len() {
        for block in v.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + c * y;
                *b = c * x + y;
            }
        }
        h *= 2;
    }
}

/// `K·(p − q)` for the bandwidth-averaged Hamming-Gaussian kernel.
fn kernel_times_diff(p: &[f64], q: &[f64], bandwidths: &[f64]) -> Vec<f64> {
    let diff: Vec<f64> = p.iter().zip(q).map(|(a, b)| a - b).collect();
    let mut out = vec![0.0; diff.len()];
    for &sigma in bandwidths {
        let mut kd = diff.clone();
        apply_kernel(&mut kd, sigma);
        out.iter_mut().zip(kd).for_each(|(o, k)| *o += k / bandwidths.len() as f64);
    }
    out
}

fn mmd_probs(p: &[f64], q: &[f64], bandwidths: &[f64]) -> f64 {
    let kd = kernel_times_diff(p, q, bandwidths);
    p.iter().zip(q).zip(kd).map(|((a, b), k)| (a - b) * k).sum()
}

fn check_bandwidths(bandwidths: &[f64]) -> Result<()> {
    if bandwidths.is_empty() || bandwidths.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
        return Err(Error::InvalidConfig(format!("bandwidths must be nonempty and positive: {bandwidths:?}")));
    }
    Ok(())
}

/// Squared MMD (V-statistic) between two distributions under the kernel
/// `K(x, y) = mean_σ exp(−hamming(x, y) / (2σ))`. Pass `Dataset::empirical`
/// to compare sample sets.
pub fn mmd_loss(model: &Distribution, target: &Distribution, bandwidths: &[f64]) -> Result<f64> {
    check_same_n(model, target)?;
    check_bandwidths(bandwidths)?;
    Ok(mmd_probs(model.probs(), target.probs(), bandwidths))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    Kl,
    Mmd,
}

impl LossKind {
    pub fn name(self) -> &'static str {
        match self {
            LossKind::Kl => "kl",
            LossKind::Mmd => "mmd",
        }
    }
}

impl std::fmt::Display for LossKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kl" => Ok(LossKind::Kl),
            "mmd" => Ok(LossKind::Mmd),
            _ => Err(Error::InvalidConfig(format!("unknown loss {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetAccess {
    ExactDistribution,
    Dataset,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossSpec {
    pub kind: LossKind,
    #[serde(default = "default_floor")]
    pub kl_floor: f64,
    #[serde(default = "default_bandwidths")]
    pub mmd_bandwidths: Vec<f64>,
    pub target_access: TargetAccess,
}

fn default_floor() -> f64 {
    DEFAULT_KL_FLOOR
}

fn default_bandwidths() -> Vec<f64> {
    DEFAULT_MMD_BANDWIDTHS.to_vec()
}

impl LossSpec {
    pub fn kl() -> Self {
        Self::of(LossKind::Kl)
    }

    pub fn mmd() -> Self {
        Self::of(LossKind::Mmd)
    }

    /// Defaults for `kind`: KL reads the exact target, MMD the dataset.
    pub fn of(kind: LossKind) -> Self {
        let target_access = match kind {
            LossKind::Kl => TargetAccess::ExactDistribution,
            LossKind::Mmd => TargetAccess::Dataset,
        };
        Self { kind, kl_floor: DEFAULT_KL_FLOOR, mmd_bandwidths: default_bandwidths(), target_access }
    }

    pub fn validate(&self) -> Result<()> {
        match (self.kind, self.target_access) {
            (LossKind::Kl, TargetAccess::ExactDistribution) => {
                if !(self.kl_floor > 0.0) {
                    return Err(Error::InvalidConfig("kl_floor must be positive".into()));
                }
                Ok(())
            }
            (LossKind::Mmd, TargetAccess::Dataset) => check_bandwidths(&self.mmd_bandwidths),
            (LossKind::Kl, _) => Err(Error::InvalidConfig("kl needs exact_distribution target access".into())),
            (LossKind::Mmd, _) => Err(Error::InvalidConfig("mmd needs dataset target access".into())),
        }
    }

    /// Binds the loss to the target artifact it is allowed to see.
    pub fn bind(&self, exact: &Distribution, dataset: Option<&Dataset>) -> Result<BoundLoss> {
        self.validate()?;
        let target = match self.target_access {
            TargetAccess::ExactDistribution => exact.probs().to_vec(),
            TargetAccess::Dataset => {
                let ds = dataset.ok_or_else(|| Error::InvalidConfig("mmd loss needs a dataset".into()))?;
                if ds.n() != exact.n() {
                    return Err(Error::SizeMismatch { expected: exact.n(), got: ds.n() });
                }
                ds.empirical()?.into_probs()
            }
        };
        Ok(BoundLoss { spec: self.clone(), target })
    }
}

/// A loss together with its target probabilities.
#[derive(Clone, Debug)]
pub struct BoundLoss {
    spec: LossSpec,
    target: Vec<f64>,
}

impl BoundLoss {
    pub fn spec(&self) -> &LossSpec {
        &self.spec
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }
}

impl Objective for BoundLoss {
    fn value(&self, probs: &[f64]) -> f64 {
        match self.spec.kind {
            LossKind::Kl => kl_probs(&self.target, probs, self.spec.kl_floor),
            LossKind::Mmd => mmd_probs(probs, &self.target, &self.spec.mmd_bandwidths),
        }
    }

    fn probability_gradient(&self, probs: &[f64]) -> Vec<f64> {
        match self.spec.kind {
            LossKind::Kl => self
                .target
                .iter()
                .zip(probs)
                .map(|(&t, &m)| if t > 0.0 && m > self.spec.kl_floor { -t / m } else { 0.0 })
                .collect(),
            LossKind::Mmd => kernel_times_diff(probs, &self.target, &self.spec.mmd_bandwidths)
                .into_iter()
                .map(|k| 2.0 * k)
                .collect(),
        }
    }
}
