use std::fmt::Write as _;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{tv_probs, AdamState, BoundLoss};
use crate::error::{Error, Result};
use crate::pgm::Distribution;
use crate::seed::{derive_seed, derived_rng};
use crate::simulator::{
    loss_gradient, model_probs, probability_gradient, sample_histogram, sampled_probability_gradient, Circuit,
    GradientMode, Objective, ParamVector,
};

const INIT_STREAM: u64 = 1;
const SHOT_STREAM: u64 = 2;
const SHIFT_STREAM: u64 = 3;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Init {
    #[default]
    Zeros,
    UniformRandom { lo: f64, hi: f64 },
}

impl Init {
    pub fn draw(self, len: usize, seed: u64) -> Result<ParamVector> {
        match self {
            Init::Zeros => Ok(ParamVector::zeros(len)),
            Init::UniformRandom { lo, hi } => {
                if !(lo < hi) {
                    return Err(Error::InvalidConfig(format!("empty init range [{lo}, {hi})")));
                }
                let mut rng = derived_rng(seed, &[INIT_STREAM]);
                ParamVector::new((0..len).map(|_| rng.gen_range(lo..hi)).collect())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    /// 0 trains on exact probabilities.
    pub shots: usize,
    pub init: Init,
    pub seed: u64,
    pub gradient_mode: GradientMode,
    pub report_window: usize,
    /// Off by default so histories are reproducible byte for byte.
    pub record_wall_time: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 500,
            learning_rate: 0.1,
            shots: 0,
            init: Init::Zeros,
            seed: 0,
            gradient_mode: GradientMode::ExactFd,
            report_window: 20,
            record_wall_time: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be at least 1".into()));
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig(format!("invalid learning rate {}", self.learning_rate)));
        }
        if self.report_window == 0 {
            return Err(Error::InvalidConfig("report_window must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub loss: f64,
    pub tv: f64,
    pub wall_seconds: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainHistory {
    pub records: Vec<EpochRecord>,
    pub params: ParamVector,
}

impl TrainHistory {
    pub fn tv_series(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.tv).collect()
    }

    pub fn loss_series(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.loss).collect()
    }

    /// Last value of the trailing `window` average of the TV series.
    pub fn final_tv(&self, window: usize) -> f64 {
        window_average(&self.tv_series(), window).last().copied().unwrap_or(f64::NAN)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,loss,tv,wall_seconds\n");
        for r in &self.records {
            writeln!(out, "{},{:.16e},{:.16e},{:.16e}", r.epoch, r.loss, r.tv, r.wall_seconds).unwrap();
        }
        out
    }
}

/// Trailing mean over the last `window` entries (fewer at the start).
pub fn window_average(series: &[f64], window: usize) -> Vec<f64> {
    let window = window.max(1);
    let mut out = Vec::with_capacity(series.len());
    let mut sum = 0.0;
    for (i, &x) in series.iter().enumerate() {
        sum += x;
        if i >= window {
            sum -= series[i - window];
        }
        out.push(sum / (i + 1).min(window) as f64);
    }
    out
}

/// Adam on `loss`, logging the exact TV to `exact_target` before each update.
///
/// With `shots > 0` the loss and `∂L/∂P` are taken at a fresh shot histogram
/// every epoch. In shift mode the circuit derivatives are also estimated from
/// shot histograms of the shifted circuits; in finite-difference mode they
/// are exact.
pub fn train(c: &Circuit, loss: &BoundLoss, exact_target: &Distribution, cfg: &TrainConfig) -> Result<TrainHistory> {
    cfg.validate()?;
    if exact_target.n() != c.n() {
        return Err(Error::SizeMismatch { expected: c.n(), got: exact_target.n() });
    }
    let mut params = cfg.init.draw(c.param_count(), cfg.seed)?;
    let mut adam = AdamState::new(c.param_count());
    let mut shots_rng = derived_rng(cfg.seed, &[SHOT_STREAM]);
    let start = Instant::now();
    let mut records = Vec::with_capacity(cfg.epochs);
    for epoch in 1..=cfg.epochs {
        let probs = model_probs(c, params.values())?;
        let tv = tv_probs(&probs, exact_target.probs()).min(1.0);
        let (value, grad) = if cfg.shots == 0 {
            (loss.value(&probs), loss_gradient(c, &params, loss, cfg.gradient_mode)?)
        } else {
            let hist = sample_histogram(&probs, cfg.shots, &mut shots_rng);
            let weights = loss.probability_gradient(&hist);
            let grad = match cfg.gradient_mode {
                GradientMode::Shift => {
                    let seed = derive_seed(cfg.seed, &[SHIFT_STREAM, epoch as u64]);
                    sampled_probability_gradient(c, &params, &weights, cfg.shots, seed)?
                }
                GradientMode::ExactFd => probability_gradient(c, &params, &weights, cfg.gradient_mode)?,
            };
            (loss.value(&hist), grad)
        };
        adam.step(params.values_mut(), &grad, cfg.learning_rate)?;
        let wall_seconds = if cfg.record_wall_time { start.elapsed().as_secs_f64() } else { 0.0 };
        records.push(EpochRecord { epoch, loss: value, tv, wall_seconds });
    }
    Ok(TrainHistory { records, params })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{build_qcibm, build_qcmrf, UfForm};
    use crate::graph::{maximal_cliques, UndirectedGraph};
    use crate::pgm::{generate_benchmark, mn_joint};
    use crate::training::LossSpec;

    #[test]
    fn window_average_basics() {
        assert_eq!(window_average(&[2.0; 50], 20), vec![2.0; 50]);
        assert_eq!(window_average(&[1.0, 2.0, 3.0, 4.0], 2), vec![1.0, 1.5, 2.5, 3.5]);
        assert!(window_average(&[], 5).is_empty());
    }

    #[test]
    fn config_validation_and_serde() {
        assert!(TrainConfig { epochs: 0, ..Default::default() }.validate().is_err());
        assert!(TrainConfig { report_window: 0, ..Default::default() }.validate().is_err());
        let cfg: TrainConfig =
            serde_json::from_str(r#"{"epochs": 3, "init": {"kind": "uniform_random", "lo": -0.1, "hi": 0.1}}"#).unwrap();
        assert_eq!(cfg.epochs, 3);
        assert_eq!(cfg.init, Init::UniformRandom { lo: -0.1, hi: 0.1 });
        assert_eq!(cfg.learning_rate, 0.1);
        assert!(serde_json::from_str::<TrainConfig>(r#"{"epoch": 3}"#).is_err());
    }

    fn edge_benchmark(seed: u64) -> (UndirectedGraph, crate::pgm::Benchmark) {
        let g = UndirectedGraph::numbered(2, [(0, 1)]).unwrap();
        let b = generate_benchmark(&g, &maximal_cliques(&g), seed, 1000).unwrap();
        (g, b)
    }

    #[test]
    fn zero_learning_rate_keeps_params() {
        let (g, b) = edge_benchmark(1);
        let c = build_qcmrf(&g, &maximal_cliques(&g), None, UfForm::Exponential).unwrap();
        let loss = LossSpec::kl().bind(&b.distribution, None).unwrap();
        let cfg = TrainConfig { epochs: 1, learning_rate: 0.0, ..Default::default() };
        let h = train(&c, &loss, &b.distribution, &cfg).unwrap();
        assert_eq!(h.records.len(), 1);
        assert_eq!(h.params, ParamVector::zeros(c.param_count()));
        assert_eq!(h.records[0].wall_seconds, 0.0);
    }

    #[test]
    fn zero_init_starts_uniform() {
        let (g, b) = edge_benchmark(2);
        let c = build_qcibm(2, UfForm::Exponential).unwrap();
        let _ = g;
        let loss = LossSpec::mmd().bind(&b.distribution, Some(&b.dataset)).unwrap();
        let cfg = TrainConfig { epochs: 2, ..Default::default() };
        let h = train(&c, &loss, &b.distribution, &cfg).unwrap();
        let expected = crate::training::tv_distance(&Distribution::uniform(2), &b.distribution).unwrap();
        assert!((h.records[0].tv - expected).abs() < 1e-12);
    }

    #[test]
    fn single_edge_is_learned_exactly() {
        for seed in 0..3 {
            let (g, b) = edge_benchmark(seed);
            let target = mn_joint(&b.model).unwrap();
            let c = build_qcmrf(&g, &maximal_cliques(&g), None, UfForm::Exponential).unwrap();
            let loss = LossSpec::kl().bind(&target, None).unwrap();
            // zero init sits on a stationary subspace of real circuits
            let cfg = TrainConfig { init: Init::UniformRandom { lo: -0.1, hi: 0.1 }, seed, ..Default::default() };
            let h = train(&c, &loss, &target, &cfg).unwrap();
            let final_tv = crate::training::tv_distance(
                &crate::simulator::born_distribution(&crate::simulator::run_circuit(&c, &h.params).unwrap()),
                &target,
            )
            .unwrap();
            assert!(final_tv < 0.01, "seed {seed}: {final_tv}");
        }
    }

    #[test]
    fn training_is_deterministic_with_shots() {
        let (g, b) = edge_benchmark(4);
        let c = build_qcmrf(&g, &maximal_cliques(&g), None, UfForm::Exponential).unwrap();
        let loss = LossSpec::kl().bind(&b.distribution, None).unwrap();
        let cfg = TrainConfig {
            epochs: 20,
            shots: 100,
            init: Init::UniformRandom { lo: -0.1, hi: 0.1 },
            seed: 9,
            ..Default::default()
        };
        let a = train(&c, &loss, &b.distribution, &cfg).unwrap();
        let again = train(&c, &loss, &b.distribution, &cfg).unwrap();
        assert_eq!(a.to_csv(), again.to_csv());
        assert_eq!(a.to_csv().lines().count(), 21);
        assert!(a.records.iter().all(|r| (0.0..=1.0).contains(&r.tv)));
    }
}
