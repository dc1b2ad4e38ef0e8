use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::undirected_view;
use crate::ansatz::{build_qcmrf, UfForm};
use crate::error::{Error, Result};
use crate::graph::{generate_graph, maximal_cliques, GraphSpec};
use crate::pgm::generate_benchmark;
use crate::seed::{derive_seed, derived_rng};
use crate::simulator::{model_probs, sample_histogram, Objective};
use crate::training::LossSpec;

const GRAPH_STREAM: u64 = 1;
const BENCHMARK_STREAM: u64 = 2;
const DRAW_STREAM: u64 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum VarianceFamily {
    Complete,
    ErdosRenyi { p: f64 },
    TriangleChain,
}

impl VarianceFamily {
    pub fn name(&self) -> &'static str {
        match self {
            VarianceFamily::Complete => "complete",
            VarianceFamily::ErdosRenyi { .. } => "erdos_renyi",
            VarianceFamily::TriangleChain => "triangle_chain",
        }
    }

    fn graph(&self, n: usize, seed: u64) -> GraphSpec {
        match *self {
            VarianceFamily::Complete => GraphSpec::Complete { n },
            VarianceFamily::ErdosRenyi { p } => GraphSpec::ErdosRenyi { n, p, seed },
            VarianceFamily::TriangleChain => GraphSpec::TriangleChain { n },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VarianceScanConfig {
    pub family: VarianceFamily,
    pub ns: Vec<usize>,
    pub factor_sets: usize,
    pub param_sets: usize,
    pub shots: usize,
    pub sample_count: usize,
    pub seed: u64,
}

impl Default for VarianceScanConfig {
    fn default() -> Self {
        Self {
            family: VarianceFamily::Complete,
            ns: (4..=10).collect(),
            factor_sets: 10,
            param_sets: 10_000,
            shots: 10_000,
            sample_count: 10_000,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceRecord {
    pub n: usize,
    pub factor_set: usize,
    pub variance: f64,
}

/// Spread of the per-factor-set variances at one `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceSummary {
    pub n: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// Mean over factor sets of `ln(variance)`.
    pub mean_log: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceScanResult {
    pub graph_kind: String,
    pub records: Vec<VarianceRecord>,
    pub summaries: Vec<VarianceSummary>,
}

impl VarianceScanResult {
    /// Least-squares slope of mean log-variance against `n`.
    pub fn log_slope(&self) -> f64 {
        let pts: Vec<(f64, f64)> = self.summaries.iter().map(|s| (s.n as f64, s.mean_log)).collect();
        least_squares_slope(&pts)
    }

    /// Columns `graph_kind,n,factor_set,variance,min,max`; `min`/`max` span the
    /// factor sets at that `n`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("graph_kind,n,factor_set,variance,min,max\n");
        for r in &self.records {
            let s = self.summaries.iter().find(|s| s.n == r.n).expect("summary per n");
            writeln!(
                out,
                "{},{},{},{:.16e},{:.16e},{:.16e}",
                self.graph_kind, r.n, r.factor_set, r.variance, s.min, s.max
            )
            .unwrap();
        }
        out
    }
}

pub fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn sample_variance(xs: &[f64]) -> f64 {
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / m;
    xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (m - 1.0)
}

/// Variance of the shot-based MMD loss of QCMRF circuits over random
/// parameter vectors drawn uniformly from `(−π, π]`.
pub fn run_variance_scan(cfg: &VarianceScanConfig) -> Result<VarianceScanResult> {
    if cfg.ns.is_empty() || cfg.factor_sets == 0 || cfg.param_sets < 2 || cfg.shots == 0 || cfg.sample_count == 0 {
        return Err(Error::InvalidConfig(
            "variance scan needs sizes, factor sets, at least two parameter sets, shots and samples".into(),
        ));
    }
    let mut records = Vec::new();
    let mut summaries = Vec::new();
    for &n in &cfg.ns {
        let mut variances = Vec::with_capacity(cfg.factor_sets);
        for f in 0..cfg.factor_sets {
            let path = [n as u64, f as u64];
            let spec = cfg.family.graph(n, derive_seed(cfg.seed, &[GRAPH_STREAM, path[0], path[1]]));
            let g = undirected_view(generate_graph(&spec)?);
            let cs = maximal_cliques(&g);
            let b = generate_benchmark(&g, &cs, derive_seed(cfg.seed, &[BENCHMARK_STREAM, path[0], path[1]]), cfg.sample_count)?;
            let loss = LossSpec::mmd().bind(&b.distribution, Some(&b.dataset))?;
            let c = build_qcmrf(&g, &cs, None, UfForm::Exponential)?;
            let losses = (0..cfg.param_sets)
                .into_par_iter()
                .map(|d| {
                    let mut rng = derived_rng(cfg.seed, &[DRAW_STREAM, path[0], path[1], d as u64]);
                    let params: Vec<f64> = (0..c.param_count()).map(|_| PI - rng.gen::<f64>() * 2.0 * PI).collect();
                    let probs = model_probs(&c, &params)?;
                    Ok(loss.value(&sample_histogram(&probs, cfg.shots, &mut rng)))
                })
                .collect::<Result<Vec<f64>>>()?;
            let variance = sample_variance(&losses);
            records.push(VarianceRecord { n, factor_set: f, variance });
            variances.push(variance);
        }
        summaries.push(VarianceSummary {
            n,
            min: variances.iter().copied().fold(f64::INFINITY, f64::min),
            max: variances.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean: variances.iter().sum::<f64>() / variances.len() as f64,
            mean_log: variances.iter().map(|v| v.ln()).sum::<f64>() / variances.len() as f64,
        });
    }
    Ok(VarianceScanResult { graph_kind: cfg.family.name().to_string(), records, summaries })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_line() {
        let pts: Vec<(f64, f64)> = (0..6).map(|i| (i as f64, 3.0 - 0.5 * i as f64)).collect();
        assert!((least_squares_slope(&pts) + 0.5).abs() < 1e-12);
    }

    #[test]
    fn small_scan_is_reproducible_and_consistent() {
        let cfg = VarianceScanConfig {
            family: VarianceFamily::ErdosRenyi { p: 0.5 },
            ns: vec![3, 4],
            factor_sets: 2,
            param_sets: 50,
            shots: 200,
            sample_count: 200,
            seed: 4,
        };
        let a = run_variance_scan(&cfg).unwrap();
        assert_eq!(a, run_variance_scan(&cfg).unwrap());
        assert_eq!(a.records.len(), 4);
        for s in &a.summaries {
            assert!(s.min <= s.mean && s.mean <= s.max && s.min >= 0.0);
        }
        let csv = a.to_csv();
        assert!(csv.starts_with("graph_kind,n,factor_set,variance,min,max\n"));
        assert_eq!(csv.lines().count(), 5);
        assert!(csv.lines().nth(1).unwrap().starts_with("erdos_renyi,3,0,"));
    }

    #[test]
    fn rejects_degenerate_configs() {
        let cfg = VarianceScanConfig { param_sets: 1, ..Default::default() };
        assert!(run_variance_scan(&cfg).is_err());
    }

    #[test]
    fn draws_cover_the_interval() {
        let mut rng = derived_rng(1, &[2]);
        let xs: Vec<f64> = (0..10_000).map(|_| PI - rng.gen::<f64>() * 2.0 * PI).collect();
        assert!(xs.iter().all(|x| *x > -PI && *x <= PI));
        assert!(xs.iter().any(|x| *x < -3.0) && xs.iter().any(|x| *x > 3.0));
    }
}
