use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{model_code, undirected_view};
use crate::ansatz::{AnsatzSpec, UfForm};
use crate::error::{Error, Result};
use crate::graph::{generate_graph, maximal_cliques, read_cliques_file, CliqueSet, GraphSpec, UndirectedGraph};
use crate::hamiltonian::{ModelKind, ModelStructure};
use crate::pgm::{bn_from_mn, generate_benchmark};
use crate::seed::derive_seed;
use crate::simulator::GradientMode;
use crate::training::{train, window_average, Init, LossKind, LossSpec, TrainConfig, TrainHistory};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CliquePolicy {
    #[default]
    Maximal,
    File { path: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    pub graph: GraphSpec,
    #[serde(default)]
    pub cliques: CliquePolicy,
    pub models: Vec<ModelKind>,
    pub losses: Vec<LossKind>,
    pub factor_set_count: usize,
    /// Size of the training set the MMD loss sees.
    pub sample_count: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub max_locality: Option<usize>,
    /// Defaults to `zyz` in shift mode and `exponential` otherwise.
    #[serde(default)]
    pub uf_form: Option<UfForm>,
    #[serde(default)]
    pub train: TrainConfig,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl ExperimentSpec {
    /// Pairwise 3×3 grid: five factor sets, 10⁴ shots and samples, zero init.
    pub fn grid() -> Self {
        Self {
            name: "grid".into(),
            graph: GraphSpec::Grid { rows: 3, cols: 3 },
            cliques: CliquePolicy::Maximal,
            models: vec![ModelKind::Qcibm, ModelKind::Qcmrf],
            losses: vec![LossKind::Kl, LossKind::Mmd],
            factor_set_count: 5,
            sample_count: 10_000,
            seed: 0,
            max_locality: None,
            uf_form: None,
            train: TrainConfig {
                epochs: 500,
                learning_rate: 0.1,
                shots: 10_000,
                init: Init::Zeros,
                gradient_mode: GradientMode::Shift,
                ..TrainConfig::default()
            },
            out: None,
        }
    }

    /// Loop `C_n`: ten factor sets, 10³ shots and samples, small random init.
    pub fn loop_graph(n: usize) -> Self {
        Self {
            name: format!("loop{n}"),
            graph: GraphSpec::Loop { n },
            models: vec![ModelKind::Qcmrf, ModelKind::Bbqc],
            factor_set_count: 10,
            sample_count: 1_000,
            train: TrainConfig {
                shots: 1_000,
                init: Init::UniformRandom { lo: -0.1, hi: 0.1 },
                ..Self::grid().train
            },
            ..Self::grid()
        }
    }

    pub fn uf_form(&self) -> UfForm {
        self.uf_form.unwrap_or(match self.train.gradient_mode {
            GradientMode::Shift => UfForm::Zyz,
            GradientMode::ExactFd => UfForm::Exponential,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.train.validate()?;
        if self.name.is_empty() || self.name.contains(['/', '\\']) || self.name.starts_with('.') {
            return Err(Error::InvalidConfig(format!("invalid suite name {:?}", self.name)));
        }
        if self.models.is_empty() || self.losses.is_empty() || self.factor_set_count == 0 {
            return Err(Error::InvalidConfig("a suite needs models, losses and factor sets".into()));
        }
        if self.sample_count == 0 {
            return Err(Error::InvalidConfig("sample_count must be at least 1".into()));
        }
        if self.uf_form() == UfForm::Exponential && self.train.gradient_mode == GradientMode::Shift {
            return Err(Error::InvalidConfig("shift gradients need uf_form zyz".into()));
        }
        Ok(())
    }

    fn load(&self) -> Result<(UndirectedGraph, CliqueSet)> {
        let g = undirected_view(generate_graph(&self.graph)?);
        let cs = match &self.cliques {
            CliquePolicy::Maximal => maximal_cliques(&g),
            CliquePolicy::File { path } => read_cliques_file(path, &g)?,
        };
        Ok((g, cs))
    }
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub model: ModelKind,
    pub loss: LossKind,
    pub factor_set: usize,
    pub param_count: usize,
    pub history: TrainHistory,
}

impl RunResult {
    pub fn file_name(&self) -> String {
        format!("{}_{}_{}.csv", self.model, self.loss, self.factor_set)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryEntry {
    pub model: ModelKind,
    pub loss: LossKind,
    pub param_count: usize,
    /// Exact TV per epoch averaged over factor sets.
    pub mean_tv: Vec<f64>,
    pub smoothed_tv: Vec<f64>,
    /// Last smoothed value per factor set.
    pub final_tv_per_set: Vec<f64>,
    pub final_tv: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub name: String,
    pub n: usize,
    pub factor_set_count: usize,
    pub window: usize,
    pub entries: Vec<SummaryEntry>,
}

impl SuiteSummary {
    pub fn entry(&self, model: ModelKind, loss: LossKind) -> Option<&SummaryEntry> {
        self.entries.iter().find(|e| e.model == model && e.loss == loss)
    }
}

#[derive(Clone, Debug)]
pub struct SuiteResult {
    pub runs: Vec<RunResult>,
    pub summary: SuiteSummary,
}

/// Trains every (factor set, model, loss) combination of `spec`.
pub fn run_training_suite(spec: &ExperimentSpec) -> Result<SuiteResult> {
    spec.validate()?;
    let (graph, cliques) = spec.load()?;
    let n = graph.n();
    let dag = bn_from_mn(&graph);
    let benchmarks = (0..spec.factor_set_count)
        .into_par_iter()
        .map(|f| generate_benchmark(&graph, &cliques, derive_seed(spec.seed, &[f as u64]), spec.sample_count))
        .collect::<Result<Vec<_>>>()?;
    let mut items = Vec::new();
    for f in 0..spec.factor_set_count {
        for &model in &spec.models {
            for &loss in &spec.losses {
                items.push((f, model, loss));
            }
        }
    }
    let runs = items
        .par_iter()
        .map(|&(f, model, loss)| {
            let structure = match model {
                ModelKind::Qcibm => ModelStructure::Qubits(n),
                ModelKind::Qcmrf => ModelStructure::Markov { n, cliques: &cliques, max_locality: spec.max_locality },
                ModelKind::Bbqc => ModelStructure::Bayes(&dag),
            };
            let ansatz = AnsatzSpec { kind: model, max_locality: spec.max_locality, uf_form: spec.uf_form() };
            let circuit = ansatz.build(structure)?;
            let b = &benchmarks[f];
            let bound = LossSpec::of(loss).bind(&b.distribution, Some(&b.dataset))?;
            let cfg = TrainConfig {
                seed: derive_seed(spec.seed, &[f as u64, model_code(model), loss as u64]),
                ..spec.train.clone()
            };
            let history = train(&circuit, &bound, &b.distribution, &cfg)?;
            Ok(RunResult { model, loss, factor_set: f, param_count: circuit.param_count(), history })
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = summarize(spec, n, &runs);
    Ok(SuiteResult { runs, summary })
}

fn summarize(spec: &ExperimentSpec, n: usize, runs: &[RunResult]) -> SuiteSummary {
    let window = spec.train.report_window;
    let mut entries = Vec::new();
    for &model in &spec.models {
        for &loss in &spec.losses {
            let group: Vec<&RunResult> = runs.iter().filter(|r| r.model == model && r.loss == loss).collect();
            let epochs = spec.train.epochs;
            let mean_tv: Vec<f64> = (0..epochs)
                .map(|e| group.iter().map(|r| r.history.records[e].tv).sum::<f64>() / group.len() as f64)
                .collect();
            let smoothed_tv = window_average(&mean_tv, window);
            let final_tv_per_set = group.iter().map(|r| r.history.final_tv(window)).collect();
            entries.push(SummaryEntry {
                model,
                loss,
                param_count: group[0].param_count,
                final_tv: *smoothed_tv.last().expect("epochs >= 1"),
                mean_tv,
                smoothed_tv,
                final_tv_per_set,
            });
        }
    }
    SuiteSummary { name: spec.name.clone(), n, factor_set_count: spec.factor_set_count, window, entries }
}

/// Writes `<out>/<name>/<model>_<loss>_<factorset>.csv` for every run and
/// `<out>/<name>/summary.json`. Returns the suite directory.
pub fn write_suite(result: &SuiteResult, out: &Path) -> Result<PathBuf> {
    let dir = out.join(&result.summary.name);
    fs::create_dir_all(&dir)?;
    for run in &result.runs {
        fs::write(dir.join(run.file_name()), run.history.to_csv())?;
    }
    let mut json = serde_json::to_string_pretty(&result.summary)?;
    json.push('\n');
    fs::write(dir.join("summary.json"), json)?;
    Ok(dir)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> ExperimentSpec {
        ExperimentSpec {
            name: "tiny".into(),
            graph: GraphSpec::Loop { n: 3 },
            factor_set_count: 1,
            sample_count: 100,
            models: vec![ModelKind::Qcibm, ModelKind::Qcmrf, ModelKind::Bbqc],
            train: TrainConfig { epochs: 1, shots: 50, ..ExperimentSpec::grid().train },
            ..ExperimentSpec::grid()
        }
    }

    #[test]
    fn degenerate_suite_has_one_history_per_pair() {
        let r = run_training_suite(&tiny()).unwrap();
        assert_eq!(r.runs.len(), 6);
        assert!(r.runs.iter().all(|run| run.history.records.len() == 1));
        assert_eq!(r.summary.entries.len(), 6);
        let e = r.summary.entry(ModelKind::Qcmrf, LossKind::Mmd).unwrap();
        assert_eq!(e.param_count, 16);
        assert_eq!(e.final_tv, e.mean_tv[0]);
    }

    #[test]
    fn suites_are_reproducible() {
        let mut spec = tiny();
        spec.train.epochs = 3;
        let a = run_training_suite(&spec).unwrap();
        let b = run_training_suite(&spec).unwrap();
        assert_eq!(a.summary, b.summary);
        for (x, y) in a.runs.iter().zip(&b.runs) {
            assert_eq!(x.history.to_csv(), y.history.to_csv());
        }
    }

    #[test]
    fn presets() {
        let g = ExperimentSpec::grid();
        assert_eq!((g.factor_set_count, g.train.shots, g.train.init), (5, 10_000, Init::Zeros));
        let l = ExperimentSpec::loop_graph(5);
        assert_eq!((l.factor_set_count, l.train.shots), (10, 1_000));
        assert!(matches!(l.train.init, Init::UniformRandom { .. }));
        assert_eq!(l.uf_form(), UfForm::Zyz);
        let json = serde_json::to_string(&l).unwrap();
        assert_eq!(serde_json::from_str::<ExperimentSpec>(&json).unwrap(), l);
    }

    #[test]
    fn invalid_specs() {
        let mut s = tiny();
        s.name = "../x".into();
        assert!(run_training_suite(&s).is_err());
        let mut s = tiny();
        s.uf_form = Some(UfForm::Exponential);
        assert!(s.validate().is_err());
        let mut s = tiny();
        s.models.clear();
        assert!(s.validate().is_err());
    }
}
