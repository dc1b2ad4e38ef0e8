//! Command-line front end. Configs are JSON files; flags override them.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::ansatz::{AnsatzSpec, UfForm};
use crate::error::{Error, Result};
use crate::experiments::{
    run_resource_scan, run_training_suite, run_variance_scan, write_suite, CliquePolicy, ExperimentSpec,
    ResourceFamily, VarianceScanConfig,
};
use crate::graph::{
    maximal_cliques, read_cliques_file, read_graph_file, AnyGraph, CliqueSet, CliquesFile, GraphFile, GraphSpec,
    UndirectedGraph,
};
use crate::hamiltonian::{estimate_resources, AncillaMode, ModelKind, ModelStructure, ResourceEstimate};
use crate::pgm::{bn_from_mn, generate_benchmark, DistributionFile, FactorFile};
use crate::simulator::{born_distribution, run_circuit, sample_counts, ParamVector};
use crate::training::LossKind;

#[derive(Debug, Parser)]
#[command(name = "qcmrf", version, about = "Problem-informed Born machines for Markov networks")]
pub struct Cli {
    /// Worker threads for parallel sections (default: all cores)
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw random factors for a graph and write the model, its exact
    /// distribution and a sampled dataset
    GenBenchmark(GenBenchmarkArgs),
    /// Run a training suite and write one CSV per run plus summary.json
    Train(TrainArgs),
    /// Variance of the MMD loss over random QCMRF parameters
    VarianceScan(VarianceArgs),
    /// Parameter, qubit and depth estimates over loop or k-gram families
    ResourceScan(ResourceScanArgs),
    /// Sample bitstrings from a circuit with given parameters
    Sample(SampleArgs),
    /// Maximal cliques of a graph as JSON
    Cliques(CliquesArgs),
    /// Resource estimates of all three model kinds for one graph
    Resources(ResourcesArgs),
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// Graph JSON file ({"directed", "nodes", "edges"})
    #[arg(long)]
    pub graph: PathBuf,
    /// Clique JSON file; maximal cliques are used when absent
    #[arg(long)]
    pub cliques: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenBenchmarkArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
    /// Base seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Dataset size
    #[arg(long, default_value_t = 10_000)]
    pub shots: usize,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Experiment JSON; the 3×3 grid suite is used when absent
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Graph JSON file replacing the configured graph
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Clique JSON file replacing the configured clique policy
    #[arg(long)]
    pub cliques: Option<PathBuf>,
    /// Output directory (overrides the config)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Base seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Shots per loss evaluation, 0 for exact probabilities
    #[arg(long)]
    pub shots: Option<usize>,
    /// Training epochs
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Train only this model
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    /// Train only with this loss
    #[arg(long, value_enum)]
    pub loss: Option<LossArg>,
}

#[derive(Debug, Args)]
pub struct VarianceArgs {
    /// Variance scan JSON; defaults apply to missing fields
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
    /// Base seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Shots per loss evaluation
    #[arg(long)]
    pub shots: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ResourceScanArgs {
    /// Graph family
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Node counts, comma separated
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    /// Markov orders for k-gram models, comma separated
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<usize>,
    /// One ancilla per clique of size > 2 in QCMRF circuits
    #[arg(long)]
    pub ancilla: bool,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Model kind the parameters belong to
    #[arg(long, value_enum)]
    pub model: ModelArg,
    /// JSON array of parameter values
    #[arg(long)]
    pub params: PathBuf,
    /// Basis-change form the parameters were trained with
    #[arg(long, value_enum, default_value_t = UfArg::Exponential)]
    pub uf_form: UfArg,
    /// Number of samples
    #[arg(long, default_value_t = 1000)]
    pub shots: usize,
    /// Sampling seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CliquesArgs {
    /// Graph JSON file
    #[arg(long)]
    pub graph: PathBuf,
    /// Output directory; prints to stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ResourcesArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// One ancilla per clique of size > 2 in the QCMRF circuit
    #[arg(long)]
    pub ancilla: bool,
    /// Output directory; prints to stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModelArg {
    Qcibm,
    Qcmrf,
    Bbqc,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Qcibm => ModelKind::Qcibm,
            ModelArg::Qcmrf => ModelKind::Qcmrf,
            ModelArg::Bbqc => ModelKind::Bbqc,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum LossArg {
    Kl,
    Mmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FamilyArg {
    Loop,
    Kgram,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum UfArg {
    Exponential,
    Zyz,
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code: 0 on success, 2 on usage errors, 1 on failures.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(Error::InvalidConfig("--jobs must be at least 1".into()));
        }
        // only the first call per process configures the global pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    match cli.command {
        Command::GenBenchmark(a) => gen_benchmark(a),
        Command::Train(a) => train(a),
        Command::VarianceScan(a) => variance_scan(a),
        Command::ResourceScan(a) => resource_scan(a),
        Command::Sample(a) => sample(a),
        Command::Cliques(a) => cliques(a),
        Command::Resources(a) => resources(a),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::MalformedFile { path: path.display().to_string(), reason: e.to_string() })?;
    serde_json::from_str(&text).map_err(|e| Error::MalformedFile { path: path.display().to_string(), reason: e.to_string() })
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn emit_json<T: Serialize + ?Sized>(out: Option<&Path>, file: &str, value: &T) -> Result<()> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            write_json(&dir.join(file), value)
        }
        None => {
            let text = serde_json::to_string_pretty(value)?;
            match writeln!(io::stdout().lock(), "{text}") {
                Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
                _ => Ok(()),
            }
        }
    }
}

fn load_undirected(path: &Path) -> Result<UndirectedGraph> {
    Ok(crate::experiments::undirected_view(read_graph_file(path)?))
}

fn load_graph(a: &GraphArgs) -> Result<(UndirectedGraph, CliqueSet)> {
    let g = load_undirected(&a.graph)?;
    let cs = match &a.cliques {
        Some(p) => read_cliques_file(p, &g)?,
        None => maximal_cliques(&g),
    };
    Ok((g, cs))
}

fn gen_benchmark(a: GenBenchmarkArgs) -> Result<()> {
    let (g, cs) = load_graph(&a.graph)?;
    let b = generate_benchmark(&g, &cs, a.seed, a.shots)?;
    fs::create_dir_all(&a.out)?;
    write_json(&a.out.join("graph.json"), &GraphFile::from_graph(&AnyGraph::Undirected(g.clone())))?;
    write_json(&a.out.join("cliques.json"), &CliquesFile::from_set(&g, &cs))?;
    write_json(&a.out.join("factors.json"), &FactorFile::from_model(&b.model))?;
    write_json(&a.out.join("distribution.json"), &DistributionFile::from(&b.distribution))?;
    fs::write(a.out.join("dataset.txt"), b.dataset.to_text())?;
    println!("wrote benchmark for {} variables to {}", g.n(), a.out.display());
    Ok(())
}

fn train(a: TrainArgs) -> Result<()> {
    let mut spec = match &a.config {
        Some(p) => read_json::<ExperimentSpec>(p)?,
        None => ExperimentSpec::grid(),
    };
    if let Some(p) = &a.graph {
        spec.graph = GraphSpec::FromFile { path: p.display().to_string() };
    }
    if let Some(p) = &a.cliques {
        spec.cliques = CliquePolicy::File { path: p.display().to_string() };
    }
    if let Some(seed) = a.seed {
        spec.seed = seed;
    }
    if let Some(shots) = a.shots {
        spec.train.shots = shots;
    }
    if let Some(epochs) = a.epochs {
        spec.train.epochs = epochs;
    }
    if let Some(m) = a.model {
        spec.models = vec![m.into()];
    }
    if let Some(l) = a.loss {
        spec.losses = vec![match l {
            LossArg::Kl => LossKind::Kl,
            LossArg::Mmd => LossKind::Mmd,
        }];
    }
    if let Some(out) = a.out {
        spec.out = Some(out);
    }
    let out = spec
        .out
        .clone()
        .ok_or_else(|| Error::InvalidConfig("no output directory (--out or config \"out\")".into()))?;
    let result = run_training_suite(&spec)?;
    let dir = write_suite(&result, &out)?;
    for run in &result.runs {
        write_json(&dir.join(run.file_name().replace(".csv", ".params.json")), run.history.params.values())?;
    }
    for e in &result.summary.entries {
        println!("{} {} params={} final_tv={:.6}", e.model, e.loss, e.param_count, e.final_tv);
    }
    Ok(())
}

fn variance_scan(a: VarianceArgs) -> Result<()> {
    let mut cfg = match &a.config {
        Some(p) => read_json::<VarianceScanConfig>(p)?,
        None => VarianceScanConfig::default(),
    };
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    if let Some(shots) = a.shots {
        cfg.shots = shots;
    }
    let result = run_variance_scan(&cfg)?;
    fs::create_dir_all(&a.out)?;
    fs::write(a.out.join(format!("variance_{}.csv", result.graph_kind)), result.to_csv())?;
    write_json(&a.out.join(format!("variance_{}.json", result.graph_kind)), &result)?;
    println!("{} log-variance slope {:.6}", result.graph_kind, result.log_slope());
    Ok(())
}

fn resource_scan(a: ResourceScanArgs) -> Result<()> {
    let family = match a.family {
        FamilyArg::Loop => ResourceFamily::Loop,
        FamilyArg::Kgram => ResourceFamily::Kgram,
    };
    let mode = if a.ancilla { AncillaMode::PerClique } else { AncillaMode::None };
    let records = run_resource_scan(family, &a.n, &a.k, mode)?;
    let name = match family {
        ResourceFamily::Loop => "resources_loop.json",
        ResourceFamily::Kgram => "resources_kgram.json",
    };
    emit_json(Some(&a.out), name, &records)
}

fn sample(a: SampleArgs) -> Result<()> {
    let (g, cs) = load_graph(&a.graph)?;
    let kind: ModelKind = a.model.into();
    let dag = bn_from_mn(&g);
    let structure = match kind {
        ModelKind::Qcibm => ModelStructure::Qubits(g.n()),
        ModelKind::Qcmrf => ModelStructure::Markov { n: g.n(), cliques: &cs, max_locality: None },
        ModelKind::Bbqc => ModelStructure::Bayes(&dag),
    };
    let uf_form = match a.uf_form {
        UfArg::Exponential => UfForm::Exponential,
        UfArg::Zyz => UfForm::Zyz,
    };
    let circuit = AnsatzSpec { kind, max_locality: None, uf_form }.build(structure)?;
    let params = ParamVector::new(read_json::<Vec<f64>>(&a.params)?)?;
    let dist = born_distribution(&run_circuit(&circuit, &params)?);
    let ds = sample_counts(&dist, a.shots, a.seed)?;
    fs::create_dir_all(&a.out)?;
    fs::write(a.out.join("samples.txt"), ds.to_text())?;
    Ok(())
}

fn cliques(a: CliquesArgs) -> Result<()> {
    let g = load_undirected(&a.graph)?;
    let cs = maximal_cliques(&g);
    emit_json(a.out.as_deref(), "cliques.json", &CliquesFile::from_set(&g, &cs))
}

#[derive(Serialize)]
struct ModelResources {
    model: ModelKind,
    #[serde(flatten)]
    estimate: ResourceEstimate,
}

fn resources(a: ResourcesArgs) -> Result<()> {
    let (g, cs) = load_graph(&a.graph)?;
    let mode = if a.ancilla { AncillaMode::PerClique } else { AncillaMode::None };
    let dag = bn_from_mn(&g);
    let n = g.n();
    let records = [
        (ModelKind::Qcibm, ModelStructure::Qubits(n)),
        (ModelKind::Qcmrf, ModelStructure::Markov { n, cliques: &cs, max_locality: None }),
        (ModelKind::Bbqc, ModelStructure::Bayes(&dag)),
    ]
    .into_iter()
    .map(|(model, s)| Ok(ModelResources { model, estimate: estimate_resources(model, s, mode)? }))
    .collect::<Result<Vec<_>>>()?;
    emit_json(a.out.as_deref(), "resources.json", &records)
}
