use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Deserialize;

use dpgraph::experiment::{run_experiment, ExperimentPlan};
use dpgraph::io::{
    read_edge_list, write_graph, write_results, write_spectrum, write_summary, ParseOptions,
};
use dpgraph::mechanisms::BaselineAssumptions;
use dpgraph::oracle::{run_verification, EnumerationCap, VerifyConfig};
use dpgraph::{edge_distance, flip_probability, laplacian_spectrum, sample_private_graph};
use dpgraph::{Error, LabeledGraph, MechanismTag, PrivacyParams};

use crate::args::{Common, Expect};

pub enum Failure {
    Usage(String),
    Data(String),
    Verification(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Verification(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Verification(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParams(_) | Error::EnumerationCap { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn parse_opts(expect: &Expect) -> ParseOptions {
    ParseOptions {
        expect_nodes: expect.expect_nodes,
        expect_edges: expect.expect_edges,
    }
}

fn load(path: &Path, expect: &Expect) -> Result<LabeledGraph, Failure> {
    read_edge_list(path, &parse_opts(expect))
        .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Data(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn single<T: Copy>(values: &[T], name: &str, default: Option<T>) -> Result<T, Failure> {
    match (values, default) {
        ([v], _) => Ok(*v),
        ([], Some(d)) => Ok(d),
        ([], None) => Err(Failure::Usage(format!("--{name} is required"))),
        _ => Err(Failure::Usage(format!(
            "--{name} takes a single value here"
        ))),
    }
}

pub fn privatize(graph: &Path, common: &Common, expect: &Expect) -> CmdResult {
    let input = load(graph, expect)?;
    let epsilon = single(&common.epsilon, "epsilon", None)?;
    let adjacency = single(&common.adjacency, "adjacency", Some(1))?;
    let params = PrivacyParams::new(epsilon, adjacency)?;
    let seed = common.seed.unwrap_or(0);

    let private = sample_private_graph(input.graph(), params, seed);
    let distance = edge_distance(input.graph(), &private)?;
    eprintln!(
        "p = {:.17}  realized edge distance = {distance}  edges: {} -> {}",
        flip_probability(params).value(),
        input.graph().edge_count(),
        private.edge_count()
    );
    write_graph(&input.with_graph(private)?, sink(common.out.as_deref())?)?;
    Ok(())
}

pub fn spectrum(graph: &Path, common: &Common, expect: &Expect) -> CmdResult {
    let input = load(graph, expect)?;
    let spec = laplacian_spectrum(input.graph());
    write_spectrum(&spec, sink(common.out.as_deref())?)?;
    Ok(())
}

/// Flat JSON mirror of the experiment flags.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentFile {
    pub dataset: Option<PathBuf>,
    pub epsilons: Option<Vec<f64>>,
    pub adjacency: Option<u32>,
    pub trials: Option<usize>,
    pub master_seed: Option<u64>,
    pub mechanisms: Option<Vec<MechanismTag>>,
    pub baseline_sensitivity: Option<f64>,
    pub baseline_lower: Option<f64>,
    pub baseline_upper: Option<f64>,
    pub out: Option<PathBuf>,
    pub summary: Option<PathBuf>,
    pub expect_nodes: Option<usize>,
    pub expect_edges: Option<usize>,
}

pub struct ExperimentFlags<'a> {
    pub config: Option<&'a Path>,
    pub dataset: Option<PathBuf>,
    pub common: &'a Common,
    pub mechanisms: &'a [String],
    pub trials: Option<usize>,
    pub summary: Option<PathBuf>,
    pub baseline_sensitivity: Option<f64>,
    pub baseline_lower: Option<f64>,
    pub baseline_upper: Option<f64>,
    pub expect: &'a Expect,
}

fn summary_path(detail: &Path) -> PathBuf {
    let stem = detail
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "results".into());
    detail.with_file_name(format!("{stem}.summary.csv"))
}

pub fn experiment(flags: ExperimentFlags<'_>) -> CmdResult {
    let file: ExperimentFile = match flags.config {
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?
        }
        None => ExperimentFile::default(),
    };
    let common = flags.common;

    let dataset = flags
        .dataset
        .or(file.dataset)
        .ok_or_else(|| Failure::Usage("--dataset is required".into()))?;
    let out = common
        .out
        .clone()
        .or(file.out)
        .ok_or_else(|| Failure::Usage("--out is required".into()))?;
    let summary = flags
        .summary
        .or(file.summary)
        .unwrap_or_else(|| summary_path(&out));

    let defaults = ExperimentPlan::default();
    let mechanisms = if flags.mechanisms.is_empty() {
        file.mechanisms.unwrap_or(defaults.mechanisms)
    } else {
        flags
            .mechanisms
            .iter()
            .map(|m| m.parse::<MechanismTag>())
            .collect::<Result<_, _>>()
            .map_err(|e| Failure::Usage(e.to_string()))?
    };
    let base = BaselineAssumptions::default();
    let plan = ExperimentPlan {
        epsilons: if common.epsilon.is_empty() {
            file.epsilons.unwrap_or(defaults.epsilons)
        } else {
            common.epsilon.clone()
        },
        adjacency: single(
            &common.adjacency,
            "adjacency",
            Some(file.adjacency.unwrap_or(1)),
        )?,
        trials: flags.trials.or(file.trials).unwrap_or(defaults.trials),
        master_seed: common.seed.or(file.master_seed).unwrap_or(0),
        mechanisms,
        baseline: BaselineAssumptions {
            sensitivity_per_adjacency: flags
                .baseline_sensitivity
                .or(file.baseline_sensitivity)
                .unwrap_or(base.sensitivity_per_adjacency),
            lower: flags
                .baseline_lower
                .or(file.baseline_lower)
                .unwrap_or(base.lower),
            upper: flags.baseline_upper.or(file.baseline_upper).or(base.upper),
        },
        keep_spectra: false,
    };
    plan.validate()?;

    let expect = Expect {
        expect_nodes: flags.expect.expect_nodes.or(file.expect_nodes),
        expect_edges: flags.expect.expect_edges.or(file.expect_edges),
    };
    let input = load(&dataset, &expect)?;
    eprintln!(
        "dataset {}: n = {}, |E| = {}; {} trials per cell",
        dataset.display(),
        input.graph().node_count(),
        input.graph().edge_count(),
        plan.trials
    );

    let outcome = run_experiment(input.graph(), &plan)?;

    write_results(&outcome.records, sink(Some(&out))?)?;
    write_summary(&outcome.summaries, sink(Some(&summary))?)?;
    for s in &outcome.summaries {
        let variance = s
            .mean_variance
            .map(|v| format!("{v:.6}"))
            .unwrap_or_else(|| "n/a (needs >= 2 trials)".into());
        eprintln!(
            "{:<16} eps = {:<6.3} mean rel err = {:<10.6} mean variance = {variance}",
            s.mechanism.as_str(),
            s.epsilon,
            s.mean_of_mean_rel_err
        );
    }
    eprintln!("wrote {} and {}", out.display(), summary.display());
    Ok(())
}

pub fn verify(
    nodes: usize,
    common: &Common,
    samples: usize,
    allow_seven_nodes: bool,
    flip_bias: f64,
) -> CmdResult {
    let defaults = VerifyConfig::default();
    let cfg = VerifyConfig {
        n: nodes,
        epsilons: if common.epsilon.is_empty() {
            defaults.epsilons
        } else {
            common.epsilon.clone()
        },
        adjacencies: if common.adjacency.is_empty() {
            defaults.adjacencies
        } else {
            common.adjacency.clone()
        },
        samples,
        seed: common.seed.unwrap_or(defaults.seed),
        flip_bias,
        cap: if allow_seven_nodes {
            EnumerationCap::Extended
        } else {
            EnumerationCap::Default
        },
        ..defaults
    };
    let report = run_verification(&cfg)?;
    let mut out = sink(common.out.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &report).map_err(|e| Failure::Data(e.to_string()))?;
    writeln!(out)?;
    out.flush()?;

    let failures: Vec<_> = report.failures().collect();
    eprintln!(
        "{} checks on n = {}: {} passed, {} failed",
        report.checks.len(),
        report.n,
        report.checks.len() - failures.len(),
        failures.len()
    );
    if failures.is_empty() {
        return Ok(());
    }
    let lines: Vec<String> = failures
        .iter()
        .map(|c| {
            format!(
                "{} at eps = {}, A = {}: achieved {:e} vs bound {:e}",
                c.check, c.epsilon, c.adjacency, c.achieved, c.tolerance
            )
        })
        .collect();
    Err(Failure::Verification(lines.join("\n")))
}
