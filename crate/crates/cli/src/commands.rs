//! The five subcommands. Each writes its outputs under an output directory;
//! reruns with the same configuration produce identical bytes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rmtnet::eval::{aggregate, evaluate_model, gate_curve, render_table, GateCurve, MetricReport, RunMetrics, SeedRun};
use rmtnet::models::{fit, Fitted, ModelKind, Predictor, SavedModel};
use rmtnet::nncore::snapshot::Snapshot;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::pipeline::{prepare, DatasetFacts};

pub const MANIFEST: &str = "manifest.json";
pub const METRICS: &str = "metrics.json";
pub const TABLE: &str = "table.txt";
pub const GATES: &str = "gates.csv";
pub const SNAPSHOT: &str = "snapshot.bin";

/// α and β of one gate of one fitted network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateRow {
    pub seed: u64,
    pub model: ModelKind,
    pub policy: usize,
    pub layer: usize,
    pub alpha: f64,
    pub beta: f64,
    pub increasing: bool,
}

/// Reports of every model on one data configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variant {
    pub epsilon: f64,
    pub models: Vec<ModelKind>,
    pub reports: Vec<MetricReport>,
    pub gates: Vec<GateRow>,
}

impl Variant {
    pub fn report(&self, kind: ModelKind) -> Option<&MetricReport> {
        self.models.iter().position(|&k| k == kind).map(|i| &self.reports[i])
    }

    pub fn median_combined_ks(&self, kind: ModelKind) -> Option<f64> {
        self.report(kind)?.combined.map(|s| s.ks.median)
    }

    /// Runs of `kind` whose first-layer gate of policy 1 has α > 0, and the run count.
    pub fn positive_first_gates(&self, kind: ModelKind) -> (usize, usize) {
        let rows: Vec<&GateRow> = self
            .gates
            .iter()
            .filter(|g| g.model == kind && g.policy == 1 && g.layer == 1)
            .collect();
        (rows.iter().filter(|g| g.alpha > 0.0).count(), rows.len())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsFile {
    pub variants: Vec<Variant>,
}

impl MetricsFile {
    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(METRICS);
        let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write(path, text)
}

fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}

fn gate_rows(seed: u64, model: ModelKind, predictor: &Predictor) -> Vec<GateRow> {
    let Some(net) = predictor.as_rmt() else {
        return Vec::new();
    };
    gate_curve(net, 2)
        .series
        .iter()
        .map(|s| GateRow {
            seed,
            model,
            policy: s.policy,
            layer: s.layer,
            alpha: s.alpha,
            beta: s.beta,
            increasing: GateCurve::is_increasing(s),
        })
        .collect()
}

fn gates_csv(rows: &[GateRow], epsilon_of: impl Fn(usize) -> f64) -> String {
    let mut out = String::from("epsilon,seed,model,policy,layer,alpha,beta,increasing\n");
    for (i, g) in rows.iter().enumerate() {
        let _ = writeln!(
            out,
            "{:?},{},{},{},{},{:?},{:?},{}",
            epsilon_of(i),
            g.seed,
            g.model,
            g.policy,
            g.layer,
            g.alpha,
            g.beta,
            g.increasing
        );
    }
    out
}

#[derive(Serialize)]
struct GenManifest<'a> {
    command: &'static str,
    config: serde_json::Value,
    dataset: &'a DatasetFacts,
    files: [&'static str; 3],
}

/// Writes `dataset.csv`, `discretizer.json`, `policies.json` and the manifest.
pub fn gen_data(config: &RunConfig, out: &Path) -> Result<DatasetFacts> {
    create_dir(out)?;
    let prepared = prepare(&config.data)?;
    let mut csv = Vec::new();
    prepared.dataset.write_csv(&mut csv)?;
    write(&out.join("dataset.csv"), csv)?;
    write_json(&out.join("discretizer.json"), &prepared.map)?;
    write_json(&out.join("policies.json"), &prepared.policies)?;
    let facts = prepared.facts(&config.data);
    write_json(
        &out.join(MANIFEST),
        &GenManifest {
            command: "gen-data",
            config: config.to_json(),
            dataset: &facts,
            files: ["dataset.csv", "discretizer.json", "policies.json"],
        },
    )?;
    Ok(facts)
}

#[derive(Serialize)]
struct TrainRecord<'a> {
    model: ModelKind,
    log: &'a rmtnet::models::TrainingLog,
    pseudo_labels: &'a [rmtnet::models::PseudoLabelRound],
    propensity_fitted: bool,
}

#[derive(Serialize)]
struct TrainManifest {
    command: &'static str,
    config: serde_json::Value,
    dataset: DatasetFacts,
    models: Vec<ModelKind>,
    best_epochs: Vec<usize>,
}

pub fn model_dir(out: &Path, kind: ModelKind) -> PathBuf {
    out.join(kind.key())
}

/// Fits every configured model. Per model writes `<model>/snapshot.bin`,
/// `<model>/log.json` and, for the multi-task networks, `<model>/gates.csv`.
pub fn train(config: &RunConfig, out: &Path) -> Result<Vec<Fitted>> {
    create_dir(out)?;
    let prepared = prepare(&config.data)?;
    let mut fitted = Vec::new();
    for &kind in &config.run.models {
        let f = fit(kind, &prepared.dataset, &config.model)?;
        let dir = model_dir(out, kind);
        create_dir(&dir)?;
        write(&dir.join(SNAPSHOT), f.snapshot().to_bytes())?;
        write_json(
            &dir.join("log.json"),
            &TrainRecord {
                model: kind,
                log: &f.log,
                pseudo_labels: &f.pseudo_labels,
                propensity_fitted: f.propensity.is_some(),
            },
        )?;
        if let Some(net) = f.predictor.as_rmt() {
            write(&dir.join(GATES), gate_curve(net, config.run.gate_grid).to_csv())?;
        }
        fitted.push(f);
    }
    write_json(
        &out.join(MANIFEST),
        &TrainManifest {
            command: "train",
            config: config.to_json(),
            dataset: prepared.facts(&config.data),
            models: config.run.models.clone(),
            best_epochs: fitted.iter().map(|f| f.log.best_epoch).collect(),
        },
    )?;
    Ok(fitted)
}

fn report_name(config: &RunConfig, kind: ModelKind) -> String {
    kind.display_name(config.model.base)
}

/// Scores the snapshots written by [`train`] under `models` on the test
/// split; writes `metrics.json` and `table.txt` to `out`.
pub fn evaluate(config: &RunConfig, models: &Path, out: &Path) -> Result<MetricsFile> {
    create_dir(out)?;
    let prepared = prepare(&config.data)?;
    let mut variant = Variant {
        epsilon: config.data.epsilon,
        models: config.run.models.clone(),
        reports: Vec::new(),
        gates: Vec::new(),
    };
    for &kind in &config.run.models {
        let path = model_dir(models, kind).join(SNAPSHOT);
        let file = std::fs::File::open(&path).map_err(|e| CliError::io(&path, e))?;
        let saved = SavedModel::from_snapshot(&Snapshot::read_from(std::io::BufReader::new(file))?)?;
        if saved.kind != kind {
            return Err(CliError::Usage(format!(
                "{} holds a {} model",
                path.display(),
                saved.kind
            )));
        }
        let metrics = evaluate_model(&saved, &prepared.dataset)?;
        let run = SeedRun {
            seed: config.data.seed,
            metrics,
        };
        variant
            .reports
            .push(aggregate(&report_name(config, kind), config.to_json(), vec![run]));
        variant
            .gates
            .extend(gate_rows(config.data.seed, kind, &saved.predictor));
    }
    let file = MetricsFile {
        variants: vec![variant],
    };
    write_json(&out.join(METRICS), &file)?;
    write(&out.join(TABLE), render_summary(&file))?;
    Ok(file)
}

/// Text tables of median metrics plus the multi-task network's standing
/// against each baseline.
pub fn render_summary(file: &MetricsFile) -> String {
    let mut out = String::new();
    for v in &file.variants {
        let runs = v.reports.first().map_or(0, |r| r.runs.len());
        let _ = writeln!(out, "epsilon = {:?}, runs = {runs}", v.epsilon);
        out.push_str(&render_table(&v.reports));
        for net in [ModelKind::RmtNet, ModelKind::RmtNetPp] {
            let (Some(report), Some(ks)) = (v.report(net), v.median_combined_ks(net)) else {
                continue;
            };
            let name = &report.model;
            for (i, &other) in v.models.iter().enumerate() {
                if other.is_multi_task() {
                    continue;
                }
                let Some(base) = v.median_combined_ks(other) else {
                    continue;
                };
                let _ = writeln!(
                    out,
                    "{name} vs {}: combined KS {ks:.4} vs {base:.4} ({:+.1}%)",
                    v.reports[i].model,
                    100.0 * (ks - base) / base
                );
            }
            let (pos, n) = v.positive_first_gates(net);
            if n > 0 {
                let _ = writeln!(out, "{name}: first-layer gate increasing in {pos}/{n} runs");
            }
        }
        out.push('\n');
    }
    out
}

/// Re-renders `table.txt` from `metrics.json` in `dir`.
pub fn summary(dir: &Path) -> Result<String> {
    let file = MetricsFile::load(dir)?;
    let text = render_summary(&file);
    write(&dir.join(TABLE), &text)?;
    Ok(text)
}

struct JobResult {
    facts: DatasetFacts,
    metrics: Vec<RunMetrics>,
    gates: Vec<GateRow>,
}

fn bench_job(config: &RunConfig) -> Result<JobResult> {
    let prepared = prepare(&config.data)?;
    let mut metrics = Vec::new();
    let mut gates = Vec::new();
    for &kind in &config.run.models {
        let f = fit(kind, &prepared.dataset, &config.model)?;
        metrics.push(evaluate_model(&f, &prepared.dataset)?);
        gates.extend(gate_rows(config.data.seed, kind, &f.predictor));
    }
    Ok(JobResult {
        facts: prepared.facts(&config.data),
        metrics,
        gates,
    })
}

#[derive(Serialize)]
struct BenchManifest {
    command: &'static str,
    config: serde_json::Value,
    datasets: Vec<DatasetFacts>,
}

/// Every model on every (epsilon, seed) pair, run on `jobs` threads.
/// Writes `manifest.json`, `metrics.json`, `table.txt` and `gates.csv`.
pub fn bench(config: &RunConfig, jobs: usize, out: &Path) -> Result<MetricsFile> {
    config.validate()?;
    create_dir(out)?;
    let tasks: Vec<RunConfig> = config
        .bench
        .epsilons
        .iter()
        .flat_map(|&eps| config.bench.seeds.iter().map(move |&s| (eps, s)))
        .map(|(eps, s)| config.clone().with_epsilon(eps).with_seed(s))
        .collect();
    let results: Mutex<Vec<Option<Result<JobResult>>>> = Mutex::new((0..tasks.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    let workers = jobs.clamp(1, tasks.len());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(task) = tasks.get(i) else { break };
                let r = bench_job(task);
                eprintln!("bench: epsilon {:?} seed {} done", task.data.epsilon, task.data.seed);
                results.lock().expect("results lock")[i] = Some(r);
            });
        }
    });
    let results = results.into_inner().expect("results lock");

    let mut variants = Vec::new();
    let mut datasets = Vec::new();
    let mut results = results.into_iter().map(|r| r.expect("every job ran"));
    for &epsilon in &config.bench.epsilons {
        let mut runs: Vec<Vec<SeedRun>> = vec![Vec::new(); config.run.models.len()];
        let mut gates = Vec::new();
        for &seed in &config.bench.seeds {
            let job = results.next().expect("one result per task")?;
            for (k, metrics) in job.metrics.into_iter().enumerate() {
                runs[k].push(SeedRun { seed, metrics });
            }
            gates.extend(job.gates);
            datasets.push(job.facts);
        }
        let variant_config = config.clone().with_epsilon(epsilon).to_json();
        let reports = config
            .run
            .models
            .iter()
            .zip(runs)
            .map(|(&kind, r)| aggregate(&report_name(config, kind), variant_config.clone(), r))
            .collect();
        variants.push(Variant {
            epsilon,
            models: config.run.models.clone(),
            reports,
            gates,
        });
    }
    let file = MetricsFile { variants };
    write_json(
        &out.join(MANIFEST),
        &BenchManifest {
            command: "bench",
            config: config.to_json(),
            datasets,
        },
    )?;
    write_json(&out.join(METRICS), &file)?;
    write(&out.join(TABLE), render_summary(&file))?;
    let (rows, eps): (Vec<GateRow>, Vec<f64>) = file
        .variants
        .iter()
        .flat_map(|v| v.gates.iter().map(move |g| (g.clone(), v.epsilon)))
        .unzip();
    write(&out.join(GATES), gates_csv(&rows, |i| eps[i]))?;
    Ok(file)
}
