use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use gbsoft_core::bench::{derive_seeds, run_experiment, summarize, Encoding, ExperimentConfig, RunResult, Summary};
use gbsoft_core::encoding::encode_matrix;
use gbsoft_core::solver::{class_distributions, DEFAULT_GRID};
use gbsoft_core::{ConfusionMatrix, GbParams, SolverConfig};
use serde::Serialize;

use crate::EncodingArgs;

pub type CmdResult = Result<(), Box<dyn std::error::Error>>;

fn solver_config(args: &EncodingArgs) -> gbsoft_core::Result<SolverConfig> {
    SolverConfig::new(args.classes as usize, args.lambda, args.eta)
}

#[derive(Serialize)]
struct ClassParams {
    class: usize,
    alpha: f64,
    u: f64,
    v: f64,
    mean: f64,
    std: f64,
}

pub fn params(args: &EncodingArgs) -> CmdResult {
    let set = class_distributions(&solver_config(args)?)?;
    let rows: Vec<ClassParams> = set
        .per_class()
        .iter()
        .enumerate()
        .map(|(c, p)| ClassParams {
            class: c + 1,
            alpha: p.alpha(),
            u: p.u(),
            v: p.v(),
            mean: p.mean(),
            std: p.std_dev(),
        })
        .collect();
    println!("{}", serde_json::to_string_pretty(&rows)?);
    Ok(())
}

pub fn encode(args: &EncodingArgs, out: &Path) -> CmdResult {
    let matrix = encode_matrix(&solver_config(args)?)?;
    fs::write(out, matrix.to_csv()).map_err(|e| format!("cannot write {}: {e}", out.display()))?;
    Ok(())
}

pub fn pdf(args: &EncodingArgs, class: usize, points: usize, override_params: Option<(f64, f64, f64)>) -> CmdResult {
    let params = match override_params {
        Some((alpha, u, v)) => GbParams::new(alpha, u, v)?,
        None => class_distributions(&solver_config(args)?)?.per_class()[class - 1],
    };
    let mut out = String::from("x,density\n");
    for i in 1..=points {
        let x = i as f64 / (points + 1) as f64;
        writeln!(out, "{x},{}", params.pdf(x)?)?;
    }
    io::stdout().lock().write_all(out.as_bytes())?;
    Ok(())
}

fn read_predictions(path: &Path, num_classes: usize) -> Result<(Vec<usize>, Vec<usize>), String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut records = reader.records();
    match records.next() {
        Some(Ok(header)) if header.iter().eq(["true", "pred"]) => {}
        Some(Ok(_)) => return Err("line 1: expected header `true,pred`".into()),
        Some(Err(e)) => return Err(format!("line 1: {e}")),
        None => return Err(format!("{} is empty", path.display())),
    }
    let (mut truth, mut predicted) = (Vec::new(), Vec::new());
    for (offset, record) in records.enumerate() {
        let line = offset + 2;
        let record = record.map_err(|e| format!("line {line}: {e}"))?;
        if record.len() != 2 {
            return Err(format!("line {line}: expected 2 fields, found {}", record.len()));
        }
        let parse = |field: &str| -> Result<usize, String> {
            let label: usize = field
                .parse()
                .map_err(|_| format!("line {line}: `{field}` is not an integer label"))?;
            if label == 0 || label > num_classes {
                return Err(format!("line {line}: label {label} is outside 1..={num_classes}"));
            }
            Ok(label - 1)
        };
        truth.push(parse(&record[0])?);
        predicted.push(parse(&record[1])?);
    }
    if truth.is_empty() {
        return Err(format!("{} has no prediction rows", path.display()));
    }
    Ok((truth, predicted))
}

pub fn eval(input: &Path, num_classes: usize) -> CmdResult {
    let (truth, predicted) = read_predictions(input, num_classes)?;
    let report = ConfusionMatrix::from_labels(&truth, &predicted, num_classes)?.report()?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

#[derive(Debug, clap::Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(3..))]
    classes: u32,
    #[arg(long, default_value_t = 3000)]
    samples: usize,
    #[arg(long, default_value_t = 20)]
    dim: usize,
    /// Probability of moving a label to an adjacent class.
    #[arg(long, default_value_t = 0.2)]
    noise: f64,
    /// Number of runs.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
    seeds: u32,
    #[arg(long, default_value_t = 0)]
    master_seed: u64,
    #[arg(long, default_value_t = 300)]
    epochs: usize,
    #[arg(long, default_value_t = 0.1, value_parser = crate::positive_f64)]
    lr: f64,
    /// Comma-separated subset of onehot, beta, gb.
    #[arg(long, value_delimiter = ',', default_values_t = Encoding::ALL.map(|e| e.name().to_string()))]
    encodings: Vec<String>,
    /// Output directory for results.csv and summary.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Serialize)]
struct SummaryFile<'a> {
    config: &'a ExperimentConfig,
    #[serde(flatten)]
    summary: &'a Summary,
}

fn fmt_opt(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

fn results_csv(results: &[RunResult]) -> String {
    let mut out = String::from("encoding,seed,lambda,eta,qwk,ms,mae,ccr,one_off,gmsec\n");
    for r in results {
        let m = &r.report;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.encoding,
            r.seed,
            fmt_opt(r.lambda),
            fmt_opt(r.eta),
            m.qwk,
            m.ms,
            m.mae,
            m.ccr,
            m.one_off,
            m.gmsec
        )
        .expect("writing to a String cannot fail");
    }
    out
}

pub fn bench(args: &BenchArgs) -> CmdResult {
    let encodings = args
        .encodings
        .iter()
        .map(|s| s.parse::<Encoding>())
        .collect::<Result<Vec<_>, _>>()?;
    let config = ExperimentConfig {
        num_classes: args.classes as usize,
        samples: args.samples,
        dim: args.dim,
        noise: args.noise,
        epochs: args.epochs,
        learning_rate: args.lr,
        seeds: derive_seeds(args.master_seed, args.seeds as usize),
        grid: DEFAULT_GRID.to_vec(),
        encodings,
        ..ExperimentConfig::default()
    };
    let results = run_experiment(&config)?;
    let summary = summarize(&results)?;

    fs::create_dir_all(&args.out).map_err(|e| format!("cannot create {}: {e}", args.out.display()))?;
    let results_path = args.out.join("results.csv");
    fs::write(&results_path, results_csv(&results))
        .map_err(|e| format!("cannot write {}: {e}", results_path.display()))?;
    let summary_path = args.out.join("summary.json");
    let json = serde_json::to_string_pretty(&SummaryFile {
        config: &config,
        summary: &summary,
    })?;
    fs::write(&summary_path, json + "\n").map_err(|e| format!("cannot write {}: {e}", summary_path.display()))?;

    let mut table = format!("{:<8}", "encoding");
    for name in gbsoft_core::metrics::METRIC_NAMES {
        write!(table, " {name:>17}")?;
    }
    table.push('\n');
    for enc in &summary.encodings {
        write!(table, "{:<8}", enc.encoding.name())?;
        for name in gbsoft_core::metrics::METRIC_NAMES {
            let stats = &enc.metrics[name];
            write!(table, " {:>8.4}+-{:<7.4}", stats.mean, stats.sd)?;
        }
        table.push('\n');
    }
    print!("{table}");
    Ok(())
}
