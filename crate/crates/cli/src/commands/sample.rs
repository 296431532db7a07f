//! `measim sample` / `measim convergence` — seeded outcome draws and the
//! law-of-large-numbers convergence table.

use anyhow::{anyhow, Result};
use clap::Args;
use serde::Serialize;

use measim_core::sampling::{convergence_report, sample_outcomes, ConvergenceReport};
use measim_core::{ProbabilityRecord, SampleCounts};

use crate::output::{config_digest, fmt_f64, write_json_report, write_table, Table};
use crate::schema::parse_probs;
use crate::Ctx;

#[derive(Args)]
pub struct SampleArgs {
    /// Comma-separated outcome probabilities, e.g. "0.5,0.5".
    #[arg(long)]
    pub p: String,
    /// Comma-separated outcome labels.
    #[arg(long)]
    pub labels: Option<String>,
    /// Number of events to draw.
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Serialize)]
struct SampleConfig {
    p: Vec<f64>,
    labels: Vec<String>,
    n: u64,
    seed: u64,
}

#[derive(Serialize)]
struct SampleReport {
    command: &'static str,
    config: SampleConfig,
    input_digest: String,
    counts: SampleCounts,
    max_abs_error: f64,
}

pub fn run_sample(ctx: &Ctx, args: SampleArgs) -> Result<()> {
    let probs = parse_probs(&args.p, args.labels.as_deref())?;
    let counts = sample_outcomes(&probs, args.n, args.seed)?;
    let config = SampleConfig {
        p: probs.probabilities().to_vec(),
        labels: probs.labels().to_vec(),
        n: args.n,
        seed: args.seed,
    };
    let report = SampleReport {
        command: "sample",
        input_digest: config_digest(&config),
        config,
        max_abs_error: counts.max_abs_error(&probs),
        counts: counts.clone(),
    };
    write_json_report(ctx, "sample-report.json", &report)?;
    write_table(ctx, "sample.csv", &counts_table(&counts, &probs))?;
    Ok(())
}

fn counts_table(counts: &SampleCounts, probs: &ProbabilityRecord) -> Table {
    let freqs = counts.frequencies();
    let rows = counts
        .labels
        .iter()
        .enumerate()
        .map(|(k, label)| {
            vec![
                counts.total.to_string(),
                label.clone(),
                counts.counts[k].to_string(),
                fmt_f64(freqs[k]),
                fmt_f64((freqs[k] - probs.get(k)).abs()),
            ]
        })
        .collect();
    Table {
        header: vec!["n", "label", "count", "frequency", "abs_error"],
        rows,
    }
}

#[derive(Args)]
pub struct ConvergenceArgs {
    /// Comma-separated outcome probabilities.
    #[arg(long)]
    pub p: String,
    #[arg(long)]
    pub labels: Option<String>,
    /// Comma-separated strictly increasing ensemble sizes,
    /// e.g. "100,1000,10000,100000,1000000".
    #[arg(long, default_value = "100,1000,10000,100000,1000000")]
    pub schedule: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Serialize)]
struct ConvergenceConfig {
    p: Vec<f64>,
    labels: Vec<String>,
    schedule: Vec<u64>,
    seed: u64,
}

#[derive(Serialize)]
struct ConvergenceCliReport {
    command: &'static str,
    config: ConvergenceConfig,
    input_digest: String,
    report: ConvergenceReport,
}

pub fn run_convergence(ctx: &Ctx, args: ConvergenceArgs) -> Result<()> {
    let probs = parse_probs(&args.p, args.labels.as_deref())?;
    let schedule: Vec<u64> = args
        .schedule
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<u64>()
                .map_err(|e| anyhow!("bad schedule entry '{s}': {e}"))
        })
        .collect::<Result<Vec<_>>>()?;
    let report = convergence_report(&probs, &schedule, args.seed)?;

    let config = ConvergenceConfig {
        p: probs.probabilities().to_vec(),
        labels: probs.labels().to_vec(),
        schedule,
        seed: args.seed,
    };
    let cli_report = ConvergenceCliReport {
        command: "convergence",
        input_digest: config_digest(&config),
        config,
        report: report.clone(),
    };
    write_json_report(ctx, "convergence-report.json", &cli_report)?;

    let mut rows = Vec::new();
    for row in &report.rows {
        for (k, label) in report.labels.iter().enumerate() {
            rows.push(vec![
                row.n.to_string(),
                label.clone(),
                row.counts[k].to_string(),
                fmt_f64(row.frequencies[k]),
                fmt_f64((row.frequencies[k] - probs.get(k)).abs()),
            ]);
        }
    }
    write_table(
        ctx,
        "convergence.csv",
        &Table {
            header: vec!["n", "label", "count", "frequency", "abs_error"],
            rows,
        },
    )?;
    Ok(())
}
