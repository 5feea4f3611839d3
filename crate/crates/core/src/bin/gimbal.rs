//! Command-line front end over the `gimbal` library.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use gimbal::ident::{self, regressor, DisturbanceDataset, FitResult};
use gimbal::io::{write_atomic, write_json};
use gimbal::plant::SimulationLog;
use gimbal::runner::{self, Axis, Job, SweepSpec, TrainConfig};
use gimbal::{GimbalError, Result};

#[derive(Parser)]
#[command(
    name = "gimbal",
    version,
    about = "Two-axis gimbal simulation, identification and compensation"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one scenario; writes log.csv and metrics.json.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Log CSV of a baseline run for percent-decrease metrics.
        #[arg(long)]
        baseline: Option<PathBuf>,
    },
    /// Run a scenario and extract the disturbance dataset.
    Identify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Least-squares fit of the disturbance regressor to one or more datasets.
    FitLs {
        #[arg(long, num_args = 1.., required = true)]
        datasets: Vec<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Also evaluate every fit on every other dataset.
        #[arg(long)]
        cross: bool,
        #[arg(long, default_value_t = 0.0)]
        ridge: f64,
    },
    /// Train the compensator network; writes model.json and loss.csv.
    TrainNn {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Metrics of a stored log.
    Evaluate {
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        baseline: Option<PathBuf>,
        /// Also report chirp bandwidth on this axis.
        #[arg(long, value_parser = parse_axis)]
        chirp: Option<Axis>,
        /// Output JSON path.
        #[arg(long, default_value = "metrics.json")]
        out: PathBuf,
    },
    /// Run several scenarios and tabulate them against a baseline controller.
    Compare {
        #[arg(long = "configs", num_args = 1.., required = true)]
        configs: Vec<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Controller label used as the percent-decrease baseline.
        #[arg(long, default_value = "pid")]
        baseline: String,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Amplitude/frequency grid over one or more base scenarios.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
}

fn parse_axis(s: &str) -> std::result::Result<Axis, String> {
    match s {
        "yaw" | "azimuth" => Ok(Axis::Yaw),
        "pitch" | "elevation" => Ok(Axis::Pitch),
        _ => Err(format!("unknown axis `{s}` (yaw or pitch)")),
    }
}

fn parent(p: &Path) -> PathBuf {
    p.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn simulate(config: &Path, out: &Path, seed: Option<u64>, baseline: Option<&Path>) -> Result<()> {
    let mut job = Job::load(config)?;
    if let Some(s) = seed {
        job.config.seed = s;
    }
    let (run, mut rep) = runner::evaluate_job(&job)?;
    if let Some(b) = baseline {
        let base = SimulationLog::load(b)?;
        let with = runner::metrics(&run.log, Some(&base))?;
        rep.yaw.mean_decrease_pct = with.yaw.mean_decrease_pct;
        rep.yaw.peak_decrease_pct = with.yaw.peak_decrease_pct;
        rep.pitch.mean_decrease_pct = with.pitch.mean_decrease_pct;
        rep.pitch.peak_decrease_pct = with.pitch.peak_decrease_pct;
        rep.baseline = Some(b.display().to_string());
    }
    let log_path = job
        .config
        .output
        .log
        .clone()
        .unwrap_or_else(|| out.join("log.csv"));
    let metrics_path = job
        .config
        .output
        .metrics
        .clone()
        .unwrap_or_else(|| out.join("metrics.json"));
    run.log.save(&log_path)?;
    write_json(&metrics_path, &rep)
}

fn identify(config: &Path, out: &Path, seed: Option<u64>) -> Result<()> {
    let (mut cfg, dir) = runner::pipeline::load_identify(config)?;
    if let (Some(s), runner::ScenarioSource::Inline(c)) = (seed, &mut cfg.scenario) {
        c.seed = s;
    }
    let ds = runner::identify(&cfg, &dir)?;
    ds.save(&out.join("dataset.csv"))
}

#[derive(Serialize)]
struct CrossEntry {
    fitted_on: String,
    evaluated_on: String,
    report: ident::CrossReport,
    ratio: f64,
}

fn coefficient_table(fits: &[FitResult]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["term".to_string()];
    for i in 0..fits.len() {
        header.push(format!("k_a_{i}"));
        header.push(format!("k_m_{i}"));
    }
    w.write_record(&header)?;
    for (k, name) in regressor::term_names().iter().enumerate() {
        let mut rec = vec![name.clone()];
        for f in fits {
            rec.push(f.coefficients.k_a[k].to_string());
            rec.push(f.coefficients.k_m[k].to_string());
        }
        w.write_record(&rec)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| GimbalError::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| GimbalError::Config(e.to_string()))
}

fn fit_ls(datasets: &[PathBuf], out: &Path, cross: bool, ridge: f64) -> Result<()> {
    let sets: Vec<DisturbanceDataset> = datasets
        .iter()
        .map(|p| DisturbanceDataset::load(p))
        .collect::<Result<_>>()?;
    let mut fits = Vec::with_capacity(sets.len());
    for (p, ds) in datasets.iter().zip(&sets) {
        let mut f = ident::fit(ds, ridge)?;
        f.source = p.display().to_string();
        fits.push(f);
    }
    write_json(&out.join("coefficients.json"), &fits)?;
    write_atomic(
        &out.join("coefficients.csv"),
        coefficient_table(&fits)?.as_bytes(),
    )?;
    if cross {
        let mut entries = Vec::new();
        for (i, f) in fits.iter().enumerate() {
            for (j, other) in sets.iter().enumerate() {
                if i == j {
                    continue;
                }
                let report = ident::cross_validate(&f.coefficients, &sets[i], other)?;
                entries.push(CrossEntry {
                    fitted_on: datasets[i].display().to_string(),
                    evaluated_on: datasets[j].display().to_string(),
                    ratio: report.ratio(),
                    report,
                });
            }
        }
        write_json(&out.join("cross.json"), &entries)?;
    }
    Ok(())
}

fn train_nn(config: &Path, out: &Path, seed: Option<u64>) -> Result<()> {
    let mut cfg = TrainConfig::load(config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let res = runner::train_compensator(&cfg, &parent(config))?;
    write_atomic(&out.join("model.json"), res.model.to_json()?.as_bytes())?;
    write_atomic(
        &out.join("loss.csv"),
        runner::history_csv(&res.history)?.as_bytes(),
    )
}

fn evaluate(log: &Path, baseline: Option<&Path>, chirp: Option<Axis>, out: &Path) -> Result<()> {
    let l = SimulationLog::load(log)?;
    let b = baseline.map(SimulationLog::load).transpose()?;
    let mut rep = runner::metrics(&l, b.as_ref())?;
    rep.name = log.display().to_string();
    rep.baseline = baseline.map(|p| p.display().to_string());
    if let Some(a) = chirp {
        let bw = Some(runner::bandwidth_from_chirp(&l, a)?);
        match a {
            Axis::Yaw => rep.yaw.bandwidth_hz = bw,
            Axis::Pitch => rep.pitch.bandwidth_hz = bw,
        }
    }
    write_json(out, &rep)
}

fn write_batch(res: &runner::batch::BatchResult, out: &Path) -> Result<()> {
    for (job, r) in res.jobs.iter().zip(&res.outputs) {
        if let Ok((run, rep)) = r {
            let dir = out.join(job.name());
            run.log.save(&dir.join("log.csv"))?;
            write_json(&dir.join("metrics.json"), rep)?;
        }
    }
    write_atomic(
        &out.join("compare.csv"),
        res.table.to_csv_string()?.as_bytes(),
    )?;
    write_json(&out.join("compare.json"), &res.table)
}

fn compare(
    configs: &[PathBuf],
    out: &Path,
    baseline: &str,
    jobs: usize,
    seed: Option<u64>,
) -> Result<()> {
    let mut list: Vec<Job> = configs
        .iter()
        .map(|p| Job::load(p))
        .collect::<Result<_>>()?;
    if let Some(s) = seed {
        list.iter_mut().for_each(|j| j.config.seed = s);
    }
    write_batch(&runner::compare(list, baseline, jobs)?, out)
}

fn sweep(config: &Path, out: &Path, jobs: usize) -> Result<()> {
    let spec = SweepSpec::load(config)?;
    write_batch(&runner::sweep(&spec, &parent(config), jobs)?, out)
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Simulate {
            config,
            out,
            seed,
            baseline,
        } => simulate(&config, &out, seed, baseline.as_deref()),
        Cmd::Identify { config, out, seed } => identify(&config, &out, seed),
        Cmd::FitLs {
            datasets,
            out,
            cross,
            ridge,
        } => fit_ls(&datasets, &out, cross, ridge),
        Cmd::TrainNn { config, out, seed } => train_nn(&config, &out, seed),
        Cmd::Evaluate {
            log,
            baseline,
            chirp,
            out,
        } => evaluate(&log, baseline.as_deref(), chirp, &out),
        Cmd::Compare {
            configs,
            out,
            baseline,
            jobs,
            seed,
        } => compare(&configs, &out, &baseline, jobs, seed),
        Cmd::Sweep { config, out, jobs } => sweep(&config, &out, jobs),
    }
}

fn fail(kind: &str, message: String) -> ExitCode {
    let body = serde_json::json!({ "error": kind, "message": message });
    eprintln!("{body}");
    ExitCode::FAILURE
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("Usage", e.to_string()),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e.kind(), e.to_string()),
    }
}
