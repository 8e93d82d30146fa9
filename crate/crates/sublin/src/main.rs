use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use sublin::config::{InstanceSpec, RunConfig};
use sublin::estimate::{execute, EstimateError};
use sublin::io::{load_graph, save_graph};
use sublin::plot::scatter_svg;
use sublin::report::{append_csv, write_csv};
use sublin::sweep::{run_sweep, SweepSpec};
use sublin::verify::{Battery, BatteryInstance, Fault};
use sublin_core::pipeline::{Mode, PipelineConfig};
use sublin_core::{ListOrder, Seed};

const STACK: usize = 256 << 20;
const SEED_ENV: &str = "SUBLIN_SEED";

#[derive(Parser)]
#[command(
    name = "sublin",
    version,
    about = "Sublinear maximum matching size estimation experiments"
)]
struct Cli {
    /// Worker threads for sweeps and the verify battery.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write an instance in the plain-text graph format.
    Generate {
        /// Instance spec, e.g. `erdos-renyi:n=200,p=0.15` or `hidden-perfect-matching:n=20,epsilon=0.4`.
        #[arg(long)]
        instance: InstanceSpec,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one pipeline and emit its report.
    Estimate(EstimateArgs),
    /// Run a pipeline over increasing sizes and fit the query-count slope.
    Sweep(SweepArgs),
    /// Run the invariant battery. Exits 1 if any check fails.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct EstimateArgs {
    /// `key = value` config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// matrix, list, hybrid, dichotomy or plugin.
    #[arg(long)]
    mode: Option<String>,
    /// Pipeline under the dichotomy runner.
    #[arg(long)]
    base: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    gamma_c: Option<String>,
    #[arg(long)]
    scale: Option<String>,
    #[arg(long)]
    estimator_scale: Option<String>,
    #[arg(long)]
    c_beta: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    slack: Option<String>,
    /// auto or sampled.
    #[arg(long)]
    classify: Option<String>,
    /// random or global.
    #[arg(long)]
    list_order: Option<String>,
    #[arg(long)]
    plugin_q: Option<String>,
    /// Defaults to $SUBLIN_SEED, then 0.
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    instance: Option<String>,
    /// Also compute the exact maximum matching and check the reported interval.
    #[arg(long)]
    verify: bool,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    json: Option<String>,
    /// Append a CSV row here.
    #[arg(long)]
    csv: Option<String>,
}

#[derive(Args)]
struct SweepArgs {
    /// Increasing vertex counts.
    #[arg(long, value_delimiter = ',', default_value = "256,512,1024,2048")]
    ns: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0,1")]
    seeds: Vec<u64>,
    #[arg(long, default_value_t = 8.0)]
    avg_degree: f64,
    #[arg(long, default_value = "matrix")]
    mode: Mode,
    #[arg(long, default_value_t = 0.25)]
    epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value_t = 1e-4)]
    estimator_scale: f64,
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Also write a log-log scatter of query count against n.
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Graph files to check instead of the bundled instances.
    #[arg(long = "file")]
    files: Vec<PathBuf>,
    /// Instance specs to check instead of the bundled instances.
    #[arg(long = "instance")]
    instances: Vec<InstanceSpec>,
    #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
    seeds: Vec<u64>,
    /// Corrupt the EDBS after building it; the battery must then fail.
    #[arg(long, value_parser = ["phi"])]
    inject_fault: Option<String>,
}

/// Failure classes mapped to exit codes.
enum Failure {
    Verification,
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

/// Prints a stdout line; a closed pipe (`| head`) is not an error.
fn emit(line: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{line}");
}

fn env_seed() -> Result<Option<u64>, Failure> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::Usage(anyhow::anyhow!("{SEED_ENV}={v} is not a seed"))),
        Err(_) => Ok(None),
    }
}

fn seed_or_env(seed: Option<u64>) -> Result<u64, Failure> {
    Ok(match seed {
        Some(s) => s,
        None => env_seed()?.unwrap_or(0),
    })
}

fn generate_cmd(instance: &InstanceSpec, seed: Option<u64>, out: &Path) -> Result<(), Failure> {
    let seed = Seed::new(seed_or_env(seed)?);
    let g = instance
        .build(seed)
        .context("building the instance")?
        .with_list_order(ListOrder::Global, seed);
    save_graph(&g, out).with_context(|| format!("writing {}", out.display()))?;
    eprintln!("wrote {} (n = {}, m = {})", out.display(), g.n(), g.m());
    Ok(())
}

fn estimate_cmd(a: &EstimateArgs) -> Result<(), Failure> {
    let mut cfg = RunConfig::default();
    if let Some(s) = env_seed()? {
        cfg.seed = s;
    }
    if let Some(p) = &a.config {
        let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        cfg.apply_str(&text).with_context(|| format!("in {}", p.display()))?;
    }
    let flags = [
        ("mode", &a.mode),
        ("base", &a.base),
        ("epsilon", &a.epsilon),
        ("gamma", &a.gamma),
        ("gamma_c", &a.gamma_c),
        ("scale", &a.scale),
        ("estimator_scale", &a.estimator_scale),
        ("c_beta", &a.c_beta),
        ("beta", &a.beta),
        ("slack", &a.slack),
        ("classify", &a.classify),
        ("list_order", &a.list_order),
        ("plugin_q", &a.plugin_q),
        ("seed", &a.seed),
        ("instance", &a.instance),
        ("json", &a.json),
        ("csv", &a.csv),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, v).map_err(anyhow::Error::from)?;
        }
    }
    if a.verify {
        cfg.verify = true;
    }

    let outcome = execute(&cfg).map_err(|e| match e {
        EstimateError::Setup(e) => Failure::Usage(e.into()),
        e => Failure::Runtime(e.into()),
    })?;
    let json = serde_json::to_string_pretty(&outcome.to_json()).expect("reports serialize");
    match &cfg.json {
        Some(p) => std::fs::write(p, json + "\n").with_context(|| format!("writing {}", p.display()))?,
        None => emit(&json),
    }
    if let Some(p) = &cfg.csv {
        append_csv(p, &[outcome.to_csv_row()]).with_context(|| format!("writing {}", p.display()))?;
    }
    let r = &outcome.report;
    eprintln!(
        "alpha = {} in [{}, {}], {} queries",
        r.alpha,
        r.lower,
        r.upper,
        r.total.total()
    );
    if let Some(v) = &outcome.verification {
        eprintln!("exact mu = {}: {}", v.mu_exact, if v.pass { "pass" } else { "FAIL" });
        if !v.pass {
            return Err(Failure::Verification);
        }
    }
    Ok(())
}

fn sweep_cmd(a: &SweepArgs) -> Result<(), Failure> {
    let spec = SweepSpec {
        ns: a.ns.clone(),
        seeds: a.seeds.clone(),
        avg_degree: a.avg_degree,
        mode: a.mode,
        config: PipelineConfig {
            epsilon: a.epsilon,
            scale: a.scale,
            estimator_scale: Some(a.estimator_scale),
            ..PipelineConfig::default()
        },
    };
    let res = run_sweep(&spec).map_err(|e| match e {
        sublin::sweep::SweepError::Run { .. } | sublin::sweep::SweepError::Generate(_) => Failure::Runtime(e.into()),
        e => Failure::Usage(e.into()),
    })?;
    match &a.csv {
        Some(p) => write_csv(p, &res.rows).with_context(|| format!("writing {}", p.display()))?,
        None => {
            let mut w = csv::Writer::from_writer(std::io::stdout());
            for row in &res.rows {
                w.serialize(row).map_err(|e| Failure::Runtime(e.into()))?;
            }
            w.flush().map_err(|e| Failure::Runtime(e.into()))?;
        }
    }
    let means = res.means(a.mode);
    for (n, q) in &means {
        eprintln!("n = {n}: mean {} queries {q:.0}", a.mode);
    }
    eprintln!("log-log slope: {:.4}", res.slope);
    if let Some(p) = &a.plot {
        let pts: Vec<(f64, f64)> = means.iter().map(|&(n, q)| (n as f64, q)).collect();
        let svg = scatter_svg(&pts, &format!("{} queries vs n", a.mode), "n", "queries");
        if let Err(e) = std::fs::write(p, svg) {
            eprintln!("plot skipped: {e}");
        }
    }
    Ok(())
}

fn verify_cmd(a: &VerifyArgs) -> Result<(), Failure> {
    let mut battery = Battery::default();
    if a.seeds.is_empty() {
        return Err(Failure::Usage(anyhow::anyhow!("the seed list is empty")));
    }
    battery.seeds = a.seeds.clone();
    battery.fault = a.inject_fault.as_ref().map(|_| Fault::PhiDecrease);
    if !a.files.is_empty() || !a.instances.is_empty() {
        let mut list = Vec::new();
        for p in &a.files {
            let g = load_graph(p).with_context(|| format!("reading {}", p.display()))?;
            list.push(BatteryInstance::Fixed(p.display().to_string(), g));
        }
        for spec in &a.instances {
            match spec {
                InstanceSpec::Generated(k) => list.push(BatteryInstance::Kind(spec.to_string(), k.clone())),
                InstanceSpec::File(p) => {
                    let g = load_graph(p).with_context(|| format!("reading {}", p.display()))?;
                    list.push(BatteryInstance::Fixed(spec.to_string(), g));
                }
            }
        }
        battery.instances = list;
    }
    let results = battery.run();
    let failed = results.iter().filter(|r| !r.passed).count();
    for r in &results {
        emit(&r.to_string());
    }
    eprintln!("{} checks, {failed} failed", results.len());
    if failed > 0 {
        Err(Failure::Verification)
    } else {
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut pool = rayon::ThreadPoolBuilder::new().stack_size(STACK);
    if let Some(t) = cli.threads {
        pool = pool.num_threads(t);
    }
    if let Err(e) = pool.build_global() {
        eprintln!("error: thread pool: {e}");
        return ExitCode::from(2);
    }
    // The local oracles recurse deeply; run on a thread with a large stack.
    let worker = std::thread::Builder::new()
        .stack_size(STACK)
        .spawn(move || match &cli.command {
            Command::Generate { instance, seed, out } => generate_cmd(instance, *seed, out),
            Command::Estimate(a) => estimate_cmd(a),
            Command::Sweep(a) => sweep_cmd(a),
            Command::Verify(a) => verify_cmd(a),
        });
    let result = match worker.map(|h| h.join()) {
        Ok(Ok(r)) => r,
        _ => Err(Failure::Runtime(anyhow::anyhow!("worker thread failed"))),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
