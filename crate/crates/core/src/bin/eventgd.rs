use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use eventgd::anticonv::trace_anti_convergence;
use eventgd::baselines::Method;
use eventgd::harness::{
    gradcheck_frankenstein, gradcheck_ql, read_runs, run_experiment_csv, summarize, write_summary,
    ExperimentConfig, GradcheckPoint,
};
use eventgd::quasi_likelihood::{generate_dataset, write_dataset_csv, DatasetSpec, Variance};
use eventgd::Result;

#[derive(Parser)]
#[command(
    name = "eventgd",
    version,
    about = "Event-driven gradient descent benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment grid and write one CSV record per run.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the config seed and EVENTGD_SEED.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        parallel: Option<usize>,
    },
    /// Aggregate a run CSV into per-(algorithm, hyperparam, problem) rates.
    Summarize {
        #[arg(long = "in")]
        input: PathBuf,
        /// Defaults to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trace a baseline on its divergence objective: k, theta, objective, grad_abs.
    Anticonv {
        #[arg(long)]
        method: Method,
        #[arg(long)]
        step: f64,
        #[arg(long, default_value_t = 50)]
        horizon: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare analytic gradients with central differences; exit 1 on failure.
    Gradcheck {
        /// ql-v1, ql-v2, ql-v3, ql-v4 or frankenstein.
        #[arg(long)]
        problem: String,
        #[arg(long, default_value_t = 20)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write a generated dataset as long-format CSV.
    Dataset {
        #[arg(long, default_value = "V1")]
        variance: Variance,
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn gradcheck(problem: &str, points: usize, seed: u64) -> Result<Vec<GradcheckPoint>> {
    match problem.strip_prefix("ql-") {
        Some(v) => gradcheck_ql(v.parse()?, 10, 100, points, seed),
        None if problem == "frankenstein" => gradcheck_frankenstein(10, points, seed),
        None => Err(eventgd::Error::InvalidParameter {
            name: "problem",
            reason: format!("unknown problem {problem:?}"),
        }),
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run {
            config,
            out,
            seed,
            parallel,
        } => {
            let mut cfg = match config {
                Some(p) => ExperimentConfig::parse(&std::fs::read_to_string(p)?)?,
                None => ExperimentConfig::from_env()?,
            };
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            if let Some(p) = parallel {
                cfg.parallelism = p;
            }
            cfg.validate()?;
            let count = run_experiment_csv(&cfg, BufWriter::new(File::create(&out)?))?;
            eprintln!("wrote {count} records to {}", out.display());
            Ok(true)
        }
        Command::Summarize { input, out } => {
            let runs = read_runs(File::open(input)?)?;
            write_summary(&summarize(&runs), output(out.as_ref())?)?;
            Ok(true)
        }
        Command::Anticonv {
            method,
            step,
            horizon,
            out,
        } => {
            let report = trace_anti_convergence(method, step, horizon)?;
            let mut w = csv::Writer::from_writer(output(out.as_ref())?);
            w.write_record(["k", "theta", "objective", "grad_abs"])?;
            for s in &report.steps {
                w.write_record([
                    s.k.to_string(),
                    s.theta.to_string(),
                    s.objective.to_string(),
                    s.gradient.abs().to_string(),
                ])?;
            }
            w.flush()?;
            Ok(true)
        }
        Command::Gradcheck {
            problem,
            points,
            seed,
        } => {
            let results = gradcheck(&problem, points, seed)?;
            let worst = results.iter().map(|r| r.rel_error).fold(0.0, f64::max);
            let failed = results.iter().filter(|r| !r.passed()).count();
            println!(
                "{problem}: {} points, max rel. error {worst:e}, {failed} failed",
                results.len()
            );
            Ok(failed == 0)
        }
        Command::Dataset {
            variance,
            n,
            m,
            seed,
            out,
        } => {
            let data = generate_dataset(&DatasetSpec::new(n, m, variance, seed))?;
            write_dataset_csv(&data, output(out.as_ref())?)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
