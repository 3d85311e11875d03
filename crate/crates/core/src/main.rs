use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gro_market::cli::{run_simulate, run_verify, run_zeta, OUT_DIR_ENV};
use gro_market::config::{ExperimentConfig, PRESETS};
use gro_market::harness::suites::{Suite, SuiteOptions, Thresholds};
use gro_market::zeta::DEFAULT_TOL;
use gro_market::Error;

#[derive(Parser)]
#[command(
    name = "gro-market",
    version,
    about = "Relative growth optimal investment: solver, simulator and verifier"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a configured market and write one CSV per path plus a summary.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run verification suites; exit status 1 if any check fails.
    Verify {
        #[arg(long, default_value = "all", value_parser = parse_suite)]
        suite: Suite,
        /// Also audit this configuration; its seed and thresholds become defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Replace the audited optimal rule with one that halves its proportions.
        #[arg(long)]
        inject_fault: bool,
        #[command(flatten)]
        thresholds: ThresholdArgs,
        #[arg(long, env = OUT_DIR_ENV)]
        out_dir: Option<PathBuf>,
    },
    /// Solve for the optimal cash level and proportions of one period.
    Zeta {
        /// Wealth `c > 0`.
        #[arg(short = 'c', allow_negative_numbers = true)]
        wealth: f64,
        /// Interest factor.
        #[arg(short = 'r')]
        rate: f64,
        /// Payoff law as `payoff:prob` pairs, e.g. `0.5:0.5,2:0.5` or `1/0:0.5,0/1:0.5`.
        #[arg(short = 'd')]
        dist: String,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Simulate a bundled preset.
    Example {
        /// Preset name; omit to list them.
        name: Option<String>,
        /// Print the preset's configuration instead of running it.
        #[arg(long)]
        print_config: bool,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    paths: Option<u64>,
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long, env = OUT_DIR_ENV)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct ThresholdArgs {
    /// Terminal relative wealth the optimal investor must reach.
    #[arg(long)]
    threshold_dominance: Option<f64>,
    /// Fraction of paths that must reach it.
    #[arg(long)]
    threshold_dominance_paths: Option<f64>,
    /// Required growth factor of discounted wealth.
    #[arg(long)]
    threshold_divergence: Option<f64>,
    /// Required shrink factor of total wealth in the vanishing-wealth example.
    #[arg(long)]
    threshold_ruin: Option<f64>,
    /// Relative-wealth floor reported by the survival suite.
    #[arg(long)]
    threshold_survival: Option<f64>,
}

impl ThresholdArgs {
    fn apply(&self, mut t: Thresholds) -> Thresholds {
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut t.dominance, self.threshold_dominance);
        set(&mut t.dominance_paths, self.threshold_dominance_paths);
        set(&mut t.divergence, self.threshold_divergence);
        set(&mut t.ruin, self.threshold_ruin);
        set(&mut t.survival_floor, self.threshold_survival);
        t
    }
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    Usage(String),
    Failed,
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Domain(_) => Failure::Usage(e.to_string()),
            e => Failure::Runtime(e),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Failed) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

fn out_dir(flag: Option<PathBuf>, cfg: &ExperimentConfig) -> PathBuf {
    flag.or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn simulate(mut cfg: ExperimentConfig, run: RunArgs) -> Result<(), Failure> {
    if let Some(s) = run.seed {
        cfg.seed = s;
    }
    if let Some(p) = run.paths {
        cfg.paths = p;
    }
    if let Some(h) = run.horizon {
        cfg.horizon = h;
    }
    let dir = out_dir(run.out_dir, &cfg);
    let out = run_simulate(&cfg, &dir)?;
    println!(
        "wrote {} trajectory file(s) and {} to {}",
        out.csv.len(),
        out.summary
            .file_name()
            .unwrap_or_default()
            .to_string_lossy(),
        dir.display()
    );
    Ok(())
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Simulate { config, run } => simulate(ExperimentConfig::load(&config)?, run),
        Command::Example { name: None, .. } => {
            let mut out = std::io::stdout().lock();
            for (name, about) in PRESETS {
                // A closed pipe (e.g. `| head`) is not an error here.
                if writeln!(out, "{name:<20} {about}").is_err() {
                    break;
                }
            }
            Ok(())
        }
        Command::Example {
            name: Some(name),
            print_config,
            run,
        } => {
            let cfg = ExperimentConfig::preset(&name)?;
            if print_config {
                let _ = writeln!(std::io::stdout(), "{}", cfg.to_json());
                return Ok(());
            }
            let run = RunArgs {
                out_dir: Some(
                    run.out_dir
                        .unwrap_or_else(|| PathBuf::from("out").join(&name)),
                ),
                ..run
            };
            simulate(cfg, run)
        }
        Command::Zeta {
            wealth,
            rate,
            dist,
            tol,
        } => {
            print!("{}", run_zeta(wealth, rate, &dist, tol)?);
            Ok(())
        }
        Command::Verify {
            suite,
            config,
            seed,
            inject_fault,
            thresholds,
            out_dir,
        } => {
            let cfg = config.map(|p| ExperimentConfig::load(&p)).transpose()?;
            let base = SuiteOptions::default();
            let opts = SuiteOptions {
                seed: seed.or(cfg.as_ref().map(|c| c.seed)).unwrap_or(base.seed),
                thresholds: thresholds
                    .apply(cfg.as_ref().map_or(base.thresholds, |c| c.thresholds)),
                inject_fault,
            };
            let outcome = run_verify(suite, &opts, cfg.as_ref())?;
            for s in &outcome.report.suites {
                for c in &s.checks {
                    println!(
                        "{:<5} {}/{}",
                        if c.passed { "ok" } else { "FAIL" },
                        s.suite,
                        c.name
                    );
                }
            }
            for c in &outcome.config_checks {
                println!(
                    "{:<5} config/{}",
                    if c.passed { "ok" } else { "FAIL" },
                    c.name
                );
            }
            let json = serde_json::to_string_pretty(&outcome).expect("report serializes");
            let dir = out_dir.or_else(|| cfg.as_ref().and_then(|c| c.out_dir.clone()));
            match dir {
                Some(dir) => {
                    std::fs::create_dir_all(&dir).map_err(Error::from)?;
                    let file = dir.join("verify_report.json");
                    std::fs::write(&file, json + "\n").map_err(Error::from)?;
                    println!("report: {}", file.display());
                }
                None => println!("{json}"),
            }
            if outcome.passed {
                Ok(())
            } else {
                Err(Failure::Failed)
            }
        }
    }
}
