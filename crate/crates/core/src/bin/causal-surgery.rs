use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use causal_surgery::scenario::{
    demo_config, demo_configs, run_build, run_export, run_verify, RunError, RunReport, ScenarioConfig, DEMO_NAMES,
};

/// Cone-bounding surgery and asymptotic joins of split Lorentzian metrics.
///
/// Exit codes: 0 all checks pass, 1 a verification failed, 2 bad input.
/// CAUSAL_SURGERY_THREADS caps the worker pool.
#[derive(Parser)]
#[command(name = "causal-surgery", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Overrides {
    /// Seed of the sampled causal curves.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of sampled causal curves.
    #[arg(long)]
    samples: Option<usize>,
    /// Cone-containment length tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Print nothing on success.
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario's pipeline, write the dump and the report, verify.
    Build {
        #[arg(long)]
        config: PathBuf,
        /// Output directory [default: out/<scenario name>].
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        o: Overrides,
    },
    /// Check a metric dump against a scenario.
    Verify {
        dump: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// Also write the report here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        o: Overrides,
    },
    /// Write a scenario's output metric as CSV without verifying it.
    Export {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Dump the input metric g instead of the pipeline output.
        #[arg(long)]
        input_only: bool,
        #[arg(long)]
        quiet: bool,
    },
    /// Build the bundled demo scenarios.
    Demo {
        #[arg(long, default_value = "demo-output")]
        out: PathBuf,
        /// Run only this scenario.
        #[arg(long)]
        only: Option<String>,
        /// List the scenarios and exit.
        #[arg(long)]
        list: bool,
        /// Print a scenario's JSON config and exit.
        #[arg(long, value_name = "NAME")]
        print_config: Option<String>,
        #[command(flatten)]
        o: Overrides,
    },
}

fn fail(e: impl std::fmt::Display, code: u8) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(code)
}

fn load(path: &Path, o: &Overrides) -> Result<ScenarioConfig, RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| RunError::Io(format!("cannot read {}: {e}", path.display())))?;
    let cfg = ScenarioConfig::from_json(&text)?;
    apply(cfg, o)
}

fn apply(mut cfg: ScenarioConfig, o: &Overrides) -> Result<ScenarioConfig, RunError> {
    if let Some(s) = o.seed {
        cfg.verification.seed = s;
    }
    if let Some(n) = o.samples {
        cfg.verification.samples = n;
    }
    if let Some(t) = o.tol {
        cfg.verification.tolerance = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn finish(r: Result<RunReport, RunError>, quiet: bool) -> ExitCode {
    match r {
        Ok(r) => {
            if !quiet || !r.passed {
                print!("{}", r.summary());
            }
            ExitCode::from(r.exit_code() as u8)
        }
        Err(e) => {
            let code = e.exit_code() as u8;
            fail(e, code)
        }
    }
}

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("CAUSAL_SURGERY_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("CAUSAL_SURGERY_THREADS must be a positive integer, got `{v}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        return fail(e, 2);
    }
    match cli.command {
        Command::Build { config, out, o } => {
            let r = load(&config, &o).and_then(|cfg| {
                let dir = out.unwrap_or_else(|| Path::new("out").join(&cfg.name));
                run_build(&cfg, &dir)
            });
            finish(r, o.quiet)
        }
        Command::Verify { dump, config, out, o } => {
            let r = load(&config, &o).and_then(|cfg| run_verify(&cfg, &dump, out.as_deref()));
            finish(r, o.quiet)
        }
        Command::Export {
            config,
            out,
            input_only,
            quiet,
        } => match load(&config, &Overrides::default()).and_then(|cfg| run_export(&cfg, &out, input_only)) {
            Ok(file) => {
                if !quiet {
                    println!("wrote {} ({} rows)", out.join(&file.file).display(), file.rows);
                }
                ExitCode::SUCCESS
            }
            Err(e) => fail(e, 2),
        },
        Command::Demo {
            out,
            only,
            list,
            print_config,
            o,
        } => {
            if list {
                for n in DEMO_NAMES {
                    println!("{n}");
                }
                return ExitCode::SUCCESS;
            }
            if let Some(name) = print_config {
                return match demo_config(&name) {
                    Some(cfg) => {
                        println!("{}", cfg.to_json());
                        ExitCode::SUCCESS
                    }
                    None => fail(format!("unknown demo `{name}`; try --list"), 2),
                };
            }
            let configs = match &only {
                Some(name) => match demo_config(name) {
                    Some(c) => vec![c],
                    None => return fail(format!("unknown demo `{name}`; try --list"), 2),
                },
                None => demo_configs(),
            };
            let mut worst = 0u8;
            for cfg in configs {
                let dir = out.join(&cfg.name);
                let code = finish(apply(cfg, &o).and_then(|c| run_build(&c, &dir)), o.quiet);
                if code != ExitCode::SUCCESS {
                    worst = worst.max(if code == ExitCode::from(1) { 1 } else { 2 });
                }
            }
            ExitCode::from(worst)
        }
    }
}
