//! Command-line front end.
//!
//! Exit codes: 0 success, 1 output could not be written, 2 usage error,
//! 3 invalid configuration, 4 numerical failure.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{load_config, RunConfig};
use crate::export::{config_from_meta, write_bundle, write_failure};
use crate::run::{run, RunError};
use crate::scenarios::{all_presets, preset};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "dret", version, about = "Exciton transfer driven by a shared phonon mode or bath")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the built-in scenarios.
    List,
    /// Run a scenario, a config file or a previous run's meta.json.
    Run(RunArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Built-in scenario name.
    #[arg(long, group = "source", required = true)]
    pub scenario: Option<String>,
    /// JSON config file.
    #[arg(long, group = "source", required = true)]
    pub config: Option<PathBuf>,
    /// meta.json of an earlier run; repeats it exactly.
    #[arg(long, group = "source", required = true)]
    pub replay: Option<PathBuf>,
    /// End time in units of 1/J.
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Output spacing in units of 1/J.
    #[arg(long)]
    pub dt_out: Option<f64>,
    /// Starting Fock cutoff n_max (raised automatically until converged).
    #[arg(long)]
    pub fock_max: Option<usize>,
    /// Fixed hierarchy depth (skips the convergence search).
    #[arg(long)]
    pub heom_cutoff: Option<usize>,
    /// Number of Wigner snapshots, spread evenly over the run.
    #[arg(long)]
    pub wigner_frames: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = "dret-out")]
    pub out: PathBuf,
    /// Worker threads; output is byte-identical at 1.
    #[arg(long, env = "DRET_THREADS")]
    pub threads: Option<usize>,
    /// Also write gnuplot scripts.
    #[arg(long)]
    pub emit_plots: bool,
}

/// One line per preset: name, regime, citation.
pub fn cmd_list() -> String {
    all_presets().iter().map(|p| format!("{:<6}  {:<6}  {}\n", p.name, p.regime().to_string(), p.citation)).collect()
}

fn apply_overrides(cfg: &mut RunConfig, args: &RunArgs) {
    if let Some(t) = args.tmax {
        cfg.time.tmax = t;
    }
    if let Some(dt) = args.dt_out {
        cfg.time.dt_out = dt;
    }
    if let Some(n) = args.fock_max {
        cfg.numerics.n_max = n;
    }
    if let Some(c) = args.heom_cutoff {
        cfg.numerics.heom_cutoff = Some(c);
        if let Some(s) = cfg.sweep.as_mut() {
            s.cutoffs = Some(vec![c; s.relaxation.len()]);
        }
    }
    if let Some(f) = args.wigner_frames {
        cfg.wigner.frames = f;
    }
}

fn resolve(args: &RunArgs) -> Result<RunConfig, (i32, String)> {
    let mut cfg = if let Some(name) = &args.scenario {
        preset(name).map_err(|e| (EXIT_USAGE, e.to_string()))?.config
    } else if let Some(path) = &args.config {
        load_config(path).map_err(|e| (EXIT_VALIDATION, e.to_string()))?
    } else if let Some(path) = &args.replay {
        let text = std::fs::read_to_string(path).map_err(|e| (EXIT_VALIDATION, format!("{}: {e}", path.display())))?;
        config_from_meta(&text).map_err(|e| (EXIT_VALIDATION, e))?
    } else {
        return Err((EXIT_USAGE, "one of --scenario, --config or --replay is required".into()));
    };
    apply_overrides(&mut cfg, args);
    Ok(cfg)
}

pub fn cmd_run(args: &RunArgs) -> i32 {
    if let Some(k) = args.threads {
        if k == 0 {
            eprintln!("error: --threads must be at least 1");
            return EXIT_USAGE;
        }
        // Fails only if a pool already exists, in which case it is reused.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
    let cfg = match resolve(args) {
        Ok(c) => c,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            let _ = write_failure(&args.out, None, &RunError::Validation(msg), &[]);
            return code;
        }
    };
    let outcome = match run(&cfg) {
        Ok(o) => o,
        Err(err) => {
            eprintln!("error: {err}");
            if let Err(e) = write_failure(&args.out, Some(&cfg), &err, &[]) {
                eprintln!("error: cannot write {}: {e}", args.out.display());
            }
            return match err {
                RunError::Validation(_) => EXIT_VALIDATION,
                RunError::Numeric(_) => EXIT_NUMERIC,
            };
        }
    };
    match write_bundle(&args.out, &cfg, &outcome, args.emit_plots, &[]) {
        Ok(meta) => {
            for w in meta["warnings"].as_array().into_iter().flatten() {
                eprintln!("warning: {}", w.as_str().unwrap_or_default());
            }
            println!("wrote {}", args.out.display());
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: cannot write {}: {e}", args.out.display());
            EXIT_IO
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match cli.command {
        Command::List => {
            print!("{}", cmd_list());
            EXIT_OK
        }
        Command::Run(args) => cmd_run(&args),
    }
}
