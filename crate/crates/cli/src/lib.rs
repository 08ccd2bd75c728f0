//! Library side of the `dce` binary.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, ValueEnum};

use config::{Preset, RunConfig, PRESET_OMEGA_B};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Modes,
    Sweep,
    Phenom,
    Oracle,
    Sigma,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Modes => "modes",
            Command::Sweep => "sweep",
            Command::Phenom => "phenom",
            Command::Oracle => "oracle",
            Command::Sigma => "sigma",
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "dce",
    version,
    about = "Quasi-eigenvalue spectra of a pumped cavity coupled to a photonic band"
)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    fn config(error: anyhow::Error) -> Self {
        Failure {
            code: EXIT_CONFIG,
            error,
        }
    }

    fn run(error: anyhow::Error) -> Self {
        Failure {
            code: EXIT_FAILURE,
            error,
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code)
    }
}

/// Thread cap from `DCE_THREADS`; `None` when unset.
pub fn thread_cap(var: Option<&str>) -> anyhow::Result<Option<usize>> {
    let Some(v) = var else {
        return Ok(None);
    };
    match v.trim().parse::<usize>() {
        Ok(n) if n > 0 => Ok(Some(n)),
        _ => anyhow::bail!("DCE_THREADS must be a positive integer, got {v:?}"),
    }
}

pub fn run(cli: &Cli, threads: Option<usize>) -> Result<commands::Outcome, Failure> {
    let start = Instant::now();
    let cfg = RunConfig::load(&cli.config).map_err(Failure::config)?;
    let resolved = cfg
        .resolve(cli.preset, cli.out.as_deref())
        .map_err(Failure::config)?;

    let work = || match cli.command {
        Command::Modes => commands::modes(&resolved),
        Command::Sweep => commands::sweep(&resolved),
        Command::Phenom => commands::phenom(&resolved),
        Command::Oracle => commands::oracle(&resolved),
        Command::Sigma => commands::sigma_curve(&resolved),
    };
    let outcome = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Failure::run(e.into()))?
            .install(work),
        None => work(),
    }
    .map_err(Failure::run)?;

    let mut log = vec![format!("command: {}", cli.command.name())];
    match resolved.preset {
        Some(pr) => {
            log.push(format!("preset: {}", pr.name()));
            log.push(format!("omegaB fixed by the preset at {PRESET_OMEGA_B} B"));
        }
        None => log.push("preset: none".into()),
    }
    log.push(format!(
        "params: {}",
        serde_json::to_string(&resolved.params).expect("params serialise")
    ));
    log.push(format!(
        "threads: {}",
        threads.map_or("default".to_string(), |n| n.to_string())
    ));
    log.extend(outcome.notes.iter().cloned());
    for f in &outcome.files {
        log.push(format!("wrote: {}", f.display()));
    }
    log.push(format!("elapsed: {:.3} s", start.elapsed().as_secs_f64()));
    let mut text = log.join("\n");
    text.push('\n');
    output::write_atomic(&resolved.out.join("run.log"), text.as_bytes()).map_err(Failure::run)?;
    Ok(outcome)
}
