//! Command-line front end for `su12-core`: config files, dispatch, and the
//! CSV and summary outputs.

pub mod commands;
pub mod error;
pub mod params;
pub mod table;

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use commands::{figure, lie_verify, optimize, oracle, sensitivity, write_summary, Outcome};
use error::{CliError, Result};
use params::Params;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    LieVerify,
    Sensitivity,
    Optimize,
    Figure(u8),
    OracleCheck,
}

impl Command {
    pub fn label(&self) -> String {
        match self {
            Command::LieVerify => "lie-verify".into(),
            Command::Sensitivity => "sensitivity".into(),
            Command::Optimize => "optimize".into(),
            Command::Figure(n) => format!("figure {n}"),
            Command::OracleCheck => "oracle-check".into(),
        }
    }

    fn params(&self) -> Result<Params> {
        Ok(Params::new(&match self {
            Command::LieVerify => lie_verify::KEYS.to_vec(),
            Command::Sensitivity => sensitivity::keys(),
            Command::Optimize => optimize::keys(),
            Command::Figure(n) => figure::keys(*n)?,
            Command::OracleCheck => oracle::KEYS.to_vec(),
        }))
    }
}

/// One invocation: what to run, where its parameters come from and where
/// its files go.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub config_path: Option<PathBuf>,
    pub overrides: Vec<String>,
    /// Figures default to the working directory; other commands write
    /// `summary.txt` only when this is set.
    pub output_dir: Option<PathBuf>,
    pub timestamp: bool,
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Write { path: dir.to_path_buf(), source })
}

/// Runs the command, printing its report to stdout. Files are written
/// before a failed check is reported.
pub fn execute(run: &RunConfig) -> Result<()> {
    let mut p = run.command.params()?;
    if let Some(path) = &run.config_path {
        p.load_file(path)?;
    }
    p.apply_overrides(&run.overrides)?;
    let stamp = run
        .timestamp
        .then(|| SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0));

    let (table, outcome): (Option<table::CsvTable>, Outcome) = match run.command {
        Command::LieVerify => (None, lie_verify::run(&mut p)?),
        Command::Sensitivity => (None, sensitivity::run(&mut p)?),
        Command::Optimize => (None, optimize::run(&mut p)?),
        Command::OracleCheck => (None, oracle::run(&mut p)?),
        Command::Figure(n) => {
            let (t, o) = figure::run(n, &mut p)?;
            (Some(t), o)
        }
    };
    for line in &outcome.lines {
        println!("{line}");
    }

    let dir = match (&run.output_dir, run.command) {
        (Some(d), _) => Some(d.clone()),
        (None, Command::Figure(_)) => Some(PathBuf::from(".")),
        (None, _) => None,
    };
    if let Some(dir) = dir {
        ensure_dir(&dir)?;
        if let (Some(t), Command::Figure(n)) = (&table, run.command) {
            let path = dir.join(format!("fig{n}.csv"));
            t.write(&path, stamp)?;
            println!("wrote {}", path.display());
        }
        let path = write_summary(&dir, &run.command.label(), &p, &outcome, stamp)?;
        println!("wrote {}", path.display());
    }
    match outcome.failure {
        Some(why) => Err(CliError::CheckFailed(why)),
        None => Ok(()),
    }
}
