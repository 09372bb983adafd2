//! Argument handling for the `wgmaxwell` binary.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use wgmaxwell::mesh::Pattern;
use wgmaxwell::mms::Example;
use wgmaxwell::study::{render, render_metadata, run_study, write_outputs, Mode, ReportFormat, StudyConfig};
use wgmaxwell::Error;

#[derive(Debug, Parser)]
#[command(name = "wgmaxwell", version, about = "Weak Galerkin convergence studies for the Maxwell viscoelastic model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a spatial, temporal or single-resolution study and print its report.
    Study(StudyArgs),
}

#[derive(Debug, Args)]
pub struct StudyArgs {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub example: Option<Example>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub mode: Option<Mode>,
    #[arg(long)]
    pub pattern: Option<Pattern>,
    /// Shorter time step and coarser mesh cap for k = 2 spatial studies.
    #[arg(long)]
    pub fast: bool,
    /// Directory for the report, its metadata and VTK snapshots.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub format: Option<ReportFormat>,
    /// Write a VTK snapshot every n steps (needs --out).
    #[arg(long)]
    pub vtk_stride: Option<usize>,
    /// Extra `key=value` override, e.g. `--set meshes=2,4,8`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

impl StudyArgs {
    /// The file configuration with command-line overrides applied.
    pub fn resolve(&self) -> Result<StudyConfig, Error> {
        let mut c = StudyConfig::from_file(&self.config)?;
        for kv in &self.overrides {
            let (key, value) = kv.split_once('=').ok_or_else(|| Error::InvalidConfig(format!("override '{kv}' is not KEY=VALUE")))?;
            c.set(key.trim(), value.trim())?;
        }
        if let Some(v) = self.example {
            c.example = v;
        }
        if let Some(v) = self.k {
            c.k = v;
        }
        if let Some(v) = self.mode {
            c.mode = v;
        }
        if let Some(v) = self.pattern {
            c.pattern = v;
        }
        if self.fast {
            c.fast = true;
        }
        if let Some(v) = &self.out {
            c.out = Some(v.clone());
        }
        if let Some(v) = self.format {
            c.format = v;
        }
        if let Some(v) = self.vtk_stride {
            c.vtk_stride = v;
        }
        Ok(c)
    }
}

/// Output of a successful run.
#[derive(Debug)]
pub struct Outcome {
    pub report: String,
    pub metadata: String,
    pub written: Option<PathBuf>,
}

pub fn run(cli: &Cli) -> Result<Outcome, Error> {
    match &cli.command {
        Command::Study(args) => {
            let config = args.resolve()?;
            config.plan()?;
            let table = run_study(&config)?;
            let written = match &config.out {
                Some(dir) => Some(write_outputs(&table, dir)?),
                None => None,
            };
            Ok(Outcome { report: render(&table, config.format), metadata: render_metadata(&table), written })
        }
    }
}

/// 2 for configuration errors, 3 for solver failures, 1 for I/O.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidConfig(_) => 2,
        Error::Factorization(_) | Error::DegenerateElement { .. } | Error::NonPositiveError(_) => 3,
        Error::Io(_) => 1,
    }
}
