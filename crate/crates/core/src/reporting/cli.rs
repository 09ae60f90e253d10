//! `avtest` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{ConfigError, ReportError};
use crate::gridworld::compute_valid_spawn_mask;
use crate::harness::{sweep, Experiment};

use super::config::Settings;
use super::metadata::{Metadata, METADATA_FILE};
use super::plots::emit_plot_data;
use super::summary::{read_summary, write_summary, write_summary_to, SummaryRow};
use super::trace::{write_trace, write_trace_to};
use super::io_err;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "avtest", version, about = "Pedestrian test agents for a simulated autonomous vehicle")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one test and print its trace, one JSON record per line.
    Run {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        run_index: Option<u64>,
    },
    /// Run one batch and print its summary row.
    Batch {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        runs: Option<usize>,
        /// Also write summary, metadata and (with --trace) traces here.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        trace: bool,
    },
    /// Run every behaviour over a range of agent counts.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        na_min: Option<usize>,
        #[arg(long)]
        na_max: Option<usize>,
        /// Comma-separated subset of behaviours.
        #[arg(long)]
        behaviours: Option<String>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Write one trace file per batch under <out-dir>/traces.
        #[arg(long)]
        trace: bool,
    },
    /// Print the valid spawn cells ('#') of the road grid.
    SpawnMask {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Turn a summary file into per-metric plot tables.
    Plots {
        #[arg(long)]
        summary: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// key = value settings file, overridden by flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    behaviour: Option<String>,
    #[arg(long)]
    agents: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trigger_mode: Option<String>,
    #[arg(long)]
    cross_probability: Option<f64>,
    #[arg(long)]
    fixed_radius: Option<f64>,
    #[arg(long)]
    score_mean_mode: Option<String>,
    /// terminate or continue after a stopping-zone intrusion.
    #[arg(long)]
    intrusion_policy: Option<String>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

fn settings(config: Option<&PathBuf>, overrides: &[(&str, Option<String>)]) -> Result<Settings, CliError> {
    let mut s = Settings::default();
    if let Some(path) = config {
        s.apply_file(path)?;
    }
    for (key, value) in overrides {
        if let Some(v) = value {
            s.set(key, v)?;
        }
    }
    Ok(s)
}

impl CommonArgs {
    fn overrides(&self) -> Vec<(&'static str, Option<String>)> {
        vec![
            ("behaviour", self.behaviour.clone()),
            ("agents", self.agents.map(|v| v.to_string())),
            ("seed", self.seed.map(|v| v.to_string())),
            ("trigger_mode", self.trigger_mode.clone()),
            ("cross_probability", self.cross_probability.map(|v| v.to_string())),
            ("fixed_radius", self.fixed_radius.map(|v| v.to_string())),
            ("score_mean_mode", self.score_mean_mode.clone()),
            ("intrusion_policy", self.intrusion_policy.clone()),
        ]
    }
}

fn create_dir(dir: &PathBuf) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Report(io_err(dir, e)))
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Report(io_err(&PathBuf::from("<stdout>"), e));
    match command {
        Command::Run { common, run_index } => {
            let mut extra = common.overrides();
            extra.push(("run_index", run_index.map(|v| v.to_string())));
            let s = settings(common.config.as_ref(), &extra)?;
            let exp = Experiment::new(s.experiment)?;
            let result = exp.run_test(s.run_index);
            write_trace_to(std::slice::from_ref(&result), stdout).map_err(io)?;
        }
        Command::Batch { common, runs, out_dir, trace } => {
            let mut extra = common.overrides();
            extra.push(("runs", runs.map(|v| v.to_string())));
            let s = settings(common.config.as_ref(), &extra)?;
            let exp = Experiment::new(s.experiment)?;
            let results = exp.run_all();
            let summary = crate::harness::BatchSummary::from_results(exp.config(), &results);
            write_summary_to(std::slice::from_ref(&summary), &mut *stdout)
                .map_err(|e| io(std::io::Error::other(e)))?;
            if let Some(dir) = out_dir {
                create_dir(&dir)?;
                write_summary(std::slice::from_ref(&summary), &dir.join("summary.csv"))?;
                if trace {
                    write_trace(&results, &dir.join("trace.ndjson"))?;
                }
                Metadata::new(exp.config(), &[summary.behaviour], &[summary.n_agents])
                    .write(&dir.join(METADATA_FILE))?;
            }
        }
        Command::Sweep { common, runs, na_min, na_max, behaviours, out_dir, trace } => {
            let mut extra = common.overrides();
            extra.push(("runs", runs.map(|v| v.to_string())));
            extra.push(("na_min", na_min.map(|v| v.to_string())));
            extra.push(("na_max", na_max.map(|v| v.to_string())));
            extra.push(("behaviours", behaviours));
            extra.push(("out_dir", out_dir.map(|p| p.display().to_string())));
            let s = settings(common.config.as_ref(), &extra)?;
            let range = s.agent_range()?;
            let template = s.experiment.with_agents(*range.start());
            template.validate()?;
            create_dir(&s.out_dir)?;

            let summaries = if trace {
                let trace_dir = s.out_dir.join("traces");
                create_dir(&trace_dir)?;
                let mut out = Vec::new();
                for &kind in &s.behaviours {
                    for n in range.clone() {
                        let exp = Experiment::new(template.with_kind(kind).with_agents(n))?;
                        let results = exp.run_all();
                        write_trace(&results, &trace_dir.join(format!("{}_nA{n}.ndjson", kind.name())))?;
                        out.push(crate::harness::BatchSummary::from_results(exp.config(), &results));
                    }
                }
                out
            } else {
                sweep(&template, &s.behaviours, range.clone())?
            };

            let summary_path = s.out_dir.join("summary.csv");
            write_summary(&summaries, &summary_path)?;
            let rows: Vec<SummaryRow> = summaries.iter().map(SummaryRow::from).collect();
            emit_plot_data(&rows, &s.out_dir)?;
            let counts: Vec<usize> = range.collect();
            Metadata::new(&template, &s.behaviours, &counts).write(&s.out_dir.join(METADATA_FILE))?;
            writeln!(stdout, "wrote {} summaries to {}", summaries.len(), s.out_dir.display()).map_err(io)?;
        }
        Command::SpawnMask { config } => {
            let s = settings(config.as_ref(), &[])?;
            s.experiment.grid.validate().map_err(ConfigError::from)?;
            let mask = compute_valid_spawn_mask(&s.experiment.grid);
            stdout.write_all(mask.render(&s.experiment.grid).as_bytes()).map_err(io)?;
            writeln!(stdout, "valid spawn cells: {}", mask.count()).map_err(io)?;
        }
        Command::Plots { summary, out_dir } => {
            let rows = read_summary(&summary)?;
            let dir = out_dir.unwrap_or_else(super::config::default_out_dir);
            let paths = emit_plot_data(&rows, &dir)?;
            for p in paths {
                writeln!(stdout, "{}", p.display()).map_err(io)?;
            }
        }
    }
    Ok(())
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to `stderr` as a single line.
pub fn cli_main<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return EXIT_OK;
            }
            let text = e.to_string();
            let line = text.lines().next().unwrap_or("usage error");
            let _ = writeln!(stderr, "{line}");
            return EXIT_USAGE;
        }
    };
    match execute(cli.command, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.to_string().replace('\n', " "));
            EXIT_USAGE
        }
    }
}
