// Copyright 2026 The trapmap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::compare::compare;
use crate::fabric::Fabric;
use crate::par::Exec;
use crate::placer::{center_place, monte_carlo_place, mvfb_place, PlacerError, Problem};
use crate::qasm::{build_qidg, ideal_latency, parse_qasm, Program};
use crate::report::{PlacerKind, ReportInput, RunReport};
use crate::sim::{validate_trace, SimError, Trace};
use crate::svg;
use crate::tech::TechParams;

#[derive(Parser, Debug)]
#[command(
    name = "trapmap",
    version,
    about = "Map QASM programs onto ion-trap fabrics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PlacerArg {
    Center,
    Mc,
    Mvfb,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Schedule, place and route a program; write its trace and report.
    Map {
        #[arg(long)]
        qasm: PathBuf,
        #[arg(long)]
        fabric: PathBuf,
        #[arg(long)]
        tech: PathBuf,
        #[arg(long, value_enum, default_value = "mvfb")]
        placer: PlacerArg,
        /// Multi-start seeds.
        #[arg(long, default_value_t = 25)]
        seeds: usize,
        /// Consecutive non-improving runs before a seed stops.
        #[arg(long, default_value_t = 3)]
        patience: usize,
        /// Monte Carlo placement runs [default: twice --seeds].
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long, default_value_t = 0)]
        rng_seed: u64,
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Instruction whose operand routes are drawn in the SVG.
        #[arg(long)]
        svg_route: Option<usize>,
        /// Record wall-clock time in the report.
        #[arg(long)]
        timing: bool,
        /// Evaluate seeds one after another on the calling thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Print the latency with routing and congestion taken as free.
    Baseline {
        #[arg(long)]
        qasm: PathBuf,
        #[arg(long)]
        tech: PathBuf,
    },
    /// Multi-start placer against Monte Carlo at twice the run budget.
    Compare {
        #[arg(long)]
        qasm: PathBuf,
        #[arg(long)]
        fabric: PathBuf,
        #[arg(long)]
        tech: PathBuf,
        #[arg(long, default_value_t = 25)]
        seeds: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 3)]
        patience: usize,
        #[arg(long, default_value_t = 0)]
        rng_seed: u64,
        #[arg(long)]
        sequential: bool,
    },
    /// Replay a trace file and report rule violations.
    Validate {
        #[arg(long)]
        qasm: PathBuf,
        #[arg(long)]
        fabric: PathBuf,
        #[arg(long)]
        tech: PathBuf,
        #[arg(long)]
        trace: PathBuf,
        /// Emit the report as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
}

/// Exit code for input, usage and I/O errors.
pub const EXIT_INPUT: i32 = 1;
/// Exit code when the simulation cannot make progress.
pub const EXIT_STUCK: i32 = 2;
/// Exit code for traces that fail validation.
pub const EXIT_INVALID: i32 = 3;

struct Failure {
    code: i32,
    message: String,
}

fn input_error(message: String) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message,
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn load_program(path: &Path) -> Result<Program, Failure> {
    parse_qasm(&read(path)?)
        .map_err(|e| input_error(format!("{}:{}: {e}", path.display(), e.line())))
}

fn load_fabric(path: &Path) -> Result<Fabric, Failure> {
    Fabric::parse(&read(path)?).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn load_tech(path: &Path) -> Result<TechParams, Failure> {
    TechParams::parse(&read(path)?).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn placer_failure(e: PlacerError) -> Failure {
    let code = match e {
        PlacerError::Sim(SimError::Stuck { .. }) => EXIT_STUCK,
        _ => EXIT_INPUT,
    };
    Failure {
        code,
        message: e.to_string(),
    }
}

fn benchmark_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn exec(sequential: bool) -> Exec {
    if sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    }
}

/// Runs the command line `args` (program name first) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_INPUT;
            }
            let _ = write!(out, "{}", e.render());
            return 0;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Map {
            qasm,
            fabric,
            tech,
            placer,
            seeds,
            patience,
            runs,
            rng_seed,
            trace,
            report,
            svg,
            svg_route,
            timing,
            sequential,
        } => {
            if seeds == 0 || patience == 0 || runs == Some(0) {
                return Err(input_error(
                    "--seeds, --patience and --runs must be at least 1".into(),
                ));
            }
            let started = Instant::now();
            let program = load_program(&qasm)?;
            let fab = load_fabric(&fabric)?;
            let tech_params = load_tech(&tech)?;
            let qidg = build_qidg(&program);
            let baseline = ideal_latency(&qidg, &tech_params);
            let problem = Problem::new(qidg, fab, tech_params).map_err(placer_failure)?;
            let (kind, outcome) = match placer {
                PlacerArg::Center => (PlacerKind::Center, center_place(&problem)),
                PlacerArg::Mc => (
                    PlacerKind::Mc,
                    monte_carlo_place(
                        &problem,
                        runs.unwrap_or(2 * seeds),
                        rng_seed,
                        exec(sequential),
                    ),
                ),
                PlacerArg::Mvfb => (
                    PlacerKind::Mvfb,
                    mvfb_place(&problem, seeds, patience, rng_seed, exec(sequential)),
                ),
            };
            let outcome = outcome.map_err(placer_failure)?;
            let check = validate_trace(
                &outcome.trace,
                &problem.qidg,
                &problem.fabric,
                &problem.tech,
            );
            if !check.is_valid() {
                return Err(Failure {
                    code: EXIT_INVALID,
                    message: format!(
                        "internal error, produced trace is invalid:\n{}",
                        check.to_text()
                    ),
                });
            }
            let wall_clock_ms = timing.then(|| started.elapsed().as_secs_f64() * 1e3);
            let run_report = RunReport::new(
                ReportInput {
                    benchmark: &benchmark_name(&qasm),
                    placer: kind,
                    seeds,
                    patience,
                    rng_seed,
                    baseline,
                    wall_clock_ms,
                },
                &outcome,
                check.breakdown,
            );
            if let Some(path) = trace {
                write(&path, &outcome.trace.to_text())?;
            }
            if let Some(path) = report {
                write(&path, &run_report.to_json())?;
            }
            if let Some(path) = svg {
                write(
                    &path,
                    &svg::render(&problem.fabric, &outcome.trace, svg_route),
                )?;
            }
            let _ = writeln!(out, "latency_us {}", outcome.latency());
            let _ = writeln!(out, "baseline_us {baseline}");
            let _ = writeln!(out, "placement_runs {}", outcome.total_runs());
            Ok(())
        }
        Command::Baseline { qasm, tech } => {
            let program = load_program(&qasm)?;
            let tech_params = load_tech(&tech)?;
            let _ = writeln!(
                out,
                "{}",
                ideal_latency(&build_qidg(&program), &tech_params)
            );
            Ok(())
        }
        Command::Compare {
            qasm,
            fabric,
            tech,
            seeds,
            trials,
            patience,
            rng_seed,
            sequential,
        } => {
            if seeds == 0 || patience == 0 || trials == 0 {
                return Err(input_error(
                    "--seeds, --patience and --trials must be at least 1".into(),
                ));
            }
            let program = load_program(&qasm)?;
            let problem = Problem::new(
                build_qidg(&program),
                load_fabric(&fabric)?,
                load_tech(&tech)?,
            )
            .map_err(placer_failure)?;
            let summary = compare(
                &problem,
                seeds,
                patience,
                trials,
                rng_seed,
                exec(sequential),
            )
            .map_err(placer_failure)?;
            let _ = write!(out, "{}", summary.to_table());
            Ok(())
        }
        Command::Validate {
            qasm,
            fabric,
            tech,
            trace,
            json,
        } => {
            let program = load_program(&qasm)?;
            let fab = load_fabric(&fabric)?;
            let tech_params = load_tech(&tech)?;
            let parsed = Trace::parse(&read(&trace)?, &program.qubit_names(), &tech_params)
                .map_err(|e| input_error(format!("{}: {e}", trace.display())))?;
            let report = validate_trace(&parsed, &build_qidg(&program), &fab, &tech_params);
            if json {
                let _ = writeln!(out, "{}", report.to_json());
            } else {
                let _ = write!(out, "{}", report.to_text());
            }
            if report.is_valid() {
                Ok(())
            } else {
                Err(Failure {
                    code: EXIT_INVALID,
                    message: format!("{} violation(s)", report.violations.len()),
                })
            }
        }
    }
}
