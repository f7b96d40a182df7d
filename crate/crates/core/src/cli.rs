//! Command-line interface.
//!
//! Five subcommands share one input model: a scenario (a bundled name or a
//! file path) optionally overridden by `--epsilon`, `--budget-x`,
//! `--budget-y`, and `--objective` flags.
//!
//! - `solve`    — one budget pair, prints a [`SolveReport`]
//! - `sweep`    — the full value surface as CSV
//! - `evaluate` — score a fixed allocation file
//! - `verify`   — cross-check the solver against brute-force enumeration
//! - `converge` — mesh-refinement study as CSV
//!
//! Exit codes: 0 success, 1 input error (flags, scenario, allocation), 2
//! internal failure (output I/O, or a `verify` discrepancy — which would
//! mean the solver itself is wrong).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::network::BudgetPair;
use crate::objective::{eval_expected, eval_minimax, Objective};
use crate::oracle::{grid_enumerate, DEFAULT_ENUMERATION_CAP};
use crate::report::{export_convergence, export_surface, format_sig, SolveReport, EXPORT_DIGITS};
use crate::scenario::{bundled, parse_allocation, parse_scenario, Scenario, BUNDLED_NAMES};
use crate::{convergence, solve, sweep};

/// Agreement threshold for `verify`: the solver and the brute-force oracle
/// search the same finite set, so anything beyond float noise is a defect.
pub const VERIFY_TOLERANCE: f64 = 1e-9;

#[derive(Parser)]
#[command(
    name = "layered-defense",
    version,
    about = "Optimal budget allocation for two-layer sensor defenses",
    after_help = "SCENARIO is a file path or a bundled name (example_8_1, example_8_2, \
                  two_branch_small)."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    /// Maximize the expected amount of traffic caught.
    Expected,
    /// Maximize the detection rate on the attacker's best path.
    Minimax,
}

impl From<ObjectiveArg> for Objective {
    fn from(arg: ObjectiveArg) -> Objective {
        match arg {
            ObjectiveArg::Expected => Objective::Expected,
            ObjectiveArg::Minimax => Objective::Minimax,
        }
    }
}

/// Scenario-field overrides shared by most subcommands.
#[derive(Args)]
struct Overrides {
    /// Objective to optimize (defaults to the scenario's).
    #[arg(long, value_enum)]
    objective: Option<ObjectiveArg>,
    /// Mesh step (defaults to the scenario's).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Inner-layer budget (defaults to the scenario's).
    #[arg(long)]
    budget_x: Option<f64>,
    /// Outer-layer budget (defaults to the scenario's).
    #[arg(long)]
    budget_y: Option<f64>,
}

impl Overrides {
    fn apply(&self, scenario: &mut Scenario) {
        if let Some(o) = self.objective {
            scenario.objective = o.into();
        }
        if let Some(e) = self.epsilon {
            scenario.epsilon = e;
        }
        let x = self.budget_x.unwrap_or(scenario.budgets.x);
        let y = self.budget_y.unwrap_or(scenario.budgets.y);
        scenario.budgets = BudgetPair::new(x, y);
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one budget pair and print the spending plan.
    Solve {
        /// Scenario file path or bundled name.
        scenario: String,
        #[command(flatten)]
        overrides: Overrides,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the whole value surface and write it as CSV.
    Sweep {
        /// Scenario file path or bundled name.
        scenario: String,
        #[command(flatten)]
        overrides: Overrides,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a fixed allocation file against a scenario.
    Evaluate {
        /// Scenario file path or bundled name.
        scenario: String,
        /// Allocation file: `inner <id> <spend>` / `outer <id> <spend>` lines.
        allocation: PathBuf,
        /// Objective to score under (defaults to the scenario's).
        #[arg(long, value_enum)]
        objective: Option<ObjectiveArg>,
    },
    /// Cross-check the solver against brute-force enumeration.
    Verify {
        /// Scenario file path or bundled name.
        scenario: String,
        #[command(flatten)]
        overrides: Overrides,
        /// Abort if the enumeration would exceed this many allocations.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        oracle_cap: u64,
    },
    /// Solve on repeatedly halved meshes and report convergence as CSV.
    Converge {
        /// Scenario file path or bundled name.
        scenario: String,
        #[command(flatten)]
        overrides: Overrides,
        /// How many times to halve the scenario's mesh step.
        #[arg(long, default_value_t = 3)]
        halvings: u32,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_scenario(arg: &str) -> Result<Scenario> {
    let text = match bundled(arg) {
        Some(t) => t.to_string(),
        None => std::fs::read_to_string(arg).map_err(|e| Error::Syntax {
            line: 0,
            message: format!(
                "cannot read scenario `{arg}`: {e} (bundled names: {})",
                BUNDLED_NAMES.join(", ")
            ),
        })?,
    };
    parse_scenario(&text)
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Syntax {
        line: 0,
        message: format!("cannot read `{}`: {e}", path.display()),
    })
}

/// Runs `write` against the `--out` file when given, stdout otherwise.
fn emit(out: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> Result<usize>) -> Result<()> {
    match out {
        Some(path) => {
            let mut file = std::fs::File::create(path)?;
            write(&mut file)?;
            file.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

/// Exit code for a failed run: output-sink trouble is an internal failure,
/// everything else traces back to the inputs.
fn classify(err: &Error) -> i32 {
    match err {
        Error::SinkFailure(_) => 2,
        _ => 1,
    }
}

fn dispatch(cmd: Cmd) -> Result<i32> {
    match cmd {
        Cmd::Solve { scenario, overrides, out } => {
            let mut s = load_scenario(&scenario)?;
            overrides.apply(&mut s);
            let start = Instant::now();
            let solution = solve(&s.network, s.budgets, s.epsilon, s.objective)?;
            let wall_clock_s = start.elapsed().as_secs_f64();
            let report = SolveReport::new(
                &s.network,
                s.budgets,
                s.epsilon,
                s.objective,
                (solution.table().nx(), solution.table().ny()),
                solution.value(),
                &solution.allocation(),
                wall_clock_s,
            );
            emit(out.as_deref(), |sink| {
                let text = report.render();
                sink.write_all(text.as_bytes())?;
                Ok(text.len())
            })?;
            Ok(0)
        }
        Cmd::Sweep { scenario, overrides, out } => {
            let mut s = load_scenario(&scenario)?;
            overrides.apply(&mut s);
            let table = sweep(&s.network, s.budgets, s.epsilon, s.objective)?;
            emit(out.as_deref(), |sink| export_surface(&table, sink))?;
            Ok(0)
        }
        Cmd::Evaluate { scenario, allocation, objective } => {
            let mut s = load_scenario(&scenario)?;
            if let Some(o) = objective {
                s.objective = o.into();
            }
            let alloc = parse_allocation(&read_file(&allocation)?)?;
            alloc.check_within(s.budgets)?;
            let value = match s.objective {
                Objective::Expected => eval_expected(&s.network, &alloc)?,
                Objective::Minimax => eval_minimax(&s.network, &alloc)?,
            };
            println!("objective: {}", s.objective);
            println!("value: {}", format_sig(value, EXPORT_DIGITS));
            Ok(0)
        }
        Cmd::Verify { scenario, overrides, oracle_cap } => {
            let mut s = load_scenario(&scenario)?;
            overrides.apply(&mut s);
            let solution = solve(&s.network, s.budgets, s.epsilon, s.objective)?;
            let (oracle_value, _) =
                grid_enumerate(&s.network, s.budgets, s.epsilon, s.objective, oracle_cap)?;
            let discrepancy = (solution.value() - oracle_value).abs();
            println!("solver: {}", format_sig(solution.value(), EXPORT_DIGITS));
            println!("oracle: {}", format_sig(oracle_value, EXPORT_DIGITS));
            println!("discrepancy: {}", format_sig(discrepancy, EXPORT_DIGITS));
            if discrepancy > VERIFY_TOLERANCE {
                eprintln!(
                    "error: solver and enumeration disagree by {} (tolerance {})",
                    format_sig(discrepancy, EXPORT_DIGITS),
                    format_sig(VERIFY_TOLERANCE, EXPORT_DIGITS),
                );
                return Ok(2);
            }
            Ok(0)
        }
        Cmd::Converge { scenario, overrides, halvings, out } => {
            let mut s = load_scenario(&scenario)?;
            overrides.apply(&mut s);
            let report = convergence::refinement_study(
                &s.network,
                s.budgets,
                s.epsilon,
                halvings,
                s.objective,
            )?;
            emit(out.as_deref(), |sink| export_convergence(&report, sink))?;
            Ok(0)
        }
    }
}

/// Parses `argv` (including the program name) and runs the tool, returning
/// the process exit code. Never panics on bad input; never calls
/// `process::exit` itself.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // `--help` and `--version` arrive as Err too, but are success.
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.cmd) {
        Ok(code) => code,
        // A consumer closing our stdout early (`... | head`) is normal
        // pipeline behaviour, not a failure worth reporting.
        Err(Error::SinkFailure(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => 0,
        Err(err) => {
            eprintln!("error: {err}");
            classify(&err)
        }
    }
}
