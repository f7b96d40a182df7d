//! Crate-wide error type.

use std::fmt;

use crate::network::Violation;

/// Everything that can go wrong while building curves, meshing budgets,
/// solving, enumerating, or reading scenario files.
#[derive(Debug)]
pub enum Error {
    /// `PwlCurve::from_lines` was given an empty line set.
    EmptyLines,
    /// An affine line has a negative slope or intercept.
    InvalidLine { slope: f64, intercept: f64 },
    /// A curve evaluates below zero at budget 0.
    NegativeAtZero { value: f64 },
    /// Direct breakpoint input is not a concave curve (a segment slope
    /// increases from one piece to the next).
    NotConcaveRepresentable { detail: String },
    /// Breakpoint input is malformed (unordered budgets, values outside
    /// [0, 1], decreasing values, fewer than one point).
    InvalidBreakpoints { detail: String },
    /// A curve was evaluated outside its domain.
    OutOfDomain { value: f64, domain_max: f64 },
    /// A mesh step must be strictly positive.
    NonpositiveStep { step: f64 },
    /// A mesh budget must be nonnegative.
    NegativeBudget { budget: f64 },
    /// The budget is not an integer multiple of the mesh step.
    NonDivisibleBudget { budget: f64, step: f64 },
    /// Two tables being merged do not share identical meshes.
    MeshMismatch,
    /// A mesh extends past some sensor curve's domain.
    DomainExceeded { sensor: String, needed: f64, domain_max: f64 },
    /// An allocation entry is unusable (negative spend, or it violates a
    /// stated budget).
    InfeasibleAllocation { detail: String },
    /// An allocation has no entry for a sensor in the network.
    MissingSensorEntry { id: String },
    /// A gradient was requested exactly on a curve breakpoint, where the
    /// slope is undefined.
    AtBreakpoint { position: f64 },
    /// Brute-force enumeration would exceed the configured cap.
    EnumerationTooLarge { estimated: u128, cap: u64 },
    /// The network fails structural validation.
    InvalidNetwork { violations: Vec<Violation> },
    /// A scenario or allocation file is malformed at a given line.
    Syntax { line: usize, message: String },
    /// A scenario file uses a field name this format does not define.
    UnknownField { line: usize, name: String },
    /// Writing an output stream or file failed.
    SinkFailure(std::io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyLines => write!(f, "curve needs at least one affine line"),
            Error::InvalidLine { slope, intercept } => write!(
                f,
                "affine line must have nonnegative slope and intercept, got slope {slope}, intercept {intercept}"
            ),
            Error::NegativeAtZero { value } => {
                write!(f, "curve is negative at budget 0 (value {value})")
            }
            Error::NotConcaveRepresentable { detail } => {
                write!(f, "breakpoints do not describe a concave curve: {detail}")
            }
            Error::InvalidBreakpoints { detail } => {
                write!(f, "invalid breakpoints: {detail}")
            }
            Error::OutOfDomain { value, domain_max } => write!(
                f,
                "budget {value} is outside the curve domain [0, {domain_max}]"
            ),
            Error::NonpositiveStep { step } => {
                write!(f, "mesh step must be positive, got {step}")
            }
            Error::NegativeBudget { budget } => {
                write!(f, "budget must be nonnegative, got {budget}")
            }
            Error::NonDivisibleBudget { budget, step } => write!(
                f,
                "budget {budget} is not an integer multiple of mesh step {step}"
            ),
            Error::MeshMismatch => write!(f, "tables to merge must share identical meshes"),
            Error::DomainExceeded { sensor, needed, domain_max } => write!(
                f,
                "sensor {sensor}: mesh reaches budget {needed} but its curve domain ends at {domain_max}"
            ),
            Error::InfeasibleAllocation { detail } => {
                write!(f, "infeasible allocation: {detail}")
            }
            Error::MissingSensorEntry { id } => {
                write!(f, "allocation has no entry for sensor {id}")
            }
            Error::AtBreakpoint { position } => write!(
                f,
                "gradient undefined: budget {position} sits on a curve breakpoint"
            ),
            Error::EnumerationTooLarge { estimated, cap } => write!(
                f,
                "enumeration would visit about {estimated} allocations, above the cap of {cap}"
            ),
            Error::InvalidNetwork { violations } => {
                write!(f, "network validation failed:")?;
                for v in violations {
                    write!(f, "\n  - {v}")?;
                }
                Ok(())
            }
            Error::Syntax { line, message } => write!(f, "line {line}: {message}"),
            Error::UnknownField { line, name } => {
                write!(f, "line {line}: unknown field `{name}`")
            }
            Error::SinkFailure(e) => write!(f, "failed to write output: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::SinkFailure(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::SinkFailure(e)
    }
}

/// Shorthand used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
