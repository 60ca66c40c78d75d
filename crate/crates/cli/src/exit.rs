//! Process exit codes.

use diracshell::Error;

pub const OK: i32 = 0;
/// A `verify-*` command ran but a declared tolerance was violated.
pub const TOLERANCE: i32 = 1;
/// Unknown command, bad flag or unreadable config (clap also uses 2).
pub const USAGE: i32 = 2;
/// Bad mesh spec or mesh file, bad density file, invalid parameter values.
pub const INPUT: i32 = 3;
/// Panel/level guard, condition-number guard, Neumann bound, too-close point.
pub const GUARD: i32 = 4;
pub const IO: i32 = 5;
/// Eigensolver failure.
pub const NUMERICAL: i32 = 6;

/// Marks a `verify-*` tolerance failure; the report has already been written.
#[derive(Debug)]
pub struct ToleranceFailure(pub String);

impl std::fmt::Display for ToleranceFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "tolerance violated: {}", self.0)
    }
}

impl std::error::Error for ToleranceFailure {}

/// Bad command-line or config input detected after clap parsing.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Malformed user-supplied data (density files and the like).
#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

pub fn core_code(e: &Error) -> i32 {
    match e {
        Error::LevelGuard { .. }
        | Error::PanelGuard { .. }
        | Error::SingularTau { .. }
        | Error::NeumannBound { .. }
        | Error::TooClose { .. } => GUARD,
        Error::Io(_) => IO,
        Error::Eigensolver(_) => NUMERICAL,
        _ => INPUT,
    }
}

pub fn code_for(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if cause.is::<ToleranceFailure>() {
            return TOLERANCE;
        }
        if cause.is::<UsageError>() {
            return USAGE;
        }
        if cause.is::<InputError>() {
            return INPUT;
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return core_code(e);
        }
        if let Some(e) = cause.downcast_ref::<csv::Error>() {
            return if e.is_io_error() { IO } else { INPUT };
        }
        if cause.is::<std::io::Error>() {
            return IO;
        }
    }
    NUMERICAL
}
