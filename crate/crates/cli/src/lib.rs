//! Library behind the `worldline-lab` binary.

pub mod commands;
pub mod figures;
pub mod output;
pub mod scenario;
pub mod verify;

use worldline_lab::Error;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Schema(String),
    Constraint(String),
    Integration(String),
    Io(String),
    /// A check ran and did not pass.
    Fail(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Fail(_) => 1,
            CliError::Schema(_) | CliError::Io(_) => 2,
            CliError::Constraint(_) => 3,
            CliError::Integration(_) => 4,
        }
    }

    /// Classifies a core error raised while integrating.
    pub fn from_run(e: Error) -> Self {
        match e {
            Error::Constraint(_) => CliError::Constraint(e.to_string()),
            other => CliError::Integration(other.to_string()),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Schema(m) => write!(f, "schema error: {m}"),
            CliError::Constraint(m) => write!(f, "constraint error: {m}"),
            CliError::Integration(m) => write!(f, "integration failure: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
            CliError::Fail(m) => write!(f, "FAIL: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Batch parallelism cap from `WORLDLINE_LAB_THREADS`, else the core count.
pub fn thread_cap() -> usize {
    std::env::var("WORLDLINE_LAB_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|n| *n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// Runs `f` over `items` on at most [`thread_cap`] threads, keeping order.
pub fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let cap = thread_cap().min(items.len()).max(1);
    if cap == 1 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(cap);
    std::thread::scope(|sc| {
        let handles: Vec<_> = items.chunks(chunk).map(|c| sc.spawn(|| c.iter().map(&f).collect::<Vec<R>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}
