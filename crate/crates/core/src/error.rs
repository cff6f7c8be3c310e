use thiserror::Error;

/// Error type shared by all solver modules.
#[derive(Debug, Error)]
pub enum SolverError {
    /// A precondition on caller-supplied data failed.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Thomas elimination hit a vanishing pivot. Step matrices are strictly
    /// diagonally dominant and cannot trigger this; it guards hand-built
    /// systems.
    #[error("singular tridiagonal system: pivot {pivot:e} at row {row}")]
    SingularSystem { row: usize, pivot: f64 },

    /// A non-finite value appeared while time stepping. `level` is set when
    /// the failure happened inside a convergence study.
    #[error("solution diverged at step {step} (t = {time}){}", level_suffix(.level))]
    Divergence {
        step: usize,
        time: f64,
        level: Option<usize>,
    },
}

fn level_suffix(level: &Option<usize>) -> String {
    match level {
        Some(l) => format!(" at refinement level {l}"),
        None => String::new(),
    }
}

impl SolverError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        SolverError::InvalidArgument(msg.into())
    }
}
