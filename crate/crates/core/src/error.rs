use std::path::PathBuf;

use thiserror::Error;

/// Everything that can go wrong in the synthesis pipeline.
///
/// Variants split into domain failures (a pose that cannot be reached, a
/// singular Jacobian, an empty feasible set) and configuration/IO failures.
/// [`Error::is_domain`] is what the command-line front end uses to pick its
/// exit status.
#[derive(Debug, Error)]
pub enum Error {
    #[error("derived segment {name} is not positive ({value} mm)")]
    NonPositiveComposite { name: &'static str, value: f64 },

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("closure solver did not converge after {iterations} iterations (residual {residual:.3e} mm)")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("loop Jacobian is singular at iteration {iteration}")]
    SingularIteration { iteration: usize },

    #[error("solution escaped the working branch ({jump_deg:.1} deg jump in an angle)")]
    BranchEscape { jump_deg: f64 },

    #[error("invalid sweep path: {0}")]
    InvalidPath(String),

    #[error("sweep failed at path index {index}: {source}")]
    Sweep {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("passive block J_Cp is singular (condition number {condition:.3e})")]
    PassiveSingular { condition: f64 },

    #[error("output block is singular (condition number {condition:.3e})")]
    OutputSingular { condition: f64 },

    #[error("torque ratio undefined: PIP torque is zero")]
    RatioUndefined,

    #[error("grasp stability indeterminate: a joint torque is below 1e-12 N mm")]
    Indeterminate,

    #[error("perturbed geometry for {parameter} does not close: {source}")]
    UnsolvablePerturbation {
        parameter: String,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid sensitivity request: {0}")]
    InvalidSensitivity(String),

    #[error("no feasible candidate: all {total} candidates were eliminated")]
    NoFeasibleCandidate { total: usize },

    #[error("no equilibrium found: {0}")]
    NoEquilibrium(String),

    #[error("simulation failed at step {step}: {source}")]
    Simulation {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid object: {0}")]
    InvalidObject(String),

    #[error("{path}:{line}: {message}")]
    Config {
        path: String,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    /// True for failures of the mechanism or the search itself, as opposed to
    /// bad input files or IO problems.
    pub fn is_domain(&self) -> bool {
        !matches!(self, Error::Config { .. } | Error::Io { .. } | Error::Csv { .. })
    }

    pub(crate) fn at_index(self, index: usize) -> Error {
        Error::Sweep {
            index,
            source: Box::new(self),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
