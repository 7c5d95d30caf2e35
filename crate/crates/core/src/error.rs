use thiserror::Error;

use crate::circuit::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("circuit_core: invalid circuit: {0}")]
    InvalidCircuit(ValidationReport),

    #[error("assembler: connection {connection}: {reason}")]
    Connection { connection: usize, reason: String },

    #[error("assembler: branch `{branch}` (circuit {circuit}, local branch {local}) would join a node to itself")]
    SelfLoop { circuit: usize, local: usize, branch: String },

    #[error("statespace: massless nodes {nodes:?} are not resistively anchored; K11 is singular")]
    EliminationSingular { nodes: Vec<String> },

    #[error("statespace: model has no capacitive nodes")]
    NoStates,

    #[error("simulator: conduction matrix is singular (floating component without reference)")]
    SingularConduction,

    #[error("simulator: state matrix is singular; no steady state for the initial condition")]
    SingularStateMatrix,

    #[error("simulator: no input channel named `{0}`")]
    InputBinding(String),

    #[error("simulator: {what}: expected length {expected}, got {found}")]
    Dimension { what: &'static str, expected: usize, found: usize },

    #[error("simulator: explicit-Euler step {step} s exceeds the stability limit {limit} s")]
    Unstable { step: f64, limit: f64 },

    #[error("simulator: state matrix is not similar to a symmetric matrix under the stored capacities")]
    NotSymmetrizable,

    #[error("simulator: invalid time series: {0}")]
    TimeSeries(String),

    #[error("simulator: invalid integrator configuration: {0}")]
    Config(String),

    #[error("element_library: {0}")]
    InvalidSpec(String),
}

impl Error {
    /// True for failures caused by time-step stability rather than model structure.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::Unstable { .. })
    }
}
