//! Thermal networks of buildings as linear circuits: description, assembly
//! of elementary circuits, reduction to a state-space model and simulation.
//!
//! The pipeline is
//!
//! 1. describe each building element as a [`ThermalCircuit`] (by hand, with
//!    [`CircuitBuilder`], or with the factories in [`elements`]);
//! 2. merge them with [`assemble`] (or [`CircuitSet`]);
//! 3. form the node equations with [`build_dae`] and eliminate massless nodes
//!    with [`extract_state_space`];
//! 4. simulate with [`integrate`].
//!
//! Structural code is generic over [`Scalar`], so it runs on exact rationals
//! as well as floats; numerical code needs [`Real`].

pub mod assembler;
pub mod circuit;
pub mod demo;
pub mod elements;
pub mod error;
pub mod linalg;
pub mod scalar;
pub mod simulator;
pub mod statespace;
pub mod tables;

pub use assembler::{assemble, assemble_with_plan, plan_assembly, Assembly, AssemblyPlan, CircuitSet, ConnectionSet, DisassemblyMatrix, NodeRef};
pub use circuit::{
    build_dae, build_kkt, check_well_posed, validate, CircuitBuilder, DaeSystem, Incidence, KktSystem, Severity, SourceValues,
    ThermalCircuit, ValidationReport, Violation, ViolationKind,
};
pub use error::{Error, Result};
pub use linalg::Matrix;
pub use scalar::{Real, Scalar};
pub use simulator::{
    dae_reference_solve, eigen_report, integrate, stability_limit, steady_state, Channel, EigenReport, InputHold,
    IntegratorConfig, Method, TimeSeries, Trajectory,
};
pub use statespace::{extract_state_space, extract_state_space_with, reconstruct_massless, FeedThrough, InputId, StateSpace};

/// Exact rational scalar for structural computations.
pub type Rational = num_rational::Ratio<i128>;

pub type Circuit = ThermalCircuit<f64>;
pub type Circuit32 = ThermalCircuit<f32>;
pub type RationalCircuit = ThermalCircuit<Rational>;
pub type Model = StateSpace<f64>;
pub type Model32 = StateSpace<f32>;
pub type RationalModel = StateSpace<Rational>;
pub type Series = TimeSeries<f64>;
pub type Dae = DaeSystem<f64>;
