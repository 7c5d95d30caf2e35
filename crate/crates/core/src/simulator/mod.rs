//! Steady state, time integration and spectral analysis of extracted models.

mod reference;
mod series;

pub use reference::{dae_reference_solve, dae_reference_solve_with, ORACLE_SUBSTEPS};
pub use series::{Channel, TimeSeries, Trajectory};

use std::fmt;
use std::str::FromStr;

use crate::circuit::{DaeSystem, SourceValues};
use crate::error::{Error, Result};
use crate::linalg::{expm, symmetric_eigenvalues, Lu, Matrix};
use crate::scalar::{Real, Scalar};
use crate::statespace::StateSpace;

/// Relative tolerance for the symmetry of `C_C^½ A_s C_C^-½`.
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Method {
    ExplicitEuler,
    ImplicitEuler,
    #[default]
    ExactZoh,
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "explicit-euler" => Ok(Method::ExplicitEuler),
            "implicit-euler" => Ok(Method::ImplicitEuler),
            "exact-zoh" => Ok(Method::ExactZoh),
            other => Err(format!("unknown method `{other}` (expected explicit-euler, implicit-euler or exact-zoh)")),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ExplicitEuler => "explicit-euler",
            Method::ImplicitEuler => "implicit-euler",
            Method::ExactZoh => "exact-zoh",
        })
    }
}

/// How input samples are held between sample times when the simulation step
/// is finer than the sampling interval.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum InputHold {
    #[default]
    ZeroOrder,
    /// Each sub-step uses the value interpolated at its start.
    Linear,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegratorConfig<T> {
    pub method: Method,
    /// Simulation step, s. Must divide the input sampling interval.
    pub step: T,
    /// `θ_C(0)`; `None` starts from steady state under the first input sample.
    pub initial_state: Option<Vec<T>>,
    pub hold: InputHold,
    /// Run explicit Euler even when the step exceeds the stability limit.
    pub allow_unstable: bool,
    pub record_states: bool,
}

impl<T: Real> IntegratorConfig<T> {
    pub fn new(method: Method, step: T) -> Self {
        Self { method, step, initial_state: None, hold: InputHold::ZeroOrder, allow_unstable: false, record_states: false }
    }

    pub fn with_initial_state(mut self, x0: Vec<T>) -> Self {
        self.initial_state = Some(x0);
        self
    }

    pub fn with_hold(mut self, hold: InputHold) -> Self {
        self.hold = hold;
        self
    }

    pub fn recording_states(mut self) -> Self {
        self.record_states = true;
        self
    }

    pub fn allowing_unstable(mut self) -> Self {
        self.allow_unstable = true;
        self
    }
}

/// Solves `AᵀGA θ = AᵀG b + f`.
pub fn steady_state<T: Scalar>(dae: &DaeSystem<T>, sources: &SourceValues<T>) -> Result<Vec<T>> {
    let rhs = dae.forcing(sources)?;
    let lu = Lu::factor(&dae.conduction.neg()).ok_or(Error::SingularConduction)?;
    Ok(lu.solve(&rhs))
}

/// Eigenvalues of `A_s`, ascending, via the symmetric similarity transform
/// `C_C^½ A_s C_C^-½`.
pub fn state_eigenvalues<T: Real>(ss: &StateSpace<T>) -> Result<Vec<T>> {
    let n = ss.state_count();
    let root: Vec<T> = ss.state_capacities.iter().map(|c| c.sqrt()).collect();
    let mut s = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            s[(i, j)] = root[i] * ss.a[(i, j)] / root[j];
        }
    }
    let asym = s.asymmetry().unwrap_or(T::zero());
    if asym > T::lit(SYMMETRY_TOLERANCE) * s.max_abs() {
        return Err(Error::NotSymmetrizable);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let m = (s[(i, j)] + s[(j, i)]) / T::lit(2.0);
            s[(i, j)] = m;
            s[(j, i)] = m;
        }
    }
    Ok(symmetric_eigenvalues(&s))
}

/// Largest explicit-Euler step, `2 / max|λ(A_s)|`, s. Infinite for a zero spectrum.
pub fn stability_limit<T: Real>(ss: &StateSpace<T>) -> Result<T> {
    let eig = state_eigenvalues(ss)?;
    let max = eig.iter().fold(T::zero(), |m, l| m.max(l.abs()));
    Ok(if max == T::zero() { T::infinity() } else { T::lit(2.0) / max })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenReport<T> {
    /// Ascending (fastest decay first), 1/s.
    pub eigenvalues: Vec<T>,
    /// `−1/λ` per eigenvalue, s.
    pub time_constants: Vec<T>,
    /// Largest time constant, s.
    pub dominant_time_constant: T,
    /// `max|λ| / min|λ|`.
    pub stiffness_ratio: T,
}

pub fn eigen_report<T: Real>(ss: &StateSpace<T>) -> Result<EigenReport<T>> {
    let eigenvalues = state_eigenvalues(ss)?;
    let time_constants: Vec<T> =
        eigenvalues.iter().map(|&l| if l == T::zero() { T::infinity() } else { -T::one() / l }).collect();
    let dominant_time_constant = time_constants.iter().fold(T::zero(), |m, &t| m.max(t));
    let (lo, hi) = eigenvalues
        .iter()
        .fold((T::infinity(), T::zero()), |(lo, hi), l| (lo.min(l.abs()), hi.max(l.abs())));
    let stiffness_ratio = if eigenvalues.is_empty() {
        T::one()
    } else if lo == T::zero() {
        T::infinity()
    } else {
        hi / lo
    };
    Ok(EigenReport { eigenvalues, time_constants, dominant_time_constant, stiffness_ratio })
}

impl<T: Real> fmt::Display for EigenReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "states: {}", self.eigenvalues.len())?;
        writeln!(f, "dominant time constant (s): {:e}", self.dominant_time_constant.to_f64_lossy())?;
        writeln!(f, "stiffness ratio: {:e}", self.stiffness_ratio.to_f64_lossy())?;
        writeln!(f, "eigenvalue (1/s),time constant (s)")?;
        for (l, t) in self.eigenvalues.iter().zip(&self.time_constants) {
            writeln!(f, "{:e},{:e}", l.to_f64_lossy(), t.to_f64_lossy())?;
        }
        Ok(())
    }
}

/// One-step map `x⁺ = Φ x + Γ u` for a fixed step.
#[derive(Clone, Debug, PartialEq)]
pub struct Discretization<T> {
    pub phi: Matrix<T>,
    pub gamma: Matrix<T>,
}

pub fn discretize<T: Real>(ss: &StateSpace<T>, method: Method, step: T) -> Result<Discretization<T>> {
    let n = ss.state_count();
    let m = ss.input_count();
    Ok(match method {
        Method::ExplicitEuler => Discretization {
            phi: Matrix::identity(n).add(&ss.a.scale(step)),
            gamma: ss.b.scale(step),
        },
        Method::ImplicitEuler => {
            let lu = Lu::factor(&Matrix::identity(n).sub(&ss.a.scale(step))).ok_or(Error::SingularStateMatrix)?;
            Discretization {
                phi: lu.solve_matrix(&Matrix::identity(n)),
                gamma: lu.solve_matrix(&ss.b.scale(step)),
            }
        }
        Method::ExactZoh => {
            // exp([[A, B], [0, 0]] h) = [[Φ, Γ], [0, I]]
            let mut aug = Matrix::zeros(n + m, n + m);
            for i in 0..n {
                for j in 0..n {
                    aug[(i, j)] = ss.a[(i, j)] * step;
                }
                for j in 0..m {
                    aug[(i, n + j)] = ss.b[(i, j)] * step;
                }
            }
            let e = expm(&aug);
            let rows: Vec<usize> = (0..n).collect();
            Discretization {
                phi: e.select(&rows, &rows),
                gamma: e.select(&rows, &(n..n + m).collect::<Vec<_>>()),
            }
        }
    })
}

/// Steady state of the state equation under a constant input.
pub fn state_steady_state<T: Real>(ss: &StateSpace<T>, u: &[T]) -> Result<Vec<T>> {
    let lu = Lu::factor(&ss.a).ok_or(Error::SingularStateMatrix)?;
    Ok(lu.solve(&ss.b.mul_vec(u)).into_iter().map(|v| -v).collect())
}

pub(crate) fn substeps<T: Real>(sample: T, step: T) -> Result<usize> {
    if !(step > T::zero()) || !step.is_finite() {
        return Err(Error::Config(format!("step must be positive, got {}", step)));
    }
    let ratio = sample / step;
    let m = ratio.round();
    if m < T::one() || (ratio - m).abs() > T::lit(1e-9) * ratio {
        return Err(Error::Config(format!(
            "step {} s does not divide the input sampling interval {} s",
            step, sample
        )));
    }
    Ok(m.to_usize().expect("substep count fits usize"))
}

/// Integrates the state equation over the input grid. One trajectory sample
/// is produced per input sample; the outputs at sample `k` use `u_k`.
pub fn integrate<T: Real>(ss: &StateSpace<T>, inputs: &TimeSeries<T>, cfg: &IntegratorConfig<T>) -> Result<Trajectory<T>> {
    let bound: Vec<&[T]> = ss
        .input_labels
        .iter()
        .map(|l| inputs.channel(l).ok_or_else(|| Error::InputBinding(l.clone())))
        .collect::<Result<_>>()?;
    let len = inputs.len();
    let sub = substeps(inputs.dt(), cfg.step)?;
    if cfg.method == Method::ExplicitEuler && !cfg.allow_unstable {
        let limit = stability_limit(ss)?;
        if !(cfg.step < limit) {
            return Err(Error::Unstable { step: cfg.step.to_f64_lossy(), limit: limit.to_f64_lossy() });
        }
    }
    let disc = discretize(ss, cfg.method, cfg.step)?;
    let sample = |k: usize| -> Vec<T> { bound.iter().map(|c| c[k]).collect() };

    let n = ss.state_count();
    let mut x = match &cfg.initial_state {
        Some(x0) if x0.len() != n => return Err(Error::Dimension { what: "initial state", expected: n, found: x0.len() }),
        Some(x0) => x0.clone(),
        None if len == 0 => vec![T::zero(); n],
        None => state_steady_state(ss, &sample(0))?,
    };

    let mut outputs = vec![Vec::with_capacity(len); ss.output_count()];
    let mut states = cfg.record_states.then(|| vec![Vec::with_capacity(len); n]);
    let mut next = vec![T::zero(); n];
    let mut u = vec![T::zero(); ss.input_count()];
    for k in 0..len {
        let uk = sample(k);
        for (o, y) in outputs.iter_mut().zip(ss.output(&x, &uk)) {
            o.push(y);
        }
        if let Some(s) = states.as_mut() {
            for (s, &v) in s.iter_mut().zip(&x) {
                s.push(v);
            }
        }
        if k + 1 == len {
            break;
        }
        let uk1 = (cfg.hold == InputHold::Linear).then(|| sample(k + 1));
        for j in 0..sub {
            match &uk1 {
                None => u.copy_from_slice(&uk),
                Some(u1) => {
                    let w = T::from(j).expect("substep index") / T::from(sub).expect("substep count");
                    for ((ui, &a), &b) in u.iter_mut().zip(&uk).zip(u1) {
                        *ui = a + (b - a) * w;
                    }
                }
            }
            next.iter_mut().for_each(|v| *v = T::zero());
            disc.phi.mul_vec_add(&x, &mut next);
            disc.gamma.mul_vec_add(&u, &mut next);
            std::mem::swap(&mut x, &mut next);
        }
    }

    Ok(Trajectory {
        times: (0..len).map(|k| inputs.time(k)).collect(),
        labels: ss.output_labels.clone(),
        values: outputs,
        state_labels: ss.state_labels.clone(),
        states,
    })
}
