//! Direct integration of the full node system, independent of the state-space
//! extraction. Used to cross-check it.

use super::series::{TimeSeries, Trajectory};
use crate::circuit::{DaeSystem, SourceValues, ThermalCircuit};
use crate::error::{Error, Result};
use crate::linalg::Lu;
use crate::scalar::Real;

/// Implicit-Euler micro-steps per input sample.
pub const ORACLE_SUBSTEPS: usize = 64;

/// Integrates `C θ̇ = −AᵀGA θ + AᵀG b + f` for every node, reporting all node
/// temperatures at the input sample times.
///
/// Temperature-source branches bind to channels named by branch label,
/// flow-source nodes by node label. Inputs are held constant over each sample
/// interval. `theta0` gives the capacitive node temperatures at the first
/// sample (entries for massless nodes are ignored); `None` starts from steady
/// state under the first sample.
pub fn dae_reference_solve<T: Real>(
    dae: &DaeSystem<T>,
    circuit: &ThermalCircuit<T>,
    inputs: &TimeSeries<T>,
    theta0: Option<&[T]>,
) -> Result<Trajectory<T>> {
    dae_reference_solve_with(dae, circuit, inputs, theta0, ORACLE_SUBSTEPS)
}

pub fn dae_reference_solve_with<T: Real>(
    dae: &DaeSystem<T>,
    circuit: &ThermalCircuit<T>,
    inputs: &TimeSeries<T>,
    theta0: Option<&[T]>,
    substeps: usize,
) -> Result<Trajectory<T>> {
    let n = dae.node_count();
    if circuit.node_count() != n || circuit.branch_count() != dae.branch_count() {
        return Err(Error::Dimension { what: "circuit nodes", expected: n, found: circuit.node_count() });
    }
    if substeps == 0 {
        return Err(Error::Config("oracle needs at least one micro-step".into()));
    }
    let temp_channels = bind(inputs, &circuit.branch_labels, &dae.temp_source_flags)?;
    let flow_channels = bind(inputs, &circuit.node_labels, &dae.flow_source_flags)?;
    let sources_at = |k: usize| SourceValues {
        branch_temps: temp_channels.iter().map(|c| c[k]).collect(),
        node_flows: flow_channels.iter().map(|c| c[k]).collect(),
    };

    let massless: Vec<usize> = (0..n).filter(|&i| dae.capacities[i] == T::zero()).collect();
    let capacitive: Vec<usize> = (0..n).filter(|&i| dae.capacities[i] != T::zero()).collect();
    let neg_k = dae.conduction.neg();
    let massless_lu = if massless.is_empty() {
        None
    } else {
        Some(Lu::factor(&neg_k.select(&massless, &massless)).ok_or(Error::SingularConduction)?)
    };
    let coupling = dae.conduction.select(&massless, &capacitive);
    // massless rows of θ solved from K₀₀ θ₀ = −(K₀C θ_C + forcing₀)
    let settle = |theta: &mut [T], forcing: &[T]| {
        if let Some(lu) = &massless_lu {
            let tc: Vec<T> = capacitive.iter().map(|&i| theta[i]).collect();
            let mut rhs: Vec<T> = massless.iter().map(|&i| forcing[i]).collect();
            coupling.mul_vec_add(&tc, &mut rhs);
            for (&i, v) in massless.iter().zip(lu.solve(&rhs)) {
                theta[i] = v;
            }
        }
    };

    let len = inputs.len();
    let mut theta = match theta0 {
        Some(t) if t.len() != n => return Err(Error::Dimension { what: "initial node temperatures", expected: n, found: t.len() }),
        Some(t) => {
            let mut t = t.to_vec();
            if len > 0 {
                settle(&mut t, &dae.forcing(&sources_at(0))?);
            }
            t
        }
        None if len == 0 => vec![T::zero(); n],
        None => {
            let lu = Lu::factor(&neg_k).ok_or(Error::SingularConduction)?;
            lu.solve(&dae.forcing(&sources_at(0))?)
        }
    };

    // (C/h − K) θ⁺ = C/h θ + forcing; massless rows are purely algebraic
    let h = inputs.dt() / T::from(substeps).expect("substep count");
    let mut step_matrix = neg_k.clone();
    let mass_per_step: Vec<T> = dae.capacities.iter().map(|&c| c / h).collect();
    for i in 0..n {
        step_matrix[(i, i)] += mass_per_step[i];
    }
    let step_lu = Lu::factor(&step_matrix).ok_or(Error::SingularConduction)?;

    let mut values = vec![Vec::with_capacity(len); n];
    for k in 0..len {
        if k > 0 {
            let forcing = dae.forcing(&sources_at(k - 1))?;
            for _ in 0..substeps {
                let rhs: Vec<T> = (0..n).map(|i| mass_per_step[i] * theta[i] + forcing[i]).collect();
                theta = step_lu.solve(&rhs);
            }
            settle(&mut theta, &dae.forcing(&sources_at(k))?);
        }
        for (v, &t) in values.iter_mut().zip(&theta) {
            v.push(t);
        }
    }

    Ok(Trajectory {
        times: (0..len).map(|k| inputs.time(k)).collect(),
        labels: circuit.node_labels.clone(),
        values,
        state_labels: Vec::new(),
        states: None,
    })
}

fn bind<'a, T: Real>(inputs: &'a TimeSeries<T>, labels: &[String], flags: &[bool]) -> Result<Vec<&'a [T]>> {
    labels
        .iter()
        .zip(flags)
        .filter(|(_, &f)| f)
        .map(|(l, _)| inputs.channel(l).ok_or_else(|| Error::InputBinding(l.clone())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_dae, CircuitBuilder};
    use crate::simulator::Channel;

    #[test]
    fn single_rc_matches_implicit_euler_closed_form() {
        let (g, c, t, dt) = (1.0, 100.0, 5.0, 64.0);
        let mut b = CircuitBuilder::new();
        let n = b.node("room", c);
        let q = b.branch("T", None, Some(n), g);
        b.temperature_source(q);
        let tc = b.build();
        let dae = build_dae(&tc).unwrap();
        let series = TimeSeries::new(0.0, dt, vec![Channel::new("T", vec![t; 5])]).unwrap();
        let traj = dae_reference_solve(&dae, &tc, &series, Some(&[0.0])).unwrap();
        // implicit Euler with h = 1 s: x_{j+1} = (x_j c + g t) / (c + g)
        let r: f64 = c / (c + g);
        for k in 0..5 {
            let exact = t * (1.0 - r.powi(64 * k as i32));
            assert!((traj.values[0][k] - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn massless_divider_tracks_inputs() {
        let mut b = CircuitBuilder::new();
        let out = b.node("mid", 0.0);
        let q1 = b.branch("T1", None, Some(out), 1.0);
        let q2 = b.branch("T2", Some(out), None, 3.0);
        b.temperature_source(q1).temperature_source(q2);
        let tc = b.build();
        let dae = build_dae(&tc).unwrap();
        let series = TimeSeries::new(
            0.0,
            10.0,
            vec![Channel::new("T1", vec![0.0, 4.0, 8.0]), Channel::new("T2", vec![0.0, 0.0, 4.0])],
        )
        .unwrap();
        let traj = dae_reference_solve(&dae, &tc, &series, None).unwrap();
        // branch q2 leaves the node, so its source enters with reversed sign
        let expect = |t1: f64, t2: f64| (t1 - 3.0 * t2) / 4.0;
        assert!((traj.values[0][1] - expect(4.0, 0.0)).abs() < 1e-14);
        assert!((traj.values[0][2] - expect(8.0, 4.0)).abs() < 1e-14);
    }

    #[test]
    fn unbound_source_is_reported() {
        let mut b = CircuitBuilder::new();
        let n = b.node("room", 1.0);
        b.branch("q", None, Some(n), 1.0);
        b.flow_source(n);
        let tc = b.build();
        let series = TimeSeries::<f64>::empty(0.0, 1.0, 2).unwrap();
        let err = dae_reference_solve(&build_dae(&tc).unwrap(), &tc, &series, None).unwrap_err();
        assert_eq!(err, Error::InputBinding("room".into()));
    }
}
