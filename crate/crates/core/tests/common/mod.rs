#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thermocircuit::{Channel, Circuit, CircuitBuilder, InputId, Model, Series, TimeSeries};

pub const MAX_NODES: usize = 12;
pub const MAX_BRANCHES: usize = 20;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

/// Connected circuit with at least one capacitive node and at least one
/// branch to the reference, so every principal block of the conduction
/// matrix is nonsingular. Reference branches enter their node. Every node is
/// an output.
pub fn random_circuit(rng: &mut ChaCha8Rng) -> Circuit {
    let n = rng.random_range(1..=MAX_NODES);
    let mut b = CircuitBuilder::new();
    let mut caps: Vec<f64> =
        (0..n).map(|_| if rng.random_bool(0.4) { 0.0 } else { log_uniform(rng, 1e3, 1e5) }).collect();
    if caps.iter().all(|&c| c == 0.0) {
        let j = rng.random_range(0..n);
        caps[j] = log_uniform(rng, 1e3, 1e5);
    }
    let nodes: Vec<usize> = caps.iter().enumerate().map(|(j, &c)| b.node(format!("n{}", j + 1), c)).collect();
    let mut branches = 0;
    let mut label = || {
        branches += 1;
        format!("q{branches}")
    };
    for i in 1..n {
        let parent = nodes[rng.random_range(0..i)];
        let g = log_uniform(rng, 0.5, 50.0);
        let (from, to) = if rng.random_bool(0.5) { (parent, nodes[i]) } else { (nodes[i], parent) };
        b.branch(label(), Some(from), Some(to), g);
    }
    let budget = MAX_BRANCHES - (n - 1);
    let refs = rng.random_range(1..=budget.min(3));
    for r in 0..refs {
        let j = nodes[rng.random_range(0..n)];
        let q = b.branch(label(), None, Some(j), log_uniform(rng, 0.5, 50.0));
        if r == 0 || rng.random_bool(0.5) {
            b.temperature_source(q);
        }
    }
    if n > 1 {
        let extra = rng.random_range(0..=(budget - refs).min(6));
        for _ in 0..extra {
            let i = rng.random_range(0..n);
            let mut j = rng.random_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            b.branch(label(), Some(nodes[i]), Some(nodes[j]), log_uniform(rng, 0.5, 50.0));
        }
    }
    for &j in &nodes {
        if rng.random_bool(0.3) {
            b.flow_source(j);
        }
        b.output(j);
    }
    b.build()
}

/// Piecewise-constant channel: holds a value, jumping with probability 0.05
/// per sample.
fn piecewise(rng: &mut ChaCha8Rng, steps: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut v = rng.random_range(lo..hi);
    (0..steps)
        .map(|_| {
            if rng.random_bool(0.05) {
                v = rng.random_range(lo..hi);
            }
            v
        })
        .collect()
}

/// One channel per model input: temperatures in [−10, 30) °C, flows in
/// [0, 500) W.
pub fn random_inputs(rng: &mut ChaCha8Rng, model: &Model, steps: usize, dt: f64) -> Series {
    let channels = model
        .input_labels
        .iter()
        .zip(&model.inputs)
        .map(|(l, id)| {
            let values = match id {
                InputId::BranchTemperature(_) => piecewise(rng, steps, -10.0, 30.0),
                InputId::NodeFlow(_) => piecewise(rng, steps, 0.0, 500.0),
            };
            Channel::new(l.clone(), values)
        })
        .collect();
    TimeSeries::new(0.0, dt, channels).expect("generated series is valid")
}

/// `max |a − b| / max |b|` over all samples of the selected rows.
pub fn relative_deviation(a: &[Vec<f64>], b: &[Vec<f64>], rows: &[usize]) -> f64 {
    let mut diff = 0.0f64;
    let mut scale = 0.0f64;
    for &r in rows {
        for (x, y) in a[r].iter().zip(&b[r]) {
            diff = diff.max((x - y).abs());
            scale = scale.max(y.abs());
        }
    }
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

pub struct Deviation {
    pub capacitive: f64,
    pub massless: f64,
}

/// Integrates the extracted model with implicit Euler at the oracle's
/// micro-step and compares every node against the reference solver.
pub fn deviation_from_oracle(circuit: &Circuit, inputs: &Series, feed: thermocircuit::FeedThrough) -> Deviation {
    use thermocircuit::{build_dae, dae_reference_solve, extract_state_space_with, integrate, IntegratorConfig, Method};
    use thermocircuit::simulator::ORACLE_SUBSTEPS;
    let dae = build_dae(circuit).unwrap();
    let model = extract_state_space_with(&dae, circuit, feed).unwrap();
    let step = inputs.dt() / ORACLE_SUBSTEPS as f64;
    let traj = integrate(&model, inputs, &IntegratorConfig::new(Method::ImplicitEuler, step)).unwrap();
    let reference = dae_reference_solve(&dae, circuit, inputs, None).unwrap();
    // outputs are every node, in node order
    assert_eq!(model.outputs, (0..circuit.node_count()).collect::<Vec<_>>());
    let (cap, mass): (Vec<usize>, Vec<usize>) = (0..circuit.node_count()).partition(|&j| circuit.capacities[j] != 0.0);
    Deviation {
        capacitive: relative_deviation(&traj.values, &reference.values, &cap),
        massless: relative_deviation(&traj.values, &reference.values, &mass),
    }
}
