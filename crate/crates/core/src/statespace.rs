//! State-space extraction by elimination of zero-capacity nodes.
//!
//! With nodes permuted so that massless nodes `θ₀` come first and capacitive
//! nodes `θ_C` second, the DAE splits into
//!
//! ```text
//! 0       = K11 θ₀ + K12 θ_C + Kb1 b + f₀
//! C_C θ̇_C = K21 θ₀ + K22 θ_C + Kb2 b + f_C
//! ```
//!
//! Solving the first block row for `θ₀` and substituting gives
//!
//! ```text
//! A_s = C_C⁻¹ (K22 − K21 K11⁻¹ K12)
//! B_s = C_C⁻¹ [Kb2 − K21 K11⁻¹ Kb1,  −K21 K11⁻¹,  I]      (columns for b, f₀, f_C)
//! θ₀  = −K11⁻¹ (K12 θ_C + [Kb1  I  0] u)
//! ```
//!
//! so a massless output row has `C_s = −K11⁻¹K12` and `D_s = −K11⁻¹[Kb1 I 0]`.
//! Columns of `B_s` and `D_s` are kept only for flagged sources.

use crate::circuit::{expand_flagged, DaeSystem, SourceValues, ThermalCircuit};
use crate::error::{Error, Result};
use crate::linalg::{Lu, Matrix};
use crate::scalar::Scalar;

/// Conduction and source-coupling blocks split by capacity class.
#[derive(Clone, Debug, PartialEq)]
pub struct Partition<T> {
    /// Permuted position → original node index (massless first).
    pub permutation: Vec<usize>,
    pub massless: Vec<usize>,
    pub capacitive: Vec<usize>,
    pub k11: Matrix<T>,
    pub k12: Matrix<T>,
    pub k21: Matrix<T>,
    pub k22: Matrix<T>,
    pub kb1: Matrix<T>,
    pub kb2: Matrix<T>,
    /// Diagonal of `C_C`.
    pub cc: Vec<T>,
    pub temp_source_flags: Vec<bool>,
    pub flow_source_flags: Vec<bool>,
}

impl<T: Scalar> Partition<T> {
    fn factor_k11(&self, labels: Option<&[String]>) -> Result<Lu<T>> {
        Lu::factor(&self.k11).ok_or_else(|| Error::EliminationSingular {
            nodes: self
                .massless
                .iter()
                .map(|&j| labels.map_or_else(|| format!("#{j}"), |l| l[j].clone()))
                .collect(),
        })
    }
}

/// Stable split of nodes into capacity exactly zero and nonzero.
pub fn partition_capacities<T: Scalar>(dae: &DaeSystem<T>) -> Partition<T> {
    let n = dae.node_count();
    let (massless, capacitive): (Vec<usize>, Vec<usize>) = (0..n).partition(|&j| dae.capacities[j] == T::zero());
    let branches: Vec<usize> = (0..dae.branch_count()).collect();
    Partition {
        permutation: massless.iter().chain(&capacitive).copied().collect(),
        k11: dae.conduction.select(&massless, &massless),
        k12: dae.conduction.select(&massless, &capacitive),
        k21: dae.conduction.select(&capacitive, &massless),
        k22: dae.conduction.select(&capacitive, &capacitive),
        kb1: dae.source_coupling.select(&massless, &branches),
        kb2: dae.source_coupling.select(&capacitive, &branches),
        cc: capacitive.iter().map(|&j| dae.capacities[j]).collect(),
        temp_source_flags: dae.temp_source_flags.clone(),
        flow_source_flags: dae.flow_source_flags.clone(),
        massless,
        capacitive,
    }
}

/// Column of `u` in a [`StateSpace`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InputId {
    /// Temperature source on a branch, °C.
    BranchTemperature(usize),
    /// Heat-flow source at a node, W.
    NodeFlow(usize),
}

/// `θ̇_C = A θ_C + B u`, `y = C θ_C + D u`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateSpace<T> {
    pub a: Matrix<T>,
    pub b: Matrix<T>,
    pub c: Matrix<T>,
    pub d: Matrix<T>,
    /// Node index of each state.
    pub states: Vec<usize>,
    /// Flagged branches, then flagged massless nodes, then flagged capacitive nodes.
    pub inputs: Vec<InputId>,
    /// Output node indices, ascending.
    pub outputs: Vec<usize>,
    /// Capacity of each state, J/K. `A` is similar to a symmetric matrix under
    /// `diag(state_capacities)^½`.
    pub state_capacities: Vec<T>,
    pub state_labels: Vec<String>,
    pub input_labels: Vec<String>,
    pub output_labels: Vec<String>,
}

impl<T: Scalar> StateSpace<T> {
    /// Wraps raw matrices with generated labels and unit state capacities.
    pub fn from_matrices(a: Matrix<T>, b: Matrix<T>, c: Matrix<T>, d: Matrix<T>) -> Self {
        let n = a.nrows();
        let (m, p) = (b.ncols(), c.nrows());
        Self {
            a,
            b,
            c,
            d,
            states: (0..n).collect(),
            inputs: (0..m).map(InputId::NodeFlow).collect(),
            outputs: (0..p).collect(),
            state_capacities: vec![T::one(); n],
            state_labels: (1..=n).map(|i| format!("x{i}")).collect(),
            input_labels: (1..=m).map(|i| format!("u{i}")).collect(),
            output_labels: (1..=p).map(|i| format!("y{i}")).collect(),
        }
    }

    pub fn state_count(&self) -> usize {
        self.a.nrows()
    }

    pub fn input_count(&self) -> usize {
        self.b.ncols()
    }

    pub fn output_count(&self) -> usize {
        self.c.nrows()
    }

    /// Orders source magnitudes as the columns of `B`.
    pub fn input_vector(&self, sources: &SourceValues<T>, temp_flags: &[bool], flow_flags: &[bool]) -> Result<Vec<T>> {
        sources.check(temp_flags, flow_flags)?;
        let b = expand_flagged(temp_flags, &sources.branch_temps);
        let f = expand_flagged(flow_flags, &sources.node_flows);
        Ok(self
            .inputs
            .iter()
            .map(|id| match *id {
                InputId::BranchTemperature(k) => b[k],
                InputId::NodeFlow(j) => f[j],
            })
            .collect())
    }

    /// `y = C x + D u`.
    pub fn output(&self, x: &[T], u: &[T]) -> Vec<T> {
        let mut y = self.c.mul_vec(x);
        self.d.mul_vec_add(u, &mut y);
        y
    }
}

/// Which sign convention to use for the temperature-source block of `D_s`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FeedThrough {
    /// `D_s = −K11⁻¹[Kb1 I 0]`, the form obtained by solving the massless rows.
    #[default]
    Consistent,
    /// `D_s = −K11⁻¹[−Kb1 I 0]`. Wrong for temperature sources; kept so the
    /// discrepancy can be demonstrated against the reference solver.
    NegatedTemperatureBlock,
}

pub fn extract_state_space<T: Scalar>(dae: &DaeSystem<T>, circuit: &ThermalCircuit<T>) -> Result<StateSpace<T>> {
    extract_state_space_with(dae, circuit, FeedThrough::Consistent)
}

pub fn extract_state_space_with<T: Scalar>(
    dae: &DaeSystem<T>,
    circuit: &ThermalCircuit<T>,
    feed_through: FeedThrough,
) -> Result<StateSpace<T>> {
    let n = dae.node_count();
    if circuit.node_count() != n || circuit.branch_count() != dae.branch_count() {
        return Err(Error::Dimension { what: "circuit nodes", expected: n, found: circuit.node_count() });
    }
    let p = partition_capacities(dae);
    if p.capacitive.is_empty() {
        return Err(Error::NoStates);
    }
    let n0 = p.massless.len();
    let nc = p.capacitive.len();

    let flagged_branches: Vec<usize> = (0..dae.branch_count()).filter(|&k| dae.temp_source_flags[k]).collect();
    let flagged_massless: Vec<usize> = (0..n0).filter(|&i| dae.flow_source_flags[p.massless[i]]).collect();
    let flagged_capacitive: Vec<usize> = (0..nc).filter(|&i| dae.flow_source_flags[p.capacitive[i]]).collect();

    let kb1 = p.kb1.select(&(0..n0).collect::<Vec<_>>(), &flagged_branches);
    let kb2 = p.kb2.select(&(0..nc).collect::<Vec<_>>(), &flagged_branches);
    let i11 = Matrix::<T>::identity(n0).select(&(0..n0).collect::<Vec<_>>(), &flagged_massless);
    let i22 = Matrix::<T>::identity(nc).select(&(0..nc).collect::<Vec<_>>(), &flagged_capacitive);

    // K11⁻¹ applied to K12, Kb1 and I11 from one factorization
    let (x12, xb1, x11) = if n0 > 0 {
        let lu = p.factor_k11(Some(&circuit.node_labels))?;
        (lu.solve_matrix(&p.k12), lu.solve_matrix(&kb1), lu.solve_matrix(&i11))
    } else {
        (Matrix::zeros(0, nc), Matrix::zeros(0, flagged_branches.len()), Matrix::zeros(0, 0))
    };

    let a = p.k22.sub(&p.k21.matmul(&x12)).div_rows(&p.cc);
    let b_temp = kb2.sub(&p.k21.matmul(&xb1));
    let b_mass = p.k21.matmul(&x11).neg();
    let b = Matrix::hstack(&[&b_temp, &b_mass, &i22]).div_rows(&p.cc);

    let mut inputs: Vec<InputId> = flagged_branches.iter().map(|&k| InputId::BranchTemperature(k)).collect();
    inputs.extend(flagged_massless.iter().map(|&i| InputId::NodeFlow(p.massless[i])));
    inputs.extend(flagged_capacitive.iter().map(|&i| InputId::NodeFlow(p.capacitive[i])));
    let input_labels = inputs
        .iter()
        .map(|id| match *id {
            InputId::BranchTemperature(k) => circuit.branch_labels[k].clone(),
            InputId::NodeFlow(j) => circuit.node_labels[j].clone(),
        })
        .collect();

    let temp_sign = match feed_through {
        FeedThrough::Consistent => T::one(),
        FeedThrough::NegatedTemperatureBlock => -T::one(),
    };
    let d_mass = Matrix::hstack(&[&xb1.scale(temp_sign), &x11, &Matrix::zeros(n0, flagged_capacitive.len())]).neg();
    let c_mass = x12.neg();

    let outputs: Vec<usize> = (0..n).filter(|&j| circuit.output_flags[j]).collect();
    let mut c = Matrix::zeros(outputs.len(), nc);
    let mut d = Matrix::zeros(outputs.len(), inputs.len());
    for (r, &node) in outputs.iter().enumerate() {
        if let Some(s) = p.capacitive.iter().position(|&j| j == node) {
            c[(r, s)] = T::one();
        } else {
            let i = p.massless.iter().position(|&j| j == node).expect("node is massless");
            for s in 0..nc {
                c[(r, s)] = c_mass[(i, s)];
            }
            for k in 0..inputs.len() {
                d[(r, k)] = d_mass[(i, k)];
            }
        }
    }

    Ok(StateSpace {
        a,
        b,
        c,
        d,
        state_labels: p.capacitive.iter().map(|&j| circuit.node_labels[j].clone()).collect(),
        output_labels: outputs.iter().map(|&j| circuit.node_labels[j].clone()).collect(),
        states: p.capacitive.clone(),
        inputs,
        outputs,
        state_capacities: p.cc.clone(),
        input_labels,
    })
}

/// Massless-node temperatures `θ₀ = −K11⁻¹(K12 θ_C + Kb1 b + f₀)`.
pub fn reconstruct_massless<T: Scalar>(partition: &Partition<T>, theta_c: &[T], inputs: &SourceValues<T>) -> Result<Vec<T>> {
    if theta_c.len() != partition.capacitive.len() {
        return Err(Error::Dimension {
            what: "capacitive temperatures",
            expected: partition.capacitive.len(),
            found: theta_c.len(),
        });
    }
    inputs.check(&partition.temp_source_flags, &partition.flow_source_flags)?;
    if partition.massless.is_empty() {
        return Ok(Vec::new());
    }
    let lu = partition.factor_k11(None)?;
    let b = expand_flagged(&partition.temp_source_flags, &inputs.branch_temps);
    let f = expand_flagged(&partition.flow_source_flags, &inputs.node_flows);
    let mut rhs: Vec<T> = partition.massless.iter().map(|&j| f[j]).collect();
    partition.k12.mul_vec_add(theta_c, &mut rhs);
    partition.kb1.mul_vec_add(&b, &mut rhs);
    Ok(lu.solve(&rhs).into_iter().map(|v| -v).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_dae, CircuitBuilder};
    use num_rational::Ratio;

    type Q = Ratio<i64>;

    fn q(n: i64) -> Q {
        Q::from_integer(n)
    }

    /// reference →g1→ node1 (massless) →g2→ node2 (capacity c2)
    fn chain(g1: Q, g2: Q, c2: Q, output_massless: bool) -> ThermalCircuit<Q> {
        let mut b = CircuitBuilder::new();
        let n1 = b.node("n1", q(0));
        let n2 = b.node("n2", c2);
        let q1 = b.branch("q1", None, Some(n1), g1);
        b.branch("q2", Some(n1), Some(n2), g2);
        b.temperature_source(q1);
        if output_massless {
            b.output(n1);
        }
        b.output(n2);
        b.build()
    }

    #[test]
    fn partition_is_stable() {
        let c = ThermalCircuit::from_arrays(
            &[vec![1, 0, 0, 0], vec![-1, 1, 0, 0], vec![0, -1, 1, 0], vec![0, 0, -1, 1]],
            vec![q(1); 4],
            vec![q(0), q(3), q(0), q(4)],
            vec![true, false, false, false],
            vec![false; 4],
            vec![false; 4],
        );
        let p = partition_capacities(&build_dae(&c).unwrap());
        assert_eq!(p.massless, vec![0, 2]);
        assert_eq!(p.capacitive, vec![1, 3]);
        assert_eq!(p.permutation, vec![0, 2, 1, 3]);
        assert_eq!(p.k12, p.k21.transpose());
        assert_eq!(p.cc, vec![q(3), q(4)]);
    }

    #[test]
    fn all_capacitive_has_empty_massless_blocks() {
        let c = chain(q(1), q(1), q(1), false);
        let mut c = c;
        c.capacities[0] = q(2);
        let p = partition_capacities(&build_dae(&c).unwrap());
        assert!(p.massless.is_empty());
        assert_eq!((p.k11.nrows(), p.k12.nrows(), p.k21.ncols()), (0, 0, 0));
    }

    #[test]
    fn all_massless_has_no_states() {
        let mut c = chain(q(1), q(1), q(1), false);
        c.capacities[1] = q(0);
        let dae = build_dae(&c).unwrap();
        assert_eq!(partition_capacities(&dae).capacitive.len(), 0);
        assert_eq!(extract_state_space(&dae, &c), Err(Error::NoStates));
    }

    #[test]
    fn chain_eliminates_to_series_conductance() {
        let (g1, g2, c2) = (q(2), q(3), q(10));
        let c = chain(g1, g2, c2, true);
        let dae = build_dae(&c).unwrap();
        let ss = extract_state_space(&dae, &c).unwrap();
        let series = g1 * g2 / (g1 + g2);
        assert_eq!(ss.a, Matrix::from_rows(&[vec![-series / c2]]));
        assert_eq!(ss.b, Matrix::from_rows(&[vec![series / c2]]));
        assert_eq!(ss.inputs, vec![InputId::BranchTemperature(0)]);
        assert_eq!(ss.outputs, vec![0, 1]);
        // massless output row, then unit selector with zero feed-through
        assert_eq!(ss.c, Matrix::from_rows(&[vec![g2 / (g1 + g2)], vec![q(1)]]));
        assert_eq!(ss.d, Matrix::from_rows(&[vec![g1 / (g1 + g2)], vec![q(0)]]));
    }

    #[test]
    fn divider_steady_output() {
        let (g1, g2) = (q(4), q(1));
        let c = chain(g1, g2, q(7), true);
        let dae = build_dae(&c).unwrap();
        let ss = extract_state_space(&dae, &c).unwrap();
        // steady state: θ_C = T; reconstruct at the massless node with a
        // disconnected capacitive node the divider gives g1/(g1+g2)·T
        let t = q(20);
        let y = ss.output(&[q(0)], &[t]);
        assert_eq!(y[0], g1 / (g1 + g2) * t);
        let p = partition_capacities(&dae);
        let th0 = reconstruct_massless(&p, &[q(0)], &SourceValues { branch_temps: vec![t], node_flows: vec![] }).unwrap();
        assert_eq!(th0, vec![g1 / (g1 + g2) * t]);
    }

    #[test]
    fn reconstruct_zero_inputs_zero_states() {
        let c = chain(q(2), q(5), q(1), false);
        let p = partition_capacities(&build_dae(&c).unwrap());
        let th0 = reconstruct_massless(&p, &[q(0)], &SourceValues::zeros(1, 0)).unwrap();
        assert_eq!(th0, vec![q(0)]);
    }

    #[test]
    fn negated_block_changes_only_temperature_columns() {
        let c = chain(q(2), q(3), q(1), true);
        let dae = build_dae(&c).unwrap();
        let good = extract_state_space(&dae, &c).unwrap();
        let bad = extract_state_space_with(&dae, &c, FeedThrough::NegatedTemperatureBlock).unwrap();
        assert_eq!(good.a, bad.a);
        assert_eq!(good.c, bad.c);
        assert_eq!(good.d[(0, 0)], -bad.d[(0, 0)]);
    }

    #[test]
    fn unanchored_massless_is_singular() {
        // massless n1 hangs from capacitive n2 only through n3, also massless, with
        // n1 to n3 isolated from everything else
        let c = ThermalCircuit::from_arrays(
            &[vec![1, 0, 0], vec![0, -1, 1]],
            vec![q(1), q(1)],
            vec![q(1), q(0), q(0)],
            vec![false, false],
            vec![false; 3],
            vec![false; 3],
        );
        let dae = build_dae(&c).unwrap();
        assert!(matches!(extract_state_space(&dae, &c), Err(Error::EliminationSingular { .. })));
    }

    #[test]
    fn flow_inputs_ordered_massless_then_capacitive() {
        let mut c = chain(q(1), q(1), q(2), false);
        c.flow_source_flags = vec![true, true];
        let dae = build_dae(&c).unwrap();
        let ss = extract_state_space(&dae, &c).unwrap();
        assert_eq!(ss.inputs, vec![InputId::BranchTemperature(0), InputId::NodeFlow(0), InputId::NodeFlow(1)]);
        // flow into the massless node splits by conductance: half reaches n2
        assert_eq!(ss.b[(0, 1)], Q::new(1, 2) / q(2));
        assert_eq!(ss.b[(0, 2)], Q::new(1, 2));
        let u = ss
            .input_vector(&SourceValues { branch_temps: vec![q(5)], node_flows: vec![q(6), q(7)] }, &c.temp_source_flags, &c.flow_source_flags)
            .unwrap();
        assert_eq!(u, vec![q(5), q(6), q(7)]);
    }
}
