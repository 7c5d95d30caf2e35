//! Thermal-circuit data model, structural validation and the KKT / DAE forms.
//!
//! A circuit is the six-array description `{A, G, b, C, f, y}`: an oriented
//! branch-by-node incidence matrix, branch conductances, branch temperature
//! source flags, node capacities, node flow source flags and node output flags.
//! A branch row with a single nonzero entry connects its node to the reference
//! environment; `+1` means the branch enters the node.
//!
//! Flags are indicators only. Source magnitudes are supplied separately as
//! [`SourceValues`] so that one circuit serves any number of input scenarios.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Oriented incidence matrix with entries in `{-1, 0, +1}` (rows = branches).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Incidence {
    branches: usize,
    nodes: usize,
    entries: Vec<i8>,
}

impl Incidence {
    pub fn zeros(branches: usize, nodes: usize) -> Self {
        Self { branches, nodes, entries: vec![0; branches * nodes] }
    }

    /// Panics on ragged rows.
    pub fn from_rows(rows: &[Vec<i8>], nodes: usize) -> Self {
        assert!(rows.iter().all(|r| r.len() == nodes), "ragged incidence rows");
        Self { branches: rows.len(), nodes, entries: rows.concat() }
    }

    pub fn branches(&self) -> usize {
        self.branches
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn get(&self, branch: usize, node: usize) -> i8 {
        self.entries[branch * self.nodes + node]
    }

    pub fn set(&mut self, branch: usize, node: usize, value: i8) {
        self.entries[branch * self.nodes + node] = value;
    }

    pub fn row(&self, branch: usize) -> &[i8] {
        &self.entries[branch * self.nodes..(branch + 1) * self.nodes]
    }

    /// Nonzero `(node, sign)` pairs of a branch row.
    pub fn nonzeros(&self, branch: usize) -> impl Iterator<Item = (usize, i8)> + '_ {
        self.row(branch).iter().enumerate().filter(|(_, &a)| a != 0).map(|(j, &a)| (j, a))
    }

    /// `(leaves, enters)` node of a well-formed branch row.
    pub fn endpoints(&self, branch: usize) -> (Option<usize>, Option<usize>) {
        let mut leaves = None;
        let mut enters = None;
        for (j, a) in self.nonzeros(branch) {
            if a < 0 {
                leaves = Some(j);
            } else {
                enters = Some(j);
            }
        }
        (leaves, enters)
    }

    pub fn to_matrix<T: Scalar>(&self) -> Matrix<T> {
        let mut m = Matrix::zeros(self.branches, self.nodes);
        for b in 0..self.branches {
            for (j, a) in self.nonzeros(b) {
                m[(b, j)] = signed(T::one(), a);
            }
        }
        m
    }
}

#[inline]
pub(crate) fn signed<T: Scalar>(value: T, sign: i8) -> T {
    match sign {
        1 => value,
        -1 => -value,
        0 => T::zero(),
        s => panic!("incidence entry {s} outside {{-1, 0, 1}}"),
    }
}

/// The `{A, G, b, C, f, y}` description of one thermal circuit.
#[derive(Clone, Debug, PartialEq)]
pub struct ThermalCircuit<T> {
    pub incidence: Incidence,
    /// W/K, one per branch.
    pub conductances: Vec<T>,
    /// J/K, one per node.
    pub capacities: Vec<T>,
    pub temp_source_flags: Vec<bool>,
    pub flow_source_flags: Vec<bool>,
    pub output_flags: Vec<bool>,
    pub branch_labels: Vec<String>,
    pub node_labels: Vec<String>,
}

impl<T: Scalar> ThermalCircuit<T> {
    /// Builds a circuit from raw arrays with generated labels `q1..` / `n1..`.
    pub fn from_arrays(
        incidence: &[Vec<i8>],
        conductances: Vec<T>,
        capacities: Vec<T>,
        temp_source_flags: Vec<bool>,
        flow_source_flags: Vec<bool>,
        output_flags: Vec<bool>,
    ) -> Self {
        let nodes = incidence.first().map_or(capacities.len(), Vec::len);
        let incidence = Incidence::from_rows(incidence, nodes);
        let branch_labels = (1..=incidence.branches()).map(|i| format!("q{i}")).collect();
        let node_labels = (1..=nodes).map(|i| format!("n{i}")).collect();
        Self {
            incidence,
            conductances,
            capacities,
            temp_source_flags,
            flow_source_flags,
            output_flags,
            branch_labels,
            node_labels,
        }
    }

    pub fn branch_count(&self) -> usize {
        self.incidence.branches()
    }

    pub fn node_count(&self) -> usize {
        self.incidence.nodes()
    }

    pub fn node_index(&self, label: &str) -> Option<usize> {
        self.node_labels.iter().position(|l| l == label)
    }

    pub fn branch_index(&self, label: &str) -> Option<usize> {
        self.branch_labels.iter().position(|l| l == label)
    }

    /// Number of nodes with nonzero capacity.
    pub fn capacitive_count(&self) -> usize {
        self.capacities.iter().filter(|&&c| c != T::zero()).count()
    }

    pub fn temp_source_count(&self) -> usize {
        self.temp_source_flags.iter().filter(|&&f| f).count()
    }

    pub fn flow_source_count(&self) -> usize {
        self.flow_source_flags.iter().filter(|&&f| f).count()
    }

    /// Copy with every node flagged as an output.
    pub fn with_all_outputs(&self) -> Self {
        let mut c = self.clone();
        c.output_flags = vec![true; c.node_count()];
        c
    }

    /// Renames every label to `prefix.label`, keeping labels unique across
    /// circuits that are assembled together.
    pub fn prefixed(mut self, prefix: &str) -> Self {
        for l in self.branch_labels.iter_mut().chain(self.node_labels.iter_mut()) {
            *l = format!("{prefix}.{l}");
        }
        self
    }
}

/// Incremental construction of a circuit by labelled nodes and branches.
#[derive(Clone, Debug, Default)]
pub struct CircuitBuilder<T> {
    nodes: Vec<(String, T)>,
    branches: Vec<(String, Option<usize>, Option<usize>, T)>,
    temp_sources: Vec<usize>,
    flow_sources: Vec<usize>,
    outputs: Vec<usize>,
}

impl<T: Scalar> CircuitBuilder<T> {
    pub fn new() -> Self {
        Self {
            nodes: Vec::new(),
            branches: Vec::new(),
            temp_sources: Vec::new(),
            flow_sources: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn node(&mut self, label: impl Into<String>, capacity: T) -> usize {
        self.nodes.push((label.into(), capacity));
        self.nodes.len() - 1
    }

    /// Adds a branch leaving `from` and entering `to`; `None` is the reference.
    pub fn branch(
        &mut self,
        label: impl Into<String>,
        from: Option<usize>,
        to: Option<usize>,
        conductance: T,
    ) -> usize {
        self.branches.push((label.into(), from, to, conductance));
        self.branches.len() - 1
    }

    pub fn temperature_source(&mut self, branch: usize) -> &mut Self {
        self.temp_sources.push(branch);
        self
    }

    pub fn flow_source(&mut self, node: usize) -> &mut Self {
        self.flow_sources.push(node);
        self
    }

    pub fn output(&mut self, node: usize) -> &mut Self {
        self.outputs.push(node);
        self
    }

    pub fn build(self) -> ThermalCircuit<T> {
        let n = self.nodes.len();
        let m = self.branches.len();
        let mut incidence = Incidence::zeros(m, n);
        for (b, (_, from, to, _)) in self.branches.iter().enumerate() {
            if let Some(j) = from {
                incidence.set(b, *j, -1);
            }
            if let Some(j) = to {
                incidence.set(b, *j, 1);
            }
        }
        let mut temp_source_flags = vec![false; m];
        for b in self.temp_sources {
            temp_source_flags[b] = true;
        }
        let mut flow_source_flags = vec![false; n];
        for j in self.flow_sources {
            flow_source_flags[j] = true;
        }
        let mut output_flags = vec![false; n];
        for j in self.outputs {
            output_flags[j] = true;
        }
        ThermalCircuit {
            incidence,
            conductances: self.branches.iter().map(|b| b.3).collect(),
            capacities: self.nodes.iter().map(|n| n.1).collect(),
            temp_source_flags,
            flow_source_flags,
            output_flags,
            branch_labels: self.branches.into_iter().map(|b| b.0).collect(),
            node_labels: self.nodes.into_iter().map(|n| n.0).collect(),
        }
    }
}

/// Source magnitudes: one temperature (°C) per flagged branch and one heat
/// flow (W) per flagged node, both in index order.
#[derive(Clone, Debug, PartialEq)]
pub struct SourceValues<T> {
    pub branch_temps: Vec<T>,
    pub node_flows: Vec<T>,
}

impl<T: Scalar> SourceValues<T> {
    pub fn zeros(temp_sources: usize, flow_sources: usize) -> Self {
        Self { branch_temps: vec![T::zero(); temp_sources], node_flows: vec![T::zero(); flow_sources] }
    }

    pub fn check(&self, temp_source_flags: &[bool], flow_source_flags: &[bool]) -> Result<()> {
        let nb = temp_source_flags.iter().filter(|&&f| f).count();
        let nf = flow_source_flags.iter().filter(|&&f| f).count();
        if self.branch_temps.len() != nb {
            return Err(Error::Dimension { what: "branch temperatures", expected: nb, found: self.branch_temps.len() });
        }
        if self.node_flows.len() != nf {
            return Err(Error::Dimension { what: "node flows", expected: nf, found: self.node_flows.len() });
        }
        Ok(())
    }
}

/// Scatters values for flagged entries into a full-length vector.
pub fn expand_flagged<T: Scalar>(flags: &[bool], values: &[T]) -> Vec<T> {
    let mut it = values.iter();
    flags
        .iter()
        .map(|&f| if f { *it.next().expect("one value per flagged entry") } else { T::zero() })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViolationKind {
    DimensionMismatch,
    IncidenceEntry,
    IncidenceRow,
    NonPositiveConductance,
    NegativeCapacity,
    IsolatedMasslessNode,
    UnanchoredMasslessComponent,
    FloatingComponent,
    UnreachableNode,
}

impl ViolationKind {
    pub fn severity(self) -> Severity {
        match self {
            ViolationKind::FloatingComponent | ViolationKind::UnreachableNode => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Branch, node or array index, depending on the kind.
    pub index: usize,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_errors(&self) -> bool {
        self.violations.iter().any(|v| v.kind.severity() == Severity::Error)
    }

    pub fn errors(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(|v| v.kind.severity() == Severity::Error)
    }

    pub fn contains(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    fn push(&mut self, kind: ViolationKind, index: usize, message: String) {
        self.violations.push(Violation { kind, index, message });
    }

    fn sorted(mut self) -> Self {
        self.violations.sort_by_key(|v| (v.kind, v.index));
        self
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("no violations");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{:?}[{}]: {}", v.kind, v.index, v.message)?;
        }
        Ok(())
    }
}

/// Checks the structural invariants of the six arrays.
pub fn validate<T: Scalar>(circuit: &ThermalCircuit<T>) -> ValidationReport {
    let mut report = ValidationReport::default();
    let m = circuit.branch_count();
    let n = circuit.node_count();
    let lengths = [
        ("conductances", circuit.conductances.len(), m),
        ("temp_source_flags", circuit.temp_source_flags.len(), m),
        ("branch_labels", circuit.branch_labels.len(), m),
        ("capacities", circuit.capacities.len(), n),
        ("flow_source_flags", circuit.flow_source_flags.len(), n),
        ("output_flags", circuit.output_flags.len(), n),
        ("node_labels", circuit.node_labels.len(), n),
    ];
    for (ordinal, (name, found, expected)) in lengths.into_iter().enumerate() {
        if found != expected {
            report.push(
                ViolationKind::DimensionMismatch,
                ordinal,
                format!("{name} has length {found}, expected {expected}"),
            );
        }
    }

    for b in 0..m {
        let row = circuit.incidence.row(b);
        let mut plus = 0;
        let mut minus = 0;
        for (j, &a) in row.iter().enumerate() {
            match a {
                0 => {}
                1 => plus += 1,
                -1 => minus += 1,
                other => report.push(
                    ViolationKind::IncidenceEntry,
                    b,
                    format!("branch {b} has entry {other} at node {j}"),
                ),
            }
        }
        let ok = matches!((plus, minus), (1, 0) | (0, 1) | (1, 1));
        if !ok {
            report.push(
                ViolationKind::IncidenceRow,
                b,
                format!("branch {b} has {plus} entering and {minus} leaving nodes"),
            );
        }
    }

    for (b, &g) in circuit.conductances.iter().enumerate() {
        if !(g > T::zero()) {
            report.push(ViolationKind::NonPositiveConductance, b, format!("conductance of branch {b} is {g}"));
        }
    }
    for (j, &c) in circuit.capacities.iter().enumerate() {
        if !(c >= T::zero()) {
            report.push(ViolationKind::NegativeCapacity, j, format!("capacity of node {j} is {c}"));
        }
    }
    report.sorted()
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Flags node configurations that make steady state or elimination singular.
///
/// Returns the [`validate`] report unchanged when the circuit is structurally invalid.
pub fn check_well_posed<T: Scalar>(circuit: &ThermalCircuit<T>) -> ValidationReport {
    let structural = validate(circuit);
    if structural.has_errors() {
        return structural;
    }
    let n = circuit.node_count();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut incident = vec![false; n];
    let mut anchored_node = vec![false; n];
    for b in 0..circuit.branch_count() {
        let nz: Vec<usize> = circuit.incidence.nonzeros(b).map(|(j, _)| j).collect();
        for &j in &nz {
            incident[j] = true;
        }
        match nz.as_slice() {
            [j] => anchored_node[*j] = true,
            [i, j] => {
                let (ri, rj) = (find(&mut parent, *i), find(&mut parent, *j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
            _ => {}
        }
    }

    let mut anchored = vec![false; n];
    let mut massive = vec![false; n];
    let mut touched = vec![false; n];
    for j in 0..n {
        let r = find(&mut parent, j);
        anchored[r] |= anchored_node[j];
        massive[r] |= circuit.capacities[j] > T::zero();
        touched[r] |= incident[j];
    }

    let mut report = ValidationReport::default();
    for j in 0..n {
        let label = &circuit.node_labels[j];
        if !incident[j] {
            if circuit.capacities[j] > T::zero() {
                report.push(
                    ViolationKind::UnreachableNode,
                    j,
                    format!("node `{label}` has capacity but no branch; it is unreachable from any source"),
                );
            } else {
                report.push(
                    ViolationKind::IsolatedMasslessNode,
                    j,
                    format!("node `{label}` is a floating massless node without reference"),
                );
            }
            continue;
        }
        if find(&mut parent, j) != j || anchored[j] {
            continue;
        }
        if massive[j] {
            report.push(
                ViolationKind::FloatingComponent,
                j,
                format!("component of node `{label}` has no branch to the reference; its mean temperature is undetermined at steady state"),
            );
        } else if touched[j] {
            report.push(
                ViolationKind::UnanchoredMasslessComponent,
                j,
                format!("component of node `{label}` has neither a reference branch nor any capacity"),
            );
        }
    }
    report.sorted()
}

fn ensure_valid<T: Scalar>(circuit: &ThermalCircuit<T>) -> Result<()> {
    let report = validate(circuit);
    if report.has_errors() {
        return Err(Error::InvalidCircuit(report));
    }
    Ok(())
}

/// Block system `[[G⁻¹, A], [-Aᵀ, C]] [q; θ] = [b; f]`.
///
/// The `C` block is stored as data; the KKT form is never integrated directly.
#[derive(Clone, Debug, PartialEq)]
pub struct KktSystem<T> {
    pub inverse_conductances: Vec<T>,
    pub incidence: Matrix<T>,
    pub capacities: Vec<T>,
    pub temp_source_flags: Vec<bool>,
    pub flow_source_flags: Vec<bool>,
}

impl<T: Scalar> KktSystem<T> {
    pub fn branch_count(&self) -> usize {
        self.inverse_conductances.len()
    }

    pub fn node_count(&self) -> usize {
        self.capacities.len()
    }

    /// Lower-left block, `-Aᵀ`.
    pub fn negated_incidence_transpose(&self) -> Matrix<T> {
        self.incidence.transpose().neg()
    }

    /// Dense `(m + n)` square block matrix.
    pub fn to_matrix(&self) -> Matrix<T> {
        let m = self.branch_count();
        let n = self.node_count();
        let mut k = Matrix::zeros(m + n, m + n);
        for (i, &r) in self.inverse_conductances.iter().enumerate() {
            k[(i, i)] = r;
        }
        for i in 0..m {
            for j in 0..n {
                let a = self.incidence[(i, j)];
                k[(i, m + j)] = a;
                k[(m + j, i)] = -a;
            }
        }
        for (j, &c) in self.capacities.iter().enumerate() {
            k[(m + j, m + j)] = c;
        }
        k
    }

    /// `[b; f]` as 0/1 entries.
    pub fn rhs_structure(&self) -> Vec<T> {
        self.temp_source_flags
            .iter()
            .chain(&self.flow_source_flags)
            .map(|&f| if f { T::one() } else { T::zero() })
            .collect()
    }
}

pub fn build_kkt<T: Scalar>(circuit: &ThermalCircuit<T>) -> Result<KktSystem<T>> {
    ensure_valid(circuit)?;
    Ok(KktSystem {
        inverse_conductances: circuit.conductances.iter().map(|&g| T::one() / g).collect(),
        incidence: circuit.incidence.to_matrix(),
        capacities: circuit.capacities.clone(),
        temp_source_flags: circuit.temp_source_flags.clone(),
        flow_source_flags: circuit.flow_source_flags.clone(),
    })
}

/// `C θ̇ = -AᵀGA θ + AᵀG b + f`.
#[derive(Clone, Debug, PartialEq)]
pub struct DaeSystem<T> {
    /// `-AᵀGA`, nodes × nodes, W/K.
    pub conduction: Matrix<T>,
    /// `AᵀG`, nodes × branches, W/K.
    pub source_coupling: Matrix<T>,
    /// J/K.
    pub capacities: Vec<T>,
    pub temp_source_flags: Vec<bool>,
    pub flow_source_flags: Vec<bool>,
}

impl<T: Scalar> DaeSystem<T> {
    pub fn node_count(&self) -> usize {
        self.capacities.len()
    }

    pub fn branch_count(&self) -> usize {
        self.temp_source_flags.len()
    }

    /// `AᵀG b + f` for the given source magnitudes.
    pub fn forcing(&self, sources: &SourceValues<T>) -> Result<Vec<T>> {
        sources.check(&self.temp_source_flags, &self.flow_source_flags)?;
        let b = expand_flagged(&self.temp_source_flags, &sources.branch_temps);
        let f = expand_flagged(&self.flow_source_flags, &sources.node_flows);
        let mut rhs = f;
        self.source_coupling.mul_vec_add(&b, &mut rhs);
        Ok(rhs)
    }

    /// `C θ̇` evaluated at `theta`.
    pub fn residual(&self, theta: &[T], sources: &SourceValues<T>) -> Result<Vec<T>> {
        let mut r = self.forcing(sources)?;
        self.conduction.mul_vec_add(theta, &mut r);
        Ok(r)
    }
}

pub fn build_dae<T: Scalar>(circuit: &ThermalCircuit<T>) -> Result<DaeSystem<T>> {
    ensure_valid(circuit)?;
    let m = circuit.branch_count();
    let n = circuit.node_count();
    let mut conduction = Matrix::zeros(n, n);
    let mut source_coupling = Matrix::zeros(n, m);
    for b in 0..m {
        let g = circuit.conductances[b];
        let nz: Vec<(usize, i8)> = circuit.incidence.nonzeros(b).collect();
        for &(i, ai) in &nz {
            source_coupling[(i, b)] = signed(g, ai);
            for &(j, aj) in &nz {
                conduction[(i, j)] -= signed(signed(g, ai), aj);
            }
        }
    }
    Ok(DaeSystem {
        conduction,
        source_coupling,
        capacities: circuit.capacities.clone(),
        temp_source_flags: circuit.temp_source_flags.clone(),
        flow_source_flags: circuit.flow_source_flags.clone(),
    })
}
