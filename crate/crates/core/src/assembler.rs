//! Assembly of elementary circuits into one global circuit.
//!
//! Nodes declared common by a [`ConnectionSet`] are merged; branches are never
//! merged. The disassembling matrix `A_d` maps the assembled variables
//! `u = [q; θ]` onto the stacked elementary variables `u_d = [q₁; θ₁; q₂; θ₂; …]`,
//! and the global block system is `K = A_dᵀ K_d A_d`, `a = A_dᵀ a_d`.

use crate::circuit::{build_kkt, validate, Incidence, KktSystem, ThermalCircuit};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Local node `node` of circuit `circuit` (both zero-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeRef {
    pub circuit: usize,
    pub node: usize,
}

impl NodeRef {
    pub fn new(circuit: usize, node: usize) -> Self {
        Self { circuit, node }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConnectionSet {
    pub pairs: Vec<(NodeRef, NodeRef)>,
    /// Permit merging two distinct local nodes of the same circuit.
    pub allow_intra_circuit: bool,
}

impl ConnectionSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares `(circuit_a, node_a) ≡ (circuit_b, node_b)`.
    pub fn connect(&mut self, a: (usize, usize), b: (usize, usize)) -> &mut Self {
        self.pairs.push((NodeRef::new(a.0, a.1), NodeRef::new(b.0, b.1)));
        self
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Global numbering of the assembled circuit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssemblyPlan {
    pub node_count: usize,
    pub branch_count: usize,
    /// `node_map[circuit][local node]` → global node.
    pub node_map: Vec<Vec<usize>>,
    /// `branch_map[circuit][local branch]` → global branch.
    pub branch_map: Vec<Vec<usize>>,
    /// Members of each global node, in scan order.
    pub classes: Vec<Vec<NodeRef>>,
}

impl AssemblyPlan {
    pub fn global_node(&self, r: NodeRef) -> usize {
        self.node_map[r.circuit][r.node]
    }

    pub fn global_branch(&self, circuit: usize, branch: usize) -> usize {
        self.branch_map[circuit][branch]
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
}

/// Global branches are the concatenation of local branches in circuit order;
/// global nodes are numbered by first appearance scanning circuits in order.
pub fn plan_assembly<T: Scalar>(circuits: &[ThermalCircuit<T>], connections: &ConnectionSet) -> Result<AssemblyPlan> {
    let mut offsets = Vec::with_capacity(circuits.len());
    let mut total = 0;
    for c in circuits {
        offsets.push(total);
        total += c.node_count();
    }
    let flat = |r: NodeRef| offsets[r.circuit] + r.node;
    let owner: Vec<usize> = circuits.iter().enumerate().flat_map(|(i, c)| std::iter::repeat_n(i, c.node_count())).collect();

    let mut uf = UnionFind::new(total);
    // members per root, to detect merges of two nodes of one circuit
    let mut members: Vec<Vec<usize>> = (0..total).map(|x| vec![x]).collect();
    for (k, &(a, b)) in connections.pairs.iter().enumerate() {
        for r in [a, b] {
            if r.circuit >= circuits.len() {
                return Err(Error::Connection {
                    connection: k,
                    reason: format!("circuit index {} out of range (have {})", r.circuit, circuits.len()),
                });
            }
            if r.node >= circuits[r.circuit].node_count() {
                return Err(Error::Connection {
                    connection: k,
                    reason: format!(
                        "node index {} out of range for circuit {} (has {} nodes)",
                        r.node,
                        r.circuit,
                        circuits[r.circuit].node_count()
                    ),
                });
            }
        }
        let (ra, rb) = (uf.find(flat(a)), uf.find(flat(b)));
        if ra == rb {
            continue;
        }
        if !connections.allow_intra_circuit {
            let clash = members[ra].iter().any(|&x| members[rb].iter().any(|&y| owner[x] == owner[y]));
            if clash {
                return Err(Error::Connection {
                    connection: k,
                    reason: "merges distinct local nodes of one circuit".to_string(),
                });
            }
        }
        let (keep, gone) = (ra.min(rb), ra.max(rb));
        uf.parent[gone] = keep;
        let moved = std::mem::take(&mut members[gone]);
        members[keep].extend(moved);
    }

    let mut global_of_root = vec![usize::MAX; total];
    let mut classes: Vec<Vec<NodeRef>> = Vec::new();
    let mut node_map = Vec::with_capacity(circuits.len());
    for (i, c) in circuits.iter().enumerate() {
        let mut local = Vec::with_capacity(c.node_count());
        for j in 0..c.node_count() {
            let root = uf.find(offsets[i] + j);
            if global_of_root[root] == usize::MAX {
                global_of_root[root] = classes.len();
                classes.push(Vec::new());
            }
            let g = global_of_root[root];
            classes[g].push(NodeRef::new(i, j));
            local.push(g);
        }
        node_map.push(local);
    }

    let mut branch_map = Vec::with_capacity(circuits.len());
    let mut next = 0;
    for c in circuits {
        branch_map.push((next..next + c.branch_count()).collect());
        next += c.branch_count();
    }

    Ok(AssemblyPlan { node_count: classes.len(), branch_count: next, node_map, branch_map, classes })
}

/// 0/1 matrix with exactly one 1 per row, stored by column index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisassemblyMatrix {
    cols: usize,
    column_of_row: Vec<usize>,
}

impl DisassemblyMatrix {
    pub fn nrows(&self) -> usize {
        self.column_of_row.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn column_of_row(&self, row: usize) -> usize {
        self.column_of_row[row]
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        u8::from(self.column_of_row[row] == col)
    }

    pub fn to_matrix<T: Scalar>(&self) -> Matrix<T> {
        let mut m = Matrix::zeros(self.nrows(), self.cols);
        for (r, &c) in self.column_of_row.iter().enumerate() {
            m[(r, c)] = T::one();
        }
        m
    }

    /// `u_d = A_d u`.
    pub fn apply<T: Scalar>(&self, u: &[T]) -> Vec<T> {
        assert_eq!(u.len(), self.cols);
        self.column_of_row.iter().map(|&c| u[c]).collect()
    }

    /// `A_dᵀ v`: sums the disassembled entries landing on each assembled variable.
    pub fn transpose_apply<T: Scalar>(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.nrows());
        let mut out = vec![T::zero(); self.cols];
        for (&c, &x) in self.column_of_row.iter().zip(v) {
            out[c] += x;
        }
        out
    }

    /// `A_dᵀ K_d A_d`.
    pub fn congruence<T: Scalar>(&self, kd: &Matrix<T>) -> Matrix<T> {
        assert_eq!((kd.nrows(), kd.ncols()), (self.nrows(), self.nrows()));
        let mut k = Matrix::zeros(self.cols, self.cols);
        for (r1, &c1) in self.column_of_row.iter().enumerate() {
            for (r2, &c2) in self.column_of_row.iter().enumerate() {
                let v = kd[(r1, r2)];
                if v != T::zero() {
                    k[(c1, c2)] += v;
                }
            }
        }
        k
    }

    /// Diagonal of `A_dᵀ A_d`: how many disassembled rows map to each column.
    pub fn multiplicities(&self) -> Vec<usize> {
        let mut m = vec![0; self.cols];
        for &c in &self.column_of_row {
            m[c] += 1;
        }
        m
    }
}

/// Rows: for each circuit its branch flows then its node temperatures.
/// Columns: global branch flows then global node temperatures.
pub fn build_disassembly_matrix<T: Scalar>(plan: &AssemblyPlan, circuits: &[ThermalCircuit<T>]) -> DisassemblyMatrix {
    let mut column_of_row = Vec::new();
    for (i, c) in circuits.iter().enumerate() {
        for b in 0..c.branch_count() {
            column_of_row.push(plan.branch_map[i][b]);
        }
        for j in 0..c.node_count() {
            column_of_row.push(plan.branch_count + plan.node_map[i][j]);
        }
    }
    DisassemblyMatrix { cols: plan.branch_count + plan.node_count, column_of_row }
}

/// Block-diagonal `K_d` of the elementary KKT matrices, in stacking order.
pub fn disassembled_kkt<T: Scalar>(circuits: &[ThermalCircuit<T>]) -> Result<Matrix<T>> {
    let blocks: Vec<Matrix<T>> = circuits.iter().map(|c| build_kkt(c).map(|k| k.to_matrix())).collect::<Result<_>>()?;
    let size = blocks.iter().map(Matrix::nrows).sum();
    let mut kd = Matrix::zeros(size, size);
    let mut offset = 0;
    for b in &blocks {
        for i in 0..b.nrows() {
            for j in 0..b.ncols() {
                kd[(offset + i, offset + j)] = b[(i, j)];
            }
        }
        offset += b.nrows();
    }
    Ok(kd)
}

/// Assembled circuit together with the numbering that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct Assembly<T> {
    pub circuit: ThermalCircuit<T>,
    pub plan: AssemblyPlan,
    pub disassembly: DisassemblyMatrix,
}

pub fn assemble<T: Scalar>(circuits: &[ThermalCircuit<T>], connections: &ConnectionSet) -> Result<ThermalCircuit<T>> {
    assemble_with_plan(circuits, connections).map(|a| a.circuit)
}

/// Assembles block by block, scattering each elementary KKT system through
/// `A_d` exactly as `A_dᵀ K_d A_d` and `A_dᵀ a_d` would.
///
/// The `G` block is scattered in place of `G⁻¹`: branches are never merged, so
/// the branch part of `A_d` is a permutation and the inverse commutes with it.
pub fn assemble_with_plan<T: Scalar>(circuits: &[ThermalCircuit<T>], connections: &ConnectionSet) -> Result<Assembly<T>> {
    for c in circuits {
        let report = validate(c);
        if report.has_errors() {
            return Err(Error::InvalidCircuit(report));
        }
    }
    let plan = plan_assembly(circuits, connections)?;
    let disassembly = build_disassembly_matrix(&plan, circuits);
    let m = plan.branch_count;
    let n = plan.node_count;

    let mut incidence = Incidence::zeros(m, n);
    let mut conductances = vec![T::zero(); m];
    let mut temp_flag_sum = vec![0usize; m];
    let mut capacities = vec![T::zero(); n];
    let mut flow_flag_sum = vec![0usize; n];
    let mut output_flags = vec![false; n];
    let mut branch_labels = vec![String::new(); m];

    for (i, c) in circuits.iter().enumerate() {
        let kkt: KktSystem<T> = build_kkt(c)?;
        for b in 0..c.branch_count() {
            let gb = plan.branch_map[i][b];
            conductances[gb] += c.conductances[b];
            temp_flag_sum[gb] += usize::from(kkt.temp_source_flags[b]);
            branch_labels[gb] = c.branch_labels[b].clone();
            let mut nonzeros = 0;
            for (j, a) in c.incidence.nonzeros(b) {
                let gj = plan.node_map[i][j];
                incidence.set(gb, gj, incidence.get(gb, gj) + a);
                nonzeros += 1;
            }
            let landed = incidence.nonzeros(gb).count();
            if landed != nonzeros {
                return Err(Error::SelfLoop { circuit: i, local: b, branch: c.branch_labels[b].clone() });
            }
        }
        for j in 0..c.node_count() {
            let gj = plan.node_map[i][j];
            capacities[gj] += kkt.capacities[j];
            flow_flag_sum[gj] += usize::from(kkt.flow_source_flags[j]);
            output_flags[gj] |= c.output_flags[j];
        }
    }

    // a merged node is named by its flagged members, or by all members if none is flagged
    let node_labels = plan
        .classes
        .iter()
        .map(|class| {
            let flagged = |r: &&NodeRef| {
                let c = &circuits[r.circuit];
                c.flow_source_flags[r.node] || c.output_flags[r.node]
            };
            let named: Vec<&NodeRef> =
                if class.iter().any(|r| flagged(&r)) { class.iter().filter(flagged).collect() } else { class.iter().collect() };
            named.iter().map(|r| circuits[r.circuit].node_labels[r.node].as_str()).collect::<Vec<_>>().join("=")
        })
        .collect();

    let circuit = ThermalCircuit {
        incidence,
        conductances,
        capacities,
        temp_source_flags: temp_flag_sum.into_iter().map(|s| s > 0).collect(),
        flow_source_flags: flow_flag_sum.into_iter().map(|s| s > 0).collect(),
        output_flags,
        branch_labels,
        node_labels,
    };
    Ok(Assembly { circuit, plan, disassembly })
}

/// Named elementary circuits plus connections stated by node label.
///
/// Each circuit's labels are prefixed with its name on insertion, so the
/// assembled circuit exposes source channels such as `south_wall.out_film`.
#[derive(Clone, Debug, PartialEq)]
pub struct CircuitSet<T> {
    pub names: Vec<String>,
    pub circuits: Vec<ThermalCircuit<T>>,
    pub connections: ConnectionSet,
}

impl<T: Scalar> Default for CircuitSet<T> {
    fn default() -> Self {
        Self { names: Vec::new(), circuits: Vec::new(), connections: ConnectionSet::new() }
    }
}

impl<T: Scalar> CircuitSet<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.circuits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.circuits.is_empty()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Adds a circuit under a unique `name`; returns its index.
    pub fn add(&mut self, name: &str, circuit: ThermalCircuit<T>) -> Result<usize> {
        if self.position(name).is_some() {
            return Err(Error::Connection { connection: self.connections.len(), reason: format!("duplicate circuit name `{name}`") });
        }
        self.names.push(name.to_string());
        self.circuits.push(circuit.prefixed(name));
        Ok(self.circuits.len() - 1)
    }

    /// Declares `a.node_a ≡ b.node_b` using unprefixed local labels.
    pub fn join(&mut self, a: &str, node_a: &str, b: &str, node_b: &str) -> Result<()> {
        let ra = self.resolve(a, node_a)?;
        let rb = self.resolve(b, node_b)?;
        self.connections.connect(ra, rb);
        Ok(())
    }

    fn resolve(&self, name: &str, node: &str) -> Result<(usize, usize)> {
        let index = self.connections.len();
        let c = self
            .position(name)
            .ok_or_else(|| Error::Connection { connection: index, reason: format!("unknown circuit `{name}`") })?;
        let j = self.circuits[c]
            .node_index(&format!("{name}.{node}"))
            .ok_or_else(|| Error::Connection { connection: index, reason: format!("circuit `{name}` has no node `{node}`") })?;
        Ok((c, j))
    }

    pub fn assemble(&self) -> Result<ThermalCircuit<T>> {
        assemble(&self.circuits, &self.connections)
    }

    pub fn assemble_with_plan(&self) -> Result<Assembly<T>> {
        assemble_with_plan(&self.circuits, &self.connections)
    }
}
