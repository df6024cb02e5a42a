//! The cones `Q_G` (incomplete matrices with positive definite clique blocks)
//! and `P_G` (positive definite matrices with zeros off the edge set), and the
//! maps between them.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::{CliqueOrdering, DecomposableGraph};
use crate::linalg::{self, add_sub, difference, inv_pd, logdet_pd, principal, set_sub, sub};

const SYMMETRY_TOL: f64 = 1e-12;

/// A symmetric matrix known only on `E` (pairs of adjacent or equal
/// vertices). Entries off `E` are stored as zero and carry no meaning.
#[derive(Debug, Clone, PartialEq)]
pub struct IncompleteMatrix {
    graph: Arc<DecomposableGraph>,
    values: DMatrix<f64>,
}

/// A symmetric matrix that vanishes off `E`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsePrecision {
    graph: Arc<DecomposableGraph>,
    values: DMatrix<f64>,
}

fn check_square(g: &DecomposableGraph, m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), got: m.nrows() });
    }
    if m.ncols() != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), got: m.ncols() });
    }
    Ok(())
}

fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::MalformedInput("matrix has non-finite entries".into()));
    }
    let a = linalg::asymmetry(m);
    if a > SYMMETRY_TOL * linalg::max_abs(m).max(1.0) {
        return Err(Error::MalformedInput(format!("matrix is not symmetric (asymmetry {a:e})")));
    }
    Ok(())
}

fn masked(g: &DecomposableGraph, m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = g.n();
    DMatrix::from_fn(n, n, |i, j| {
        if g.adjacent(i, j) {
            0.5 * (m[(i, j)] + m[(j, i)])
        } else {
            0.0
        }
    })
}

fn same_graph(a: &Arc<DecomposableGraph>, b: &Arc<DecomposableGraph>) -> Result<()> {
    if Arc::ptr_eq(a, b) || **a == **b {
        Ok(())
    } else {
        Err(Error::GraphMismatch)
    }
}

impl IncompleteMatrix {
    /// Reads the entries on `E` of a symmetric `r × r` matrix; see [`project`].
    pub fn from_dense(graph: Arc<DecomposableGraph>, m: &DMatrix<f64>) -> Result<Self> {
        check_square(&graph, m)?;
        check_symmetric(m)?;
        let values = masked(&graph, m);
        Ok(IncompleteMatrix { graph, values })
    }

    /// Builds from a function of 0-based `(i, j)`, evaluated on `E` only.
    pub fn from_fn(graph: Arc<DecomposableGraph>, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let n = graph.n();
        let mut values = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                if graph.adjacent(i, j) {
                    let v = f(i, j);
                    values[(i, j)] = v;
                    values[(j, i)] = v;
                }
            }
        }
        IncompleteMatrix { graph, values }
    }

    pub fn graph(&self) -> &Arc<DecomposableGraph> {
        &self.graph
    }

    /// Dense storage with zeros off `E`.
    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.graph.adjacent(i, j).then(|| self.values[(i, j)])
    }

    /// The block `x_A` for a complete vertex set `A`.
    pub fn block(&self, a: &[usize]) -> DMatrix<f64> {
        principal(&self.values, a)
    }

    pub fn scaled(&self, c: f64) -> Self {
        IncompleteMatrix { graph: self.graph.clone(), values: &self.values * c }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_graph(&self.graph, &other.graph)?;
        Ok(IncompleteMatrix { graph: self.graph.clone(), values: &self.values + &other.values })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        same_graph(&self.graph, &other.graph)?;
        Ok(IncompleteMatrix { graph: self.graph.clone(), values: &self.values - &other.values })
    }

    /// Membership in `Q_G`: every clique block is positive definite.
    pub fn in_qg(&self) -> bool {
        self.graph.canonical().cliques().iter().all(|c| linalg::is_pd(&self.block(c)))
    }

    pub fn check_qg(&self) -> Result<()> {
        for c in self.graph.canonical().cliques() {
            if !linalg::is_pd(&self.block(c)) {
                return Err(Error::NotInQG(format!("clique block {c:?} is not positive definite")));
            }
        }
        Ok(())
    }

    /// Largest absolute entry-wise difference on `E`.
    pub fn max_diff(&self, other: &Self) -> f64 {
        linalg::max_abs(&(&self.values - &other.values))
    }
}

impl SparsePrecision {
    /// Accepts a symmetric matrix whose entries off `E` are zero.
    pub fn from_dense(graph: Arc<DecomposableGraph>, m: &DMatrix<f64>) -> Result<Self> {
        check_square(&graph, m)?;
        check_symmetric(m)?;
        let scale = linalg::max_abs(m).max(1.0);
        for i in 0..graph.n() {
            for j in 0..graph.n() {
                if !graph.adjacent(i, j) && m[(i, j)].abs() > SYMMETRY_TOL * scale {
                    return Err(Error::MalformedInput(format!(
                        "entry ({}, {}) is off the edge set but nonzero",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(SparsePrecision { values: masked(&graph, m), graph })
    }

    pub fn graph(&self) -> &Arc<DecomposableGraph> {
        &self.graph
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn in_pg(&self) -> bool {
        linalg::is_pd(&self.values)
    }

    pub fn scaled(&self, c: f64) -> Self {
        SparsePrecision { graph: self.graph.clone(), values: &self.values * c }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_graph(&self.graph, &other.graph)?;
        Ok(SparsePrecision { graph: self.graph.clone(), values: &self.values + &other.values })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        same_graph(&self.graph, &other.graph)?;
        Ok(SparsePrecision { graph: self.graph.clone(), values: &self.values - &other.values })
    }

    /// The same entries read as an incomplete matrix (an element of `I_G`).
    pub fn as_incomplete(&self) -> IncompleteMatrix {
        IncompleteMatrix { graph: self.graph.clone(), values: self.values.clone() }
    }
}

/// `π(m)`: keeps the entries of `m` on `E`.
pub fn project(m: &DMatrix<f64>, g: &Arc<DecomposableGraph>) -> Result<IncompleteMatrix> {
    IncompleteMatrix::from_dense(g.clone(), m)
}

/// `⟨x, y⟩ = Σ_{(i,j) ∈ E} x_ij y_ij`, summing over ordered pairs so each
/// off-diagonal edge counts twice. Equals `tr(x̂ y)`.
pub fn trace_pair(x: &IncompleteMatrix, y: &SparsePrecision) -> Result<f64> {
    same_graph(&x.graph, &y.graph)?;
    Ok(x.values.component_mul(&y.values).sum())
}

/// The same pairing between two elements of `I_G`.
pub fn pair(x: &IncompleteMatrix, y: &IncompleteMatrix) -> Result<f64> {
    same_graph(&x.graph, &y.graph)?;
    Ok(x.values.component_mul(&y.values).sum())
}

/// `x̂⁻¹ = Σ_C (x_C⁻¹)⁰ − Σ_S ν(S) (x_S⁻¹)⁰`.
pub fn precision_of(x: &IncompleteMatrix) -> Result<SparsePrecision> {
    let ord = x.graph.canonical();
    let n = x.graph.n();
    let mut y = DMatrix::zeros(n, n);
    for c in ord.cliques() {
        let inv = inv_pd(&x.block(c))
            .ok_or_else(|| Error::NotInQG(format!("clique block {c:?} is not positive definite")))?;
        add_sub(&mut y, c, &inv, 1.0);
    }
    for j in 1..ord.k() {
        let s = ord.separator(j);
        let inv = inv_pd(&x.block(s)).ok_or_else(|| Error::NotInQG("separator block is singular".into()))?;
        add_sub(&mut y, s, &inv, -1.0);
    }
    Ok(SparsePrecision { graph: x.graph.clone(), values: linalg::symmetrize(&y) })
}

/// The unique positive definite completion `x̂` of `x ∈ Q_G`.
pub fn complete(x: &IncompleteMatrix) -> Result<DMatrix<f64>> {
    let y = precision_of(x)?;
    let mut full = inv_pd(&y.values).ok_or_else(|| Error::NotInQG("completion is not positive definite".into()))?;
    // Entries on E are x itself; only the fill-in carries rounding error.
    for (i, j) in x.graph.edges().iter().copied().chain((0..x.graph.n()).map(|i| (i, i))) {
        full[(i, j)] = x.values[(i, j)];
        full[(j, i)] = x.values[(j, i)];
    }
    Ok(full)
}

/// `φ(y) = π(y⁻¹)` for `y ∈ P_G`.
pub fn phi(y: &SparsePrecision) -> Result<IncompleteMatrix> {
    let inv = inv_pd(&y.values).ok_or(Error::NotInPG)?;
    Ok(IncompleteMatrix { graph: y.graph.clone(), values: masked(&y.graph, &inv) })
}

/// `log det x̂ = Σ_C log det x_C − Σ_S ν(S) log det x_S`.
pub fn logdet_hat(x: &IncompleteMatrix) -> Result<f64> {
    let ord = x.graph.canonical();
    let mut total = 0.0;
    for c in ord.cliques() {
        total += logdet_pd(&x.block(c))
            .ok_or_else(|| Error::NotInQG(format!("clique block {c:?} is not positive definite")))?;
    }
    for j in 1..ord.k() {
        total -= logdet_pd(&x.block(ord.separator(j))).ok_or_else(|| Error::NotInQG("singular separator".into()))?;
    }
    Ok(total)
}

/// `m_{V∖A·A}` padded with zeros on the rows and columns of `A`:
/// `m_{V∖A} − m_{V∖A,A} m_A⁻¹ m_{A,V∖A}` on the complement of `A`.
pub fn schur_pad(m: &DMatrix<f64>, a: &[usize]) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: m.ncols() });
    }
    let all: Vec<usize> = (0..n).collect();
    let rest = difference(&all, a);
    let inv = inv_pd(&principal(m, a)).ok_or_else(|| Error::SingularBlock(format!("block {a:?}")))?;
    let cross = sub(m, &rest, a);
    let s = principal(m, &rest) - &cross * inv * cross.transpose();
    let mut out = DMatrix::zeros(n, n);
    set_sub(&mut out, &rest, &rest, &linalg::symmetrize(&s));
    Ok(out)
}

/// Block coordinates of `x ∈ Q_G` along a perfect ordering.
///
/// The first clique is split at `S_2`: `first = x_{C1∖S2·S2}`,
/// `first_ratio = x_{C1∖S2,S2} x_{S2}⁻¹`, `sep = x_{S2}`. For `j ≥ 2`,
/// `schur[j-2] = x_{[j]·}` and `ratio[j-2] = x_{[j⟩} x_{⟨j⟩}⁻¹`. When the
/// graph is complete `first = x` and the other fields are empty.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDecomposition {
    pub first: DMatrix<f64>,
    pub first_ratio: DMatrix<f64>,
    pub sep: DMatrix<f64>,
    pub schur: Vec<DMatrix<f64>>,
    pub ratio: Vec<DMatrix<f64>>,
}

/// `C_1 ∖ S_2`, or all of `C_1` when `k = 1`.
pub(crate) fn head_rows(ord: &CliqueOrdering) -> Vec<usize> {
    if ord.k() == 1 {
        ord.clique(0).to_vec()
    } else {
        difference(ord.clique(0), ord.separator(1))
    }
}

fn schur_split(x: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let s = principal(x, cols);
    let inv = inv_pd(&s).ok_or_else(|| Error::NotInQG(format!("block {cols:?} is not positive definite")))?;
    let cross = sub(x, rows, cols);
    let ratio = &cross * inv;
    let schur = principal(x, rows) - &ratio * cross.transpose();
    let schur = linalg::symmetrize(&schur);
    if !linalg::is_pd(&schur) {
        return Err(Error::NotInQG(format!("Schur complement on {rows:?} is not positive definite")));
    }
    Ok((schur, ratio))
}

pub fn split_blocks(x: &IncompleteMatrix, ord: &CliqueOrdering) -> Result<BlockDecomposition> {
    same_ordering(&x.graph, ord)?;
    let v = &x.values;
    if ord.k() == 1 {
        let first = principal(v, ord.clique(0));
        if !linalg::is_pd(&first) {
            return Err(Error::NotInQG("matrix is not positive definite".into()));
        }
        return Ok(BlockDecomposition {
            first,
            first_ratio: DMatrix::zeros(0, 0),
            sep: DMatrix::zeros(0, 0),
            schur: Vec::new(),
            ratio: Vec::new(),
        });
    }
    let (first, first_ratio) = schur_split(v, &head_rows(ord), ord.separator(1))?;
    let sep = principal(v, ord.separator(1));
    let mut schur = Vec::new();
    let mut ratio = Vec::new();
    for j in 1..ord.k() {
        let (s, r) = schur_split(v, &ord.residual(j), ord.separator(j))?;
        schur.push(s);
        ratio.push(r);
    }
    Ok(BlockDecomposition { first, first_ratio, sep, schur, ratio })
}

fn same_ordering(g: &DecomposableGraph, ord: &CliqueOrdering) -> Result<()> {
    let canon = g.canonical();
    let mut a: Vec<&Vec<usize>> = ord.cliques().iter().collect();
    let mut b: Vec<&Vec<usize>> = canon.cliques().iter().collect();
    a.sort();
    b.sort();
    if a != b {
        return Err(Error::GraphMismatch);
    }
    Ok(())
}

/// Rebuilds an incomplete matrix from its blocks, clique by clique.
pub(crate) struct Assembler<'a> {
    ord: &'a CliqueOrdering,
    x: DMatrix<f64>,
}

impl<'a> Assembler<'a> {
    pub(crate) fn new(ord: &'a CliqueOrdering, n: usize) -> Self {
        Assembler { ord, x: DMatrix::zeros(n, n) }
    }

    pub(crate) fn head(&mut self, first: &DMatrix<f64>, first_ratio: &DMatrix<f64>, sep: &DMatrix<f64>) {
        let rows = head_rows(self.ord);
        if self.ord.k() == 1 {
            set_sub(&mut self.x, &rows, &rows, first);
            return;
        }
        let s = self.ord.separator(1);
        place(&mut self.x, &rows, s, first, first_ratio, sep);
    }

    /// `x_{⟨j⟩}` from the entries placed so far; `j` is a 0-based position ≥ 1.
    pub(crate) fn sep_block(&self, j: usize) -> DMatrix<f64> {
        principal(&self.x, self.ord.separator(j))
    }

    pub(crate) fn push(&mut self, j: usize, schur: &DMatrix<f64>, ratio: &DMatrix<f64>) {
        let sep = self.sep_block(j);
        place(&mut self.x, &self.ord.residual(j), self.ord.separator(j), schur, ratio, &sep);
    }

    pub(crate) fn finish(self) -> DMatrix<f64> {
        self.x
    }
}

fn place(x: &mut DMatrix<f64>, rows: &[usize], cols: &[usize], schur: &DMatrix<f64>, ratio: &DMatrix<f64>, sep: &DMatrix<f64>) {
    let cross = ratio * sep;
    let diag = schur + &cross * ratio.transpose();
    set_sub(x, cols, cols, sep);
    set_sub(x, rows, cols, &cross);
    set_sub(x, cols, rows, &cross.transpose());
    set_sub(x, rows, rows, &linalg::symmetrize(&diag));
}

/// Inverse of [`split_blocks`].
pub fn assemble_blocks(
    g: &Arc<DecomposableGraph>,
    b: &BlockDecomposition,
    ord: &CliqueOrdering,
) -> Result<IncompleteMatrix> {
    same_ordering(g, ord)?;
    let k = ord.k();
    if b.schur.len() != k - 1 || b.ratio.len() != k - 1 {
        return Err(Error::DimensionMismatch { expected: k - 1, got: b.schur.len() });
    }
    let head = head_rows(ord);
    if b.first.nrows() != head.len() {
        return Err(Error::DimensionMismatch { expected: head.len(), got: b.first.nrows() });
    }
    let mut asm = Assembler::new(ord, g.n());
    asm.head(&b.first, &b.first_ratio, &b.sep);
    for j in 1..k {
        let r = ord.residual(j).len();
        let s = ord.separator(j).len();
        let (schur, ratio) = (&b.schur[j - 1], &b.ratio[j - 1]);
        if schur.nrows() != r || ratio.nrows() != r || ratio.ncols() != s {
            return Err(Error::DimensionMismatch { expected: r, got: schur.nrows() });
        }
        asm.push(j, schur, ratio);
    }
    let x = IncompleteMatrix { graph: g.clone(), values: asm.finish() };
    x.check_qg()?;
    Ok(x)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::graph::enumerate_perfect_orders;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn g0() -> Arc<DecomposableGraph> {
        Arc::new(
            DecomposableGraph::new(6, &[(1, 2), (1, 3), (2, 3), (1, 4), (2, 4), (1, 5), (2, 5), (1, 6)]).unwrap(),
        )
    }

    pub(crate) fn random_pd(n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
        let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        &a * a.transpose() + DMatrix::identity(n, n) * 0.5
    }

    pub(crate) fn random_qg(g: &Arc<DecomposableGraph>, rng: &mut impl Rng) -> IncompleteMatrix {
        project(&random_pd(g.n(), rng), g).unwrap()
    }

    fn graphs() -> Vec<Arc<DecomposableGraph>> {
        Vec::from([
            Arc::new(DecomposableGraph::path(4).unwrap()),
            g0(),
            Arc::new(DecomposableGraph::complete(3).unwrap()),
        ])
    }

    #[test]
    fn completion_matches_on_edges_and_inverts_to_sparse() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for g in graphs() {
            for _ in 0..20 {
                let x = random_qg(&g, &mut rng);
                let xh = complete(&x).unwrap();
                assert!(project(&xh, &g).unwrap().max_diff(&x) < 1e-12);
                let inv = inv_pd(&xh).unwrap();
                for i in 0..g.n() {
                    for j in 0..g.n() {
                        if !g.adjacent(i, j) {
                            assert!(inv[(i, j)].abs() < 1e-12);
                        }
                    }
                }
                let ld = logdet_pd(&xh).unwrap();
                assert!((logdet_hat(&x).unwrap() - ld).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn phi_inverts_precision() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for g in graphs() {
            let x = random_qg(&g, &mut rng);
            let y = precision_of(&x).unwrap();
            assert!(phi(&y).unwrap().max_diff(&x) < 1e-12);
            let back = precision_of(&phi(&y).unwrap()).unwrap();
            assert!(linalg::max_abs(&(back.values() - y.values())) < 1e-10);
        }
    }

    #[test]
    fn identity_and_trace_pair() {
        let g = Arc::new(DecomposableGraph::path(4).unwrap());
        let x = project(&DMatrix::identity(4, 4), &g).unwrap();
        assert_eq!(complete(&x).unwrap(), DMatrix::identity(4, 4));
        let y = precision_of(&x).unwrap();
        assert!(linalg::max_abs(&(y.values() - DMatrix::identity(4, 4))) < 1e-15);
        let m = DMatrix::from_fn(4, 4, |i, j| 1.0 + (i + j) as f64);
        let pm = project(&m, &g).unwrap();
        let ones = SparsePrecision::from_dense(g.clone(), &project(&DMatrix::from_element(4, 4, 1.0), &g).unwrap().values).unwrap();
        // Diagonal 1+3+5+7 plus twice the edges 2+4+6.
        assert_eq!(trace_pair(&pm, &ones).unwrap(), 16.0 + 24.0);
    }

    #[test]
    fn rejects_bad_input() {
        let g = Arc::new(DecomposableGraph::path(3).unwrap());
        let mut m = DMatrix::identity(3, 3);
        m[(0, 1)] = 0.5;
        assert!(matches!(project(&m, &g), Err(Error::MalformedInput(_))));
        assert!(matches!(project(&DMatrix::identity(4, 4), &g), Err(Error::DimensionMismatch { .. })));
        let mut bad = DMatrix::identity(3, 3);
        bad[(0, 1)] = 2.0;
        bad[(1, 0)] = 2.0;
        let x = project(&bad, &g).unwrap();
        assert!(matches!(precision_of(&x), Err(Error::NotInQG(_))));
        let mut off = DMatrix::identity(3, 3);
        off[(0, 2)] = 0.1;
        off[(2, 0)] = 0.1;
        assert!(SparsePrecision::from_dense(g.clone(), &off).is_err());
        let neg = SparsePrecision::from_dense(g, &(-DMatrix::identity(3, 3))).unwrap();
        assert_eq!(phi(&neg), Err(Error::NotInPG));
    }

    #[test]
    fn blocks_round_trip_in_every_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for g in graphs() {
            for ord in enumerate_perfect_orders(&g, 8).unwrap() {
                let x = random_qg(&g, &mut rng);
                let b = split_blocks(&x, &ord).unwrap();
                let back = assemble_blocks(&g, &b, &ord).unwrap();
                assert!(back.max_diff(&x) < 1e-12);
            }
        }
    }

    #[test]
    fn schur_pad_matches_inverse_block() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = random_pd(5, &mut rng);
        let a = [1usize, 3];
        let pad = schur_pad(&m, &a).unwrap();
        let rest = [0usize, 2, 4];
        let inv = inv_pd(&m).unwrap();
        let expect = inv_pd(&principal(&inv, &rest)).unwrap();
        assert!(linalg::max_abs(&(principal(&pad, &rest) - expect)) < 1e-12);
        assert!(pad.row(1).iter().all(|&v| v == 0.0));
    }
}
