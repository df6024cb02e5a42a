//! Shape parameters `(α, β)`, the function `H_G`, the admissible sets and
//! the normalising constants `Γ_I` and `Γ_II`.
//!
//! `alpha[i]` belongs to the clique with canonical id `i`; `beta[i]` to the
//! distinct separator with canonical id `i`.

use alloc::format;
use alloc::vec::Vec;

use crate::cone::IncompleteMatrix;
use crate::error::{Error, Result};
use crate::graph::{CliqueOrdering, DecomposableGraph, HasseTree, NodeRole};
use crate::linalg::logdet_pd;
use crate::math::{ln_gamma, LN_PI};

/// Tolerance for the equality constraints of `A_P` and `B_P`.
pub const EQ_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeParam {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

impl ShapeParam {
    /// Checks the lengths against the canonical decomposition of `g`.
    pub fn new(g: &DecomposableGraph, alpha: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        let s = ShapeParam { alpha, beta };
        s.check(g)?;
        Ok(s)
    }

    pub fn check(&self, g: &DecomposableGraph) -> Result<()> {
        let ord = g.canonical();
        if self.alpha.len() != ord.k() {
            return Err(Error::ShapeMismatch(format!("{} cliques but {} alphas", ord.k(), self.alpha.len())));
        }
        let k2 = ord.distinct_separators().len();
        if self.beta.len() != k2 {
            return Err(Error::ShapeMismatch(format!("{k2} separators but {} betas", self.beta.len())));
        }
        if self.alpha.iter().chain(&self.beta).any(|v| !v.is_finite()) {
            return Err(Error::ShapeMismatch("non-finite shape parameter".into()));
        }
        Ok(())
    }

    /// `(α + t, β + t)`.
    pub fn shifted(&self, t: f64) -> Self {
        ShapeParam {
            alpha: self.alpha.iter().map(|a| a + t).collect(),
            beta: self.beta.iter().map(|b| b + t).collect(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        ShapeParam {
            alpha: self.alpha.iter().zip(&o.alpha).map(|(a, b)| a + b).collect(),
            beta: self.beta.iter().zip(&o.beta).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scaled(-1.0))
    }

    pub fn scaled(&self, c: f64) -> Self {
        ShapeParam {
            alpha: self.alpha.iter().map(|a| a * c).collect(),
            beta: self.beta.iter().map(|b| b * c).collect(),
        }
    }

    /// `α(C) = f(|C|)`, `β(S) = f(|S|)`.
    pub fn from_sizes(g: &DecomposableGraph, f: impl Fn(usize) -> f64) -> Self {
        let ord = g.canonical();
        ShapeParam {
            alpha: ord.cliques().iter().map(|c| f(c.len())).collect(),
            beta: ord.distinct_separators().iter().map(|s| f(s.vertices.len())).collect(),
        }
    }

    /// Exponents of the reference measure `μ_G` on `Q_G`: `−(|C|+1)/2`.
    pub fn mu(g: &DecomposableGraph) -> Self {
        Self::from_sizes(g, |c| -(c as f64 + 1.0) / 2.0)
    }

    /// Exponents of `ν_G` on `P_G`, read through `φ`: `(|C|+1)/2`.
    pub fn nu(g: &DecomposableGraph) -> Self {
        Self::from_sizes(g, |c| (c as f64 + 1.0) / 2.0)
    }

    pub(crate) fn alpha_at(&self, ord: &CliqueOrdering, j: usize) -> f64 {
        self.alpha[ord.clique_id(j)]
    }
}

/// The two canonical families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CanonicalKind {
    /// `α = β = p` (hyper Wishart).
    Hyper(f64),
    /// `α(C) = −(δ + |C| − 1)/2`, `β(S) = −(δ + |S| − 1)/2` (G-Wishart).
    GWishart(f64),
}

pub fn canonical_shape(g: &DecomposableGraph, kind: CanonicalKind) -> Result<ShapeParam> {
    match kind {
        CanonicalKind::Hyper(p) => {
            let bound = max_clique(g) as f64 - 1.0;
            if !(p > bound / 2.0) {
                return Err(Error::OutOfDomain(format!("hyper shape needs p > {}", bound / 2.0)));
            }
            Ok(ShapeParam::from_sizes(g, |_| p))
        }
        CanonicalKind::GWishart(delta) => {
            if !(delta > 0.0 && delta.is_finite()) {
                return Err(Error::OutOfDomain("G-Wishart shape needs delta > 0".into()));
            }
            Ok(ShapeParam::from_sizes(g, |c| -(delta + c as f64 - 1.0) / 2.0))
        }
    }
}

fn max_clique(g: &DecomposableGraph) -> usize {
    g.canonical().cliques().iter().map(|c| c.len()).max().unwrap_or(1)
}

/// `log Γ_r(p) = r(r−1)/4 log π + Σ_{j=1}^{r} log Γ(p − (j−1)/2)`, for `p > (r−1)/2`.
pub fn log_multigamma(r: usize, p: f64) -> Result<f64> {
    let rf = r as f64;
    if !(p > (rf - 1.0) / 2.0) || !p.is_finite() {
        return Err(Error::OutOfDomain(format!("Γ_{r}({p}) needs p > {}", (rf - 1.0) / 2.0)));
    }
    let mut total = rf * (rf - 1.0) / 4.0 * LN_PI;
    for j in 0..r {
        total += ln_gamma(p - j as f64 / 2.0);
    }
    Ok(total)
}

/// `log H_G(α, β; x) = Σ_C α(C) log det x_C − Σ_S ν(S) β(S) log det x_S`.
pub fn log_h(s: &ShapeParam, x: &IncompleteMatrix) -> Result<f64> {
    let g = x.graph();
    s.check(g)?;
    let ord = g.canonical();
    let mut total = 0.0;
    for (c, a) in ord.cliques().iter().zip(&s.alpha) {
        let ld = logdet_pd(&x.block(c)).ok_or_else(|| Error::NotInQG(format!("clique block {c:?}")))?;
        total += a * ld;
    }
    for (d, b) in ord.distinct_separators().iter().zip(&s.beta) {
        let ld = logdet_pd(&x.block(&d.vertices)).ok_or_else(|| Error::NotInQG("separator block".into()))?;
        total -= d.multiplicity as f64 * b * ld;
    }
    Ok(total)
}

/// Membership report for a shape against one perfect ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeClass {
    /// `δ_2 = Σ_{J(P,S_2)} α_j − ν(S_2) β_2`; `None` when `k = 1`.
    pub delta2: Option<f64>,
    /// `γ_2 = Σ_{J(P,S_2)} (α_j − β_2 + (c_j − s_2)/2)`; `None` when `k = 1`.
    pub gamma2: Option<f64>,
    pub in_a_p: bool,
    pub in_b_p: bool,
    pub in_a1: bool,
    pub in_b1: bool,
    /// `(in 𝒜, in 𝓑)` for homogeneous graphs.
    pub homogeneous: Option<(bool, bool)>,
}

pub fn shape_class(s: &ShapeParam, g: &DecomposableGraph, ord: &CliqueOrdering, tree: Option<&HasseTree>) -> Result<ShapeClass> {
    s.check(g)?;
    let homogeneous = match tree {
        Some(t) => {
            let e = hasse_exponents(t, s)?;
            Some((in_hom_a(t, &e), in_hom_b(t, &e)))
        }
        None => None,
    };
    Ok(ShapeClass {
        delta2: delta2(s, ord),
        gamma2: gamma2(s, ord),
        in_a_p: in_a_p(s, ord),
        in_b_p: in_b_p(s, ord),
        in_a1: in_a1(s, g),
        in_b1: in_b1(s, g),
        homogeneous,
    })
}

fn size(v: &[usize]) -> f64 {
    v.len() as f64
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= EQ_TOL * (1.0 + a.abs().max(b.abs()))
}

pub fn delta2(s: &ShapeParam, ord: &CliqueOrdering) -> Option<f64> {
    if ord.k() < 2 {
        return None;
    }
    let id = ord.separator_id(1)?;
    let occ = ord.occurrences(id);
    Some(occ.iter().map(|&j| s.alpha_at(ord, j)).sum::<f64>() - occ.len() as f64 * s.beta[id])
}

pub fn gamma2(s: &ShapeParam, ord: &CliqueOrdering) -> Option<f64> {
    if ord.k() < 2 {
        return None;
    }
    let id = ord.separator_id(1)?;
    let s2 = size(ord.separator(1));
    Some(
        ord.occurrences(id)
            .iter()
            .map(|&j| s.alpha_at(ord, j) - s.beta[id] + (size(ord.clique(j)) - s2) / 2.0)
            .sum(),
    )
}

/// Equality constraints `Σ_{J(P,S)} (α_j + shift_j) = ν(S) β(S)` for `S ≠ S_2`.
fn equalities_hold(s: &ShapeParam, ord: &CliqueOrdering, shift: impl Fn(usize) -> f64) -> bool {
    let first = ord.separator_id(1);
    (0..ord.distinct_separators().len()).filter(|&id| Some(id) != first).all(|id| {
        let occ = ord.occurrences(id);
        let lhs: f64 = occ.iter().map(|&j| s.alpha_at(ord, j) + shift(j)).sum();
        close(lhs, occ.len() as f64 * s.beta[id])
    })
}

pub fn in_a_p(s: &ShapeParam, ord: &CliqueOrdering) -> bool {
    let k = ord.k();
    if k == 1 {
        return s.alpha[ord.clique_id(0)] > (size(ord.clique(0)) - 1.0) / 2.0;
    }
    let cond2 = (0..k).all(|j| s.alpha_at(ord, j) > (size(ord.clique(j)) - 1.0) / 2.0);
    let s2 = size(ord.separator(1));
    let cond3 = s.alpha_at(ord, 0) + delta2(s, ord).unwrap() > (s2 - 1.0) / 2.0;
    cond2 && cond3 && equalities_hold(s, ord, |_| 0.0)
}

/// Membership in `B_P`. The last condition reads
/// `−α_1 − (c_1 − s_2)/2 − γ_2 > (s_2 − 1)/2`, the domain of the
/// `Γ_{s_2}` factor in `Γ_II`.
pub fn in_b_p(s: &ShapeParam, ord: &CliqueOrdering) -> bool {
    let k = ord.k();
    let c1 = size(ord.clique(0));
    let a1 = s.alpha_at(ord, 0);
    if k == 1 {
        return -a1 > (c1 - 1.0) / 2.0;
    }
    let s2 = size(ord.separator(1));
    let cond2 = -a1 > (c1 - s2 - 1.0) / 2.0
        && (1..k).all(|q| -s.alpha_at(ord, q) > (size(ord.clique(q)) - size(ord.separator(q)) - 1.0) / 2.0);
    let cond3 = -a1 - (c1 - s2) / 2.0 - gamma2(s, ord).unwrap() > (s2 - 1.0) / 2.0;
    let eq = equalities_hold(s, ord, |j| (size(ord.clique(j)) - size(ord.separator(j))) / 2.0);
    cond2 && cond3 && eq
}

fn common_value(values: impl Iterator<Item = f64>) -> Option<f64> {
    let v: Vec<f64> = values.collect();
    let first = *v.first()?;
    v.iter().all(|&x| close(x, first)).then_some(first)
}

pub fn in_a1(s: &ShapeParam, g: &DecomposableGraph) -> bool {
    match common_value(s.alpha.iter().chain(&s.beta).copied()) {
        Some(p) => p > (max_clique(g) as f64 - 1.0) / 2.0,
        None => false,
    }
}

pub fn in_b1(s: &ShapeParam, g: &DecomposableGraph) -> bool {
    let ord = g.canonical();
    let deltas = ord
        .cliques()
        .iter()
        .zip(&s.alpha)
        .map(|(c, a)| -2.0 * a - size(c) + 1.0)
        .chain(ord.distinct_separators().iter().zip(&s.beta).map(|(d, b)| -2.0 * b - size(&d.vertices) + 1.0));
    matches!(common_value(deltas), Some(d) if d > 0.0)
}

/// `ρ_u` and `λ_u` on the nodes of a Hasse tree.
#[derive(Debug, Clone, PartialEq)]
pub struct HasseExponents {
    pub rho: Vec<f64>,
    pub lambda: Vec<f64>,
}

/// `ρ_u = Σ_{u⪯t} α_t − Σ_{u⪯q} ν(q) β_q` and
/// `λ_u = ρ_u + Σ_{v≻u} n_v/2 − Σ_{v≺u} n_v/2`.
pub fn hasse_exponents(t: &HasseTree, s: &ShapeParam) -> Result<HasseExponents> {
    let mut rho = Vec::with_capacity(t.len());
    let mut lambda = Vec::with_capacity(t.len());
    for u in 0..t.len() {
        let mut r = 0.0;
        for v in core::iter::once(u).chain(t.descendants(u)) {
            r += match t.nodes[v].role {
                NodeRole::Clique(id) => *s.alpha.get(id).ok_or_else(|| Error::ShapeMismatch("alpha".into()))?,
                NodeRole::Separator { id, nu } => {
                    -(nu as f64) * *s.beta.get(id).ok_or_else(|| Error::ShapeMismatch("beta".into()))?
                }
            };
        }
        rho.push(r);
        lambda.push(r + t.descendant_weight(u) as f64 / 2.0 - t.ancestor_weight(u) as f64 / 2.0);
    }
    Ok(HasseExponents { rho, lambda })
}

/// `𝒜`: `ρ_u > (m_u − 1)/2` for every node.
pub fn in_hom_a(t: &HasseTree, e: &HasseExponents) -> bool {
    (0..t.len()).all(|u| e.rho[u] > (t.m(u) as f64 - 1.0) / 2.0)
}

/// `𝓑`: `−ρ_u > (Σ_{v⪰u} n_v − 1)/2` for every node.
pub fn in_hom_b(t: &HasseTree, e: &HasseExponents) -> bool {
    (0..t.len()).all(|u| -e.rho[u] > ((t.weight(u) + t.descendant_weight(u)) as f64 - 1.0) / 2.0)
}

/// Which formula a normalising constant is computed from.
#[derive(Debug, Clone, Copy)]
pub enum Path<'a> {
    Order(&'a CliqueOrdering),
    Homogeneous(&'a HasseTree),
}

fn not_admissible(what: &str) -> Error {
    Error::ShapeNotAdmissible(format!("shape is outside {what}"))
}

/// `log Γ_I(α, β)`.
pub fn log_gamma_i(s: &ShapeParam, path: Path<'_>) -> Result<f64> {
    match path {
        Path::Order(ord) => {
            if !in_a_p(s, ord) {
                return Err(not_admissible("A_P"));
            }
            let c1 = ord.clique(0).len();
            let a1 = s.alpha_at(ord, 0);
            if ord.k() == 1 {
                return log_multigamma(c1, a1);
            }
            let s2 = ord.separator(1).len();
            let mut total = log_multigamma(s2, a1 + delta2(s, ord).unwrap())? + log_multigamma(c1, a1)?
                - log_multigamma(s2, a1)?;
            for q in 1..ord.k() {
                let a = s.alpha_at(ord, q);
                total += log_multigamma(ord.clique(q).len(), a)? - log_multigamma(ord.separator(q).len(), a)?;
            }
            Ok(total)
        }
        Path::Homogeneous(t) => {
            let e = hasse_exponents(t, s)?;
            if !in_hom_a(t, &e) {
                return Err(not_admissible("the homogeneous set 𝒜"));
            }
            let mut total = 0.0;
            for u in 0..t.len() {
                let (n, above) = (t.weight(u), t.ancestor_weight(u) as f64);
                total += (n as f64) * above / 2.0 * LN_PI + log_multigamma(n, e.rho[u] - above / 2.0)?;
            }
            Ok(total)
        }
    }
}

/// `log Γ_II(α, β)`.
pub fn log_gamma_ii(s: &ShapeParam, path: Path<'_>) -> Result<f64> {
    match path {
        Path::Order(ord) => {
            if !in_b_p(s, ord) {
                return Err(not_admissible("B_P"));
            }
            let c1 = ord.clique(0).len();
            let a1 = s.alpha_at(ord, 0);
            if ord.k() == 1 {
                return log_multigamma(c1, -a1);
            }
            let s2 = ord.separator(1).len();
            let half = (c1 - s2) as f64 / 2.0;
            let mut total = log_multigamma(s2, -a1 - half - gamma2(s, ord).unwrap())? + log_multigamma(c1, -a1)?
                - log_multigamma(s2, -a1 - half)?;
            for j in 1..ord.k() {
                let a = s.alpha_at(ord, j);
                let (c, sj) = (ord.clique(j).len(), ord.separator(j).len());
                total += log_multigamma(c, -a)? - log_multigamma(sj, -a - (c - sj) as f64 / 2.0)?;
            }
            Ok(total)
        }
        Path::Homogeneous(t) => {
            let e = hasse_exponents(t, s)?;
            if !in_hom_b(t, &e) {
                return Err(not_admissible("the homogeneous set 𝓑"));
            }
            let mut total = 0.0;
            for u in 0..t.len() {
                let (n, above, below) = (t.weight(u), t.ancestor_weight(u) as f64, t.descendant_weight(u) as f64);
                total += (n as f64) * above / 2.0 * LN_PI + log_multigamma(n, -e.rho[u] - below / 2.0)?;
            }
            Ok(total)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{enumerate_perfect_orders, homogeneous_structure, Homogeneity};
    use alloc::vec;

    fn g0() -> DecomposableGraph {
        DecomposableGraph::new(6, &[(1, 2), (1, 3), (2, 3), (1, 4), (2, 4), (1, 5), (2, 5), (1, 6)]).unwrap()
    }

    fn tree(g: &DecomposableGraph) -> HasseTree {
        match homogeneous_structure(g).unwrap() {
            Homogeneity::Homogeneous(t) => t,
            _ => panic!("not homogeneous"),
        }
    }

    #[test]
    fn multigamma_small_cases() {
        // Γ_1(p) = Γ(p); Γ_2(p) = √π Γ(p) Γ(p − 1/2).
        assert!((log_multigamma(1, 3.0).unwrap() - 2f64.ln()).abs() < 1e-14);
        let expect = 0.5 * LN_PI + ln_gamma(2.5) + ln_gamma(2.0);
        assert!((log_multigamma(2, 2.5).unwrap() - expect).abs() < 1e-14);
        assert_eq!(log_multigamma(0, 0.1).unwrap(), 0.0);
        assert!(matches!(log_multigamma(3, 1.0), Err(Error::OutOfDomain(_))));
    }

    #[test]
    fn a4_unit_normaliser_is_pi_cubed() {
        let g = DecomposableGraph::path(4).unwrap();
        let s = canonical_shape(&g, CanonicalKind::Hyper(1.0)).unwrap();
        let v = log_gamma_i(&s, Path::Order(g.canonical())).unwrap();
        assert!((v - 3.0 * LN_PI).abs() < 1e-12);
    }

    #[test]
    fn a4_b_p_example() {
        let g = DecomposableGraph::path(4).unwrap();
        let s = ShapeParam::new(&g, vec![-1.0, -1.0, -1.0], vec![1.0, -0.5]).unwrap();
        let c = shape_class(&s, &g, g.canonical(), None).unwrap();
        assert!(c.in_b_p);
        assert!(!c.in_a_p);
        assert_eq!(c.gamma2, Some(-1.5));
    }

    #[test]
    fn g0_hasse_exponents() {
        let g = g0();
        let t = tree(&g);
        let s = ShapeParam::new(&g, vec![2.0, 2.0, 2.0, 1.0], vec![1.0, 1.0]).unwrap();
        let e = hasse_exponents(&t, &s).unwrap();
        // Nodes: {1}, {2}, {3}, {4}, {5}, {6}.
        assert_eq!(e.rho, vec![4.0, 4.0, 2.0, 2.0, 2.0, 1.0]);
        assert_eq!(e.lambda, vec![6.5, 5.0, 1.0, 1.0, 1.0, 0.5]);
    }

    #[test]
    fn g0_order_and_tree_normalisers_agree_for_hyper() {
        let g = g0();
        let t = tree(&g);
        for p in [1.2, 2.0, 3.7] {
            let s = canonical_shape(&g, CanonicalKind::Hyper(p)).unwrap();
            let a = log_gamma_i(&s, Path::Order(g.canonical())).unwrap();
            let b = log_gamma_i(&s, Path::Homogeneous(&t)).unwrap();
            assert!((a - b).abs() < 1e-10, "{a} {b}");
        }
    }

    #[test]
    fn gwishart_normaliser_is_clique_ratio() {
        let g = g0();
        let t = tree(&g);
        for delta in [0.3, 1.0, 4.5] {
            let s = canonical_shape(&g, CanonicalKind::GWishart(delta)).unwrap();
            let ord = g.canonical();
            let mut expect = 0.0;
            for c in ord.cliques() {
                expect += log_multigamma(c.len(), (delta + c.len() as f64 - 1.0) / 2.0).unwrap();
            }
            for j in 1..ord.k() {
                let sj = ord.separator(j).len();
                expect -= log_multigamma(sj, (delta + sj as f64 - 1.0) / 2.0).unwrap();
            }
            for o in enumerate_perfect_orders(&g, 8).unwrap() {
                assert!((log_gamma_ii(&s, Path::Order(&o)).unwrap() - expect).abs() < 1e-10);
            }
            assert!((log_gamma_ii(&s, Path::Homogeneous(&t)).unwrap() - expect).abs() < 1e-10);
        }
    }

    #[test]
    fn canonical_domains() {
        let g = g0();
        assert!(canonical_shape(&g, CanonicalKind::Hyper(1.0)).is_err());
        assert!(canonical_shape(&g, CanonicalKind::GWishart(0.0)).is_err());
        let s = canonical_shape(&g, CanonicalKind::GWishart(0.5)).unwrap();
        let c = shape_class(&s, &g, g.canonical(), None).unwrap();
        assert!(c.in_b1 && c.in_b_p && !c.in_a1);
    }
}
