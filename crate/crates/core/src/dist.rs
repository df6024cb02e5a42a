//! The four Wishart families on `Q_G` and `P_G`: densities, samplers,
//! means and Laplace transforms, plus the two matrix-variate F laws.
//!
//! Densities are with respect to Lebesgue measure on the free coordinates
//! `x_ij`, `i ≤ j`, `(i, j) ∈ E`.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand::Rng;

use crate::cone::{
    self, head_rows, phi, precision_of, schur_pad, split_blocks, trace_pair, Assembler,
    BlockDecomposition, IncompleteMatrix, SparsePrecision,
};
use crate::error::{Error, Result};
use crate::graph::{
    enumerate_perfect_orders, homogeneous_structure, CliqueOrdering, DecomposableGraph, HasseTree, Homogeneity,
    MAX_ENUMERATION_CLIQUES,
};
use crate::linalg::{self, add_sub, inv_pd, principal, sub};
use crate::rng::RngStream;
use crate::shape::{
    delta2, gamma2, hasse_exponents, in_a_p, in_b_p, in_hom_a, in_hom_b, log_gamma_i, log_gamma_ii, log_h, Path,
    ShapeParam,
};
use crate::wishart::{sample_inv_wishart, sample_matrix_normal, sample_wishart};

/// The four families. Type I and inverse type II live on `Q_G`; type II and
/// inverse type I live on `P_G`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// `W_{Q_G}(α, β, σ)`: density `∝ e^{−⟨x, σ̂⁻¹⟩} H_G(α, β; x)` w.r.t. `μ_G`.
    TypeI,
    /// `W_{P_G}(α, β, θ)`: density `∝ e^{−⟨θ, y⟩} H_G(α, β; φ(y))` w.r.t. `ν_G`.
    TypeII,
    /// Image of type I under `x ↦ x̂⁻¹`.
    InvTypeI,
    /// Image of type II under `y ↦ φ(y)`.
    InvTypeII,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::TypeI => "typeI",
            Family::TypeII => "typeII",
            Family::InvTypeI => "invTypeI",
            Family::InvTypeII => "invTypeII",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "typeI" => Some(Family::TypeI),
            "typeII" => Some(Family::TypeII),
            "invTypeI" => Some(Family::InvTypeI),
            "invTypeII" => Some(Family::InvTypeII),
            _ => None,
        }
    }

    /// Whether the shape must lie in an `A` set (type I normaliser) rather
    /// than a `B` set.
    fn uses_gamma_i(self) -> bool {
        matches!(self, Family::TypeI | Family::InvTypeI)
    }

    /// Whether points live on `Q_G`.
    pub fn on_qg(self) -> bool {
        matches!(self, Family::TypeI | Family::InvTypeII)
    }
}

/// A point of `Q_G` or `P_G`.
#[derive(Debug, Clone, PartialEq)]
pub enum Point {
    Q(IncompleteMatrix),
    P(SparsePrecision),
}

impl Point {
    pub fn values(&self) -> &DMatrix<f64> {
        match self {
            Point::Q(x) => x.values(),
            Point::P(y) => y.values(),
        }
    }

    pub fn as_q(&self) -> Option<&IncompleteMatrix> {
        match self {
            Point::Q(x) => Some(x),
            Point::P(_) => None,
        }
    }

    pub fn as_p(&self) -> Option<&SparsePrecision> {
        match self {
            Point::P(y) => Some(y),
            Point::Q(_) => None,
        }
    }
}

/// Why the shape is admissible: membership in `A_P`/`B_P` for a perfect
/// ordering, or in the homogeneous set `𝒜`/`𝓑`.
#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    Order(CliqueOrdering),
    Homogeneous(HasseTree),
}

impl Certificate {
    pub fn path(&self) -> Path<'_> {
        match self {
            Certificate::Order(o) => Path::Order(o),
            Certificate::Homogeneous(t) => Path::Homogeneous(t),
        }
    }
}

/// Which admissible set to look for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `A_P` or `𝒜` (type I normaliser).
    A,
    /// `B_P` or `𝓑` (type II normaliser).
    B,
}

/// Finds a certificate: the canonical ordering first, then every other
/// perfect ordering (when there are at most eight cliques), then the Hasse
/// tree of a homogeneous graph.
pub fn find_certificate(s: &ShapeParam, g: &DecomposableGraph, side: Side) -> Result<Certificate> {
    s.check(g)?;
    let member = |o: &CliqueOrdering| match side {
        Side::A => in_a_p(s, o),
        Side::B => in_b_p(s, o),
    };
    if member(g.canonical()) {
        return Ok(Certificate::Order(g.canonical().clone()));
    }
    if g.canonical().k() <= MAX_ENUMERATION_CLIQUES {
        if let Some(o) = enumerate_perfect_orders(g, MAX_ENUMERATION_CLIQUES)?.into_iter().find(|o| member(o)) {
            return Ok(Certificate::Order(o));
        }
    }
    if let Homogeneity::Homogeneous(t) = homogeneous_structure(g)? {
        let e = hasse_exponents(&t, s)?;
        let ok = match side {
            Side::A => in_hom_a(&t, &e),
            Side::B => in_hom_b(&t, &e),
        };
        if ok {
            return Ok(Certificate::Homogeneous(t));
        }
    }
    let set = match side {
        Side::A => "every A_P and the homogeneous set",
        Side::B => "every B_P and the homogeneous set",
    };
    Err(Error::ShapeNotAdmissible(format!("shape lies outside {set}")))
}

/// A fully specified member of one of the four families.
#[derive(Debug, Clone)]
pub struct WishartSpec {
    family: Family,
    shape: ShapeParam,
    scale: IncompleteMatrix,
    certificate: Certificate,
    /// `σ̂⁻¹` for the type I families.
    scale_precision: SparsePrecision,
    scale_blocks: Option<BlockDecomposition>,
    log_gamma: f64,
    log_h_scale: f64,
}

impl WishartSpec {
    /// `scale` is `σ ∈ Q_G` for the type I families and `θ ∈ Q_G` for the
    /// type II families.
    pub fn new(family: Family, shape: ShapeParam, scale: IncompleteMatrix) -> Result<Self> {
        let side = if family.uses_gamma_i() { Side::A } else { Side::B };
        let cert = find_certificate(&shape, scale.graph(), side)?;
        Self::with_certificate(family, shape, scale, cert)
    }

    /// Uses the given perfect ordering for the normaliser and the sampler.
    pub fn with_order(family: Family, shape: ShapeParam, scale: IncompleteMatrix, ord: CliqueOrdering) -> Result<Self> {
        Self::with_certificate(family, shape, scale, Certificate::Order(ord))
    }

    pub fn with_certificate(family: Family, shape: ShapeParam, scale: IncompleteMatrix, cert: Certificate) -> Result<Self> {
        shape.check(scale.graph())?;
        scale.check_qg()?;
        let log_gamma = if family.uses_gamma_i() {
            log_gamma_i(&shape, cert.path())?
        } else {
            log_gamma_ii(&shape, cert.path())?
        };
        let log_h_scale = log_h(&shape, &scale)?;
        let scale_precision = precision_of(&scale)?;
        let scale_blocks = match &cert {
            Certificate::Order(o) => Some(split_blocks(&scale, o)?),
            Certificate::Homogeneous(_) => None,
        };
        Ok(WishartSpec { family, shape, scale, certificate: cert, scale_precision, scale_blocks, log_gamma, log_h_scale })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn shape(&self) -> &ShapeParam {
        &self.shape
    }

    pub fn scale(&self) -> &IncompleteMatrix {
        &self.scale
    }

    pub fn graph(&self) -> &Arc<DecomposableGraph> {
        self.scale.graph()
    }

    pub fn certificate(&self) -> &Certificate {
        &self.certificate
    }

    /// `log Γ_I` or `log Γ_II`, whichever the family uses.
    pub fn log_gamma(&self) -> f64 {
        self.log_gamma
    }

    /// `log H_G(α, β; scale)`.
    pub fn log_h_scale(&self) -> f64 {
        self.log_h_scale
    }

    /// Log density at `point`.
    pub fn logpdf(&self, point: &Point) -> Result<f64> {
        let g = self.graph().as_ref();
        let mu = ShapeParam::mu(g);
        let nu = ShapeParam::nu(g);
        let norm = self.log_gamma + self.log_h_scale;
        match (self.family, point) {
            (Family::TypeI, Point::Q(x)) => {
                let x = support_q(x)?;
                Ok(-trace_pair(x, &self.scale_precision)? + log_h(&self.shape, x)? + log_h(&mu, x)? - norm)
            }
            (Family::InvTypeII, Point::Q(x)) => {
                let x = support_q(x)?;
                let xinv = precision_of(x)?;
                Ok(-trace_pair(&self.scale, &xinv)? + log_h(&self.shape, x)? + log_h(&mu, x)? - norm)
            }
            (Family::TypeII, Point::P(y)) => {
                let x = support_p(y)?;
                Ok(-trace_pair(&self.scale, y)? + log_h(&self.shape, &x)? + log_h(&nu, &x)? - norm)
            }
            (Family::InvTypeI, Point::P(y)) => {
                let x = support_p(y)?;
                Ok(-trace_pair(&x, &self.scale_precision)? + log_h(&self.shape, &x)? + log_h(&nu, &x)? - norm)
            }
            _ => Err(Error::OutOfSupport(format!("{} lives on the other cone", self.family.name()))),
        }
    }

    /// One draw. Type I uses the block sampler along the certificate's
    /// ordering, or the Hasse-tree sampler for homogeneous certificates; the
    /// type II families need a `B_P` certificate.
    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Point> {
        match self.family {
            Family::TypeI => Ok(Point::Q(self.draw_type1(rng)?)),
            Family::InvTypeI => Ok(Point::P(precision_of(&self.draw_type1(rng)?)?)),
            Family::InvTypeII => Ok(Point::Q(self.draw_inv_type2(rng)?)),
            Family::TypeII => Ok(Point::P(precision_of(&self.draw_inv_type2(rng)?)?)),
        }
    }

    /// `n` draws; draw `i` uses substream `i` of `stream`.
    pub fn sample(&self, stream: &RngStream, n: usize) -> Result<Vec<Point>> {
        (0..n).map(|i| self.sample_one(&mut stream.substream(i as u64).rng())).collect()
    }

    fn draw_type1<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<IncompleteMatrix> {
        match (&self.certificate, &self.scale_blocks) {
            (Certificate::Order(ord), Some(b)) => Ok(sample_type1_order(&self.shape, self.graph(), ord, b, rng)?.0),
            (Certificate::Homogeneous(t), _) => sample_type1_tree(&self.shape, &self.scale, t, rng),
            _ => Err(Error::InternalInconsistency("missing scale blocks".into())),
        }
    }

    /// A type I draw with the log-determinants of its clique blocks in the
    /// certificate's order, taken from the sampled Schur complements so that
    /// nearly singular blocks keep their precision.
    pub(crate) fn draw_type1_logdets<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(IncompleteMatrix, Option<Vec<f64>>)> {
        match (&self.certificate, &self.scale_blocks) {
            (Certificate::Order(ord), Some(b)) => {
                let (x, ld) = sample_type1_order(&self.shape, self.graph(), ord, b, rng)?;
                Ok((x, Some(ld)))
            }
            _ => Ok((self.draw_type1(rng)?, None)),
        }
    }

    fn draw_inv_type2<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<IncompleteMatrix> {
        match (&self.certificate, &self.scale_blocks) {
            (Certificate::Order(ord), Some(b)) => sample_inv_type2_order(&self.shape, &self.scale, ord, b, rng),
            _ => Err(Error::ShapeNotAdmissible(
                "sampling the type II families needs a B_P certificate".into(),
            )),
        }
    }

    /// Closed-form mean: type I on `Q_G`, type II on `P_G`.
    pub fn mean(&self) -> Result<Point> {
        match self.family {
            Family::TypeI => Ok(Point::Q(mean_type1(&self.shape, &self.scale)?)),
            Family::TypeII => Ok(Point::P(mean_type2(&self.shape, &self.scale)?)),
            f => Err(Error::OutOfDomain(format!("no closed-form mean for {}", f.name()))),
        }
    }
}

fn support_q(x: &IncompleteMatrix) -> Result<&IncompleteMatrix> {
    if x.in_qg() {
        Ok(x)
    } else {
        Err(Error::OutOfSupport("point is not in Q_G".into()))
    }
}

fn support_p(y: &SparsePrecision) -> Result<IncompleteMatrix> {
    phi(y).map_err(|_| Error::OutOfSupport("point is not in P_G".into()))
}

/// Type I along a perfect ordering.
fn sample_type1_order<R: Rng + ?Sized>(
    s: &ShapeParam,
    g: &Arc<DecomposableGraph>,
    ord: &CliqueOrdering,
    sig: &BlockDecomposition,
    rng: &mut R,
) -> Result<(IncompleteMatrix, Vec<f64>)> {
    let mut asm = Assembler::new(ord, g.n());
    let mut logdets = Vec::with_capacity(ord.k());
    let ld = |m: &DMatrix<f64>| linalg::logdet_pd(m).ok_or_else(|| Error::InternalInconsistency("singular Wishart draw".into()));
    let a1 = s.alpha_at(ord, 0);
    if ord.k() == 1 {
        let x = sample_wishart(a1, &sig.first, rng)?;
        logdets.push(ld(&x)?);
        asm.head(&x, &DMatrix::zeros(0, 0), &DMatrix::zeros(0, 0));
    } else {
        let s2 = ord.separator(1).len() as f64;
        let sep = sample_wishart(a1 + delta2(s, ord).unwrap(), &sig.sep, rng)?;
        let ratio = sample_matrix_normal(&sig.first_ratio, &sig.first, &sep, rng)?;
        let first = sample_wishart(a1 - s2 / 2.0, &sig.first, rng)?;
        logdets.push(ld(&first)? + ld(&sep)?);
        asm.head(&first, &ratio, &sep);
        for j in 1..ord.k() {
            let sj = ord.separator(j).len() as f64;
            let schur = sample_wishart(s.alpha_at(ord, j) - sj / 2.0, &sig.schur[j - 1], rng)?;
            let xs = asm.sep_block(j);
            logdets.push(ld(&schur)? + ld(&xs)?);
            let ratio = sample_matrix_normal(&sig.ratio[j - 1], &sig.schur[j - 1], &xs, rng)?;
            asm.push(j, &schur, &ratio);
        }
    }
    let x = asm.finish();
    Ok((IncompleteMatrix::from_fn(g.clone(), move |i, j| x[(i, j)]), logdets))
}

/// Inverse type II along a perfect ordering; the blocks are independent.
fn sample_inv_type2_order<R: Rng + ?Sized>(
    s: &ShapeParam,
    theta: &IncompleteMatrix,
    ord: &CliqueOrdering,
    th: &BlockDecomposition,
    rng: &mut R,
) -> Result<IncompleteMatrix> {
    let g = theta.graph();
    let mut asm = Assembler::new(ord, g.n());
    let a1 = s.alpha_at(ord, 0);
    if ord.k() == 1 {
        let x = sample_inv_wishart(-a1, &th.first, rng)?;
        asm.head(&x, &DMatrix::zeros(0, 0), &DMatrix::zeros(0, 0));
    } else {
        let c1 = ord.clique(0).len() as f64;
        let s2 = ord.separator(1).len() as f64;
        let first = sample_inv_wishart(-a1, &th.first, rng)?;
        let sep = sample_inv_wishart(-(a1 + (c1 - s2) / 2.0 + gamma2(s, ord).unwrap()), &th.sep, rng)?;
        let ratio = sample_matrix_normal(&th.first_ratio, &first, &th.sep, rng)?;
        asm.head(&first, &ratio, &sep);
        for j in 1..ord.k() {
            let schur = sample_inv_wishart(-s.alpha_at(ord, j), &th.schur[j - 1], rng)?;
            let theta_s = theta.block(ord.separator(j));
            let ratio = sample_matrix_normal(&th.ratio[j - 1], &schur, &theta_s, rng)?;
            asm.push(j, &schur, &ratio);
        }
    }
    let x = asm.finish();
    Ok(IncompleteMatrix::from_fn(g.clone(), move |i, j| x[(i, j)]))
}

/// Type I over the Hasse tree of a homogeneous graph: `x_{[u]·}` are
/// independent `w_{n_u}(ρ_u − Σ_{v≺u} n_v/2, σ_{[u]·})`, and the ratio
/// `x_{[u⟩} x_{⟨u⟩}⁻¹` given the ancestors is `MN(σ_{[u⟩}σ_{⟨u⟩}⁻¹, σ_{[u]·}, x_{⟨u⟩})`.
fn sample_type1_tree<R: Rng + ?Sized>(
    s: &ShapeParam,
    sigma: &IncompleteMatrix,
    t: &HasseTree,
    rng: &mut R,
) -> Result<IncompleteMatrix> {
    let e = hasse_exponents(t, s)?;
    let n = sigma.graph().n();
    let sv = sigma.values();
    let mut x = DMatrix::zeros(n, n);
    for u in 0..t.len() {
        let cls = &t.nodes[u].vertices;
        let anc: Vec<usize> = {
            let mut a: Vec<usize> = t.ancestors(u).iter().flat_map(|&v| t.nodes[v].vertices.iter().copied()).collect();
            a.sort_unstable();
            a
        };
        let shape = e.rho[u] - t.ancestor_weight(u) as f64 / 2.0;
        if anc.is_empty() {
            let xu = sample_wishart(shape, &principal(sv, cls), rng)?;
            linalg::set_sub(&mut x, cls, cls, &xu);
            continue;
        }
        let sa_inv = inv_pd(&principal(sv, &anc)).ok_or(Error::NotPositiveDefinite)?;
        let cross = sub(sv, cls, &anc);
        let mean = &cross * &sa_inv;
        let schur_sigma = linalg::symmetrize(&(principal(sv, cls) - &mean * cross.transpose()));
        let xu = sample_wishart(shape, &schur_sigma, rng)?;
        let xa = principal(&x, &anc);
        let ratio = sample_matrix_normal(&mean, &schur_sigma, &xa, rng)?;
        let xc = &ratio * &xa;
        linalg::set_sub(&mut x, cls, &anc, &xc);
        linalg::set_sub(&mut x, &anc, cls, &xc.transpose());
        linalg::set_sub(&mut x, cls, cls, &linalg::symmetrize(&(xu + &xc * ratio.transpose())));
    }
    Ok(IncompleteMatrix::from_fn(sigma.graph().clone(), move |i, j| x[(i, j)]))
}

/// `E[X]` for `X ~ W_{Q_G}(α, β, σ)`:
/// `π(Σ_C α_C (σ̂ − σ̂_{V∖C·C}) − Σ_S ν(S) β_S (σ̂ − σ̂_{V∖S·S}))`,
/// the gradient of the cumulant function at `−σ̂⁻¹`.
pub fn mean_type1(s: &ShapeParam, sigma: &IncompleteMatrix) -> Result<IncompleteMatrix> {
    let g = sigma.graph();
    s.check(g)?;
    let sh = cone::complete(sigma)?;
    let ord = g.canonical();
    let mut m = DMatrix::zeros(g.n(), g.n());
    for (c, a) in ord.cliques().iter().zip(&s.alpha) {
        m += (&sh - schur_pad(&sh, c)?) * *a;
    }
    for (d, b) in ord.distinct_separators().iter().zip(&s.beta) {
        m -= (&sh - schur_pad(&sh, &d.vertices)?) * (*b * d.multiplicity as f64);
    }
    cone::project(&linalg::symmetrize(&m), g)
}

/// `E[Y]` for `Y ~ W_{P_G}(α, β, θ)`:
/// `−Σ_C α_C (θ_C⁻¹)⁰ + Σ_S ν(S) β_S (θ_S⁻¹)⁰`.
pub fn mean_type2(s: &ShapeParam, theta: &IncompleteMatrix) -> Result<SparsePrecision> {
    let g = theta.graph();
    s.check(g)?;
    let ord = g.canonical();
    let mut m = DMatrix::zeros(g.n(), g.n());
    for (c, a) in ord.cliques().iter().zip(&s.alpha) {
        let inv = inv_pd(&theta.block(c)).ok_or_else(|| Error::NotInQG(format!("clique {c:?}")))?;
        add_sub(&mut m, c, &inv, -a);
    }
    for (d, b) in ord.distinct_separators().iter().zip(&s.beta) {
        let inv = inv_pd(&theta.block(&d.vertices)).ok_or_else(|| Error::NotInQG("separator".into()))?;
        add_sub(&mut m, &d.vertices, &inv, b * d.multiplicity as f64);
    }
    SparsePrecision::from_dense(g.clone(), &linalg::symmetrize(&m))
}

/// Cumulant function of the type I family, `k(y) = log H_G(α, β; φ(−y))`
/// for `−y ∈ P_G`.
pub fn cumulant_type1(s: &ShapeParam, y: &SparsePrecision) -> Result<f64> {
    let x = phi(&y.scaled(-1.0)).map_err(|_| Error::OutOfDomain("−y is not in P_G".into()))?;
    log_h(s, &x)
}

/// `log E e^{⟨X, t⟩} = log H_G(α, β; φ(σ̂⁻¹ − t)) − log H_G(α, β; σ)` for type I.
pub fn log_laplace_type1(s: &ShapeParam, sigma: &IncompleteMatrix, t: &SparsePrecision) -> Result<f64> {
    let y = precision_of(sigma)?.sub(t)?;
    let x = phi(&y).map_err(|_| Error::OutOfDomain("σ̂⁻¹ − t is not in P_G".into()))?;
    Ok(log_h(s, &x)? - log_h(s, sigma)?)
}

/// `log E e^{⟨t, Y⟩} = log H_G(α, β; θ − t) − log H_G(α, β; θ)` for type II.
pub fn log_laplace_type2(s: &ShapeParam, theta: &IncompleteMatrix, t: &IncompleteMatrix) -> Result<f64> {
    let d = theta.sub(t)?;
    if !d.in_qg() {
        return Err(Error::OutOfDomain("θ − t is not in Q_G".into()));
    }
    Ok(log_h(s, &d)? - log_h(s, theta)?)
}

/// Matrix-variate F law of the first kind on `Q_G`, with density
/// proportional to
/// `H(−α′; σ) H(α′ − α; σ + x) H(α; x)` w.r.t. `μ_G`.
#[derive(Debug, Clone)]
pub struct FirstKindF {
    alpha: ShapeParam,
    alpha_prime: ShapeParam,
    sigma: IncompleteMatrix,
    log_norm: f64,
}

impl FirstKindF {
    /// Needs `(α, β)` in an `A` set and `(α′, β′)`, `(α′ − α, β′ − β)` in `B` sets.
    pub fn new(alpha: ShapeParam, alpha_prime: ShapeParam, sigma: IncompleteMatrix) -> Result<Self> {
        let g = sigma.graph().clone();
        sigma.check_qg()?;
        let diff = alpha_prime.sub(&alpha);
        let c1 = find_certificate(&alpha, &g, Side::A)?;
        let c2 = find_certificate(&alpha_prime, &g, Side::B)?;
        let c3 = find_certificate(&diff, &g, Side::B)?;
        let log_norm = log_gamma_ii(&diff, c3.path())? - log_gamma_i(&alpha, c1.path())?
            - log_gamma_ii(&alpha_prime, c2.path())?;
        Ok(FirstKindF { alpha, alpha_prime, sigma, log_norm })
    }

    pub fn logpdf(&self, x: &IncompleteMatrix) -> Result<f64> {
        let x = support_q(x)?;
        let g = self.sigma.graph();
        let diff = self.alpha_prime.sub(&self.alpha);
        Ok(self.log_norm + log_h(&self.alpha_prime.scaled(-1.0), &self.sigma)?
            + log_h(&diff, &self.sigma.add(x)?)?
            + log_h(&self.alpha, x)?
            + log_h(&ShapeParam::mu(g), x)?)
    }
}

/// Matrix-variate F law of the second kind on `P_G`, with density
/// proportional to `H(−α; φ(θ)) H(α − α′; φ(θ + y)) H(α′; φ(y))` w.r.t. `ν_G`.
#[derive(Debug, Clone)]
pub struct SecondKindF {
    alpha: ShapeParam,
    alpha_prime: ShapeParam,
    theta: SparsePrecision,
    log_norm: f64,
}

impl SecondKindF {
    /// Needs `(α, β)`, `(α − α′, β − β′)` in `A` sets and `(α′, β′)` in a `B` set.
    pub fn new(alpha: ShapeParam, alpha_prime: ShapeParam, theta: SparsePrecision) -> Result<Self> {
        let g = theta.graph().clone();
        if !theta.in_pg() {
            return Err(Error::NotInPG);
        }
        let diff = alpha.sub(&alpha_prime);
        let c1 = find_certificate(&alpha, &g, Side::A)?;
        let c2 = find_certificate(&alpha_prime, &g, Side::B)?;
        let c3 = find_certificate(&diff, &g, Side::A)?;
        let log_norm =
            log_gamma_i(&diff, c3.path())? - log_gamma_i(&alpha, c1.path())? - log_gamma_ii(&alpha_prime, c2.path())?;
        Ok(SecondKindF { alpha, alpha_prime, theta, log_norm })
    }

    pub fn logpdf(&self, y: &SparsePrecision) -> Result<f64> {
        let x = support_p(y)?;
        let g = self.theta.graph();
        let diff = self.alpha.sub(&self.alpha_prime);
        let xt = phi(&self.theta)?;
        let xs = phi(&self.theta.add(y)?)?;
        Ok(self.log_norm + log_h(&self.alpha.scaled(-1.0), &xt)?
            + log_h(&diff, &xs)?
            + log_h(&self.alpha_prime, &x)?
            + log_h(&ShapeParam::nu(g), &x)?)
    }
}

/// Sum of the block log densities of the inverse type II law in the
/// coordinates of [`split_blocks`].
pub(crate) fn inv_type2_block_logpdf(
    s: &ShapeParam,
    theta: &IncompleteMatrix,
    ord: &CliqueOrdering,
    x: &BlockDecomposition,
) -> Result<f64> {
    use crate::wishart::{log_inv_wishart_pdf, log_matrix_normal_pdf};
    let th = split_blocks(theta, ord)?;
    let a1 = s.alpha_at(ord, 0);
    if ord.k() == 1 {
        return log_inv_wishart_pdf(&x.first, -a1, &th.first);
    }
    let c1 = ord.clique(0).len() as f64;
    let s2 = ord.separator(1).len() as f64;
    let mut total = log_inv_wishart_pdf(&x.first, -a1, &th.first)?
        + log_inv_wishart_pdf(&x.sep, -(a1 + (c1 - s2) / 2.0 + gamma2(s, ord).unwrap()), &th.sep)?
        + log_matrix_normal_pdf(&x.first_ratio, &th.first_ratio, &x.first, &th.sep)?;
    for j in 1..ord.k() {
        let theta_s = theta.block(ord.separator(j));
        total += log_inv_wishart_pdf(&x.schur[j - 1], -s.alpha_at(ord, j), &th.schur[j - 1])?
            + log_matrix_normal_pdf(&x.ratio[j - 1], &th.ratio[j - 1], &x.schur[j - 1], &theta_s)?;
    }
    Ok(total)
}

/// Same for the type I law.
pub(crate) fn type1_block_logpdf(
    s: &ShapeParam,
    sigma: &IncompleteMatrix,
    ord: &CliqueOrdering,
    x: &BlockDecomposition,
    xv: &IncompleteMatrix,
) -> Result<f64> {
    use crate::wishart::{log_matrix_normal_pdf, log_wishart_pdf};
    let sg = split_blocks(sigma, ord)?;
    let a1 = s.alpha_at(ord, 0);
    if ord.k() == 1 {
        return log_wishart_pdf(&x.first, a1, &sg.first);
    }
    let s2 = ord.separator(1).len() as f64;
    let mut total = log_wishart_pdf(&x.sep, a1 + delta2(s, ord).unwrap(), &sg.sep)?
        + log_matrix_normal_pdf(&x.first_ratio, &sg.first_ratio, &sg.first, &x.sep)?
        + log_wishart_pdf(&x.first, a1 - s2 / 2.0, &sg.first)?;
    for j in 1..ord.k() {
        let sj = ord.separator(j).len() as f64;
        let xs = xv.block(ord.separator(j));
        total += log_wishart_pdf(&x.schur[j - 1], s.alpha_at(ord, j) - sj / 2.0, &sg.schur[j - 1])?
            + log_matrix_normal_pdf(&x.ratio[j - 1], &sg.ratio[j - 1], &sg.schur[j - 1], &xs)?;
    }
    Ok(total)
}

/// `log |∂x / ∂(blocks)| = (c_1 − s_2) log|x_{⟨2⟩}| + Σ_{j≥2} (c_j − s_j) log|x_{⟨j⟩}|`.
pub(crate) fn block_log_jacobian(x: &IncompleteMatrix, ord: &CliqueOrdering) -> Result<f64> {
    if ord.k() == 1 {
        return Ok(0.0);
    }
    let ld = |a: &[usize]| linalg::logdet_pd(&x.block(a)).ok_or_else(|| Error::NotInQG("separator".into()));
    let mut total = head_rows(ord).len() as f64 * ld(ord.separator(1))?;
    for j in 1..ord.k() {
        total += ord.residual(j).len() as f64 * ld(ord.separator(j))?;
    }
    Ok(total)
}
