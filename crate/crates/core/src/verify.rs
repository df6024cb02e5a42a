//! Independent checks: the Gauss hypergeometric function, the closed-form
//! normalisers on the path `A_4`, importance-sampling estimates of the
//! normalising integrals, Mellin transforms of 2×2 Wishart diagonals, the
//! block factorisation and the expectation identity of the type II law.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::cone::{schur_pad, split_blocks, IncompleteMatrix};
use crate::dist::{
    block_log_jacobian, find_certificate, inv_type2_block_logpdf, type1_block_logpdf, Certificate, Family, Point,
    Side, WishartSpec,
};
use crate::error::{Error, Result};
use crate::graph::{CliqueOrdering, DecomposableGraph};
use crate::linalg::{self, inv_pd};
use crate::math::{exp, ln, ln_gamma, powf, sqrt, LN_PI};
use crate::rng::RngStream;
use crate::shape::{canonical_shape, log_gamma_i, log_gamma_ii, log_h, CanonicalKind, ShapeParam};
use crate::wishart::sample_wishart;

const SERIES_TOL: f64 = 1e-15;
const SERIES_MAX_TERMS: usize = 100_000;

/// `₂F₁(a, b; c; z)` for `0 ≤ z < 1` by its power series. Above `z = 0.9`
/// the Euler transformation `(1 − z)^{c−a−b} ₂F₁(c−a, c−b; c; z)` is summed
/// instead.
pub fn gauss_2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if c <= 0.0 && c == libm::floor(c) {
        return Err(Error::PoleAtC);
    }
    if !(0.0..1.0).contains(&z) {
        return Err(Error::OutOfDomain(format!("z = {z} is outside [0, 1)")));
    }
    if z > 0.9 {
        Ok(powf(1.0 - z, c - a - b) * series_2f1(c - a, c - b, c, z)?)
    } else {
        series_2f1(a, b, c, z)
    }
}

fn series_2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut small = 0;
    for n in 0..SERIES_MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        sum += term;
        if term == 0.0 {
            return Ok(sum);
        }
        if term.abs() < SERIES_TOL * sum.abs() {
            small += 1;
            if small == 2 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NonConvergent { terms: SERIES_MAX_TERMS })
}

/// `|(1 − z)^{a+b−c} ₂F₁(a, b; c; z) − ₂F₁(c − a, c − b; c; z)|`.
pub fn check_euler_transform(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let lhs = powf(1.0 - z, a + b - c) * gauss_2f1(a, b, c, z)?;
    Ok((lhs - gauss_2f1(c - a, c - b, c, z)?).abs())
}

/// Which normalising integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    /// `∫ e^{−⟨x, σ̂⁻¹⟩} H_G(α, β; x) μ_G(dx)`.
    I,
    /// `∫ e^{−⟨θ, x̂⁻¹⟩} H_G(α, β; x) μ_G(dx)`.
    II,
}

fn a4_check(g: &DecomposableGraph) -> Result<()> {
    let path = DecomposableGraph::path(4)?;
    if *g != path {
        return Err(Error::WrongGraph);
    }
    Ok(())
}

/// The `A_4` convergence region for `kind`: `𝒜₄` or `𝓑₄`.
pub fn in_a4_region(kind: Kind, s: &ShapeParam) -> bool {
    if s.alpha.len() != 3 || s.beta.len() != 2 {
        return false;
    }
    let (a1, a2, a3, b2, b3) = (s.alpha[0], s.alpha[1], s.alpha[2], s.beta[0], s.beta[1]);
    match kind {
        Kind::I => a1 > 0.5 && a2 > 0.5 && a3 > 0.5 && a1 + a2 > b2 && a2 + a3 > b3,
        Kind::II => {
            a1 < 0.0
                && a3 < 0.0
                && b2 - a1 - a2 - 0.5 > 0.0
                && b2 + b3 - a1 - a2 - a3 - 1.5 > 0.0
                && b3 - a2 - a3 - 0.5 > 0.0
        }
    }
}

/// Logarithm of the closed-form normalising integral on `A_4`, valid on the
/// whole region `𝒜₄` (kind I) or `𝓑₄` (kind II), which is larger than any
/// single `A_P` or `B_P`.
pub fn a4_closed_form(kind: Kind, s: &ShapeParam, scale: &IncompleteMatrix) -> Result<f64> {
    a4_check(scale.graph())?;
    if !in_a4_region(kind, s) {
        return Err(Error::ShapeOutsideA4B4);
    }
    scale.check_qg()?;
    let m = scale.values();
    let (s1, s2, s3, s4) = (m[(0, 0)], m[(1, 1)], m[(2, 2)], m[(3, 3)]);
    let (s12, s23, s34) = (m[(0, 1)], m[(1, 2)], m[(2, 3)]);
    let s1_2 = s1 - s12 * s12 / s2;
    let s4_3 = s4 - s34 * s34 / s3;
    let z = s23 * s23 / (s2 * s3);
    let (a1, a2, a3, b2, b3) = (s.alpha[0], s.alpha[1], s.alpha[2], s.beta[0], s.beta[1]);
    match kind {
        Kind::I => {
            let s2_3 = s2 - s23 * s23 / s3;
            let s3_2 = s3 - s23 * s23 / s2;
            let (e2, e3) = (a1 + a2 - b2, a2 + a3 - b3);
            let consts = 1.5 * LN_PI + ln_gamma(a1 - 0.5) + ln_gamma(a2 - 0.5) + ln_gamma(a3 - 0.5) + ln_gamma(e2)
                + ln_gamma(e3)
                - ln_gamma(a2);
            let powers = a1 * ln(s1_2) + e2 * ln(s2_3) + e3 * ln(s3_2) + a3 * ln(s4_3);
            Ok(consts + powers + ln(gauss_2f1(e2, e3, a2, z)?))
        }
        Kind::II => {
            let fa = b2 - a1 - a2 - 0.5;
            let fb = b3 - a2 - a3 - 0.5;
            let fc = b2 + b3 - a1 - a2 - a3 - 1.0;
            let consts = 1.5 * LN_PI + ln_gamma(-a1) + ln_gamma(fa) + ln_gamma(fc - 0.5) + ln_gamma(fb) + ln_gamma(-a3)
                - ln_gamma(fc);
            let powers = a1 * ln(s1_2) + (a1 + a2 - b2) * ln(s2) + (a2 + a3 - b3) * ln(s3) + a3 * ln(s4_3);
            Ok(consts + powers + ln(gauss_2f1(fa, fb, fc, z)?))
        }
    }
}

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

impl McEstimate {
    pub fn from_samples(v: &[f64]) -> Self {
        let n = v.len();
        let mean = v.iter().sum::<f64>() / n as f64;
        let var = if n > 1 { v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
        McEstimate { mean, se: sqrt(var / n as f64), n }
    }

    /// `|mean − target| / se`.
    pub fn z(&self, target: f64) -> f64 {
        (self.mean - target).abs() / self.se
    }
}

/// Importance-sampling proposal: a hyper shape `p` (kind I, type I
/// proposal) or a G-Wishart `δ` (kind II, inverse type II proposal), both at
/// the target's scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Proposal {
    pub kind: Kind,
    pub param: f64,
}

fn proposal_shape(g: &DecomposableGraph, p: Proposal) -> Result<ShapeParam> {
    match p.kind {
        Kind::I => canonical_shape(g, CanonicalKind::Hyper(p.param)),
        Kind::II => canonical_shape(g, CanonicalKind::GWishart(p.param)),
    }
}

/// Whether the importance weights have finite variance: the doubled shape
/// `2α − α_q` must itself be integrable.
fn finite_variance(kind: Kind, s: &ShapeParam, q: &ShapeParam, g: &DecomposableGraph) -> bool {
    let doubled = s.scaled(2.0).sub(q);
    let side = if kind == Kind::I { Side::A } else { Side::B };
    find_certificate(&doubled, g, side).is_ok() || (a4_check(g).is_ok() && in_a4_region(kind, &doubled))
}

/// Per-draw ratio weights `w_i / H_G(α, β; scale)`; their mean estimates
/// `Γ_I(α, β)` or `Γ_II(α, β)` when the integral converges.
pub fn normalizer_weights(
    s: &ShapeParam,
    scale: &IncompleteMatrix,
    proposal: Proposal,
    n: usize,
    stream: &RngStream,
) -> Result<Vec<f64>> {
    let g = scale.graph().clone();
    let q = proposal_shape(&g, proposal)?;
    let family = if proposal.kind == Kind::I { Family::TypeI } else { Family::InvTypeII };
    let spec = WishartSpec::new(family, q.clone(), scale.clone())?;
    let diff = s.sub(&q);
    let base = spec.log_gamma() + spec.log_h_scale() - log_h(s, scale)?;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut rng = stream.substream(i as u64).rng();
        let lh = match proposal.kind {
            Kind::I => match (spec.draw_type1_logdets(&mut rng)?, spec.certificate()) {
                ((x, Some(ld)), Certificate::Order(ord)) => log_h_from_cliques(&diff, &x, ord, &ld)?,
                ((x, _), _) => log_h(&diff, &x)?,
            },
            Kind::II => match spec.sample_one(&mut rng)? {
                Point::Q(x) => log_h(&diff, &x)?,
                Point::P(_) => return Err(Error::InternalInconsistency("proposal left Q_G".into())),
            },
        };
        out.push(exp(base + lh));
    }
    Ok(out)
}

/// `log H_G(α, β; x)` with the clique log-determinants supplied in the
/// order's clique positions.
fn log_h_from_cliques(s: &ShapeParam, x: &IncompleteMatrix, ord: &CliqueOrdering, clique_logdets: &[f64]) -> Result<f64> {
    let mut total: f64 = clique_logdets.iter().enumerate().map(|(j, ld)| s.alpha_at(ord, j) * ld).sum();
    for (d, b) in ord.distinct_separators().iter().zip(&s.beta) {
        let ld = linalg::logdet_pd(&x.block(&d.vertices)).ok_or_else(|| Error::NotInQG("separator block".into()))?;
        total -= d.multiplicity as f64 * b * ld;
    }
    Ok(total)
}

/// Picks a proposal with finite weight variance, preferring the smallest
/// relative standard error over a pilot run.
pub fn choose_proposal(kind: Kind, s: &ShapeParam, scale: &IncompleteMatrix, stream: &RngStream) -> Result<Proposal> {
    let g = scale.graph().clone();
    let lo = match kind {
        Kind::I => (g.canonical().cliques().iter().map(|c| c.len()).max().unwrap_or(1) as f64 - 1.0) / 2.0,
        Kind::II => 0.0,
    };
    let steps = [0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0];
    let pilot = stream.substream(u64::MAX);
    let mut best: Option<(f64, Proposal)> = None;
    for step in steps {
        let prop = Proposal { kind, param: lo + step };
        let q = proposal_shape(&g, prop)?;
        if !finite_variance(kind, s, &q, &g) {
            continue;
        }
        let Ok(w) = normalizer_weights(s, scale, prop, 2000, &pilot) else {
            continue;
        };
        let est = McEstimate::from_samples(&w);
        let rel = est.se / est.mean.abs();
        if rel.is_finite() && best.map_or(true, |(b, _)| rel < b) {
            best = Some((rel, prop));
        }
    }
    best.map(|(_, p)| p)
        .ok_or_else(|| Error::DegenerateWeights("no proposal has finite weight variance".into()))
}

/// Result of [`mc_normalizer`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizerReport {
    /// Estimate of the normalising integral divided by `H_G(α, β; scale)`.
    pub ratio: McEstimate,
    pub proposal: Proposal,
}

/// Importance-sampling estimate of the normalising integral over
/// `H_G(α, β; scale)`; compare with `Γ_I` or `Γ_II`.
pub fn mc_normalizer(
    kind: Kind,
    s: &ShapeParam,
    scale: &IncompleteMatrix,
    n: usize,
    stream: &RngStream,
    proposal: Option<f64>,
) -> Result<NormalizerReport> {
    s.check(scale.graph())?;
    let proposal = match proposal {
        Some(param) => Proposal { kind, param },
        None => choose_proposal(kind, s, scale, stream)?,
    };
    let w = normalizer_weights(s, scale, proposal, n, stream)?;
    let ratio = McEstimate::from_samples(&w);
    if !(ratio.mean.is_finite() && ratio.se.is_finite()) || ratio.mean <= 0.0 {
        return Err(Error::DegenerateWeights("weights overflowed".into()));
    }
    Ok(NormalizerReport { ratio, proposal })
}

/// Closed form for `log Γ_I` or `log Γ_II` when one applies (any `A_P`/`B_P`
/// or homogeneous certificate).
pub fn log_gamma_reference(kind: Kind, s: &ShapeParam, g: &DecomposableGraph) -> Result<f64> {
    match kind {
        Kind::I => log_gamma_i(s, find_certificate(s, g, Side::A)?.path()),
        Kind::II => log_gamma_ii(s, find_certificate(s, g, Side::B)?.path()),
    }
}

/// Result of [`mellin_2x2`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MellinReport {
    pub closed_form: f64,
    pub mc: McEstimate,
}

/// `E[X_1^{a_1} X_2^{a_2}]` for the diagonal of `X ~ w_2(p, c⁻¹)`:
/// `(det c)^p / (c_1^{a_1+p} c_2^{a_2+p}) · Γ(a_1+p) Γ(a_2+p) / Γ(p)²
/// · ₂F₁(a_1+p, a_2+p; p; c_12² / (c_1 c_2))`, with a Monte Carlo estimate.
pub fn mellin_2x2(p: f64, a1: f64, a2: f64, c: &DMatrix<f64>, n: usize, stream: &RngStream) -> Result<MellinReport> {
    if c.shape() != (2, 2) {
        return Err(Error::DimensionMismatch { expected: 2, got: c.nrows() });
    }
    if linalg::asymmetry(c) > 1e-12 {
        return Err(Error::MalformedInput("c is not symmetric".into()));
    }
    let cinv = inv_pd(c).ok_or(Error::NotPositiveDefinite)?;
    if !(p > 0.5 && a1 + p > 0.0 && a2 + p > 0.0) {
        return Err(Error::OutOfDomain("need p > 1/2 and a_i + p > 0".into()));
    }
    let (c1, c2, c12) = (c[(0, 0)], c[(1, 1)], c[(0, 1)]);
    let det = c1 * c2 - c12 * c12;
    let log_closed = p * ln(det) - (a1 + p) * ln(c1) - (a2 + p) * ln(c2) + ln_gamma(a1 + p) + ln_gamma(a2 + p)
        - 2.0 * ln_gamma(p)
        + ln(gauss_2f1(a1 + p, a2 + p, p, c12 * c12 / (c1 * c2))?);
    let mut vals = Vec::with_capacity(n);
    for i in 0..n {
        let x = sample_wishart(p, &cinv, &mut stream.substream(i as u64).rng())?;
        vals.push(powf(x[(0, 0)], a1) * powf(x[(1, 1)], a2));
    }
    Ok(MellinReport { closed_form: exp(log_closed), mc: McEstimate::from_samples(&vals) })
}

/// `|log f(x) − Σ log f_block − log J|`: the joint density against the
/// product of the block laws and the Jacobian of the block coordinates.
/// Needs a type I or inverse type II spec with an ordering certificate.
pub fn check_factorization(spec: &WishartSpec, x: &IncompleteMatrix) -> Result<f64> {
    let Certificate::Order(ord) = spec.certificate() else {
        return Err(Error::OutOfDomain("factorisation needs an ordering certificate".into()));
    };
    let b = split_blocks(x, ord)?;
    let blocks = match spec.family() {
        Family::InvTypeII => inv_type2_block_logpdf(spec.shape(), spec.scale(), ord, &b)?,
        Family::TypeI => type1_block_logpdf(spec.shape(), spec.scale(), ord, &b, x)?,
        f => return Err(Error::OutOfDomain(format!("no block factorisation for {}", f.name()))),
    };
    let joint = spec.logpdf(&Point::Q(x.clone()))?;
    Ok((joint - (blocks - block_log_jacobian(x, ord)?)).abs())
}

/// One entry of the expectation identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityEntry {
    pub i: usize,
    pub j: usize,
    /// `−θ_ij` minus the Monte Carlo right-hand side.
    pub residual: f64,
    pub se: f64,
}

/// Result of [`check_mean_identity`].
#[derive(Debug, Clone, PartialEq)]
pub struct MeanIdentityReport {
    /// Entries `i ≤ j` on `E`.
    pub entries: Vec<IdentityEntry>,
    /// Largest `|residual|`, and its standard error.
    pub max_residual: f64,
    pub max_residual_se: f64,
    /// Largest `|residual| / se`.
    pub max_z: f64,
    /// Largest `|residual| / se` with the Schur-complement terms taken with
    /// the opposite sign.
    pub max_z_flipped: f64,
}

/// Monte Carlo check of the expectation identity for `Y ~ W_{P_G}(α, β, θ)`,
/// with `a_C = α_C + (|C|+1)/2`, `b_S = β_S + (|S|+1)/2` and `X̂ = Y⁻¹`:
/// `−θ = π((Σ a − Σ ν b) E X̂ − Σ a_C E X̂_{V∖C·C} + Σ ν b_S E X̂_{V∖S·S})`.
pub fn check_mean_identity(spec: &WishartSpec, n: usize, stream: &RngStream) -> Result<MeanIdentityReport> {
    if spec.family() != Family::TypeII {
        return Err(Error::OutOfDomain("the identity is stated for the type II law".into()));
    }
    let g = spec.graph().clone();
    let ord = g.canonical();
    let s = spec.shape();
    let a: Vec<f64> = ord.cliques().iter().zip(&s.alpha).map(|(c, x)| x + (c.len() as f64 + 1.0) / 2.0).collect();
    let b: Vec<f64> = ord
        .distinct_separators()
        .iter()
        .zip(&s.beta)
        .map(|(d, x)| d.multiplicity as f64 * (x + (d.vertices.len() as f64 + 1.0) / 2.0))
        .collect();
    let total = a.iter().sum::<f64>() - b.iter().sum::<f64>();
    let edges: Vec<(usize, usize)> =
        (0..g.n()).flat_map(|i| (i..g.n()).map(move |j| (i, j))).filter(|&(i, j)| g.adjacent(i, j)).collect();
    let mut base = Vec::with_capacity(n);
    let mut pads = Vec::with_capacity(n);
    for i in 0..n {
        let y = match spec.sample_one(&mut stream.substream(i as u64).rng())? {
            Point::P(y) => y,
            Point::Q(_) => return Err(Error::InternalInconsistency("type II draw on Q_G".into())),
        };
        let xh = inv_pd(y.values()).ok_or(Error::NotInPG)?;
        let mut pad = DMatrix::zeros(g.n(), g.n());
        for (c, w) in ord.cliques().iter().zip(&a) {
            pad -= schur_pad(&xh, c)? * *w;
        }
        for (d, w) in ord.distinct_separators().iter().zip(&b) {
            pad += schur_pad(&xh, &d.vertices)? * *w;
        }
        base.push(xh * total);
        pads.push(pad);
    }
    let theta = spec.scale().values();
    let mut entries = Vec::new();
    let mut max_z_flipped = 0.0f64;
    for &(i, j) in &edges {
        let direct: Vec<f64> = base.iter().zip(&pads).map(|(x, p)| x[(i, j)] + p[(i, j)]).collect();
        let flipped: Vec<f64> = base.iter().zip(&pads).map(|(x, p)| x[(i, j)] - p[(i, j)]).collect();
        let est = McEstimate::from_samples(&direct);
        let alt = McEstimate::from_samples(&flipped);
        entries.push(IdentityEntry { i, j, residual: -theta[(i, j)] - est.mean, se: est.se });
        max_z_flipped = max_z_flipped.max(alt.z(-theta[(i, j)]));
    }
    let worst = entries
        .iter()
        .copied()
        .fold(None::<IdentityEntry>, |w, e| match w {
            Some(w) if w.residual.abs() >= e.residual.abs() => Some(w),
            _ => Some(e),
        })
        .ok_or_else(|| Error::MalformedInput("graph has no entries".into()))?;
    let max_z = entries.iter().map(|e| e.residual.abs() / e.se).fold(0.0, f64::max);
    Ok(MeanIdentityReport { max_residual: worst.residual.abs(), max_residual_se: worst.se, max_z, max_z_flipped, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::project;
    use alloc::sync::Arc;
    use alloc::vec;

    #[test]
    fn hypergeometric_special_values() {
        // ₂F₁(1, 1; 2; z) = −ln(1 − z)/z.
        assert!((gauss_2f1(1.0, 1.0, 2.0, 0.5).unwrap() - 2.0 * core::f64::consts::LN_2).abs() < 1e-12);
        assert!((gauss_2f1(1.0, 1.0, 2.0, 0.95).unwrap() - (-ln(0.05) / 0.95)).abs() < 1e-12);
        // ₂F₁(a, b; b; z) = (1 − z)^{−a}.
        assert!((gauss_2f1(0.7, 2.0, 2.0, 0.3).unwrap() - powf(0.7, -0.7)).abs() < 1e-13);
        assert_eq!(gauss_2f1(1.0, 1.0, 0.0, 0.1), Err(Error::PoleAtC));
        assert_eq!(gauss_2f1(1.0, 1.0, -2.0, 0.1), Err(Error::PoleAtC));
        assert_eq!(gauss_2f1(1.0, 1.0, 1.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn a4_closed_form_at_identity() {
        let g = Arc::new(DecomposableGraph::path(4).unwrap());
        let s = ShapeParam::new(&g, vec![1.0; 3], vec![1.0; 2]).unwrap();
        let id = project(&DMatrix::identity(4, 4), &g).unwrap();
        assert!((a4_closed_form(Kind::I, &s, &id).unwrap() - 3.0 * LN_PI).abs() < 1e-12);
        let k3 = Arc::new(DecomposableGraph::complete(3).unwrap());
        let s3 = ShapeParam::new(&k3, vec![1.0], vec![]).unwrap();
        let id3 = project(&DMatrix::identity(3, 3), &k3).unwrap();
        assert_eq!(a4_closed_form(Kind::I, &s3, &id3), Err(Error::WrongGraph));
        let bad = ShapeParam::new(&g, vec![0.4, 1.0, 1.0], vec![1.0, 1.0]).unwrap();
        assert_eq!(a4_closed_form(Kind::I, &bad, &id), Err(Error::ShapeOutsideA4B4));
    }

    fn a4() -> Arc<DecomposableGraph> {
        Arc::new(DecomposableGraph::path(4).unwrap())
    }

    fn a4_scale(g: &Arc<DecomposableGraph>) -> IncompleteMatrix {
        let m = DMatrix::from_row_slice(4, 4, &[
            2.0, 0.6, 0.0, 0.0, //
            0.6, 1.5, -0.7, 0.0, //
            0.0, -0.7, 1.8, 0.4, //
            0.0, 0.0, 0.4, 1.2,
        ]);
        project(&m, g).unwrap()
    }

    #[test]
    fn a4_closed_forms_agree_with_products_of_gammas() {
        let g = a4();
        let sigma = a4_scale(&g);
        let s = ShapeParam::new(&g, vec![2.0, 1.5, 1.2], vec![1.0, 1.2]).unwrap();
        let direct = log_gamma_reference(Kind::I, &s, &g).unwrap() + log_h(&s, &sigma).unwrap();
        assert!((a4_closed_form(Kind::I, &s, &sigma).unwrap() - direct).abs() < 1e-10);
        let t = ShapeParam::new(&g, vec![-2.0, -2.5, -1.5], vec![-0.5, -1.0]).unwrap();
        let direct = log_gamma_reference(Kind::II, &t, &g).unwrap() + log_h(&t, &sigma).unwrap();
        assert!((a4_closed_form(Kind::II, &t, &sigma).unwrap() - direct).abs() < 1e-10);
    }

    #[test]
    fn importance_sampling_recovers_a4_closed_form() {
        let g = a4();
        let sigma = a4_scale(&g);
        let s = ShapeParam::new(&g, vec![2.0, 1.5, 1.2], vec![1.0, 1.2]).unwrap();
        let r = mc_normalizer(Kind::I, &s, &sigma, 20_000, &RngStream::new(3), None).unwrap();
        let target = exp(a4_closed_form(Kind::I, &s, &sigma).unwrap() - log_h(&s, &sigma).unwrap());
        assert!(r.ratio.z(target) < 4.0, "{r:?} vs {target}");
    }
}
