//! Conjugate inference for a Gaussian graphical model Markov to `G`.
//!
//! The prior and posterior are inverse type II laws on `τ = 2Σ_G ∈ Q_G`, so
//! `E[(2Σ_G)⁻¹]` is the type II mean and the precision mean is twice it.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::cone::{precision_of, project, trace_pair, IncompleteMatrix, SparsePrecision};
use crate::dist::{find_certificate, mean_type2, Family, Point, Side, WishartSpec};
use crate::error::{Error, Result};
use crate::graph::DecomposableGraph;
use crate::math::{ln, sqrt};
use crate::rng::RngStream;
use crate::verify::{check_mean_identity, MeanIdentityReport};

/// How the posterior summaries relate to the Gaussian parameters.
pub const CONVENTION: &str =
    "posterior is inverse type II on tau = 2 Sigma_G; scale_precision_mean = E[tau^-1], precision_mean = 2 E[tau^-1]";

/// `n` observations of a centred or centred-by-mean Gaussian vector.
#[derive(Debug, Clone)]
pub struct GaussianSample {
    graph: Arc<DecomposableGraph>,
    n: usize,
    scatter: DMatrix<f64>,
}

impl GaussianSample {
    /// Rows are observations. With `center` the sample mean is removed and
    /// the effective size is `n − 1`.
    pub fn from_rows(graph: Arc<DecomposableGraph>, rows: &[Vec<f64>], center: bool) -> Result<Self> {
        let r = graph.n();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != r {
                return Err(Error::ColumnMismatch { row: i, expected: r, got: row.len() });
            }
            if let Some(col) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonNumeric { row: i, col });
            }
        }
        let mut mean = DVector::zeros(r);
        if center && !rows.is_empty() {
            for row in rows {
                mean += DVector::from_column_slice(row);
            }
            mean /= rows.len() as f64;
        }
        let mut scatter = DMatrix::zeros(r, r);
        for row in rows {
            let z = DVector::from_column_slice(row) - &mean;
            scatter += &z * z.transpose();
        }
        let n = if center { rows.len().saturating_sub(1) } else { rows.len() };
        Ok(GaussianSample { graph, n, scatter })
    }

    pub fn graph(&self) -> &Arc<DecomposableGraph> {
        &self.graph
    }

    /// Effective sample size.
    pub fn n(&self) -> usize {
        self.n
    }

    /// `nS = Σ z zᵀ`.
    pub fn scatter(&self) -> &DMatrix<f64> {
        &self.scatter
    }

    /// `π(nS)`.
    pub fn projected_scatter(&self) -> Result<IncompleteMatrix> {
        project(&self.scatter, &self.graph)
    }

    /// Gaussian log-likelihood at `Σ = σ̂`, the completion of `σ ∈ Q_G`:
    /// `−(nr/2) log 2π − (n/2) log|σ̂| − ½ tr(σ̂⁻¹ nS)`.
    pub fn log_likelihood(&self, sigma: &IncompleteMatrix) -> Result<f64> {
        if sigma.graph() != &self.graph {
            return Err(Error::GraphMismatch);
        }
        let k = precision_of(sigma)?;
        let n = self.n as f64;
        let r = self.graph.n() as f64;
        let logdet = crate::cone::logdet_hat(sigma)?;
        Ok(-0.5 * n * r * ln(2.0 * core::f64::consts::PI) - 0.5 * n * logdet
            - 0.5 * trace_pair(&self.projected_scatter()?, &k)?)
    }
}

/// Maximum likelihood estimate: `σ = π(nS)/n` and `K̂ = σ̂⁻¹`. Needs the
/// clique blocks of the sample covariance to be positive definite.
pub fn mle(sample: &GaussianSample) -> Result<(IncompleteMatrix, SparsePrecision)> {
    if sample.n == 0 {
        return Err(Error::MalformedInput("no observations".into()));
    }
    let sigma = sample.projected_scatter()?.scaled(1.0 / sample.n as f64);
    sigma.check_qg()?;
    let k = precision_of(&sigma)?;
    Ok((sigma, k))
}

/// Posterior of `τ = 2Σ_G` under an inverse type II prior: shape shifted by
/// `−n/2`, scale `D + π(nS)`.
pub fn posterior_update(prior: &WishartSpec, sample: &GaussianSample) -> Result<WishartSpec> {
    if prior.family() != Family::InvTypeII {
        return Err(Error::OutOfDomain(format!("the conjugate prior is inverse type II, not {}", prior.family().name())));
    }
    if prior.graph() != sample.graph() {
        return Err(Error::GraphMismatch);
    }
    let shape = prior.shape().shifted(-(sample.n as f64) / 2.0);
    let scale = prior.scale().add(&sample.projected_scatter()?)?;
    let g = sample.graph().as_ref();
    let cert = find_certificate(&shape, g, Side::B)
        .map_err(|e| Error::PosteriorShapeInadmissible(format!("{e}")))?;
    WishartSpec::with_certificate(Family::InvTypeII, shape, scale, cert)
}

/// Posterior summaries.
#[derive(Debug, Clone)]
pub struct PosteriorSummary {
    /// `E[(2Σ_G)⁻¹]`, the type II mean in closed form.
    pub scale_precision_mean: SparsePrecision,
    /// `E[K] = 2 E[(2Σ_G)⁻¹]`.
    pub precision_mean: SparsePrecision,
    /// Monte Carlo `E[Σ_G]` and its entrywise standard error.
    pub sigma_mean: IncompleteMatrix,
    pub sigma_mean_se: DMatrix<f64>,
    pub draws: usize,
    pub convention: String,
    /// Monte Carlo check of the expectation identity at the posterior.
    pub identity: MeanIdentityReport,
}

/// Summarises the posterior with `draws` Monte Carlo draws from `stream`.
pub fn summarize(posterior: &WishartSpec, draws: usize, stream: &RngStream) -> Result<PosteriorSummary> {
    if posterior.family() != Family::InvTypeII {
        return Err(Error::OutOfDomain("summaries are for the inverse type II posterior".into()));
    }
    if draws < 2 {
        return Err(Error::OutOfDomain("need at least two draws".into()));
    }
    let g = posterior.graph().clone();
    let scale_precision_mean = mean_type2(posterior.shape(), posterior.scale())?;
    let precision_mean = scale_precision_mean.scaled(2.0);
    let r = g.n();
    let mut sum = DMatrix::zeros(r, r);
    let mut sq = DMatrix::zeros(r, r);
    for p in posterior.sample(&stream.substream(0), draws)? {
        let Point::Q(tau) = p else {
            return Err(Error::InternalInconsistency("inverse type II draw on P_G".into()));
        };
        let s = tau.values() * 0.5;
        sq += s.component_mul(&s);
        sum += s;
    }
    let m = draws as f64;
    let mean = &sum / m;
    let se = (sq / m - mean.component_mul(&mean)).map(|v| sqrt(v.max(0.0) * m / (m - 1.0) / m));
    let type2 = WishartSpec::with_certificate(
        Family::TypeII,
        posterior.shape().clone(),
        posterior.scale().clone(),
        posterior.certificate().clone(),
    )?;
    let identity = check_mean_identity(&type2, draws, &stream.substream(1))?;
    Ok(PosteriorSummary {
        scale_precision_mean,
        precision_mean,
        sigma_mean: IncompleteMatrix::from_fn(g, |i, j| mean[(i, j)]),
        sigma_mean_se: se,
        draws,
        convention: CONVENTION.into(),
        identity,
    })
}
