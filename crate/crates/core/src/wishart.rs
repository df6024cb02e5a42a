//! Full-matrix Wishart, inverse Wishart and matrix normal laws.
//!
//! `w_r(p, σ)` has density `|x|^{p−(r+1)/2} e^{−tr(x σ⁻¹)} / (|σ|^p Γ_r(p))`
//! and mean `p σ`. `iw_r(p, θ)` is the law of `x⁻¹` for `x ~ w_r(p, θ⁻¹)`.
//! `MN(M, U, V)` on `a × b` matrices has density proportional to
//! `exp(−tr(U⁻¹ (Δ − M) V (Δ − M)ᵀ))`, so `Cov(vec Δ) = ½ V⁻¹ ⊗ U`.

use alloc::format;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{cholesky, inv_pd, logdet_pd, symmetrize};
use crate::math::{sqrt, LN_PI};
use crate::shape::log_multigamma;

const HALF_SQRT: f64 = core::f64::consts::FRAC_1_SQRT_2;

fn shape_ok(r: usize, p: f64) -> Result<()> {
    if p > (r as f64 - 1.0) / 2.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfDomain(format!("Wishart shape {p} needs p > {}", (r as f64 - 1.0) / 2.0)))
    }
}

/// Bartlett draw from `w_r(p, σ)`.
pub fn sample_wishart<R: Rng + ?Sized>(p: f64, sigma: &DMatrix<f64>, rng: &mut R) -> Result<DMatrix<f64>> {
    let r = sigma.nrows();
    shape_ok(r, p)?;
    if r == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let l = cholesky(sigma).ok_or(Error::NotPositiveDefinite)?.unpack();
    let mut t = DMatrix::zeros(r, r);
    for i in 0..r {
        let g = Gamma::new(p - i as f64 / 2.0, 1.0).map_err(|_| Error::OutOfDomain("gamma shape".into()))?;
        t[(i, i)] = sqrt(g.sample(rng));
        for j in 0..i {
            let z: f64 = StandardNormal.sample(rng);
            t[(i, j)] = z * HALF_SQRT;
        }
    }
    let lt = l * t;
    Ok(symmetrize(&(&lt * lt.transpose())))
}

/// Draw from `iw_r(p, θ)`.
pub fn sample_inv_wishart<R: Rng + ?Sized>(p: f64, theta: &DMatrix<f64>, rng: &mut R) -> Result<DMatrix<f64>> {
    if theta.nrows() == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let sigma = inv_pd(theta).ok_or(Error::NotPositiveDefinite)?;
    let x = sample_wishart(p, &sigma, rng)?;
    inv_pd(&x).ok_or(Error::NotPositiveDefinite)
}

/// Draw from `MN(mean, U, V)`: `mean + L_U Z L_{V⁻¹}ᵀ` with `Z_ij ~ N(0, ½)`.
pub fn sample_matrix_normal<R: Rng + ?Sized>(
    mean: &DMatrix<f64>,
    u: &DMatrix<f64>,
    v: &DMatrix<f64>,
    rng: &mut R,
) -> Result<DMatrix<f64>> {
    let (a, b) = mean.shape();
    if a == 0 || b == 0 {
        return Ok(mean.clone());
    }
    let lu = cholesky(u).ok_or(Error::NotPositiveDefinite)?.unpack();
    let vinv = inv_pd(v).ok_or(Error::NotPositiveDefinite)?;
    let lv = cholesky(&vinv).ok_or(Error::NotPositiveDefinite)?.unpack();
    let z = DMatrix::from_fn(a, b, |_, _| {
        let n: f64 = StandardNormal.sample(rng);
        n * HALF_SQRT
    });
    Ok(mean + lu * z * lv.transpose())
}

/// Log density of `w_r(p, σ)` at `x`.
pub fn log_wishart_pdf(x: &DMatrix<f64>, p: f64, sigma: &DMatrix<f64>) -> Result<f64> {
    let r = x.nrows();
    let ldx = logdet_pd(x).ok_or(Error::NotPositiveDefinite)?;
    let lds = logdet_pd(sigma).ok_or(Error::NotPositiveDefinite)?;
    let sinv = inv_pd(sigma).ok_or(Error::NotPositiveDefinite)?;
    let tr = x.component_mul(&sinv).sum();
    Ok((p - (r as f64 + 1.0) / 2.0) * ldx - tr - p * lds - log_multigamma(r, p)?)
}

/// Log density of `iw_r(p, θ)` at `u`:
/// `|θ|^p |u|^{−p−(r+1)/2} e^{−tr(u⁻¹ θ)} / Γ_r(p)`.
pub fn log_inv_wishart_pdf(u: &DMatrix<f64>, p: f64, theta: &DMatrix<f64>) -> Result<f64> {
    let r = u.nrows();
    let ldu = logdet_pd(u).ok_or(Error::NotPositiveDefinite)?;
    let ldt = logdet_pd(theta).ok_or(Error::NotPositiveDefinite)?;
    let uinv = inv_pd(u).ok_or(Error::NotPositiveDefinite)?;
    let tr = uinv.component_mul(theta).sum();
    Ok(p * ldt - (p + (r as f64 + 1.0) / 2.0) * ldu - tr - log_multigamma(r, p)?)
}

/// Log density of `MN(mean, U, V)` at `x` (`a × b`):
/// `−(ab/2) log π − (b/2) log|U| + (a/2) log|V| − tr(U⁻¹ Δ V Δᵀ)`.
pub fn log_matrix_normal_pdf(x: &DMatrix<f64>, mean: &DMatrix<f64>, u: &DMatrix<f64>, v: &DMatrix<f64>) -> Result<f64> {
    let (a, b) = x.shape();
    if a == 0 || b == 0 {
        return Ok(0.0);
    }
    let d = x - mean;
    let uinv = inv_pd(u).ok_or(Error::NotPositiveDefinite)?;
    let ldu = logdet_pd(u).ok_or(Error::NotPositiveDefinite)?;
    let ldv = logdet_pd(v).ok_or(Error::NotPositiveDefinite)?;
    let q = (uinv * &d * v * d.transpose()).trace();
    Ok(-((a * b) as f64) / 2.0 * LN_PI - b as f64 / 2.0 * ldu + a as f64 / 2.0 * ldv - q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use alloc::vec::Vec;

    #[test]
    fn wishart_mean_is_p_sigma() {
        let sigma = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 0.5]);
        let p = 2.3;
        let n = 20000;
        let mut rng = RngStream::new(11).rng();
        let draws: Vec<DMatrix<f64>> = (0..n).map(|_| sample_wishart(p, &sigma, &mut rng).unwrap()).collect();
        for (i, j) in [(0, 0), (0, 1), (1, 1)] {
            let vals: Vec<f64> = draws.iter().map(|d| d[(i, j)]).collect();
            let m = vals.iter().sum::<f64>() / n as f64;
            let var = vals.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1) as f64;
            let se = sqrt(var / n as f64);
            assert!((m - p * sigma[(i, j)]).abs() < 4.0 * se, "{i}{j}: {m} vs {}", p * sigma[(i, j)]);
        }
    }

    #[test]
    fn scalar_wishart_is_gamma() {
        // w_1(p, s) is Gamma(p, scale s).
        let x = DMatrix::from_element(1, 1, 1.7);
        let s = DMatrix::from_element(1, 1, 0.8);
        let p = 2.5f64;
        let expect = (p - 1.0) * libm::log(1.7) - 1.7 / 0.8 - p * libm::log(0.8) - libm::lgamma(p);
        assert!((log_wishart_pdf(&x, p, &s).unwrap() - expect).abs() < 1e-13);
        let inv = DMatrix::from_element(1, 1, 1.0 / 1.7);
        let theta = DMatrix::from_element(1, 1, 1.0 / 0.8);
        // Change of variables u = 1/x contributes |dx/du| = x².
        let via = log_inv_wishart_pdf(&inv, p, &theta).unwrap();
        assert!((via - (expect + 2.0 * libm::log(1.7))).abs() < 1e-12);
    }

    #[test]
    fn matrix_normal_covariance() {
        let mean = DMatrix::zeros(2, 1);
        let u = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let v = DMatrix::from_element(1, 1, 4.0);
        let n = 40000;
        let mut rng = RngStream::new(5).rng();
        let mut acc = DMatrix::zeros(2, 2);
        for _ in 0..n {
            let d = sample_matrix_normal(&mean, &u, &v, &mut rng).unwrap();
            acc += &d * d.transpose();
        }
        acc /= n as f64;
        // ½ V⁻¹ U = U / 8.
        let expect = &u / 8.0;
        assert!(crate::linalg::max_abs(&(acc - expect)) < 0.01);
    }
}
