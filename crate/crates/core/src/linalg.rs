//! Dense helpers on `DMatrix<f64>` indexed by vertex lists.

use alloc::vec::Vec;
use nalgebra::{Cholesky, DMatrix, Dyn};

use crate::math;

/// Cholesky factorisation that fails unless every pivot is strictly positive.
pub fn cholesky(m: &DMatrix<f64>) -> Option<Cholesky<f64, Dyn>> {
    if m.nrows() != m.ncols() {
        return None;
    }
    let c = Cholesky::new(m.clone())?;
    let l = c.l_dirty();
    for i in 0..m.nrows() {
        let d = l[(i, i)];
        if !(d > 0.0 && d.is_finite()) {
            return None;
        }
    }
    Some(c)
}

pub fn is_pd(m: &DMatrix<f64>) -> bool {
    cholesky(m).is_some()
}

/// log det of a positive definite matrix. The empty matrix has log det 0.
pub fn logdet_pd(m: &DMatrix<f64>) -> Option<f64> {
    if m.nrows() == 0 {
        return Some(0.0);
    }
    let c = cholesky(m)?;
    let l = c.l_dirty();
    Some((0..m.nrows()).map(|i| 2.0 * math::ln(l[(i, i)])).sum())
}

pub fn inv_pd(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    if m.nrows() == 0 {
        return Some(DMatrix::zeros(0, 0));
    }
    let inv = cholesky(m)?.inverse();
    Some(symmetrize(&inv))
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub fn sub(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

pub fn principal(m: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    sub(m, idx, idx)
}

pub fn set_sub(m: &mut DMatrix<f64>, rows: &[usize], cols: &[usize], block: &DMatrix<f64>) {
    for (i, &r) in rows.iter().enumerate() {
        for (j, &c) in cols.iter().enumerate() {
            m[(r, c)] = block[(i, j)];
        }
    }
}

pub fn add_sub(m: &mut DMatrix<f64>, idx: &[usize], block: &DMatrix<f64>, scale: f64) {
    for (i, &r) in idx.iter().enumerate() {
        for (j, &c) in idx.iter().enumerate() {
            m[(r, c)] += scale * block[(i, j)];
        }
    }
}

/// Largest absolute asymmetry `|m_ij - m_ji|`.
pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..i {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |a, &b| a.max(b.abs()))
}

/// Sorted set difference `a \ b` of sorted vertex lists.
pub fn difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().copied().filter(|v| b.binary_search(v).is_err()).collect()
}

/// Sorted intersection of sorted vertex lists.
pub fn intersection(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().copied().filter(|v| b.binary_search(v).is_ok()).collect()
}

/// Sorted union of sorted vertex lists.
pub fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = a.iter().chain(b.iter()).copied().collect();
    out.sort_unstable();
    out.dedup();
    out
}

pub fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|v| b.binary_search(v).is_ok())
}
