//! Shared GIC assembly: the trace correction 2 tr(J^{-1} I) and the
//! expected-mode Gaussian block structure used by both the plain ridge
//! criterion and the approximate criterion of the smoothly varying
//! method. The two methods differ only in the penalty-hessian addendum
//! entering the beta block of J.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::types::{GicMode, GicReport};

/// -2 sum_i l_i(theta) for the Gaussian model.
pub fn neg2_loglik(n: usize, alpha: f64, rss: f64) -> f64 {
    n as f64 * (2.0 * std::f64::consts::PI * alpha).ln() + rss / alpha
}

/// Residual vector y - Phi beta.
pub fn residuals(phi: &DMatrix<f64>, ys: &DVector<f64>, beta: &DVector<f64>) -> DVector<f64> {
    ys - phi * beta
}

/// 2 tr(J^{-1} I), reported with a condition estimate when J is not
/// invertible.
pub fn gic_trace(j: &DMatrix<f64>, i: &DMatrix<f64>) -> Result<f64> {
    let lu = j.clone().lu();
    match lu.solve(i) {
        Some(x) => {
            let trace = x.trace();
            if !trace.is_finite() {
                return Err(Error::SingularInformation {
                    cond: condition_estimate(j),
                });
            }
            Ok(2.0 * trace)
        }
        None => Err(Error::SingularInformation {
            cond: condition_estimate(j),
        }),
    }
}

/// Crude 2-norm condition estimate via singular values.
pub fn condition_estimate(a: &DMatrix<f64>) -> f64 {
    let svd = a.clone().svd(false, false);
    let max = svd.singular_values.max();
    let min = svd.singular_values.min();
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Expected-mode GIC for a Gaussian fit whose estimating function is the
/// gradient of a penalized -2 log-likelihood with a beta-only penalty.
///
/// Under Gaussian moments (E e* = E e*^3 = 0, E e*^2 = alpha,
/// E e*^4 = 3 alpha^2) both J and I are block-diagonal in (alpha, beta):
/// the alpha blocks are n/alpha^2 on each side and cancel to 1 in the
/// trace, and the beta blocks are (2/alpha) Phi'Phi + addendum versus
/// (2/alpha) Phi'Phi, where `addendum` is the hessian of the summed
/// penalty in beta.
pub fn expected_gaussian_gic(
    phi: &DMatrix<f64>,
    neg2ll: f64,
    alpha: f64,
    addendum: &DMatrix<f64>,
) -> Result<GicReport> {
    let gram = phi.transpose() * phi;
    let j_beta = &gram * (2.0 / alpha) + addendum;
    let i_beta = &gram * (2.0 / alpha);
    let beta_trace = gic_trace(&j_beta, &i_beta)?;
    // alpha block contributes tr((n/alpha^2)^{-1} (n/alpha^2)) = 1.
    let bias = 2.0 + beta_trace;
    Ok(GicReport::new(neg2ll, bias, GicMode::Expected))
}

/// Empirical-mode GIC from per-observation estimating-function pieces.
///
/// `psi` rows are psi_i(theta-hat) and `score` rows are the per-datum
/// log-likelihood gradients; `j` is the already-summed -d psi / d theta'.
pub fn empirical_gic(
    neg2ll: f64,
    j: &DMatrix<f64>,
    psi: &DMatrix<f64>,
    score: &DMatrix<f64>,
) -> Result<GicReport> {
    let i = psi.transpose() * score;
    let bias = gic_trace(j, &i)?;
    Ok(GicReport::new(neg2ll, bias, GicMode::Empirical))
}

/// Gaussian per-datum score (d l_i / d alpha, d l_i / d beta').
pub fn score_rows(phi: &DMatrix<f64>, eps: &DVector<f64>, alpha: f64) -> DMatrix<f64> {
    let n = phi.nrows();
    let m = phi.ncols();
    let mut score = DMatrix::zeros(n, m + 1);
    for i in 0..n {
        let e = eps[i];
        score[(i, 0)] = e * e / (2.0 * alpha * alpha) - 1.0 / (2.0 * alpha);
        for k in 0..m {
            score[(i, k + 1)] = e * phi[(i, k)] / alpha;
        }
    }
    score
}
