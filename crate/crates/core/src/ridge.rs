//! Baseline ridge estimator: alternating fixed-point updates for
//! (alpha, beta), the effective degrees of freedom, the GIC in expected
//! and empirical modes, and GIC-driven selection of the scalar tuning
//! parameter.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::basis::DesignMatrix;
use crate::error::{Error, Result};
use crate::infocrit;
use crate::types::{FitResult, GicMode, GicReport, LambdaChoice, ModelParams};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 500;
const ALPHA_FLOOR: f64 = 1e-30;

#[derive(Debug, Clone)]
pub struct RidgeConfig {
    pub lambda: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl RidgeConfig {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "ridge lambda must be >= 0, got {lambda}"
            )));
        }
        Ok(Self {
            lambda,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        })
    }
}

/// 25 log-spaced points over [1e-8, 1e2].
pub fn default_lambda_grid() -> Vec<f64> {
    log_grid(1e-8, 1e2, 25)
}

pub fn log_grid(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    if k == 1 {
        return vec![lo];
    }
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..k)
        .map(|i| (llo + (lhi - llo) * i as f64 / (k - 1) as f64).exp())
        .collect()
}

fn solve_spd(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    if let Some(chol) = a.clone().cholesky() {
        return Ok(chol.solve(b));
    }
    a.clone()
        .lu()
        .solve(b)
        .ok_or_else(|| Error::SingularSystem("normal equations are rank deficient".into()))
}

fn population_variance(ys: &DVector<f64>) -> f64 {
    let mean = ys.mean();
    ys.iter().map(|y| (y - mean) * (y - mean)).sum::<f64>() / ys.len() as f64
}

/// One beta solve of the weighted-ridge normal equations
/// (Phi'Phi + n alpha Lambda) beta = Phi'y with Lambda = diag(weights).
fn solve_beta(
    gram: &DMatrix<f64>,
    phity: &DVector<f64>,
    n: usize,
    alpha: f64,
    weights: &DVector<f64>,
) -> Result<DVector<f64>> {
    let mut a = gram.clone();
    for j in 0..a.nrows() {
        a[(j, j)] += n as f64 * alpha * weights[j];
    }
    solve_spd(&a, phity)
}

fn max_rel_change(old_alpha: f64, old_beta: &DVector<f64>, alpha: f64, beta: &DVector<f64>) -> f64 {
    let mut num = (alpha - old_alpha).abs();
    let mut den = old_alpha.abs();
    for j in 0..beta.len() {
        num = num.max((beta[j] - old_beta[j]).abs());
        den = den.max(old_beta[j].abs());
    }
    num / den.max(1e-300)
}

/// Alternates the two fixed-point displays (alpha from the residual sum
/// of squares, beta from the penalized normal equations) until relative
/// convergence. `weights` generalizes the scalar ridge to one tuning
/// parameter per coefficient; pass a constant vector for plain ridge.
pub(crate) fn alternate_fit(
    phi: &DMatrix<f64>,
    ys: &DVector<f64>,
    weights: &DVector<f64>,
    tol: f64,
    max_iter: usize,
    warm_beta: Option<&DVector<f64>>,
) -> Result<(ModelParams, Vec<f64>, usize, bool)> {
    let gram = phi.transpose() * phi;
    let phity = phi.transpose() * ys;
    alternate_fit_with_gram(phi, ys, &gram, &phity, weights, tol, max_iter, warm_beta)
}

/// Same as [`alternate_fit`] but with the Gram matrix and projected
/// response precomputed, so callers that refit repeatedly on a fixed
/// design pay for them once.
#[allow(clippy::too_many_arguments)]
pub(crate) fn alternate_fit_with_gram(
    phi: &DMatrix<f64>,
    ys: &DVector<f64>,
    gram: &DMatrix<f64>,
    phity: &DVector<f64>,
    weights: &DVector<f64>,
    tol: f64,
    max_iter: usize,
    warm_beta: Option<&DVector<f64>>,
) -> Result<(ModelParams, Vec<f64>, usize, bool)> {
    let n = phi.nrows();

    // Deterministic pre-pass: var(y) stands in for the unknown alpha.
    let mut beta = match warm_beta {
        Some(b) => b.clone(),
        None => solve_beta(gram, phity, n, population_variance(ys).max(1e-300), weights)?,
    };
    let mut alpha = rss(phi, ys, &beta) / n as f64;
    if alpha < ALPHA_FLOOR {
        return Err(Error::AlphaCollapse {
            floor: ALPHA_FLOOR,
            iteration: 0,
        });
    }

    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    for iter in 1..=max_iter {
        let new_beta = solve_beta(gram, phity, n, alpha, weights)?;
        let new_alpha = rss(phi, ys, &new_beta) / n as f64;
        if new_alpha < ALPHA_FLOOR {
            return Err(Error::AlphaCollapse {
                floor: ALPHA_FLOOR,
                iteration: iter,
            });
        }
        let change = max_rel_change(alpha, &beta, new_alpha, &new_beta);
        alpha = new_alpha;
        beta = new_beta;
        iterations = iter;
        trace.push(weighted_objective(phi, ys, alpha, &beta, weights));
        if change < tol {
            converged = true;
            break;
        }
    }
    let params = ModelParams::new(alpha, beta.iter().copied().collect())?;
    Ok((params, trace, iterations, converged))
}

fn rss(phi: &DMatrix<f64>, ys: &DVector<f64>, beta: &DVector<f64>) -> f64 {
    infocrit::residuals(phi, ys, beta).norm_squared()
}

/// -2 loglik + n sum_j w_j beta_j^2, the regularized loss being minimized.
fn weighted_objective(
    phi: &DMatrix<f64>,
    ys: &DVector<f64>,
    alpha: f64,
    beta: &DVector<f64>,
    weights: &DVector<f64>,
) -> f64 {
    let n = phi.nrows();
    let penalty: f64 = (0..beta.len()).map(|j| weights[j] * beta[j] * beta[j]).sum();
    infocrit::neg2_loglik(n, alpha, rss(phi, ys, beta)) + n as f64 * penalty
}

/// Fits the scalar-lambda ridge model.
pub fn ridge_fit(dm: &DesignMatrix, ys: &DVector<f64>, config: &RidgeConfig) -> Result<FitResult> {
    let weights = DVector::from_element(dm.m(), config.lambda);
    let (params, trace, iterations, converged) =
        alternate_fit(&dm.phi, ys, &weights, config.tol, config.max_iter, None)?;
    Ok(FitResult {
        params,
        lambda_state: LambdaChoice::Scalar(config.lambda),
        objective_trace: trace,
        iterations,
        converged,
        gic: None,
        y_offset: 0.0,
    })
}

/// Effective degrees of freedom tr[(Phi'Phi + n lambda alpha I)^{-1} Phi'Phi].
pub fn ridge_edf(dm: &DesignMatrix, lambda: f64, alpha: f64) -> Result<f64> {
    let gram = dm.phi.transpose() * &dm.phi;
    let n = dm.n() as f64;
    let mut a = gram.clone();
    for j in 0..dm.m() {
        a[(j, j)] += n * lambda * alpha;
    }
    let lu = a.lu();
    let solved = lu
        .solve(&gram)
        .ok_or_else(|| Error::SingularSystem("edf: rank-deficient gram matrix at lambda=0".into()))?;
    Ok(solved.trace())
}

/// GIC of the ridge fit. Expected mode substitutes Gaussian moments into
/// the expectation matrices; empirical mode sums the per-datum products.
pub fn ridge_gic(
    dm: &DesignMatrix,
    ys: &DVector<f64>,
    fit: &FitResult,
    mode: GicMode,
) -> Result<GicReport> {
    let lambda = fit
        .lambda_state
        .as_scalar()
        .ok_or_else(|| Error::InvalidParameter("ridge_gic needs a scalar-lambda fit".into()))?;
    let alpha = fit.params.alpha;
    let beta = fit.params.beta_vector();
    let n = dm.n();
    let m = dm.m();
    let eps = infocrit::residuals(&dm.phi, ys, &beta);
    let neg2ll = infocrit::neg2_loglik(n, alpha, eps.norm_squared());

    match mode {
        GicMode::Expected => {
            let addendum = DMatrix::from_diagonal_element(m, m, 2.0 * n as f64 * lambda);
            infocrit::expected_gaussian_gic(&dm.phi, neg2ll, alpha, &addendum)
        }
        GicMode::Empirical => {
            // J = sum_i -d psi_i / d theta', with the per-datum penalty
            // share lambda beta'beta contributing 2 lambda I to each term.
            let mut j = DMatrix::zeros(m + 1, m + 1);
            let mut psi = DMatrix::zeros(n, m + 1);
            let a2 = alpha * alpha;
            let a3 = a2 * alpha;
            for i in 0..n {
                let e = eps[i];
                j[(0, 0)] += 2.0 * e * e / a3 - 1.0 / a2;
                for k in 0..m {
                    let p = dm.phi[(i, k)];
                    j[(0, k + 1)] += 2.0 * e * p / a2;
                    j[(k + 1, 0)] += 2.0 * e * p / a2;
                    for l in 0..m {
                        j[(k + 1, l + 1)] += 2.0 * p * dm.phi[(i, l)] / alpha;
                    }
                    j[(k + 1, k + 1)] += 2.0 * lambda;
                }
                psi[(i, 0)] = e * e / a2 - 1.0 / alpha;
                for k in 0..m {
                    psi[(i, k + 1)] = 2.0 * e * dm.phi[(i, k)] / alpha - 2.0 * lambda * beta[k];
                }
            }
            let score = infocrit::score_rows(&dm.phi, &eps, alpha);
            infocrit::empirical_gic(neg2ll, &j, &psi, &score)
        }
    }
}

/// Fits every grid point and returns the one minimizing the expected-mode
/// GIC, ties broken toward larger lambda.
pub fn ridge_select(
    dm: &DesignMatrix,
    ys: &DVector<f64>,
    lambda_grid: &[f64],
) -> Result<(f64, FitResult)> {
    if lambda_grid.is_empty() {
        return Err(Error::InvalidParameter("empty lambda grid".into()));
    }
    let candidates: Vec<(f64, Result<(FitResult, GicReport)>)> = lambda_grid
        .par_iter()
        .map(|&lambda| {
            let attempt = RidgeConfig::new(lambda).and_then(|config| {
                let fit = ridge_fit(dm, ys, &config)?;
                let gic = ridge_gic(dm, ys, &fit, GicMode::Expected)?;
                Ok((fit, gic))
            });
            (lambda, attempt)
        })
        .collect();

    let mut best: Option<(f64, FitResult, GicReport)> = None;
    let mut last_err = String::from("empty grid");
    for (lambda, attempt) in candidates {
        match attempt {
            Ok((fit, gic)) => {
                let better = match &best {
                    None => true,
                    Some((best_lambda, _, best_gic)) => {
                        gic.total < best_gic.total
                            || (gic.total == best_gic.total && lambda > *best_lambda)
                    }
                };
                if better {
                    best = Some((lambda, fit, gic));
                }
            }
            Err(e) => last_err = e.to_string(),
        }
    }
    match best {
        Some((lambda, mut fit, gic)) => {
            fit.gic = Some(gic);
            Ok((lambda, fit))
        }
        None => Err(Error::SelectionFailed(last_err)),
    }
}
