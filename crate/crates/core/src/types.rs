//! Shared domain types. All types validate their invariants at
//! construction and are immutable afterwards.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Observed design points and responses together with per-dimension
/// closed domain bounds.
#[derive(Debug, Clone)]
pub struct Dataset {
    xs: DMatrix<f64>,
    ys: DVector<f64>,
    domain: Vec<(f64, f64)>,
}

impl Dataset {
    /// Builds a dataset, taking the domain as the observed per-dimension
    /// min/max range.
    pub fn new(xs: DMatrix<f64>, ys: DVector<f64>) -> Result<Self> {
        let domain = (0..xs.ncols())
            .map(|d| {
                let col = xs.column(d);
                (col.min(), col.max())
            })
            .collect();
        Self::with_domain(xs, ys, domain)
    }

    /// Builds a dataset with explicit domain bounds. Every design point
    /// must lie inside the bounds.
    pub fn with_domain(
        xs: DMatrix<f64>,
        ys: DVector<f64>,
        domain: Vec<(f64, f64)>,
    ) -> Result<Self> {
        if xs.nrows() == 0 {
            return Err(Error::EmptyDataset);
        }
        if xs.nrows() != ys.len() {
            return Err(Error::InvalidParameter(format!(
                "xs has {} rows but ys has {} entries",
                xs.nrows(),
                ys.len()
            )));
        }
        if domain.len() != xs.ncols() {
            return Err(Error::InvalidParameter(format!(
                "domain has {} dimensions but xs has {}",
                domain.len(),
                xs.ncols()
            )));
        }
        for (i, row) in xs.row_iter().enumerate() {
            for v in row.iter() {
                if !v.is_finite() {
                    return Err(Error::NonFinite {
                        row: i,
                        col: "x".into(),
                    });
                }
            }
            for (d, &(lo, hi)) in domain.iter().enumerate() {
                let v = row[d];
                if v < lo || v > hi {
                    return Err(Error::OutOfDomain { index: i });
                }
            }
        }
        for (i, v) in ys.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    row: i,
                    col: "y".into(),
                });
            }
        }
        Ok(Self { xs, ys, domain })
    }

    pub fn n(&self) -> usize {
        self.xs.nrows()
    }

    pub fn dims(&self) -> usize {
        self.xs.ncols()
    }

    pub fn xs(&self) -> &DMatrix<f64> {
        &self.xs
    }

    pub fn ys(&self) -> &DVector<f64> {
        &self.ys
    }

    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }

    /// Returns a copy with the responses centered at their mean, plus the
    /// subtracted offset.
    pub fn centered(&self) -> (Self, f64) {
        let mean = self.ys.mean();
        let ys = self.ys.map(|y| y - mean);
        (
            Self {
                xs: self.xs.clone(),
                ys,
                domain: self.domain.clone(),
            },
            mean,
        )
    }
}

/// Noise variance and basis coefficients of the Gaussian regression model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelParams {
    pub alpha: f64,
    pub beta: Vec<f64>,
}

impl ModelParams {
    pub fn new(alpha: f64, beta: Vec<f64>) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "alpha must be a positive finite real, got {alpha}"
            )));
        }
        if beta.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidParameter("beta has non-finite entry".into()));
        }
        Ok(Self { alpha, beta })
    }

    pub fn beta_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.beta)
    }
}

/// Per-coefficient tuning parameters and the hyper-tuning parameters
/// weighting the smoothness and log-barrier penalties.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LambdaState {
    pub lambda: Vec<f64>,
    pub gamma1: f64,
    pub gamma2: f64,
}

impl LambdaState {
    pub fn new(lambda: Vec<f64>, gamma1: f64, gamma2: f64) -> Result<Self> {
        if lambda.iter().any(|l| !(*l > 0.0) || !l.is_finite()) {
            return Err(Error::InvalidParameter(
                "every lambda entry must be a positive finite real".into(),
            ));
        }
        if !(gamma1 > 0.0) || !(gamma2 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma1 and gamma2 must be positive, got ({gamma1}, {gamma2})"
            )));
        }
        Ok(Self {
            lambda,
            gamma1,
            gamma2,
        })
    }

    pub fn lambda_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.lambda)
    }
}

/// Regularization attached to a fit: a single scalar for plain ridge or
/// the full per-coefficient state for the smoothly varying method.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LambdaChoice {
    Scalar(f64),
    Smooth(LambdaState),
}

impl LambdaChoice {
    pub fn as_smooth(&self) -> Option<&LambdaState> {
        match self {
            LambdaChoice::Smooth(s) => Some(s),
            LambdaChoice::Scalar(_) => None,
        }
    }

    pub fn as_scalar(&self) -> Option<f64> {
        match self {
            LambdaChoice::Scalar(l) => Some(*l),
            LambdaChoice::Smooth(_) => None,
        }
    }
}

/// Which expectations enter the GIC trace correction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GicMode {
    Expected,
    Empirical,
}

/// GIC decomposition: total = neg2_loglik + bias_term, exactly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GicReport {
    pub neg2_loglik: f64,
    pub bias_term: f64,
    pub total: f64,
    pub mode: GicMode,
}

impl GicReport {
    pub fn new(neg2_loglik: f64, bias_term: f64, mode: GicMode) -> Self {
        Self {
            neg2_loglik,
            bias_term,
            total: neg2_loglik + bias_term,
            mode,
        }
    }
}

/// A fitted model with its convergence diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitResult {
    pub params: ModelParams,
    pub lambda_state: LambdaChoice,
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub gic: Option<GicReport>,
    /// Offset subtracted from the responses before fitting (0 unless
    /// centering was requested).
    #[serde(default)]
    pub y_offset: f64,
}
