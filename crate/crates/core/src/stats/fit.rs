use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use super::design::{Coding, DesignMatrix};
use super::StatsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Ols,
    Logit,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Ols => "ols",
            ModelKind::Logit => "logit",
        }
    }
}

/// Covariance estimator for OLS coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Robust {
    None,
    Hc1,
}

impl Robust {
    pub fn name(self) -> &'static str {
        match self {
            Robust::None => "none",
            Robust::Hc1 => "HC1",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    pub se: f64,
    /// t (OLS) or z (logit) statistic.
    pub stat: f64,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionResult {
    pub dv: String,
    pub model: ModelKind,
    pub coding: Coding,
    pub robust: Robust,
    pub standardized: bool,
    pub n: usize,
    /// Residual degrees of freedom for t tests; `None` for normal-based tests.
    pub df: Option<f64>,
    pub coefficients: Vec<Coefficient>,
    pub covariance: DMatrix<f64>,
    pub fitted: DVector<f64>,
    pub iterations: usize,
    pub warnings: Vec<String>,
}

impl RegressionResult {
    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.coefficients.iter().position(|c| c.name == name)
    }

    pub fn estimates(&self) -> DVector<f64> {
        DVector::from_iterator(self.coefficients.len(), self.coefficients.iter().map(|c| c.estimate))
    }

    /// Two-sided p-value of a statistic under this model's reference distribution.
    pub fn p_value(&self, stat: f64) -> f64 {
        two_sided_p(stat, self.df)
    }

    pub const CSV_HEADER: [&'static str; 11] = [
        "dv",
        "iv",
        "beta",
        "se",
        "stat",
        "p",
        "n",
        "model",
        "coding",
        "robust",
        "standardized",
    ];

    /// One row per coefficient, matching [`RegressionResult::CSV_HEADER`].
    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        self.coefficients
            .iter()
            .map(|c| {
                vec![
                    self.dv.clone(),
                    c.name.clone(),
                    c.estimate.to_string(),
                    c.se.to_string(),
                    c.stat.to_string(),
                    c.p.to_string(),
                    self.n.to_string(),
                    self.model.name().to_string(),
                    self.coding.name().to_string(),
                    self.robust.name().to_string(),
                    self.standardized.to_string(),
                ]
            })
            .collect()
    }
}

pub(crate) fn two_sided_p(stat: f64, df: Option<f64>) -> f64 {
    if stat.is_nan() {
        return 1.0;
    }
    let a = stat.abs();
    let tail = match df {
        Some(df) => StudentsT::new(0.0, 1.0, df).expect("positive df").sf(a),
        None => Normal::standard().sf(a),
    };
    (2.0 * tail).clamp(0.0, 1.0)
}

fn coefficients(design: &DesignMatrix, beta: &DVector<f64>, cov: &DMatrix<f64>, df: Option<f64>) -> Vec<Coefficient> {
    design
        .columns
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let se = cov[(j, j)].max(0.0).sqrt();
            let estimate = beta[j];
            // an exactly determined coefficient has zero SE
            let stat = if se > 0.0 {
                estimate / se
            } else if estimate == 0.0 {
                0.0
            } else {
                estimate.signum() * f64::INFINITY
            };
            Coefficient {
                name: name.clone(),
                estimate,
                se,
                stat,
                p: two_sided_p(stat, df),
            }
        })
        .collect()
}

/// Relative tolerance on the diagonal of R below which a design is treated as rank deficient.
const RANK_TOLERANCE: f64 = 1e-10;

/// Ordinary least squares via QR, with classical or HC1 covariance.
///
/// HC1: `(X'X)^-1 X' diag(e^2) X (X'X)^-1 * n / (n - p)`; tests use t with n - p degrees of freedom.
pub fn ols_fit(design: &DesignMatrix, robust: Robust) -> Result<RegressionResult, StatsError> {
    let (n, p) = (design.n(), design.p());
    if n <= p {
        return Err(StatsError::TooFewRows { n, p });
    }
    let qr = design.x.clone().qr();
    let r = qr.r();
    let scale = (0..p).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    if let Some(j) = (0..p).find(|&i| r[(i, i)].abs() <= RANK_TOLERANCE * scale.max(f64::MIN_POSITIVE)) {
        return Err(StatsError::RankDeficient(design.columns[j].clone()));
    }
    let qty = qr.q().transpose() * &design.y;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| StatsError::RankDeficient("R".into()))?;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(p, p))
        .ok_or_else(|| StatsError::RankDeficient("R".into()))?;
    let xtx_inv = &r_inv * r_inv.transpose();
    let fitted = &design.x * &beta;
    let resid = &design.y - &fitted;
    let df = (n - p) as f64;
    let cov = match robust {
        Robust::None => &xtx_inv * (resid.norm_squared() / df),
        Robust::Hc1 => {
            let weighted = DMatrix::from_fn(n, p, |i, j| design.x[(i, j)] * resid[i] * resid[i]);
            let meat = design.x.transpose() * weighted;
            &xtx_inv * meat * &xtx_inv * (n as f64 / df)
        }
    };
    Ok(RegressionResult {
        dv: design.dv.clone(),
        model: ModelKind::Ols,
        coding: design.options.coding,
        robust,
        standardized: design.options.standardize,
        n,
        df: Some(df),
        coefficients: coefficients(design, &beta, &cov, Some(df)),
        covariance: cov,
        fitted,
        iterations: 1,
        warnings: design.warnings.clone(),
    })
}

pub const LOGIT_TOLERANCE: f64 = 1e-8;
pub const LOGIT_MAX_ITER: usize = 100;
/// Coefficients beyond this magnitude signal (quasi-)complete separation.
pub const SEPARATION_BOUND: f64 = 30.0;

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Logistic regression by Newton-Raphson (IRLS).
///
/// Stops once the largest absolute score component is below 1e-8 (or after 100 iterations). Standard errors
/// come from the inverse information at the optimum; Wald tests use the normal distribution.
pub fn logit_fit(design: &DesignMatrix) -> Result<RegressionResult, StatsError> {
    let (n, p) = (design.n(), design.p());
    if let Some(bad) = design.y.iter().find(|v| **v != 0.0 && **v != 1.0) {
        return Err(StatsError::NotBinary(*bad));
    }
    let ones = design.y.iter().filter(|v| **v == 1.0).count();
    if ones == 0 || ones == n {
        return Err(StatsError::OneClass(design.dv.clone()));
    }
    if n <= p {
        return Err(StatsError::TooFewRows { n, p });
    }
    let x = &design.x;
    let mut beta = DVector::zeros(p);
    let mut iterations = 0;
    let mut converged = false;
    let information = |beta: &DVector<f64>| {
        let mu = (x * beta).map(sigmoid);
        let w = mu.map(|m| m * (1.0 - m));
        let xw = DMatrix::from_fn(n, p, |i, j| x[(i, j)] * w[i]);
        (mu, x.transpose() * xw)
    };
    while iterations < LOGIT_MAX_ITER {
        let (mu, info) = information(&beta);
        let score = x.transpose() * (&design.y - &mu);
        if score.amax() < LOGIT_TOLERANCE {
            converged = true;
            break;
        }
        let Some(chol) = info.cholesky() else {
            if beta.amax() > SEPARATION_BOUND / 2.0 {
                return Err(StatsError::Separation(design.dv.clone()));
            }
            return Err(StatsError::RankDeficient("information matrix".into()));
        };
        beta += chol.solve(&score);
        iterations += 1;
        if beta.amax() > SEPARATION_BOUND {
            return Err(StatsError::Separation(design.dv.clone()));
        }
    }
    let (mu, info) = information(&beta);
    if !converged {
        let score = x.transpose() * (&design.y - &mu);
        converged = score.amax() < LOGIT_TOLERANCE;
    }
    let mut warnings = design.warnings.clone();
    if !converged {
        let msg = format!("{}: logistic fit stopped after {LOGIT_MAX_ITER} iterations", design.dv);
        log::warn!("{msg}");
        warnings.push(msg);
    }
    let cov = info
        .try_inverse()
        .ok_or_else(|| StatsError::RankDeficient("information matrix".into()))?;
    Ok(RegressionResult {
        dv: design.dv.clone(),
        model: ModelKind::Logit,
        coding: design.options.coding,
        robust: Robust::None,
        standardized: design.options.standardize,
        n,
        df: None,
        coefficients: coefficients(design, &beta, &cov, None),
        covariance: cov,
        fitted: mu,
        iterations,
        warnings,
    })
}
