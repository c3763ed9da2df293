//! Regression models for the personality-behavior analysis.

mod battery;
mod contrast;
mod design;
mod fit;

pub use battery::{dv_kind, regression_battery, DvKind};
pub use contrast::{
    linear_combination, simple_effect_rows, simple_effects, Contrast, ContrastEstimate, SIMPLE_EFFECT_HEADER,
};
pub use design::{
    build_design, interaction_column, partner_column, self_column, Coding, DesignMatrix, DesignOptions, CONST, POSITION,
};
pub use fit::{
    logit_fit, ols_fit, Coefficient, ModelKind, RegressionResult, Robust, LOGIT_MAX_ITER, LOGIT_TOLERANCE,
    SEPARATION_BOUND,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("unknown dependent variable {0:?}")]
    UnknownDv(String),
    #[error("no rows left for {0} after dropping missing values")]
    NoRows(String),
    #[error("{n} rows are not enough for {p} coefficients")]
    TooFewRows { n: usize, p: usize },
    #[error("design is rank deficient at column {0}")]
    RankDeficient(String),
    #[error("{0}: outcome has a single class")]
    OneClass(String),
    #[error("binary outcome has value {0}")]
    NotBinary(f64),
    #[error("{0}: complete or quasi-complete separation (coefficients diverge)")]
    Separation(String),
    #[error("column {0} is not in the model")]
    MissingColumn(String),
    #[error("contrast {0} has all-zero weights")]
    DegenerateContrast(String),
    #[error("shape error: {0}")]
    Shape(String),
}
