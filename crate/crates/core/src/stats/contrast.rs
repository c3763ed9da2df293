use nalgebra::DVector;

use super::design::{interaction_column, self_column};
use super::fit::RegressionResult;
use super::StatsError;
use crate::corpus::{Role, Trait};

/// A named linear combination of a model's coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Contrast {
    pub name: String,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContrastEstimate {
    pub name: String,
    pub estimate: f64,
    pub se: f64,
    pub stat: f64,
    pub p: f64,
}

/// `w'b` with standard error `sqrt(w' Cov w)`, tested like the parent model's coefficients.
pub fn linear_combination(result: &RegressionResult, contrast: &Contrast) -> Result<ContrastEstimate, StatsError> {
    let p = result.coefficients.len();
    if contrast.weights.len() != p {
        return Err(StatsError::Shape(format!(
            "contrast {} has {} weights for {p} coefficients",
            contrast.name,
            contrast.weights.len()
        )));
    }
    if contrast.weights.iter().all(|w| *w == 0.0) {
        return Err(StatsError::DegenerateContrast(contrast.name.clone()));
    }
    let w = DVector::from_column_slice(&contrast.weights);
    let estimate = w.dot(&result.estimates());
    let var = (w.transpose() * &result.covariance * &w)[(0, 0)];
    let se = var.max(0.0).sqrt();
    let stat = if se > 0.0 { estimate / se } else { 0.0 };
    Ok(ContrastEstimate {
        name: contrast.name.clone(),
        estimate,
        se,
        stat,
        p: result.p_value(stat),
    })
}

/// Effect of the speaker's own trait at each position: `b_trait + code(role) * b_interaction`.
///
/// Under dummy coding this is `b_trait` for the Buyer (POS=0) and `b_trait + b_int` for the Seller (POS=1).
pub fn simple_effects(result: &RegressionResult, t: Trait) -> Result<[ContrastEstimate; 2], StatsError> {
    let main = self_column(t);
    let int = interaction_column(t);
    let i = result
        .index_of(&main)
        .ok_or_else(|| StatsError::MissingColumn(main.clone()))?;
    let k = result
        .index_of(&int)
        .ok_or_else(|| StatsError::MissingColumn(int.clone()))?;
    let effect = |role: Role| {
        let code = result.coding.code(role);
        let mut weights = vec![0.0; result.coefficients.len()];
        weights[i] = 1.0;
        weights[k] = code;
        let name = format!("{role}@POS={code}");
        linear_combination(result, &Contrast { name, weights })
    };
    Ok([effect(Role::Buyer)?, effect(Role::Seller)?])
}

/// Header for simple-effect tables.
pub const SIMPLE_EFFECT_HEADER: [&str; 8] = ["dv", "trait", "position", "beta", "se", "stat", "p", "coding"];

pub fn simple_effect_rows(result: &RegressionResult, t: Trait, effects: &[ContrastEstimate; 2]) -> Vec<Vec<String>> {
    effects
        .iter()
        .map(|e| {
            vec![
                result.dv.clone(),
                t.code().to_string(),
                e.name.clone(),
                e.estimate.to_string(),
                e.se.to_string(),
                e.stat.to_string(),
                e.p.to_string(),
                result.coding.name().to_string(),
            ]
        })
        .collect()
}
