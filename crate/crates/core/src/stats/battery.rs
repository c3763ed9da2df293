use super::design::{build_design, DesignOptions};
use super::fit::{logit_fit, ols_fit, RegressionResult, Robust};
use super::StatsError;
use crate::metrics::SpeakerRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DvKind {
    Continuous,
    Binary,
}

/// Outcome and behavior variables: Accept and Not-Walk-Away are binary, the rest continuous.
pub fn dv_kind(dv: &str) -> DvKind {
    match dv {
        "accept" | "not_walk_away" => DvKind::Binary,
        _ => DvKind::Continuous,
    }
}

/// Fits OLS to continuous DVs and logistic regression to binary ones. Errors are reported per DV.
pub fn regression_battery(
    records: &[SpeakerRecord],
    dvs: &[&str],
    options: DesignOptions,
    robust: Robust,
) -> Vec<(String, Result<RegressionResult, StatsError>)> {
    dvs.iter()
        .map(|dv| {
            let result = build_design(records, dv, options).and_then(|design| match dv_kind(dv) {
                DvKind::Continuous => ols_fit(&design, robust),
                DvKind::Binary => logit_fit(&design),
            });
            if let Err(e) = &result {
                log::warn!("{dv}: {e}");
            }
            (dv.to_string(), result)
        })
        .collect()
}
