use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::StatsError;
use crate::corpus::{Role, Trait};
use crate::metrics::SpeakerRecord;

/// How the Buyer/Seller position enters the design.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coding {
    /// Buyer -1, Seller +1.
    Effect,
    /// Buyer 0, Seller 1.
    Dummy,
}

impl Coding {
    pub fn code(self, role: Role) -> f64 {
        match (self, role) {
            (Coding::Effect, Role::Buyer) => -1.0,
            (Coding::Effect, Role::Seller) => 1.0,
            (Coding::Dummy, Role::Buyer) => 0.0,
            (Coding::Dummy, Role::Seller) => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Coding::Effect => "effect",
            Coding::Dummy => "dummy",
        }
    }
}

pub const CONST: &str = "CONST";
pub const POSITION: &str = "POSITION";

pub fn self_column(t: Trait) -> String {
    format!("SELF_{}", t.code())
}

pub fn partner_column(t: Trait) -> String {
    format!("PARTNER_{}", t.code())
}

pub fn interaction_column(t: Trait) -> String {
    format!("SELF_{}_X_POSITION", t.code())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignOptions {
    pub coding: Coding,
    /// z-score the ten trait columns over the retained rows.
    pub standardize: bool,
    /// Append SELF_trait x POSITION for all five traits.
    pub interactions: bool,
}

impl Default for DesignOptions {
    fn default() -> Self {
        DesignOptions {
            coding: Coding::Effect,
            standardize: true,
            interactions: false,
        }
    }
}

/// Predictors with named columns, a response and row ids; no missing cells.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    pub dv: String,
    pub columns: Vec<String>,
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
    pub row_ids: Vec<String>,
    pub options: DesignOptions,
    pub warnings: Vec<String>,
}

impl DesignMatrix {
    /// Wraps raw data; column names must be unique and dimensions consistent.
    pub fn new(dv: &str, columns: Vec<String>, x: DMatrix<f64>, y: DVector<f64>) -> Result<Self, StatsError> {
        if x.ncols() != columns.len() || x.nrows() != y.len() {
            return Err(StatsError::Shape(format!(
                "{}x{} matrix, {} names, {} responses",
                x.nrows(),
                x.ncols(),
                columns.len(),
                y.len()
            )));
        }
        for (i, c) in columns.iter().enumerate() {
            if columns[..i].contains(c) {
                return Err(StatsError::Shape(format!("duplicate column {c}")));
            }
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(StatsError::Shape("non-finite cell".into()));
        }
        let row_ids = (0..x.nrows()).map(|i| i.to_string()).collect();
        Ok(DesignMatrix {
            dv: dv.to_string(),
            columns,
            x,
            y,
            row_ids,
            options: DesignOptions::default(),
            warnings: Vec::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Builds the regression design for one dependent variable.
///
/// Rows whose DV is missing are dropped. Columns: CONST, SELF_*, PARTNER_*, POSITION and, optionally,
/// SELF_* x POSITION (built from the possibly standardized trait column). Non-constant columns without
/// variance are dropped with a warning.
pub fn build_design(records: &[SpeakerRecord], dv: &str, options: DesignOptions) -> Result<DesignMatrix, StatsError> {
    if !crate::metrics::DV_NAMES.contains(&dv) {
        return Err(StatsError::UnknownDv(dv.to_string()));
    }
    let kept: Vec<&SpeakerRecord> = records.iter().filter(|r| r.dv(dv).is_some()).collect();
    if kept.is_empty() {
        return Err(StatsError::NoRows(dv.to_string()));
    }
    let mut names = vec![CONST.to_string()];
    let mut cols: Vec<Vec<f64>> = vec![vec![1.0; kept.len()]];
    for t in Trait::ALL {
        names.push(self_column(t));
        cols.push(kept.iter().map(|r| r.self_traits.value(t)).collect());
    }
    for t in Trait::ALL {
        names.push(partner_column(t));
        cols.push(kept.iter().map(|r| r.partner_traits.value(t)).collect());
    }
    if options.standardize {
        for col in &mut cols[1..=10] {
            let (mean, sd) = mean_sd(col);
            if sd > 0.0 {
                col.iter_mut().for_each(|v| *v = (*v - mean) / sd);
            }
        }
    }
    let position: Vec<f64> = kept.iter().map(|r| options.coding.code(r.role)).collect();
    if options.interactions {
        for t in Trait::ALL {
            names.push(interaction_column(t));
            let trait_col = &cols[1 + t.index()];
            cols.push(trait_col.iter().zip(&position).map(|(a, b)| a * b).collect());
        }
        // keep POSITION before the interactions
        names.insert(11, POSITION.to_string());
        cols.insert(11, position);
    } else {
        names.push(POSITION.to_string());
        cols.push(position);
    }

    let mut warnings = Vec::new();
    let mut keep = vec![true; cols.len()];
    for (j, col) in cols.iter().enumerate().skip(1) {
        if mean_sd(col).1 == 0.0 {
            let msg = format!("{dv}: column {} has no variance and was dropped", names[j]);
            log::warn!("{msg}");
            warnings.push(msg);
            keep[j] = false;
        }
    }
    let (names, cols): (Vec<String>, Vec<Vec<f64>>) = names
        .into_iter()
        .zip(cols)
        .zip(&keep)
        .filter(|(_, k)| **k)
        .map(|(nc, _)| nc)
        .unzip();
    let n = kept.len();
    let x = DMatrix::from_fn(n, cols.len(), |i, j| cols[j][i]);
    let y = DVector::from_iterator(n, kept.iter().map(|r| r.dv(dv).expect("filtered")));
    Ok(DesignMatrix {
        dv: dv.to_string(),
        columns: names,
        x,
        y,
        row_ids: kept.iter().map(|r| format!("{}:{}", r.dialogue_id, r.role)).collect(),
        options,
        warnings,
    })
}
