use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{Map, Value};
use symdiag::matcore::ToleranceConfig;
use symdiag::Error;

use crate::matrix_io::rows_of;

#[derive(Debug, Serialize)]
pub struct InputInfo {
    pub source: String,
    pub dim: usize,
}

#[derive(Debug, Serialize)]
pub struct Tolerances {
    pub tol_sym: f64,
    pub tol_pd: f64,
    pub tol_rank: f64,
    pub tol_commute: f64,
    pub tol_cluster: f64,
    pub tol_residual: f64,
}

impl From<&ToleranceConfig> for Tolerances {
    fn from(c: &ToleranceConfig) -> Self {
        Self {
            tol_sym: c.tol_sym,
            tol_pd: c.tol_pd,
            tol_rank: c.tol_rank,
            tol_commute: c.tol_commute,
            tol_cluster: c.tol_cluster,
            tol_residual: c.tol_residual,
        }
    }
}

/// JSON document written for every command except `gen`. Non-finite numbers
/// serialize as `null`.
#[derive(Debug, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub inputs: Vec<InputInfo>,
    pub result: Map<String, Value>,
    pub residuals: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
    pub tolerances: Tolerances,
    pub version: &'static str,
}

impl Report {
    pub fn new(command: &'static str, inputs: Vec<InputInfo>, cfg: &ToleranceConfig) -> Self {
        Self {
            command,
            inputs,
            result: Map::new(),
            residuals: BTreeMap::new(),
            warnings: Vec::new(),
            tolerances: cfg.into(),
            version: env!("CARGO_PKG_VERSION"),
        }
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.result.insert(
            key.to_string(),
            serde_json::to_value(value).expect("report values are plain data"),
        );
        self
    }

    pub fn residual(&mut self, name: impl Into<String>, value: f64) -> &mut Self {
        self.residuals.insert(name.into(), value);
        self
    }

    /// Fills the result with the hypothesis a library error reports as violated.
    pub fn rejection(&mut self, err: &Error, hypothesis: &str) {
        self.set("rejected", true)
            .set("violated_hypothesis", hypothesis)
            .set("message", err.to_string());
        if let Some(r) = err.residual() {
            self.set("residual", r);
            self.residual("violation", r);
        }
        match err {
            Error::NotCommuting {
                first,
                second,
                bracket,
                ..
            } => {
                self.set("pair", [first, second])
                    .set("bracket", rows_of(bracket));
            }
            Error::KernelNotSymplectic { kernel } => {
                self.set("kernel", kernel.to_string());
            }
            Error::NotPositiveDefinite { index, .. }
            | Error::NotPositiveSemidefinite { index, .. } => {
                self.set("matrix_index", index);
            }
            _ => {}
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
