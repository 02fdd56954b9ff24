//! Outcome summaries of randomized checks.

use serde::{Deserialize, Serialize};

use crate::json::{ext_real, ext_real_vec};
use crate::quantile::StepQuantile;

/// First failing trial of a check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub trial: u64,
    pub kind: String,
    #[serde(with = "ext_real")]
    pub deviation: f64,
    pub distributions: Vec<StepQuantile>,
    #[serde(with = "ext_real_vec")]
    pub values: Vec<f64>,
}

/// Summary of one named property check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub trials: u64,
    #[serde(with = "ext_real")]
    pub max_deviation: f64,
    pub violations: u64,
    pub counterexample: Option<Counterexample>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, trials: u64) -> Self {
        Self {
            name: name.into(),
            trials,
            max_deviation: 0.0,
            violations: 0,
            counterexample: None,
        }
    }

    /// Folds in one trial; a counterexample marks the trial as a violation.
    pub fn record(&mut self, deviation: f64, counterexample: Option<Counterexample>) {
        if deviation > self.max_deviation || deviation.is_nan() {
            self.max_deviation = deviation;
        }
        if let Some(c) = counterexample {
            self.violations += 1;
            if self.counterexample.is_none() {
                self.counterexample = Some(c);
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    pub trials: u64,
    #[serde(with = "ext_real")]
    pub max_deviation: f64,
    pub violations: u64,
    pub counterexample: Option<Counterexample>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckReport>,
}

impl Report {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self {
            suite: None,
            trials,
            max_deviation: 0.0,
            violations: 0,
            counterexample: None,
            seed,
            checks: Vec::new(),
        }
    }

    pub fn record(&mut self, deviation: f64, counterexample: Option<Counterexample>) {
        if deviation > self.max_deviation || deviation.is_nan() {
            self.max_deviation = deviation;
        }
        if let Some(c) = counterexample {
            self.violations += 1;
            if self.counterexample.is_none() {
                self.counterexample = Some(c);
            }
        }
    }

    /// Aggregate of several checks run under one suite name.
    pub fn from_checks(suite: &str, trials: u64, seed: u64, checks: Vec<CheckReport>) -> Self {
        let mut report = Self::new(trials, seed);
        report.suite = Some(suite.to_string());
        for check in &checks {
            if check.max_deviation > report.max_deviation || check.max_deviation.is_nan() {
                report.max_deviation = check.max_deviation;
            }
            report.violations += check.violations;
            if report.counterexample.is_none() {
                report.counterexample = check.counterexample.clone();
            }
        }
        report.checks = checks;
        report
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}
