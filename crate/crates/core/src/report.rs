//! Verification reports.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub seed_offset: u64,
    pub zero: bool,
    #[serde(
        with = "crate::rational::opt_pair",
        skip_serializing_if = "Option::is_none",
        default
    )]
    pub residual: Option<Rational>,
}

impl TrialOutcome {
    pub fn exact(seed_offset: u64, residual: Rational) -> Self {
        use num_traits::Zero;
        let zero = residual.is_zero();
        Self {
            seed_offset,
            zero,
            residual: (!zero).then_some(residual),
        }
    }

    /// Outcome without a scalar residual (element-valued or symbolic checks).
    pub fn flag(seed_offset: u64, zero: bool) -> Self {
        Self {
            seed_offset,
            zero,
            residual: None,
        }
    }
}

/// Result of one randomized or symbolic check. `pass` is true iff every
/// trial residual is exactly zero (and, for checks that carry extra
/// conditions, those hold too).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub params: BTreeMap<String, Value>,
    pub trials: Vec<TrialOutcome>,
    pub terms_evaluated: u64,
    pub ms: u64,
    pub pass: bool,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub notes: BTreeMap<String, Value>,
}

impl VerificationReport {
    pub fn new(check: impl Into<String>) -> Self {
        Self {
            check: check.into(),
            params: BTreeMap::new(),
            trials: Vec::new(),
            terms_evaluated: 0,
            ms: 0,
            pass: false,
            notes: BTreeMap::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn note(&mut self, key: &str, value: impl Into<Value>) {
        self.notes.insert(key.to_string(), value.into());
    }

    /// Sets `pass` from the trials and records elapsed wall time.
    pub fn finish(mut self, started: Instant) -> Self {
        self.pass = !self.trials.is_empty() && self.trials.iter().all(|t| t.zero);
        self.ms = started.elapsed().as_millis() as u64;
        self
    }

    pub fn failures(&self) -> usize {
        self.trials.iter().filter(|t| !t.zero).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON with the wall-time field zeroed; identical runs give identical bytes.
    pub fn to_json_without_timing(&self) -> String {
        let mut copy = self.clone();
        copy.ms = 0;
        copy.to_json()
    }

    pub fn summary_line(&self) -> String {
        format!(
            "{:<28} {} trials={} failures={} terms={} ms={}",
            self.check,
            if self.pass { "PASS" } else { "FAIL" },
            self.trials.len(),
            self.failures(),
            self.terms_evaluated,
            self.ms
        )
    }

    /// Human-readable table.
    pub fn to_pretty(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("check: {}\n", self.check));
        for (k, v) in &self.params {
            out.push_str(&format!("  {k:<16} {v}\n"));
        }
        out.push_str("  trial  zero   residual\n");
        for t in &self.trials {
            let residual = t
                .residual
                .as_ref()
                .map(crate::rational::display)
                .unwrap_or_else(|| "-".into());
            out.push_str(&format!("  {:<6} {:<6} {}\n", t.seed_offset, t.zero, residual));
        }
        for (k, v) in &self.notes {
            out.push_str(&format!("  note {k}: {v}\n"));
        }
        out.push_str(&format!(
            "terms evaluated: {}  time: {} ms  result: {}\n",
            self.terms_evaluated,
            self.ms,
            if self.pass { "PASS" } else { "FAIL" }
        ));
        out
    }
}
