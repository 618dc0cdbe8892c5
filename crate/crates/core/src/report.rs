//! Pass/fail records for operator identities.
//!
//! Text form, one line per record:
//! `IDENTITY <name> BLOCK (u,v) PASS|FAIL <max-residual>`.
//! The JSON form is an array of `{identity, block, pass, max_residual}`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;
use crate::scalar::{Backend, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityRecord {
    pub identity: String,
    pub block: (usize, usize),
    pub pass: bool,
    pub max_residual: f64,
}

impl IdentityRecord {
    pub fn new(identity: impl Into<String>, block: (usize, usize), pass: bool, max_residual: f64) -> Self {
        IdentityRecord { identity: identity.into(), block, pass, max_residual }
    }

    /// Compares two maps. Exact backend: pass iff literally equal. Float:
    /// pass iff the largest entry of the difference is at most
    /// `tolerance * max(1, largest entry of either side)`. A shape mismatch fails
    /// with residual `f64::MAX`.
    pub fn compare<S: Scalar>(
        identity: impl Into<String>,
        block: (usize, usize),
        lhs: &Matrix<S>,
        rhs: &Matrix<S>,
    ) -> Self {
        let (residual, pass) = match lhs.residual(rhs) {
            Ok((r, zero)) => {
                let pass = match S::BACKEND {
                    Backend::Exact => zero,
                    Backend::Float => {
                        r <= S::tolerance() * 1f64.max(lhs.max_modulus()).max(rhs.max_modulus())
                    }
                };
                (r, pass)
            }
            Err(_) => (f64::MAX, false),
        };
        IdentityRecord::new(identity, block, pass, residual)
    }

    /// Checks that a map vanishes.
    pub fn vanishes<S: Scalar>(identity: impl Into<String>, block: (usize, usize), m: &Matrix<S>) -> Self {
        IdentityRecord::compare(identity, block, m, &Matrix::zeros(m.rows(), m.cols()))
    }

    /// Records an integer equality, residual `|a - b|`.
    pub fn counts(identity: impl Into<String>, block: (usize, usize), a: usize, b: usize) -> Self {
        IdentityRecord::new(identity, block, a == b, a.abs_diff(b) as f64)
    }
}

impl fmt::Display for IdentityRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "IDENTITY {} BLOCK ({},{}) {} {:e}",
            self.identity,
            self.block.0,
            self.block.1,
            if self.pass { "PASS" } else { "FAIL" },
            self.max_residual
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseReportError(pub String);

impl fmt::Display for ParseReportError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "malformed report line: {}", self.0)
    }
}

impl std::error::Error for ParseReportError {}

impl FromStr for IdentityRecord {
    type Err = ParseReportError;

    fn from_str(line: &str) -> Result<Self, Self::Err> {
        let bad = || ParseReportError(line.to_string());
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 6 || parts[0] != "IDENTITY" || parts[2] != "BLOCK" {
            return Err(bad());
        }
        let block = parts[3].strip_prefix('(').and_then(|s| s.strip_suffix(')')).ok_or_else(bad)?;
        let (u, v) = block.split_once(',').ok_or_else(bad)?;
        let pass = match parts[4] {
            "PASS" => true,
            "FAIL" => false,
            _ => return Err(bad()),
        };
        Ok(IdentityRecord {
            identity: parts[1].to_string(),
            block: (u.parse().map_err(|_| bad())?, v.parse().map_err(|_| bad())?),
            pass,
            max_residual: parts[5].parse().map_err(|_| bad())?,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Report {
    pub records: Vec<IdentityRecord>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn push(&mut self, record: IdentityRecord) {
        self.records.push(record);
    }

    pub fn extend(&mut self, other: Report) {
        self.records.extend(other.records);
    }

    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityRecord> {
        self.records.iter().filter(|r| !r.pass)
    }

    /// Records for one identity name.
    pub fn named<'a>(&'a self, identity: &'a str) -> impl Iterator<Item = &'a IdentityRecord> + 'a {
        self.records.iter().filter(move |r| r.identity == identity)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn to_text(&self) -> String {
        self.records.iter().map(|r| format!("{r}\n")).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

impl FromStr for Report {
    type Err = ParseReportError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let records = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(str::parse)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Report { records })
    }
}

impl FromIterator<IdentityRecord> for Report {
    fn from_iter<I: IntoIterator<Item = IdentityRecord>>(iter: I) -> Self {
        Report { records: iter.into_iter().collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::GaussianRational as Q;
    use crate::Complex;

    #[test]
    fn text_round_trip() {
        let report: Report = vec![
            IdentityRecord::new("star_square", (1, 2), true, 0.0),
            IdentityRecord::new("leaf_star_laplacian", (0, 0), false, 2.5e-3),
        ]
        .into_iter()
        .collect();
        let text = report.to_text();
        assert!(text.starts_with("IDENTITY star_square BLOCK (1,2) PASS 0e0\n"));
        assert_eq!(text.parse::<Report>().unwrap(), report);
        assert_eq!(Report::from_json(&report.to_json()).unwrap(), report);
    }

    #[test]
    fn json_shape() {
        let r = IdentityRecord::new("x", (0, 1), true, 0.0);
        let v: serde_json::Value = serde_json::to_value(Report { records: vec![r] }).unwrap();
        assert_eq!(v[0]["block"], serde_json::json!([0, 1]));
        assert_eq!(v[0]["identity"], "x");
    }

    #[test]
    fn malformed_lines() {
        assert!("IDENTITY a BLOCK 0,0 PASS 0".parse::<IdentityRecord>().is_err());
        assert!("IDENTITY a BLOCK (0,0) MAYBE 0".parse::<IdentityRecord>().is_err());
    }

    #[test]
    fn exact_compare_needs_equality() {
        let a = Matrix::<Q>::identity(2);
        let b = a.scale(&Q::ratio(1, 1));
        assert!(IdentityRecord::compare("id", (0, 0), &a, &b).pass);
        let c = a.scale(&Q::ratio(1_000_001, 1_000_000));
        let rec = IdentityRecord::compare("id", (0, 0), &a, &c);
        assert!(!rec.pass);
        assert!(rec.max_residual > 0.0);
        assert!(!IdentityRecord::compare("id", (0, 0), &a, &Matrix::identity(3)).pass);
    }

    #[test]
    fn float_compare_uses_tolerance() {
        let a = Matrix::<Complex<f64>>::identity(2);
        let b = a.scale(&Complex::new(1.0 + 1e-13, 0.0));
        assert!(IdentityRecord::compare("id", (0, 0), &a, &b).pass);
        let c = a.scale(&Complex::new(1.0 + 1e-6, 0.0));
        assert!(!IdentityRecord::compare("id", (0, 0), &a, &c).pass);
    }
}
