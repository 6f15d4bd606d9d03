use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Number of worst cases kept in a report summary.
pub const WITNESS_COUNT: usize = 5;

/// One verified cell: a `(q, χ)` pair, a parameter tuple, or an experiment instance.
///
/// This is also the flat CSV row; `params` is a `key=value;...` list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub check: String,
    pub q: u64,
    pub chi_index: Option<u64>,
    pub chi_label: String,
    pub params: String,
    pub value_re: f64,
    pub value_im: f64,
    /// Expected value or bound the case is measured against.
    pub reference: f64,
    pub defect: f64,
    pub ratio: f64,
    pub passed: bool,
}

impl CaseRecord {
    pub fn param(&self, key: &str) -> Result<&str> {
        self.params
            .split(';')
            .filter_map(|kv| kv.split_once('='))
            .find(|(k, _)| *k == key)
            .map(|(_, v)| v)
            .ok_or_else(|| Error::Parse(format!("case has no parameter {key:?}: {}", self.params)))
    }

    pub fn param_i64(&self, key: &str) -> Result<i64> {
        self.param(key)?
            .parse()
            .map_err(|_| Error::Parse(format!("parameter {key:?} is not an integer")))
    }
}

/// Build a `key=value;...` parameter string.
pub fn format_params(pairs: &[(&str, String)]) -> String {
    pairs
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(";")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub tested: u64,
    pub passed: u64,
    pub max_defect: f64,
    pub max_ratio: f64,
    /// Whether failing cases make the check fail (false for ratio-only reports).
    pub hard_assert: bool,
    pub witnesses: Vec<CaseRecord>,
    pub notes: Vec<String>,
}

/// Which column ranks the witnesses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rank {
    Defect,
    Ratio,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub config: serde_json::Value,
    pub cases: Vec<CaseRecord>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn from_cases(
        check: &str,
        config: serde_json::Value,
        cases: Vec<CaseRecord>,
        notes: Vec<String>,
        hard_assert: bool,
        rank: Rank,
    ) -> Self {
        let score = |c: &CaseRecord| match rank {
            Rank::Defect => c.defect,
            Rank::Ratio => c.ratio,
        };
        let mut order: Vec<usize> = (0..cases.len()).collect();
        // failures first, then by descending score; stable on ties
        order.sort_by(|&i, &j| {
            let (a, b) = (&cases[i], &cases[j]);
            a.passed
                .cmp(&b.passed)
                .then(score(b).total_cmp(&score(a)))
        });
        let witnesses = order
            .into_iter()
            .take(WITNESS_COUNT)
            .map(|i| cases[i].clone())
            .collect();
        let summary = Summary {
            tested: cases.len() as u64,
            passed: cases.iter().filter(|c| c.passed).count() as u64,
            max_defect: cases.iter().map(|c| c.defect).fold(0.0, f64::max),
            max_ratio: cases.iter().map(|c| c.ratio).fold(0.0, f64::max),
            hard_assert,
            witnesses,
            notes,
        };
        VerificationReport {
            check: check.to_string(),
            config,
            cases,
            summary,
        }
    }

    /// True unless a hard assertion failed.
    pub fn ok(&self) -> bool {
        !self.summary.hard_assert || self.summary.passed == self.summary.tested
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseRecord> {
        self.cases.iter().filter(|c| !c.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports hold only finite numbers")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Several reports serialized together.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub reports: Vec<VerificationReport>,
}

impl ReportBundle {
    pub fn ok(&self) -> bool {
        self.reports.iter().all(VerificationReport::ok)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports hold only finite numbers")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Write the cases of every report as one CSV table with a single header row.
pub fn write_csv<'a, W: Write>(
    reports: impl IntoIterator<Item = &'a VerificationReport>,
    out: W,
) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in reports {
        for c in &r.cases {
            w.serialize(c).map_err(csv_err)?;
        }
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<CaseRecord>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|row| row.map_err(csv_err)).collect()
}

pub const CSV_HEADER: [&str; 11] = [
    "check",
    "q",
    "chi_index",
    "chi_label",
    "params",
    "value_re",
    "value_im",
    "reference",
    "defect",
    "ratio",
    "passed",
];

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}
