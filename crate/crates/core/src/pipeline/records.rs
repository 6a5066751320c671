//! Line-delimited curve records with named fields.
//!
//! ```text
//! label=66a1 a1=1 a2=0 a3=1 a4=-6 a6=4 rank=0 sha_order=1 provenance=database
//! ```
//!
//! `#` starts a comment. `label` and `a1 a2 a3 a4 a6` are required; all
//! other fields are optional arithmetic data.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::curve::{BaseField, CurveModel};
use crate::error::{Error, Result};

/// The curves shipped with the crate.
pub const BUNDLED_CURVES: &str = include_str!("../../data/curves.txt");

/// Where optional arithmetic data came from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    #[default]
    User,
    Database,
    Computed,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::User => "user",
            Provenance::Database => "database",
            Provenance::Computed => "computed",
        })
    }
}

impl FromStr for Provenance {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "user" => Ok(Provenance::User),
            "database" => Ok(Provenance::Database),
            "computed" => Ok(Provenance::Computed),
            other => Err(format!("unknown provenance {other:?}")),
        }
    }
}

/// One curve with optional arithmetic data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveRecord {
    pub label: String,
    /// `[a1, a2, a3, a4, a6]`.
    pub a: [BigInt; 5],
    pub rank: Option<u32>,
    pub rank_qi: Option<u32>,
    /// `r‡` when it differs from the rank (split multiplicative places above p).
    pub rank_dag: Option<u32>,
    /// Full (analytic) order of Ш over Q; only its p-part is used.
    pub sha_order: Option<u64>,
    pub sha_order_qi: Option<u64>,
    pub regulator_valuation: Option<i64>,
    pub torsion_order: Option<u64>,
    pub torsion_order_qi: Option<u64>,
    /// Characteristic series `f‡(T)` (ascending coefficients) for the prime `charpoly_p`.
    pub charpoly: Option<Vec<i64>>,
    pub charpoly_p: Option<u64>,
    pub gamma_e: Option<u32>,
    pub provenance: Provenance,
}

const FIELDS: [&str; 18] = [
    "label",
    "a1",
    "a2",
    "a3",
    "a4",
    "a6",
    "rank",
    "rank_qi",
    "rank_dag",
    "sha_order",
    "sha_order_qi",
    "regulator_valuation",
    "torsion_order",
    "torsion_order_qi",
    "charpoly",
    "charpoly_p",
    "gamma_e",
    "provenance",
];

impl CurveRecord {
    /// A record with a-invariants only.
    pub fn new(label: impl Into<String>, a: [BigInt; 5]) -> Self {
        Self {
            label: label.into(),
            a,
            rank: None,
            rank_qi: None,
            rank_dag: None,
            sha_order: None,
            sha_order_qi: None,
            regulator_valuation: None,
            torsion_order: None,
            torsion_order_qi: None,
            charpoly: None,
            charpoly_p: None,
            gamma_e: None,
            provenance: Provenance::User,
        }
    }

    pub fn model(&self) -> Result<CurveModel> {
        CurveModel::new(self.label.clone(), self.a.clone())
    }

    pub fn rank_over(&self, field: BaseField) -> Option<u32> {
        match field {
            BaseField::Q => self.rank,
            BaseField::Qi => self.rank_qi,
        }
    }

    pub fn sha_over(&self, field: BaseField) -> Option<u64> {
        match field {
            BaseField::Q => self.sha_order,
            BaseField::Qi => self.sha_order_qi,
        }
    }

    pub fn torsion_over(&self, field: BaseField) -> Option<u64> {
        match field {
            BaseField::Q => self.torsion_order,
            BaseField::Qi => self.torsion_order_qi,
        }
    }

    /// Parses one non-comment line.
    pub fn parse_line(line: &str, line_no: usize) -> Result<Self> {
        let err = |message: String| Error::Parse { line: line_no, message };
        let mut seen = HashSet::new();
        let mut label = None;
        let mut a: [Option<BigInt>; 5] = Default::default();
        let mut rec = CurveRecord::new("", Default::default());
        for token in line.split_whitespace() {
            let (key, value) =
                token.split_once('=').ok_or_else(|| err(format!("expected key=value, found {token:?}")))?;
            if !FIELDS.contains(&key) {
                return Err(err(format!("unknown field {key:?}")));
            }
            if !seen.insert(key) {
                return Err(err(format!("field {key:?} given twice")));
            }
            fn num<T: FromStr>(key: &str, v: &str, line: usize) -> Result<T> {
                v.parse().map_err(|_| Error::Parse { line, message: format!("field {key}: cannot parse {v:?}") })
            }
            match key {
                "label" => label = Some(value.to_string()),
                "a1" => a[0] = Some(num(key, value, line_no)?),
                "a2" => a[1] = Some(num(key, value, line_no)?),
                "a3" => a[2] = Some(num(key, value, line_no)?),
                "a4" => a[3] = Some(num(key, value, line_no)?),
                "a6" => a[4] = Some(num(key, value, line_no)?),
                "rank" => rec.rank = Some(num(key, value, line_no)?),
                "rank_qi" => rec.rank_qi = Some(num(key, value, line_no)?),
                "rank_dag" => rec.rank_dag = Some(num(key, value, line_no)?),
                "sha_order" => rec.sha_order = Some(num(key, value, line_no)?),
                "sha_order_qi" => rec.sha_order_qi = Some(num(key, value, line_no)?),
                "regulator_valuation" => rec.regulator_valuation = Some(num(key, value, line_no)?),
                "torsion_order" => rec.torsion_order = Some(num(key, value, line_no)?),
                "torsion_order_qi" => rec.torsion_order_qi = Some(num(key, value, line_no)?),
                "charpoly" => {
                    rec.charpoly = Some(
                        value.split(',').map(|c| num(key, c, line_no)).collect::<Result<Vec<i64>>>()?,
                    )
                }
                "charpoly_p" => rec.charpoly_p = Some(num(key, value, line_no)?),
                "gamma_e" => rec.gamma_e = Some(num(key, value, line_no)?),
                "provenance" => rec.provenance = value.parse().map_err(err)?,
                _ => unreachable!("field list checked above"),
            }
        }
        rec.label = label.ok_or_else(|| err("missing field label".into()))?;
        for (i, name) in ["a1", "a2", "a3", "a4", "a6"].iter().enumerate() {
            rec.a[i] = a[i].take().ok_or_else(|| err(format!("missing field {name}")))?;
        }
        for (bad, name) in [(rec.sha_order == Some(0), "sha_order"), (rec.torsion_order == Some(0), "torsion_order")] {
            if bad {
                return Err(err(format!("field {name} must be positive")));
            }
        }
        rec.model()?;
        Ok(rec)
    }

    /// Inverse of [`CurveRecord::parse_line`].
    pub fn to_line(&self) -> String {
        let [a1, a2, a3, a4, a6] = &self.a;
        let mut s = format!("label={} a1={a1} a2={a2} a3={a3} a4={a4} a6={a6}", self.label);
        let mut push = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                s.push_str(&format!(" {k}={v}"));
            }
        };
        push("rank", self.rank.map(|x| x.to_string()));
        push("rank_qi", self.rank_qi.map(|x| x.to_string()));
        push("rank_dag", self.rank_dag.map(|x| x.to_string()));
        push("sha_order", self.sha_order.map(|x| x.to_string()));
        push("sha_order_qi", self.sha_order_qi.map(|x| x.to_string()));
        push("regulator_valuation", self.regulator_valuation.map(|x| x.to_string()));
        push("torsion_order", self.torsion_order.map(|x| x.to_string()));
        push("torsion_order_qi", self.torsion_order_qi.map(|x| x.to_string()));
        push(
            "charpoly",
            self.charpoly.as_ref().map(|c| c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")),
        );
        push("charpoly_p", self.charpoly_p.map(|x| x.to_string()));
        push("gamma_e", self.gamma_e.map(|x| x.to_string()));
        push("provenance", Some(self.provenance.to_string()));
        s
    }
}

/// Parses a whole record file; duplicate labels and singular models are errors.
pub fn parse_curve_records_str(text: &str) -> Result<Vec<CurveRecord>> {
    let mut out: Vec<CurveRecord> = Vec::new();
    let mut labels = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let rec = CurveRecord::parse_line(line, i + 1).map_err(|e| match e {
            Error::SingularModel { label } => Error::Parse {
                line: i + 1,
                message: format!("singular model{}", label.map(|l| format!(" ({l})")).unwrap_or_default()),
            },
            other => other,
        })?;
        if !labels.insert(rec.label.clone()) {
            return Err(Error::DuplicateLabel(rec.label));
        }
        out.push(rec);
    }
    Ok(out)
}

pub fn parse_curve_records(path: impl AsRef<Path>) -> Result<Vec<CurveRecord>> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_curve_records_str(&text)
}

/// The bundled fixture curves.
pub fn bundled_records() -> Vec<CurveRecord> {
    parse_curve_records_str(BUNDLED_CURVES).expect("bundled curve file is valid")
}

pub fn find_record<'a>(records: &'a [CurveRecord], label: &str) -> Result<&'a CurveRecord> {
    records.iter().find(|r| r.label == label).ok_or_else(|| Error::UnknownLabel(label.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_record() {
        let r = CurveRecord::parse_line("label=11a1 a1=0 a2=-1 a3=1 a4=-10 a6=-20", 1).unwrap();
        assert_eq!(r.rank, None);
        assert_eq!(r.provenance, Provenance::User);
        assert_eq!(CurveRecord::parse_line(&r.to_line(), 1).unwrap(), r);
    }

    #[test]
    fn errors_name_the_problem() {
        let e = CurveRecord::parse_line("label=x a1=0 a2=0 a3=0 a4=1", 7).unwrap_err();
        assert_eq!(e, Error::Parse { line: 7, message: "missing field a6".into() });
        let e = parse_curve_records_str("\n\nlabel=s a1=0 a2=0 a3=0 a4=0 a6=0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, ref message } if message.contains("singular model (s)")), "{e}");
        let dup = "label=a a1=0 a2=0 a3=0 a4=1 a6=0\nlabel=a a1=0 a2=0 a3=0 a4=2 a6=0";
        assert_eq!(parse_curve_records_str(dup).unwrap_err(), Error::DuplicateLabel("a".into()));
        assert!(CurveRecord::parse_line("label=x a1=0 a2=0 a3=0 a4=1 a6=0 colour=red", 1).is_err());
        assert!(CurveRecord::parse_line("label=x a1=0 a2=0 a3=0 a4=one a6=0", 1).is_err());
    }

    #[test]
    fn bundled_file() {
        let recs = bundled_records();
        let labels: Vec<_> = recs.iter().map(|r| r.label.as_str()).collect();
        assert_eq!(labels, ["66a1", "462d1", "38a1", "114b1"]);
        for r in &recs {
            assert_eq!(CurveRecord::parse_line(&r.to_line(), 1).unwrap(), *r);
        }
    }
}
