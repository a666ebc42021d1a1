//! Irrep data for the gauge group: SU(3) Casimir eigenvalues and dimensions,
//! truncated tables, and user-supplied tables loaded from JSON.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Label of an irreducible representation.
///
/// SU(3) irreps carry Dynkin labels `D(p,q)`; tables for other groups may use
/// any opaque name.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum IrrepLabel {
    Dynkin { p: u32, q: u32 },
    Named(String),
}

impl IrrepLabel {
    pub fn dynkin(p: u32, q: u32) -> Self {
        IrrepLabel::Dynkin { p, q }
    }
}

impl fmt::Display for IrrepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IrrepLabel::Dynkin { p, q } => write!(f, "D({p},{q})"),
            IrrepLabel::Named(name) => f.write_str(name),
        }
    }
}

impl FromStr for IrrepLabel {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let dynkin = s
            .trim()
            .strip_prefix("D(")
            .and_then(|rest| rest.strip_suffix(')'))
            .and_then(|inner| inner.split_once(','))
            .and_then(|(p, q)| Some((p.trim().parse().ok()?, q.trim().parse().ok()?)));
        Ok(match dynkin {
            Some((p, q)) => IrrepLabel::Dynkin { p, q },
            None => IrrepLabel::Named(s.to_string()),
        })
    }
}

impl Serialize for IrrepLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for IrrepLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Ok(s.parse().unwrap_or_else(|never| match never {}))
    }
}

/// Casimir eigenvalue, kept exact whenever the source provides a rational.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Casimir {
    Exact(Rational64),
    Approx(f64),
}

impl Casimir {
    pub fn to_f64(self) -> f64 {
        match self {
            Casimir::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Casimir::Approx(x) => x,
        }
    }

    fn parse_text(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some((n, d)) = t.split_once('/') {
            let n: i64 = n
                .trim()
                .parse()
                .map_err(|_| Error::InvalidCasimir(s.into()))?;
            let d: i64 = d
                .trim()
                .parse()
                .map_err(|_| Error::InvalidCasimir(s.into()))?;
            if d == 0 {
                return Err(Error::InvalidCasimir(s.into()));
            }
            return Ok(Casimir::Exact(Rational64::new(n, d)));
        }
        if let Ok(n) = t.parse::<i64>() {
            return Ok(Casimir::Exact(Rational64::from_integer(n)));
        }
        match t.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(Casimir::Approx(x)),
            _ => Err(Error::InvalidCasimir(s.into())),
        }
    }
}

impl fmt::Display for Casimir {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Casimir::Exact(r) => write!(f, "{r}"),
            Casimir::Approx(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for Casimir {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Casimir::Exact(r) => serializer.collect_str(r),
            Casimir::Approx(x) => serializer.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for Casimir {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Float(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Int(n) => Ok(Casimir::Exact(Rational64::from_integer(n))),
            Raw::Float(x) if x.is_finite() => Ok(Casimir::Approx(x)),
            Raw::Float(x) => Err(serde::de::Error::custom(format!("non-finite casimir {x}"))),
            Raw::Text(s) => Casimir::parse_text(&s).map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepEntry {
    pub label: IrrepLabel,
    pub casimir: Casimir,
    pub dim: u64,
}

impl RepEntry {
    /// Built-in SU(3) entry for `D(p,q)`.
    pub fn su3(p: u32, q: u32) -> Self {
        RepEntry {
            label: IrrepLabel::dynkin(p, q),
            casimir: Casimir::Exact(casimir_su3(p, q)),
            dim: dim_su3(p, q),
        }
    }
}

/// An ordered, truncated list of irreps. Entry order fixes the qubit encoding.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepTable {
    group_name: String,
    entries: Vec<RepEntry>,
}

impl RepTable {
    pub fn new(group_name: impl Into<String>, entries: Vec<RepEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyTable);
        }
        for (i, entry) in entries.iter().enumerate() {
            if entry.dim < 1 {
                return Err(Error::InvalidDimension {
                    label: entry.label.to_string(),
                    dim: entry.dim as i64,
                });
            }
            if entries[..i].iter().any(|e| e.label == entry.label) {
                return Err(Error::DuplicateLabel(entry.label.to_string()));
            }
        }
        Ok(RepTable {
            group_name: group_name.into(),
            entries,
        })
    }

    pub fn group_name(&self) -> &str {
        &self.group_name
    }

    pub fn entries(&self) -> &[RepEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, label: &IrrepLabel) -> Option<&RepEntry> {
        self.entries.iter().find(|e| &e.label == label)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("rep table serializes")
    }
}

impl<'de> Deserialize<'de> for RepTable {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct RawEntry {
            label: IrrepLabel,
            casimir: Casimir,
            dim: i64,
        }
        #[derive(Deserialize)]
        struct RawTable {
            group_name: String,
            entries: Vec<RawEntry>,
        }
        let raw = RawTable::deserialize(deserializer)?;
        let mut entries = Vec::with_capacity(raw.entries.len());
        for e in raw.entries {
            if e.dim < 1 {
                return Err(serde::de::Error::custom(Error::InvalidDimension {
                    label: e.label.to_string(),
                    dim: e.dim,
                }));
            }
            entries.push(RepEntry {
                label: e.label,
                casimir: e.casimir,
                dim: e.dim as u64,
            });
        }
        RepTable::new(raw.group_name, entries).map_err(serde::de::Error::custom)
    }
}

/// Quadratic Casimir eigenvalue of the SU(3) irrep `D(p,q)`:
/// `(4/3)(p² + q² + pq + 3p + 3q)`.
pub fn casimir_su3(p: u32, q: u32) -> Rational64 {
    let (p, q) = (i64::from(p), i64::from(q));
    Rational64::new(4 * (p * p + q * q + p * q + 3 * p + 3 * q), 3)
}

/// Dimension of the SU(3) irrep `D(p,q)`: `(p+1)(q+1)(p+q+2)/2`.
pub fn dim_su3(p: u32, q: u32) -> u64 {
    let (p, q) = (u64::from(p), u64::from(q));
    // (p+1)(q+1)(p+q+2) is always even: if p and q are both even, p+q+2 is.
    (p + 1) * (q + 1) * (p + q + 2) / 2
}

/// The first `count` SU(3) irreps.
///
/// `D(0,0)`, `D(1,0)`, `D(0,1)` come first; later irreps are ordered by
/// `(C₂, dim, p, q)` ascending. `count` of zero is treated as one.
pub fn su3_truncation(count: usize) -> RepTable {
    let count = count.max(1);
    let head = [(0, 0), (1, 0), (0, 1)];
    let mut labels: Vec<(u32, u32)> = head.iter().copied().take(count).collect();

    if count > head.len() {
        let needed = count - head.len();
        // Grow the enumerated shell p+q <= level until the smallest Casimir
        // outside it exceeds the needed-th candidate, so later shells can't
        // reorder the prefix. The minimum over p+q = s is s² + 4s.
        let mut level = 2u32;
        loop {
            let mut rest: Vec<(u32, u32)> = (0..=level)
                .flat_map(|s| (0..=s).map(move |p| (p, s - p)))
                .filter(|pq| !head.contains(pq))
                .collect();
            rest.sort_by(|&(p1, q1), &(p2, q2)| {
                (casimir_su3(p1, q1), dim_su3(p1, q1), p1, q1).cmp(&(
                    casimir_su3(p2, q2),
                    dim_su3(p2, q2),
                    p2,
                    q2,
                ))
            });
            let next = i64::from(level + 1);
            let outside_min = Rational64::from_integer(next * next + 4 * next);
            if rest.len() >= needed {
                let (p, q) = rest[needed - 1];
                if casimir_su3(p, q) < outside_min {
                    labels.extend_from_slice(&rest[..needed]);
                    break;
                }
            }
            level += 1;
        }
    }

    let entries = labels
        .into_iter()
        .map(|(p, q)| RepEntry::su3(p, q))
        .collect();
    RepTable::new("su3", entries).expect("built-in SU(3) labels are distinct")
}

/// Parse and validate a rep table from its JSON document.
pub fn load_rep_table(source: &str) -> Result<RepTable> {
    #[derive(Deserialize)]
    struct Probe {
        entries: Vec<serde_json::Value>,
    }
    // Report an empty table distinctly rather than as a generic parse error.
    if let Ok(probe) = serde_json::from_str::<Probe>(source) {
        if probe.entries.is_empty() {
            return Err(Error::EmptyTable);
        }
    }
    Ok(serde_json::from_str(source)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_su3_values() {
        assert_eq!(casimir_su3(0, 0), Rational64::from_integer(0));
        assert_eq!(casimir_su3(1, 0), Rational64::new(16, 3));
        assert_eq!(casimir_su3(0, 1), Rational64::new(16, 3));
        assert_eq!(dim_su3(0, 0), 1);
        assert_eq!(dim_su3(1, 0), 3);
        assert_eq!(dim_su3(0, 1), 3);
        assert_eq!(dim_su3(2, 0), 6);
        assert_eq!(dim_su3(1, 1), 8);
    }

    #[test]
    fn dim_is_exact_and_casimir_vanishes_only_for_trivial() {
        for p in 0..=10 {
            for q in 0..=10 {
                let twice = (p as u64 + 1) * (q as u64 + 1) * (p as u64 + q as u64 + 2);
                assert_eq!(twice % 2, 0);
                assert!(dim_su3(p, q) >= 1);
                let c = casimir_su3(p, q);
                assert_eq!(c == Rational64::from_integer(0), p == 0 && q == 0);
                assert!(c >= Rational64::from_integer(0));
                assert_eq!(c, casimir_su3(q, p));
                assert_eq!(dim_su3(p, q), dim_su3(q, p));
            }
        }
    }

    #[test]
    fn truncation_three_matches_worked_irreps() {
        let t = su3_truncation(3);
        let got: Vec<_> = t
            .entries()
            .iter()
            .map(|e| (e.label.to_string(), e.casimir, e.dim))
            .collect();
        let third = Casimir::Exact(Rational64::new(16, 3));
        assert_eq!(
            got,
            vec![
                ("D(0,0)".to_string(), Casimir::Exact(0.into()), 1),
                ("D(1,0)".to_string(), third, 3),
                ("D(0,1)".to_string(), third, 3),
            ]
        );
        assert_eq!(su3_truncation(1).len(), 1);
        assert_eq!(
            su3_truncation(1).entries()[0].label,
            IrrepLabel::dynkin(0, 0)
        );
    }

    #[test]
    fn truncation_tail_follows_sort_key() {
        // Oracle: brute-force every (p,q) with p+q <= 6 and sort by the key.
        let mut all: Vec<(Rational64, u64, u32, u32)> = (0..=6u32)
            .flat_map(|s| (0..=s).map(move |p| (p, s - p)))
            .filter(|&(p, q)| p + q > 1)
            .map(|(p, q)| (casimir_su3(p, q), dim_su3(p, q), p, q))
            .collect();
        all.sort();
        let expected: Vec<IrrepLabel> = all
            .iter()
            .take(7)
            .map(|t| IrrepLabel::dynkin(t.2, t.3))
            .collect();
        let got: Vec<IrrepLabel> = su3_truncation(10).entries()[3..]
            .iter()
            .map(|e| e.label.clone())
            .collect();
        assert_eq!(got, expected);
        assert_eq!(
            su3_truncation(4).entries()[3].label,
            IrrepLabel::dynkin(1, 1)
        );
    }

    #[test]
    fn truncation_is_prefix_stable() {
        for n in 1..25 {
            let a = su3_truncation(n);
            let b = su3_truncation(n + 1);
            assert_eq!(a.entries(), &b.entries()[..n]);
        }
    }

    #[test]
    fn load_round_trips_builtin() {
        let doc = r#"{"group_name": "su3", "entries": [
            {"label": "D(0,0)", "casimir": 0, "dim": 1},
            {"label": "D(1,0)", "casimir": "16/3", "dim": 3},
            {"label": "D(0,1)", "casimir": "16/3", "dim": 3}]}"#;
        assert_eq!(load_rep_table(doc).unwrap(), su3_truncation(3));
        let t = su3_truncation(5);
        assert_eq!(load_rep_table(&t.to_json()).unwrap(), t);
    }

    #[test]
    fn load_rejects_bad_tables() {
        assert!(matches!(
            load_rep_table(r#"{"group_name": "g", "entries": []}"#),
            Err(Error::EmptyTable)
        ));
        let dup = r#"{"group_name": "g", "entries": [
            {"label": "a", "casimir": 1.5, "dim": 2},
            {"label": "a", "casimir": 2.5, "dim": 2}]}"#;
        assert!(load_rep_table(dup).is_err());
        let zero = r#"{"group_name": "g", "entries": [{"label": "a", "casimir": 1, "dim": 0}]}"#;
        assert!(load_rep_table(zero).is_err());
        assert!(load_rep_table("not json").is_err());
    }

    #[test]
    fn named_labels_and_float_casimirs() {
        let doc = r#"{"group_name": "su2", "entries": [
            {"label": "j=0", "casimir": 0, "dim": 1},
            {"label": "j=1/2", "casimir": 0.75, "dim": 2}]}"#;
        let t = load_rep_table(doc).unwrap();
        assert_eq!(t.group_name(), "su2");
        assert_eq!(t.entries()[1].label, IrrepLabel::Named("j=1/2".into()));
        assert_eq!(t.entries()[1].casimir, Casimir::Approx(0.75));
    }
}
