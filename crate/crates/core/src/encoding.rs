//! Qubit encoding of irreps: each circle of a surface boundary is one
//! register of `bits_per_circle` qubits, big-endian, with the vacuum fixed
//! at all-zeros.

use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::reptheory::{IrrepLabel, RepTable};

/// A computational-basis label; index 0 is the leftmost bit (qubit 0).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Bitstring(Vec<bool>);

impl Bitstring {
    pub fn new(bits: Vec<bool>) -> Self {
        Bitstring(bits)
    }

    pub fn zeros(len: usize) -> Self {
        Bitstring(vec![false; len])
    }

    /// Big-endian `len`-bit representation of `value`.
    pub fn from_index(value: usize, len: usize) -> Self {
        Bitstring(
            (0..len)
                .map(|i| (value >> (len - 1 - i)) & 1 == 1)
                .collect(),
        )
    }

    pub fn to_index(&self) -> usize {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | usize::from(b))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn concat(&self, other: &Bitstring) -> Bitstring {
        let mut bits = self.0.clone();
        bits.extend_from_slice(&other.0);
        Bitstring(bits)
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Bitstring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidBitstring(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()
            .map(Bitstring)
    }
}

impl Serialize for Bitstring {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Bitstring {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// State of one boundary circle.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Circle {
    Vacuum,
    Irrep(IrrepLabel),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EncodingMap {
    bits_per_circle: usize,
    vacuum: Bitstring,
    assignments: IndexMap<IrrepLabel, Bitstring>,
}

impl EncodingMap {
    pub fn new(
        bits_per_circle: usize,
        vacuum: Bitstring,
        assignments: IndexMap<IrrepLabel, Bitstring>,
    ) -> Result<Self> {
        if bits_per_circle == 0 {
            return Err(Error::InvalidEncoding(
                "bits_per_circle must be positive".into(),
            ));
        }
        if bits_per_circle < usize::BITS as usize
            && assignments.len() + 1 > 1usize << bits_per_circle
        {
            return Err(Error::InvalidEncoding(format!(
                "{} irreps plus vacuum do not fit in {bits_per_circle} bits",
                assignments.len()
            )));
        }
        let mut seen = vec![&vacuum];
        for (label, bits) in &assignments {
            if seen.contains(&bits) {
                return Err(Error::InvalidEncoding(format!(
                    "bitstring {bits} of {label} is reused"
                )));
            }
            seen.push(bits);
        }
        if let Some(bad) = seen.iter().find(|b| b.len() != bits_per_circle) {
            return Err(Error::InvalidEncoding(format!(
                "bitstring {bad} does not have length {bits_per_circle}"
            )));
        }
        Ok(EncodingMap {
            bits_per_circle,
            vacuum,
            assignments,
        })
    }

    pub fn bits_per_circle(&self) -> usize {
        self.bits_per_circle
    }

    pub fn vacuum(&self) -> &Bitstring {
        &self.vacuum
    }

    pub fn assignments(&self) -> &IndexMap<IrrepLabel, Bitstring> {
        &self.assignments
    }

    pub fn code(&self, label: &IrrepLabel) -> Result<&Bitstring> {
        self.assignments
            .get(label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn covers(&self, table: &RepTable) -> bool {
        table
            .entries()
            .iter()
            .all(|e| self.assignments.contains_key(&e.label))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("encoding serializes")
    }

    pub fn from_json(source: &str) -> Result<Self> {
        Ok(serde_json::from_str(source)?)
    }
}

impl<'de> Deserialize<'de> for EncodingMap {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            bits_per_circle: usize,
            vacuum: Bitstring,
            assignments: IndexMap<IrrepLabel, Bitstring>,
        }
        let raw = Raw::deserialize(deserializer)?;
        EncodingMap::new(raw.bits_per_circle, raw.vacuum, raw.assignments)
            .map_err(serde::de::Error::custom)
    }
}

/// Two-qubit SU(3) code: `D(0,0)→11`, `D(1,0)→10`, `D(0,1)→01`, vacuum `00`.
pub fn paper_su3_encoding() -> EncodingMap {
    let assignments = [((0, 0), "11"), ((1, 0), "10"), ((0, 1), "01")]
        .into_iter()
        .map(|((p, q), bits)| {
            (
                IrrepLabel::dynkin(p, q),
                bits.parse().expect("literal bits"),
            )
        })
        .collect();
    EncodingMap::new(2, Bitstring::zeros(2), assignments).expect("fixed encoding is valid")
}

/// Smallest register that holds the table plus vacuum; irreps take the
/// largest codes first, in table order.
pub fn default_encoding(table: &RepTable) -> EncodingMap {
    let n = table.len();
    let mut bits = 1;
    while (1usize << bits) < n + 1 {
        bits += 1;
    }
    let top = (1usize << bits) - 1;
    let assignments = table
        .entries()
        .iter()
        .enumerate()
        .map(|(i, e)| (e.label.clone(), Bitstring::from_index(top - i, bits)))
        .collect();
    EncodingMap::new(bits, Bitstring::zeros(bits), assignments).expect("default codes are distinct")
}

/// Concatenate the per-circle codes, left to right.
pub fn encode_state(map: &EncodingMap, circles: &[Circle]) -> Result<Bitstring> {
    let mut out = Vec::with_capacity(circles.len() * map.bits_per_circle);
    for circle in circles {
        let code = match circle {
            Circle::Vacuum => &map.vacuum,
            Circle::Irrep(label) => map.code(label)?,
        };
        out.extend_from_slice(code.bits());
    }
    Ok(Bitstring(out))
}

/// Inverse of [`encode_state`]; fails on a length that is not a whole number
/// of circles or on a code that is not assigned.
pub fn decode_state(map: &EncodingMap, bits: &Bitstring) -> Result<Vec<Circle>> {
    if !bits.len().is_multiple_of(map.bits_per_circle) {
        return Err(Error::InvalidBitstring(bits.to_string()));
    }
    bits.bits()
        .chunks(map.bits_per_circle)
        .map(|chunk| {
            let chunk = Bitstring(chunk.to_vec());
            if chunk == map.vacuum {
                return Ok(Circle::Vacuum);
            }
            map.assignments
                .iter()
                .find(|(_, code)| **code == chunk)
                .map(|(label, _)| Circle::Irrep(label.clone()))
                .ok_or_else(|| Error::InvalidBitstring(chunk.to_string()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reptheory::{su3_truncation, RepEntry};
    use proptest::prelude::*;

    fn irrep(p: u32, q: u32) -> Circle {
        Circle::Irrep(IrrepLabel::dynkin(p, q))
    }

    #[test]
    fn paper_codes() {
        let m = paper_su3_encoding();
        assert_eq!(m.code(&IrrepLabel::dynkin(0, 0)).unwrap().to_string(), "11");
        assert_eq!(m.code(&IrrepLabel::dynkin(1, 0)).unwrap().to_string(), "10");
        assert_eq!(m.code(&IrrepLabel::dynkin(0, 1)).unwrap().to_string(), "01");
        assert_eq!(m.vacuum().to_string(), "00");
    }

    #[test]
    fn default_reproduces_paper_for_three_irreps() {
        assert_eq!(default_encoding(&su3_truncation(3)), paper_su3_encoding());
    }

    #[test]
    fn default_small_and_seven_entry_tables() {
        let one = default_encoding(&su3_truncation(1));
        assert_eq!(one.bits_per_circle(), 1);
        assert_eq!(
            one.code(&IrrepLabel::dynkin(0, 0)).unwrap().to_string(),
            "1"
        );
        assert_eq!(one.vacuum().to_string(), "0");

        let seven = default_encoding(&su3_truncation(7));
        assert_eq!(seven.bits_per_circle(), 3);
        let codes: Vec<String> = seven
            .assignments()
            .values()
            .map(|b| b.to_string())
            .collect();
        assert_eq!(codes, ["111", "110", "101", "100", "011", "010", "001"]);

        assert_eq!(default_encoding(&su3_truncation(8)).bits_per_circle(), 4);
    }

    #[test]
    fn encode_examples() {
        let m = paper_su3_encoding();
        assert_eq!(
            encode_state(&m, &[irrep(0, 0), Circle::Vacuum])
                .unwrap()
                .to_string(),
            "1100"
        );
        assert_eq!(encode_state(&m, &[]).unwrap().to_string(), "");
        assert_eq!(
            encode_state(&m, &[irrep(1, 0), irrep(1, 0)])
                .unwrap()
                .to_string(),
            "1010"
        );
        assert!(matches!(
            encode_state(&m, &[irrep(2, 0)]),
            Err(Error::UnknownLabel(_))
        ));
    }

    #[test]
    fn rejects_invalid_maps() {
        let mut a = IndexMap::new();
        a.insert(IrrepLabel::dynkin(0, 0), "00".parse().unwrap());
        assert!(EncodingMap::new(2, Bitstring::zeros(2), a).is_err());

        let mut a = IndexMap::new();
        a.insert(IrrepLabel::dynkin(0, 0), "1".parse().unwrap());
        a.insert(IrrepLabel::dynkin(1, 0), "1".parse().unwrap());
        assert!(EncodingMap::new(1, Bitstring::zeros(1), a).is_err());

        let mut a = IndexMap::new();
        a.insert(IrrepLabel::dynkin(0, 0), "101".parse().unwrap());
        assert!(EncodingMap::new(2, Bitstring::zeros(2), a).is_err());
    }

    #[test]
    fn json_round_trip_keeps_order() {
        let m = default_encoding(&su3_truncation(6));
        let json = m.to_json();
        assert_eq!(EncodingMap::from_json(&json).unwrap(), m);
        let named = RepTable::new(
            "g",
            vec![RepEntry {
                label: IrrepLabel::Named("fund".into()),
                casimir: crate::reptheory::Casimir::Approx(1.0),
                dim: 2,
            }],
        )
        .unwrap();
        let m = default_encoding(&named);
        assert_eq!(EncodingMap::from_json(&m.to_json()).unwrap(), m);
    }

    proptest! {
        #[test]
        fn encode_decode_round_trip(n in 1usize..9, picks in proptest::collection::vec(0usize..10, 0..5)) {
            let table = su3_truncation(n);
            let map = default_encoding(&table);
            let circles: Vec<Circle> = picks
                .iter()
                .map(|&k| if k % (n + 1) == n {
                    Circle::Vacuum
                } else {
                    Circle::Irrep(table.entries()[k % (n + 1)].label.clone())
                })
                .collect();
            let bits = encode_state(&map, &circles).unwrap();
            prop_assert_eq!(bits.len(), circles.len() * map.bits_per_circle());
            prop_assert_eq!(decode_state(&map, &bits).unwrap(), circles);
        }
    }
}
