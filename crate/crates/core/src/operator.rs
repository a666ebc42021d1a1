//! Dense complex matrices used for targets, logical generators and
//! simulator-extracted effective operators.

use ndarray::{linalg::kron, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::encoding::Bitstring;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    matrix: Array2<Complex64>,
}

impl DenseOperator {
    pub fn from_matrix(matrix: Array2<Complex64>) -> Result<Self> {
        if matrix
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::ShapeMismatch(
                "operator has non-finite entries".into(),
            ));
        }
        Ok(DenseOperator { matrix })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseOperator {
            matrix: Array2::zeros((rows, cols)),
        }
    }

    pub fn identity(dim: usize) -> Self {
        DenseOperator {
            matrix: Array2::eye(dim),
        }
    }

    /// Row-major construction from a closure.
    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        DenseOperator {
            matrix: Array2::from_shape_fn((rows, cols), |(r, c)| f(r, c)),
        }
    }

    /// `|out⟩⟨input|` scaled by `coefficient`.
    pub fn ket_bra(out: &Bitstring, input: &Bitstring, coefficient: Complex64) -> Self {
        let mut op = Self::zeros(1 << out.len(), 1 << input.len());
        op.matrix[[out.to_index(), input.to_index()]] = coefficient;
        op
    }

    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[[row, col]]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.matrix[[row, col]] = value;
    }

    /// Qubit count of a square `2ⁿ×2ⁿ` operator.
    pub fn qubits(&self) -> Result<usize> {
        let (rows, cols) = (self.rows(), self.cols());
        if rows != cols || !rows.is_power_of_two() {
            return Err(Error::NotQubitOperator { rows, cols });
        }
        Ok(rows.trailing_zeros() as usize)
    }

    pub fn kron(&self, other: &DenseOperator) -> DenseOperator {
        DenseOperator {
            matrix: kron(&self.matrix, &other.matrix),
        }
    }

    /// Matrix product `self · rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &DenseOperator) -> Result<DenseOperator> {
        if self.cols() != rhs.rows() {
            return Err(Error::ShapeMismatch(format!(
                "cannot compose {}x{} after {}x{}",
                self.rows(),
                self.cols(),
                rhs.rows(),
                rhs.cols()
            )));
        }
        Ok(DenseOperator {
            matrix: self.matrix.dot(&rhs.matrix),
        })
    }

    pub fn adjoint(&self) -> DenseOperator {
        DenseOperator {
            matrix: self.matrix.t().mapv(|z| z.conj()),
        }
    }

    pub fn scaled(&self, factor: Complex64) -> DenseOperator {
        DenseOperator {
            matrix: &self.matrix * factor,
        }
    }

    pub fn sub(&self, other: &DenseOperator) -> Result<DenseOperator> {
        self.check_same_shape(other)?;
        Ok(DenseOperator {
            matrix: &self.matrix - &other.matrix,
        })
    }

    pub fn add(&self, other: &DenseOperator) -> Result<DenseOperator> {
        self.check_same_shape(other)?;
        Ok(DenseOperator {
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius inner product `⟨self, other⟩ = Σ conj(selfᵢⱼ)·otherᵢⱼ`.
    pub fn inner(&self, other: &DenseOperator) -> Result<Complex64> {
        self.check_same_shape(other)?;
        Ok(self
            .matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn max_abs_diff(&self, other: &DenseOperator) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Nonzero entries in row-major order.
    pub fn nonzeros(&self) -> Vec<(usize, usize, Complex64)> {
        self.matrix
            .indexed_iter()
            .filter(|(_, z)| **z != Complex64::new(0.0, 0.0))
            .map(|((r, c), z)| (r, c, *z))
            .collect()
    }

    pub fn check_same_shape(&self, other: &DenseOperator) -> Result<()> {
        if self.matrix.dim() != other.matrix.dim() {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("operator serializes")
    }

    pub fn from_json(source: &str) -> Result<Self> {
        Ok(serde_json::from_str(source)?)
    }
}

#[derive(Serialize, Deserialize)]
struct OperatorDocument {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, f64, f64)>,
}

impl Serialize for DenseOperator {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        OperatorDocument {
            rows: self.rows(),
            cols: self.cols(),
            entries: self
                .nonzeros()
                .into_iter()
                .map(|(r, c, z)| (r, c, z.re, z.im))
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DenseOperator {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = OperatorDocument::deserialize(deserializer)?;
        if doc.rows == 0 || doc.cols == 0 {
            return Err(serde::de::Error::custom(
                "operator dimensions must be positive",
            ));
        }
        let mut op = DenseOperator::zeros(doc.rows, doc.cols);
        for (r, c, re, im) in doc.entries {
            if r >= doc.rows || c >= doc.cols {
                return Err(serde::de::Error::custom(format!(
                    "entry ({r}, {c}) out of bounds"
                )));
            }
            if !re.is_finite() || !im.is_finite() {
                return Err(serde::de::Error::custom("non-finite entry"));
            }
            op.matrix[[r, c]] = Complex64::new(re, im);
        }
        Ok(op)
    }
}
