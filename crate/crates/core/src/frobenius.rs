//! Dense realizations of the 2D Yang-Mills Frobenius generators.
//!
//! Each generator exists in two forms. The *padded* form is a square operator
//! on a fixed qubit register, with an all-zeros vacuum circle filling the
//! missing input or output slot; it is what gets compiled to a circuit. The
//! *logical* form acts on the irrep sector only (dimension `N` per circle for
//! an `N`-entry table) and is what composes like a cobordism.
//!
//! Weights: `μ` carries `e^{-βC₂}/dim`, `Δ` carries `1/dim`, `η` carries
//! `dim·e^{-βC₂}`, `ε` carries `dim`. In words, every generator takes its
//! own area parameter, and the printed maps correspond to `β` on `μ`/`η` and
//! zero on `Δ`/`ε`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::encoding::{paper_su3_encoding, Bitstring, EncodingMap};
use crate::error::{Error, Result};
use crate::operator::DenseOperator;
use crate::reptheory::{su3_truncation, RepTable};

/// How `β·C₂` enters the exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseConvention {
    /// `e^{-iβC₂}`, which reproduces the printed SU(3) coefficients.
    #[default]
    PaperLiteral,
    /// Real heat-kernel weight `e^{-βC₂}`.
    Euclidean,
}

impl PhaseConvention {
    pub fn weight(self, beta: f64, casimir: f64) -> Complex64 {
        match self {
            PhaseConvention::PaperLiteral => Complex64::from_polar(1.0, -beta * casimir),
            PhaseConvention::Euclidean => Complex64::new((-beta * casimir).exp(), 0.0),
        }
    }
}

impl fmt::Display for PhaseConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PhaseConvention::PaperLiteral => "paper_literal",
            PhaseConvention::Euclidean => "euclidean",
        })
    }
}

impl FromStr for PhaseConvention {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "paper" | "paper_literal" => Ok(PhaseConvention::PaperLiteral),
            "euclidean" => Ok(PhaseConvention::Euclidean),
            other => Err(format!(
                "unknown convention `{other}` (expected paper|euclidean)"
            )),
        }
    }
}

/// Everything needed to build the generators: irrep data, code, area and
/// exponent convention.
#[derive(Debug, Clone, PartialEq)]
pub struct FrobeniusSpec {
    table: RepTable,
    encoding: EncodingMap,
    beta: f64,
    convention: PhaseConvention,
}

impl FrobeniusSpec {
    pub fn new(
        table: RepTable,
        encoding: EncodingMap,
        beta: f64,
        convention: PhaseConvention,
    ) -> Result<Self> {
        if !encoding.covers(&table) {
            return Err(Error::InvalidEncoding(
                "encoding does not assign every irrep of the table".into(),
            ));
        }
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::InvalidEncoding(format!(
                "beta must be finite and >= 0, got {beta}"
            )));
        }
        Ok(FrobeniusSpec {
            table,
            encoding,
            beta,
            convention,
        })
    }

    /// Three-irrep SU(3) truncation with the two-qubit code.
    pub fn su3(beta: f64, convention: PhaseConvention) -> Result<Self> {
        Self::new(su3_truncation(3), paper_su3_encoding(), beta, convention)
    }

    pub fn table(&self) -> &RepTable {
        &self.table
    }

    pub fn encoding(&self) -> &EncodingMap {
        &self.encoding
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn convention(&self) -> PhaseConvention {
        self.convention
    }

    pub fn irrep_count(&self) -> usize {
        self.table.len()
    }

    fn weight(&self, beta: f64, casimir: f64) -> Complex64 {
        self.convention.weight(beta, casimir)
    }

    /// `(code, casimir, dim)` per irrep, in table order.
    fn irreps(&self) -> impl Iterator<Item = (&Bitstring, f64, f64)> + '_ {
        self.table.entries().iter().map(|e| {
            let code = self
                .encoding
                .code(&e.label)
                .expect("checked at construction");
            (code, e.casimir.to_f64(), e.dim as f64)
        })
    }
}

/// Elementary cobordisms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    /// Pair of pants, two circles in, one out.
    Mu,
    /// Copants, one in, two out.
    Delta,
    /// Cap creating a circle.
    Eta,
    /// Cap closing a circle.
    Epsilon,
    /// Area-carrying tube.
    Cylinder,
    /// Exchange of two adjacent circles.
    Swap,
}

impl Generator {
    /// `(input circles, output circles)`.
    pub fn arity(self) -> (usize, usize) {
        match self {
            Generator::Mu => (2, 1),
            Generator::Delta => (1, 2),
            Generator::Eta => (0, 1),
            Generator::Epsilon => (1, 0),
            Generator::Cylinder => (1, 1),
            Generator::Swap => (2, 2),
        }
    }

    /// Area carried by the generator when the printed maps are reproduced.
    pub fn default_beta(self, spec_beta: f64) -> f64 {
        match self {
            Generator::Mu | Generator::Eta | Generator::Cylinder => spec_beta,
            Generator::Delta | Generator::Epsilon | Generator::Swap => 0.0,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Generator::Mu => "mu",
            Generator::Delta => "delta",
            Generator::Eta => "eta",
            Generator::Epsilon => "eps",
            Generator::Cylinder => "cylinder",
            Generator::Swap => "swap",
        })
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mu" => Ok(Generator::Mu),
            "delta" => Ok(Generator::Delta),
            "eta" => Ok(Generator::Eta),
            "eps" | "epsilon" => Ok(Generator::Epsilon),
            "cylinder" => Ok(Generator::Cylinder),
            "swap" => Ok(Generator::Swap),
            other => Err(Error::UnsupportedOperator(other.to_string())),
        }
    }
}

fn padded(
    qubits: usize,
    entries: impl Iterator<Item = (Bitstring, Bitstring, Complex64)>,
) -> DenseOperator {
    let mut op = DenseOperator::zeros(1 << qubits, 1 << qubits);
    for (out, input, value) in entries {
        op.set(out.to_index(), input.to_index(), value);
    }
    op
}

/// `Σ_R e^{-βC₂}/dim |R⟩|0⟩⟨R|⟨R|` on two circles.
pub fn build_mu(spec: &FrobeniusSpec) -> DenseOperator {
    let vac = spec.encoding.vacuum();
    let entries = spec.irreps().map(|(code, c2, dim)| {
        (
            code.concat(vac),
            code.concat(code),
            spec.weight(spec.beta, c2) / dim,
        )
    });
    padded(2 * spec.encoding.bits_per_circle(), entries)
}

/// `Σ_R 1/dim |R⟩|R⟩⟨R|⟨0|` on two circles.
pub fn build_delta(spec: &FrobeniusSpec) -> DenseOperator {
    let vac = spec.encoding.vacuum();
    let entries = spec.irreps().map(|(code, _, dim)| {
        (
            code.concat(code),
            code.concat(vac),
            Complex64::new(1.0 / dim, 0.0),
        )
    });
    padded(2 * spec.encoding.bits_per_circle(), entries)
}

/// `Σ_R dim·e^{-βC₂} |R⟩⟨0|` on one circle.
pub fn build_eta(spec: &FrobeniusSpec) -> DenseOperator {
    let vac = spec.encoding.vacuum();
    let entries = spec
        .irreps()
        .map(|(code, c2, dim)| (code.clone(), vac.clone(), spec.weight(spec.beta, c2) * dim));
    padded(spec.encoding.bits_per_circle(), entries)
}

/// `Σ_R dim |0⟩⟨R|` on one circle.
pub fn build_epsilon(spec: &FrobeniusSpec) -> DenseOperator {
    let vac = spec.encoding.vacuum();
    let entries = spec
        .irreps()
        .map(|(code, _, dim)| (vac.clone(), code.clone(), Complex64::new(dim, 0.0)));
    padded(spec.encoding.bits_per_circle(), entries)
}

/// `Σ_R e^{-βC₂} |R⟩⟨R|` on one circle register; zero on the vacuum and on
/// unused codes.
pub fn build_cylinder(spec: &FrobeniusSpec) -> DenseOperator {
    let entries = spec
        .irreps()
        .map(|(code, c2, _)| (code.clone(), code.clone(), spec.weight(spec.beta, c2)));
    padded(spec.encoding.bits_per_circle(), entries)
}

/// Padded register form of a generator, as compiled to circuits.
pub fn build_padded(generator: Generator, spec: &FrobeniusSpec) -> Result<DenseOperator> {
    match generator {
        Generator::Mu => Ok(build_mu(spec)),
        Generator::Delta => Ok(build_delta(spec)),
        Generator::Eta => Ok(build_eta(spec)),
        Generator::Epsilon => Ok(build_epsilon(spec)),
        Generator::Cylinder => Ok(build_cylinder(spec)),
        Generator::Swap => Err(Error::UnsupportedOperator("swap has no padded form".into())),
    }
}

/// Logical form on the irrep sector, `N^out × N^in`.
pub fn logical_generator(generator: Generator, beta: f64, spec: &FrobeniusSpec) -> DenseOperator {
    let n = spec.irrep_count();
    let data: Vec<(f64, f64)> = spec.irreps().map(|(_, c2, dim)| (c2, dim)).collect();
    let w = |i: usize| spec.weight(beta, data[i].0);
    let dim = |i: usize| data[i].1;
    let (ins, outs) = generator.arity();
    let mut op = DenseOperator::zeros(n.pow(outs as u32), n.pow(ins as u32));
    for i in 0..n {
        let diag2 = i * n + i;
        match generator {
            Generator::Mu => op.set(i, diag2, w(i) / dim(i)),
            Generator::Delta => op.set(diag2, i, w(i) / dim(i)),
            Generator::Eta => op.set(i, 0, w(i) * dim(i)),
            Generator::Epsilon => op.set(0, i, w(i) * dim(i)),
            Generator::Cylinder => op.set(i, i, w(i)),
            Generator::Swap => {
                for j in 0..n {
                    op.set(j * n + i, i * n + j, Complex64::new(1.0, 0.0));
                }
            }
        }
    }
    op
}

/// One gluing step: `generator` with area `beta`, acting on the circles
/// starting at `position` (0 = leftmost), identity on the rest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WordStep {
    pub generator: Generator,
    pub beta: f64,
    pub position: usize,
}

impl WordStep {
    pub fn new(generator: Generator, beta: f64, position: usize) -> Self {
        WordStep {
            generator,
            beta,
            position,
        }
    }
}

/// Glue a word of generators, first step applied first, on `input_circles`
/// boundary circles. Returns the logical `N^out × N^in` matrix.
pub fn compose_word(
    word: &[WordStep],
    spec: &FrobeniusSpec,
    input_circles: usize,
) -> Result<DenseOperator> {
    compose_with(word, spec.irrep_count(), input_circles, |g, beta| {
        logical_generator(g, beta, spec)
    })
}

/// [`compose_word`] over an arbitrary source of logical generators.
pub fn compose_with(
    word: &[WordStep],
    irrep_count: usize,
    input_circles: usize,
    mut generator: impl FnMut(Generator, f64) -> DenseOperator,
) -> Result<DenseOperator> {
    let n = irrep_count;
    let mut circles = input_circles;
    let mut acc: Option<DenseOperator> = None;
    for (step, ws) in word.iter().enumerate() {
        let (ins, outs) = ws.generator.arity();
        if ws.position + ins > circles || ws.position > circles {
            return Err(Error::ArityMismatch {
                step,
                position: ws.position,
                needed: ins,
                available: circles,
            });
        }
        let left = DenseOperator::identity(n.pow(ws.position as u32));
        let right = DenseOperator::identity(n.pow((circles - ws.position - ins) as u32));
        let lifted = left.kron(&generator(ws.generator, ws.beta)).kron(&right);
        acc = Some(match acc {
            Some(prev) => lifted.compose(&prev)?,
            None => lifted,
        });
        circles = circles - ins + outs;
    }
    Ok(acc.unwrap_or_else(|| DenseOperator::identity(n.pow(input_circles as u32))))
}
