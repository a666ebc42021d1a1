//! Pauli-basis expansion and per-qubit factored forms.

use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::operator::DenseOperator;

/// Coefficients at or below this magnitude are dropped from expansions.
pub const DROP_TOLERANCE: f64 = 1e-14;

const POWER_ITERATIONS: usize = 200;
const POWER_RELATIVE_CHANGE: f64 = 1e-13;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I_UNIT: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        match self {
            Pauli::I => [[ONE, ZERO], [ZERO, ONE]],
            Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
            Pauli::Y => [[ZERO, -I_UNIT], [I_UNIT, ZERO]],
            Pauli::Z => [[ONE, ZERO], [ZERO, -ONE]],
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// `(flips the bit, amplitude picked up from input bit 0, from input bit 1)`.
    fn action(self) -> (bool, Complex64, Complex64) {
        match self {
            Pauli::I => (false, ONE, ONE),
            Pauli::X => (true, ONE, ONE),
            Pauli::Y => (true, I_UNIT, -I_UNIT),
            Pauli::Z => (false, ONE, -ONE),
        }
    }
}

impl TryFrom<char> for Pauli {
    type Error = Error;

    fn try_from(c: char) -> Result<Self> {
        match c {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(Error::InvalidGate(format!(
                "unknown Pauli letter `{other}`"
            ))),
        }
    }
}

/// Tensor product of Paulis; letter 0 acts on qubit 0 (leftmost).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString(pub Vec<Pauli>);

impl PauliString {
    pub fn identity(qubits: usize) -> Self {
        PauliString(vec![Pauli::I; qubits])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.0
    }

    /// Lexicographic (I<X<Y<Z) enumeration index, qubit 0 most significant.
    fn from_index(mut index: usize, qubits: usize) -> Self {
        let mut letters = vec![Pauli::I; qubits];
        for slot in letters.iter_mut().rev() {
            *slot = Pauli::ALL[index % 4];
            index /= 4;
        }
        PauliString(letters)
    }

    /// Bit mask flipped by the string, in big-endian basis-index convention.
    fn flip_mask(&self) -> usize {
        let n = self.len();
        self.0
            .iter()
            .enumerate()
            .filter(|(_, p)| p.action().0)
            .fold(0, |m, (q, _)| m | (1 << (n - 1 - q)))
    }

    /// Amplitude of `P|input⟩` at `input ^ flip_mask()`.
    fn amplitude(&self, input: usize) -> Complex64 {
        let n = self.len();
        self.0.iter().enumerate().fold(ONE, |acc, (q, p)| {
            let (_, a0, a1) = p.action();
            if (input >> (n - 1 - q)) & 1 == 0 {
                acc * a0
            } else {
                acc * a1
            }
        })
    }

    pub fn to_operator(&self) -> DenseOperator {
        let dim = 1usize << self.len();
        let mask = self.flip_mask();
        let mut op = DenseOperator::zeros(dim, dim);
        for c in 0..dim {
            op.set(c ^ mask, c, self.amplitude(c));
        }
        op
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|p| write!(f, "{}", p.as_char()))
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(Pauli::try_from)
            .collect::<Result<_>>()
            .map(PauliString)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub coefficient: Complex64,
    pub string: PauliString,
}

#[derive(Serialize, Deserialize)]
struct PauliTermRecord {
    string: String,
    re: f64,
    im: f64,
}

impl Serialize for PauliTerm {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PauliTermRecord {
            string: self.string.to_string(),
            re: self.coefficient.re,
            im: self.coefficient.im,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PauliTerm {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let r = PauliTermRecord::deserialize(deserializer)?;
        Ok(PauliTerm {
            coefficient: Complex64::new(r.re, r.im),
            string: r.string.parse().map_err(serde::de::Error::custom)?,
        })
    }
}

/// Expand a `2ⁿ×2ⁿ` operator as `Σ c_P P` with `c_P = tr(P†M)/2ⁿ`,
/// keeping terms above [`DROP_TOLERANCE`].
pub fn pauli_expand(op: &DenseOperator) -> Result<Vec<PauliTerm>> {
    let n = op.qubits()?;
    let dim = 1usize << n;
    let norm = 1.0 / dim as f64;
    let mut terms = Vec::new();
    for k in 0..(1usize << (2 * n)) {
        let string = PauliString::from_index(k, n);
        let mask = string.flip_mask();
        // P is monomial, so only the entries (c ^ mask, c) contribute.
        let coefficient: Complex64 = (0..dim)
            .map(|c| string.amplitude(c).conj() * op.get(c ^ mask, c))
            .sum::<Complex64>()
            * norm;
        if coefficient.norm() > DROP_TOLERANCE {
            terms.push(PauliTerm {
                coefficient,
                string,
            });
        }
    }
    Ok(terms)
}

/// `Σ c_P P` on `qubits` qubits.
pub fn reconstruct(terms: &[PauliTerm], qubits: usize) -> Result<DenseOperator> {
    let dim = 1usize << qubits;
    let mut op = DenseOperator::zeros(dim, dim);
    for term in terms {
        if term.string.len() != qubits {
            return Err(Error::ShapeMismatch(format!(
                "Pauli string {} on {qubits} qubits",
                term.string
            )));
        }
        let mask = term.string.flip_mask();
        for c in 0..dim {
            let r = c ^ mask;
            op.set(
                r,
                c,
                op.get(r, c) + term.coefficient * term.string.amplitude(c),
            );
        }
    }
    Ok(op)
}

/// Single-qubit operator `c_I·I + c_X·X + c_Y·Y + c_Z·Z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitFactor(pub [Complex64; 4]);

impl QubitFactor {
    pub fn new(i: Complex64, x: Complex64, y: Complex64, z: Complex64) -> Self {
        QubitFactor([i, x, y, z])
    }

    pub fn coefficient(&self, p: Pauli) -> Complex64 {
        self.0[p.index()]
    }

    /// Expansion of a 2×2 matrix.
    pub fn from_matrix(m: [[Complex64; 2]; 2]) -> Self {
        let half = 0.5;
        QubitFactor([
            (m[0][0] + m[1][1]) * half,
            (m[0][1] + m[1][0]) * half,
            (m[1][0] - m[0][1]) * (-I_UNIT * half),
            (m[0][0] - m[1][1]) * half,
        ])
    }

    /// `|out⟩⟨input|` for single bits.
    pub fn ket_bra(out: bool, input: bool) -> Self {
        let mut m = [[ZERO; 2]; 2];
        m[usize::from(out)][usize::from(input)] = ONE;
        Self::from_matrix(m)
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        let mut m = [[ZERO; 2]; 2];
        for p in Pauli::ALL {
            let pm = p.matrix();
            for r in 0..2 {
                for c in 0..2 {
                    m[r][c] += self.0[p.index()] * pm[r][c];
                }
            }
        }
        m
    }

    pub fn to_operator(&self) -> DenseOperator {
        let m = self.matrix();
        DenseOperator::from_fn(2, 2, |r, c| m[r][c])
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        QubitFactor(self.0.map(|z| z * s))
    }

    pub fn add(&self, other: &QubitFactor) -> Self {
        QubitFactor([0, 1, 2, 3].map(|k| self.0[k] + other.0[k]))
    }

    /// Letters whose coefficient survives the drop tolerance.
    pub fn support(&self) -> Vec<Pauli> {
        Pauli::ALL
            .into_iter()
            .filter(|p| self.0[p.index()].norm() > DROP_TOLERANCE)
            .collect()
    }
}

/// How a factor's magnitudes were rescaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormRule {
    /// Single term, magnitude 1.
    Unit,
    /// Two terms, magnitudes summing to 1 (they become `cos²`/`sin²` weights).
    L1,
    /// Three or four terms, squared magnitudes summing to 1 (they become
    /// state-preparation amplitudes).
    L2,
}

/// One Pauli with a nonnegative weight and a separate phase, `m·e^{iφ}·P`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedPauli {
    pub letter: char,
    pub magnitude: f64,
    pub phase: f64,
}

impl WeightedPauli {
    pub fn pauli(&self) -> Pauli {
        Pauli::try_from(self.letter).expect("letter is built from Pauli")
    }
}

/// `scale · Σ magnitude·e^{i·phase}·P`, with the magnitudes normalized per
/// `rule`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedFactor {
    pub rule: NormRule,
    pub terms: Vec<WeightedPauli>,
    pub scale: Complex64,
}

impl NormalizedFactor {
    /// The normalized factor without `scale`.
    pub fn unit_factor(&self) -> QubitFactor {
        let mut out = QubitFactor([ZERO; 4]);
        for t in &self.terms {
            out.0[t.pauli().index()] = Complex64::from_polar(t.magnitude, t.phase);
        }
        out
    }

    pub fn term(&self, p: Pauli) -> Option<&WeightedPauli> {
        self.terms.iter().find(|t| t.pauli() == p)
    }
}

pub fn normalize_factor(factor: &QubitFactor) -> Result<NormalizedFactor> {
    let support = factor.support();
    let magnitudes: Vec<f64> = support
        .iter()
        .map(|&p| factor.coefficient(p).norm())
        .collect();
    let (rule, scale) = match support.len() {
        0 => return Err(Error::ZeroFactor),
        1 => (NormRule::Unit, magnitudes[0]),
        2 => (NormRule::L1, magnitudes.iter().sum()),
        _ => (
            NormRule::L2,
            magnitudes.iter().map(|m| m * m).sum::<f64>().sqrt(),
        ),
    };
    let terms = support
        .iter()
        .zip(&magnitudes)
        .map(|(&p, &m)| WeightedPauli {
            letter: p.as_char(),
            magnitude: m / scale,
            phase: factor.coefficient(p).arg(),
        })
        .collect();
    Ok(NormalizedFactor {
        rule,
        terms,
        scale: Complex64::new(scale, 0.0),
    })
}

/// `scale · factors[0] ⊗ factors[1] ⊗ …`, factor `k` on qubit `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactoredOperator {
    factors: Vec<QubitFactor>,
    scale: Complex64,
}

impl FactoredOperator {
    pub fn new(factors: Vec<QubitFactor>, scale: Complex64) -> Result<Self> {
        if factors.iter().any(|f| f.support().is_empty()) {
            return Err(Error::ZeroFactor);
        }
        Ok(FactoredOperator { factors, scale })
    }

    pub fn factors(&self) -> &[QubitFactor] {
        &self.factors
    }

    pub fn scale(&self) -> Complex64 {
        self.scale
    }

    pub fn qubits(&self) -> usize {
        self.factors.len()
    }

    pub fn to_dense(&self) -> DenseOperator {
        self.factors
            .iter()
            .fold(DenseOperator::identity(1), |acc, f| {
                acc.kron(&f.to_operator())
            })
            .scaled(self.scale)
    }
}

/// `‖expand(claimed) − exact‖_F / ‖exact‖_F`.
pub fn factorization_residual(claimed: &FactoredOperator, exact: &DenseOperator) -> Result<f64> {
    let n = exact.qubits()?;
    if n != claimed.qubits() {
        return Err(Error::ShapeMismatch(format!(
            "claimed form on {} qubits, operator on {n}",
            claimed.qubits()
        )));
    }
    let norm = exact.frobenius_norm();
    if norm == 0.0 {
        return Err(Error::ZeroOperator);
    }
    Ok(claimed.to_dense().sub(exact)?.frobenius_norm() / norm)
}

/// Collect each qubit's single-qubit pieces across all ket-bra terms of
/// `op` and add them up, attaching each term's coefficient to the qubit-0
/// piece.
///
/// The result equals `op` only when `op` has a single nonzero entry; for a
/// sum of distinct product terms it is a different operator and
/// [`factorization_residual`] measures the gap.
pub fn termwise_factor_sum(op: &DenseOperator) -> Result<FactoredOperator> {
    let n = op.qubits()?;
    if n == 0 {
        return Err(Error::NotQubitOperator { rows: 1, cols: 1 });
    }
    let mut factors = vec![QubitFactor([ZERO; 4]); n];
    for (r, c, value) in op.nonzeros() {
        for (q, factor) in factors.iter_mut().enumerate() {
            let bit = |i: usize| (i >> (n - 1 - q)) & 1 == 1;
            let piece = QubitFactor::ket_bra(bit(r), bit(c));
            let piece = if q == 0 { piece.scaled(value) } else { piece };
            *factor = factor.add(&piece);
        }
    }
    if factors.iter().all(|f| f.support().is_empty()) {
        return Err(Error::ZeroOperator);
    }
    FactoredOperator::new(factors, ONE)
}

/// Greedy rank-1 product approximation: peel off qubits in `order`, each
/// time keeping the dominant rank-1 component of the realigned operator
/// across (that qubit | remaining qubits).
pub fn best_product_approximation(op: &DenseOperator, order: &[usize]) -> Result<FactoredOperator> {
    let n = op.qubits()?;
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..n).collect::<Vec<_>>() {
        return Err(Error::ShapeMismatch(format!(
            "split order {order:?} is not a permutation of 0..{n}"
        )));
    }
    if n == 0 || op.frobenius_norm() == 0.0 {
        return Err(Error::ZeroOperator);
    }

    let mut factors = vec![QubitFactor([ZERO; 4]); n];
    // Remaining operator over `remaining` (ascending original indices).
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut rest = op.matrix().clone();
    for &q in &order[..n - 1] {
        let pos = remaining
            .iter()
            .position(|&r| r == q)
            .expect("q is remaining");
        let m = remaining.len();
        let realigned = realign(&rest, m, pos);
        let u = dominant_left_vector(&realigned);
        // rest ≈ u ⊗ (u† R)
        let row: Vec<Complex64> = (0..realigned.ncols())
            .map(|b| (0..4).map(|a| u[a].conj() * realigned[[a, b]]).sum())
            .collect();
        factors[q] = QubitFactor::from_matrix([[u[0], u[1]], [u[2], u[3]]]);
        remaining.remove(pos);
        let half = 1usize << (m - 1);
        rest = Array2::from_shape_fn((half, half), |(r, c)| row[r * half + c]);
    }
    let last = remaining[0];
    factors[last] =
        QubitFactor::from_matrix([[rest[[0, 0]], rest[[0, 1]]], [rest[[1, 0]], rest[[1, 1]]]]);
    FactoredOperator::new(factors, ONE)
}

/// Rearrange an `m`-qubit operator into a `4 × 4^{m-1}` matrix whose row is
/// `(row bit, col bit)` of qubit `pos` and whose column is the remaining row
/// and column bits.
fn realign(op: &Array2<Complex64>, m: usize, pos: usize) -> Array2<Complex64> {
    let shift = m - 1 - pos;
    let squeeze = |i: usize| {
        let high = (i >> (shift + 1)) << shift;
        let low = i & ((1 << shift) - 1);
        high | low
    };
    let half = 1usize << (m - 1);
    let mut out = Array2::zeros((4, half * half));
    for ((r, c), z) in op.indexed_iter() {
        let a = (((r >> shift) & 1) << 1) | ((c >> shift) & 1);
        out[[a, squeeze(r) * half + squeeze(c)]] = *z;
    }
    out
}

/// Unit dominant eigenvector of `R R†` by power iteration from all-ones.
fn dominant_left_vector(r: &Array2<Complex64>) -> [Complex64; 4] {
    let gram: Array2<Complex64> = r.dot(&r.t().mapv(|z| z.conj()));
    let apply = |v: &[Complex64; 4]| -> [Complex64; 4] {
        [0, 1, 2, 3].map(|i| (0..4).map(|j| gram[[i, j]] * v[j]).sum())
    };
    let norm = |v: &[Complex64; 4]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();

    let starts = [
        [ONE; 4],
        [ONE, ZERO, ZERO, ZERO],
        [ZERO, ONE, ZERO, ZERO],
        [ZERO, ZERO, ONE, ZERO],
        [ZERO, ZERO, ZERO, ONE],
    ];
    for start in starts {
        let mut v = start.map(|z| z / norm(&start));
        if norm(&apply(&v)) == 0.0 {
            continue;
        }
        for _ in 0..POWER_ITERATIONS {
            let w = apply(&v);
            let wn = norm(&w);
            let next = w.map(|z| z / wn);
            let change = (0..4)
                .map(|k| (next[k] - v[k]).norm_sqr())
                .sum::<f64>()
                .sqrt();
            v = next;
            if change < POWER_RELATIVE_CHANGE {
                break;
            }
        }
        return v;
    }
    [ONE, ZERO, ZERO, ZERO]
}
