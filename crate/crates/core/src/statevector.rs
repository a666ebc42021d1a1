//! Dense statevector simulation with ancilla post-selection.

use num_complex::Complex64;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::encoding::Bitstring;
use crate::error::{Error, Result};
use crate::operator::DenseOperator;

pub const MAX_QUBITS: usize = 24;
pub const MAX_EFFECTIVE_WORK_QUBITS: usize = 12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Amplitudes over `qubit_count` qubits; qubit 0 is the most significant
/// bit of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn new(qubits: usize) -> Result<Self> {
        Self::basis(&Bitstring::zeros(qubits))
    }

    pub fn basis(bits: &Bitstring) -> Result<Self> {
        let qubits = bits.len();
        if qubits > MAX_QUBITS {
            return Err(Error::InvalidQubit {
                qubit: qubits,
                reason: format!("register exceeds {MAX_QUBITS} qubits"),
            });
        }
        let mut amplitudes = vec![ZERO; 1 << qubits];
        amplitudes[bits.to_index()] = Complex64::new(1.0, 0.0);
        Ok(StateVector { qubits, amplitudes })
    }

    /// Takes the amplitudes as given; the caller is responsible for the norm.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if !len.is_power_of_two() || len > 1 << MAX_QUBITS {
            return Err(Error::ShapeMismatch(format!(
                "{len} amplitudes is not a qubit register"
            )));
        }
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::ShapeMismatch("non-finite amplitude".into()));
        }
        Ok(StateVector {
            qubits: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn qubit_count(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    fn bit(&self, qubit: usize) -> usize {
        1 << (self.qubits - 1 - qubit)
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.qubits {
            return Err(Error::InvalidQubit {
                qubit,
                reason: format!("register has {} qubits", self.qubits),
            });
        }
        Ok(())
    }

    /// Apply the gate's 2×2 unitary to the target on every basis pair whose
    /// controls match.
    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.validate()?;
        self.check_qubit(gate.target)?;
        let mut mask = 0;
        let mut want = 0;
        for c in &gate.controls {
            self.check_qubit(c.qubit)?;
            mask |= self.bit(c.qubit);
            if c.state {
                want |= self.bit(c.qubit);
            }
        }
        let t = self.bit(gate.target);
        let m = gate.kind.matrix();
        for i in 0..self.amplitudes.len() {
            if i & t != 0 || i & mask != want {
                continue;
            }
            let j = i | t;
            let (a, b) = (self.amplitudes[i], self.amplitudes[j]);
            self.amplitudes[i] = m[0][0] * a + m[0][1] * b;
            self.amplitudes[j] = m[1][0] * a + m[1][1] * b;
        }
        Ok(())
    }

    fn apply(&mut self, kind: GateKind, target: usize, controls: &[(usize, bool)]) {
        let controls = controls
            .iter()
            .map(|&(q, s)| crate::circuit::Control::on(q, s))
            .collect();
        self.apply_gate(&Gate::controlled(kind, target, controls))
            .expect("internal gate on checked qubits");
    }
}

/// Post-selected, unnormalized work-register output of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    /// Indexed by the work qubits in their listed order, first one most
    /// significant.
    pub amplitudes: Vec<Complex64>,
    /// Squared norm of `amplitudes`.
    pub probability: f64,
}

/// Run `circuit` on the basis input `input` (one bit per work qubit, listed
/// order) with ancillas starting in `|0⟩`.
pub fn run(circuit: &Circuit, input: &Bitstring) -> Result<RunOutcome> {
    let w = circuit.work_qubits().len();
    if input.len() != w {
        return Err(Error::ShapeMismatch(format!(
            "input has {} bits, circuit has {w} work qubits",
            input.len()
        )));
    }
    let mut work = vec![ZERO; 1 << w];
    work[input.to_index()] = Complex64::new(1.0, 0.0);
    run_superposition(circuit, &work)
}

/// [`run`] on an arbitrary work-register input vector.
pub fn run_superposition(circuit: &Circuit, work_input: &[Complex64]) -> Result<RunOutcome> {
    circuit.validate()?;
    let n = circuit.qubit_count();
    let work = circuit.work_qubits();
    if work_input.len() != 1 << work.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} input amplitudes for {} work qubits",
            work_input.len(),
            work.len()
        )));
    }
    if n > MAX_QUBITS {
        return Err(Error::InvalidCircuit(format!(
            "{n} qubits exceeds {MAX_QUBITS}"
        )));
    }
    for &a in circuit.ancilla_qubits() {
        if !circuit.postselect().iter().any(|&(q, _)| q == a) {
            return Err(Error::InvalidCircuit(format!(
                "ancilla {a} is not post-selected, the work register would not be pure"
            )));
        }
    }

    let bit = |q: usize| 1usize << (n - 1 - q);
    let spread = |w_index: usize| {
        work.iter().enumerate().fold(0, |acc, (k, &q)| {
            if (w_index >> (work.len() - 1 - k)) & 1 == 1 {
                acc | bit(q)
            } else {
                acc
            }
        })
    };

    let mut amplitudes = vec![ZERO; 1 << n];
    for (k, &z) in work_input.iter().enumerate() {
        amplitudes[spread(k)] = z;
    }
    let mut state = StateVector {
        qubits: n,
        amplitudes,
    };
    for gate in circuit.gates() {
        state.apply_gate(gate)?;
    }

    // Every ancilla is post-selected, so fixing the wanted ancilla bits picks
    // exactly one amplitude per work index.
    let want = circuit
        .postselect()
        .iter()
        .filter(|&&(_, b)| b)
        .fold(0, |v, &(q, _)| v | bit(q));
    let out: Vec<Complex64> = (0..work_input.len())
        .map(|k| state.amplitudes[spread(k) | want])
        .collect();
    let probability = out.iter().map(|z| z.norm_sqr()).sum();
    Ok(RunOutcome {
        amplitudes: out,
        probability,
    })
}

/// Post-selected map on the work register, extracted column by column.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveOperator {
    pub matrix: DenseOperator,
    /// Success probability for each work basis input, in index order.
    pub success_probabilities: Vec<(Bitstring, f64)>,
}

impl EffectiveOperator {
    pub fn min_success_probability(&self) -> f64 {
        self.success_probabilities
            .iter()
            .map(|p| p.1)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_success_probability(&self) -> f64 {
        self.success_probabilities
            .iter()
            .map(|p| p.1)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn effective_operator(circuit: &Circuit) -> Result<EffectiveOperator> {
    let w = circuit.work_qubits().len();
    if w > MAX_EFFECTIVE_WORK_QUBITS {
        return Err(Error::InvalidCircuit(format!(
            "{w} work qubits exceeds {MAX_EFFECTIVE_WORK_QUBITS} for operator extraction"
        )));
    }
    let dim = 1usize << w;
    let mut matrix = DenseOperator::zeros(dim, dim);
    let mut success_probabilities = Vec::with_capacity(dim);
    for j in 0..dim {
        let input = Bitstring::from_index(j, w);
        let outcome = run(circuit, &input)?;
        for (i, z) in outcome.amplitudes.iter().enumerate() {
            matrix.set(i, j, *z);
        }
        success_probabilities.push((input, outcome.probability));
    }
    Ok(EffectiveOperator {
        matrix,
        success_probabilities,
    })
}

/// Unit morphism `Σ_k |kk⟩` on two fresh qubits.
///
/// The state is kept normalized as the Bell state `(|00⟩+|11⟩)/√2`; the
/// returned factor `√2` is the norm of the unnormalized cup.
pub fn cup(state: &StateVector, q1: usize, q2: usize) -> Result<(StateVector, f64)> {
    state.check_qubit(q1)?;
    state.check_qubit(q2)?;
    if q1 == q2 {
        return Err(Error::InvalidQubit {
            qubit: q2,
            reason: "cup needs two distinct qubits".into(),
        });
    }
    let occupied = state.bit(q1) | state.bit(q2);
    if state
        .amplitudes
        .iter()
        .enumerate()
        .any(|(i, z)| i & occupied != 0 && *z != ZERO)
    {
        return Err(Error::InvalidQubit {
            qubit: q1,
            reason: "cup targets must be fresh |00⟩ qubits".into(),
        });
    }
    let mut out = state.clone();
    out.apply(GateKind::H, q1, &[]);
    out.apply(GateKind::X, q2, &[(q1, true)]);
    Ok((out, std::f64::consts::SQRT_2))
}

/// Counit morphism `Σ_k ⟨kk|`: project the pair onto `(|00⟩+|11⟩)/√2`,
/// leaving the register size unchanged. Returns the unnormalized projected
/// state and its squared norm.
pub fn cap(state: &StateVector, q1: usize, q2: usize) -> Result<(StateVector, f64)> {
    state.check_qubit(q1)?;
    state.check_qubit(q2)?;
    if q1 == q2 {
        return Err(Error::InvalidQubit {
            qubit: q2,
            reason: "cap needs two distinct qubits".into(),
        });
    }
    let (b1, b2) = (state.bit(q1), state.bit(q2));
    let mut out = state.clone();
    for i in 0..out.amplitudes.len() {
        if i & (b1 | b2) != 0 {
            continue;
        }
        let (i00, i01, i10, i11) = (i, i | b2, i | b1, i | b1 | b2);
        let bell = (out.amplitudes[i00] + out.amplitudes[i11]) * 0.5;
        out.amplitudes[i00] = bell;
        out.amplitudes[i11] = bell;
        out.amplitudes[i01] = ZERO;
        out.amplitudes[i10] = ZERO;
    }
    let probability = out.norm().powi(2);
    Ok((out, probability))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Control;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
    }

    #[test]
    fn single_gate_examples() {
        let mut s = StateVector::new(1).unwrap();
        s.apply_gate(&Gate::new(GateKind::Ry(PI), 0)).unwrap();
        assert!(close(s.amplitudes(), &[c(0.0), c(1.0)], 1e-12));

        let mut s = StateVector::new(1).unwrap();
        s.apply_gate(&Gate::new(GateKind::H, 0)).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(s.amplitudes(), &[c(h), c(h)], 1e-15));

        let theta = 0.83;
        let mut s = StateVector::new(1).unwrap();
        s.apply_gate(&Gate::new(GateKind::Ry(theta), 0)).unwrap();
        assert!(close(
            s.amplitudes(),
            &[c((theta / 2.0).cos()), c((theta / 2.0).sin())],
            1e-15
        ));

        let mut s = StateVector::new(2).unwrap();
        assert!(s.apply_gate(&Gate::new(GateKind::X, 2)).is_err());
    }

    #[test]
    fn controls_respect_state() {
        let mut s = StateVector::basis(&"10".parse().unwrap()).unwrap();
        s.apply_gate(&Gate::controlled(
            GateKind::X,
            1,
            vec![Control::on(0, false)],
        ))
        .unwrap();
        assert_eq!(s.amplitudes()[2], c(1.0));
        s.apply_gate(&Gate::controlled(
            GateKind::X,
            1,
            vec![Control::on(0, true)],
        ))
        .unwrap();
        assert_eq!(s.amplitudes()[3], c(1.0));
    }

    #[test]
    fn empty_circuit_is_identity() {
        let circuit = Circuit::new(2, 0);
        let out = run(&circuit, &"01".parse().unwrap()).unwrap();
        assert_eq!(out.amplitudes, vec![c(0.0), c(1.0), c(0.0), c(0.0)]);
        assert_eq!(out.probability, 1.0);
        assert!(run(&circuit, &"1".parse().unwrap()).is_err());
    }

    #[test]
    fn two_term_identity_fragment_always_succeeds() {
        for theta in [0.0, 0.4, 1.37, PI] {
            let mut circuit = Circuit::new(1, 1);
            circuit.push(Gate::new(GateKind::Ry(theta), 1)).unwrap();
            circuit.push(Gate::new(GateKind::Ry(-theta), 1)).unwrap();
            circuit.require(1, false).unwrap();
            for b in ["0", "1"] {
                let out = run(&circuit, &b.parse().unwrap()).unwrap();
                assert!((out.probability - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn unselected_ancilla_is_rejected() {
        let circuit = Circuit::new(1, 1);
        assert!(run(&circuit, &"0".parse().unwrap()).is_err());
    }

    #[test]
    fn effective_operator_of_x() {
        let mut circuit = Circuit::new(1, 0);
        circuit.push(Gate::new(GateKind::X, 0)).unwrap();
        let eff = effective_operator(&circuit).unwrap();
        let x = DenseOperator::from_fn(2, 2, |r, col| c(f64::from(u8::from(r != col))));
        assert_eq!(eff.matrix, x);
        assert_eq!(eff.min_success_probability(), 1.0);
    }

    #[test]
    fn cup_cap_examples() {
        let s = StateVector::new(3).unwrap();
        let (bell, scale) = cup(&s, 0, 2).unwrap();
        assert!((scale - 2f64.sqrt()).abs() < 1e-15);
        let (back, p) = cap(&bell, 0, 2).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        assert!(close(back.amplitudes(), bell.amplitudes(), 1e-15));

        let s01 = StateVector::basis(&"01".parse().unwrap()).unwrap();
        assert_eq!(cap(&s01, 0, 1).unwrap().1, 0.0);
        assert!(cup(&s01, 0, 1).is_err());

        let (mut bell, _) = cup(&StateVector::new(2).unwrap(), 0, 1).unwrap();
        bell.apply_gate(&Gate::new(GateKind::X, 0)).unwrap();
        assert!(cap(&bell, 0, 1).unwrap().1 < 1e-30);
    }
}
