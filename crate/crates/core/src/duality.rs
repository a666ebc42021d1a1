//! Duality-mode (linear combination of unitaries) circuit synthesis.
//!
//! A weighted sum `Σ c_k U_k` is realized with ancillas: prepare the weights
//! on the ancilla register, apply each `U_k` controlled on ancilla pattern
//! `k`, undo the preparation and post-select the ancillas on all-zeros.
//!
//! Paper mode works qubit by qubit on a factored form:
//!
//! * two terms, one ancilla: `Ry(θ)`, controlled `U₀`/`U₁`, `Ry(−θ)`, giving
//!   `cos²(θ/2)U₀ + sin²(θ/2)U₁`;
//! * three or four terms, two ancillas: a two-level `Ry` tree prepares
//!   `Σ c_k|k⟩`, four controlled selects follow, then `H⊗H`, giving
//!   `½ Σ c_k U_k`.
//!
//! Exact mode runs one shared ancilla register over the full Pauli expansion
//! and unprepares with the adjoint of the preparation, so the post-selected
//! map is exactly `op / Σ|α_k|`.
//!
//! Phases are folded into the selected unitaries: `e^{iφ}P` becomes the Pauli
//! gate plus a phase gate on the controlling ancilla pattern.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Control, Gate, GateKind};
use crate::error::{Error, Result};
use crate::frobenius::{build_padded, FrobeniusSpec, Generator};
use crate::operator::DenseOperator;
use crate::pauli::{
    normalize_factor, pauli_expand, termwise_factor_sum, FactoredOperator, NormRule,
    NormalizedFactor, Pauli, PauliString,
};

/// Largest register `compile_exact` accepts.
pub const MAX_EXACT_QUBITS: usize = 8;

/// Phases at or below this magnitude get no phase gate.
const PHASE_EPSILON: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompileMode {
    Paper,
    Exact,
}

impl fmt::Display for CompileMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CompileMode::Paper => "paper",
            CompileMode::Exact => "exact",
        })
    }
}

impl FromStr for CompileMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "paper" => Ok(CompileMode::Paper),
            "exact" => Ok(CompileMode::Exact),
            other => Err(format!("unknown mode `{other}` (expected paper|exact)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedAngle {
    pub name: String,
    pub value: f64,
}

impl NamedAngle {
    fn new(name: impl Into<String>, value: f64) -> Self {
        NamedAngle {
            name: name.into(),
            value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompileReport {
    pub mode: CompileMode,
    pub ancilla_count: usize,
    pub term_count: usize,
    /// `s` such that the ideal post-selected map is `target / s`.
    pub nominal_scale: Complex64,
    pub angles: Vec<NamedAngle>,
}

impl CompileReport {
    pub fn angle(&self, name: &str) -> Option<f64> {
        self.angles.iter().find(|a| a.name == name).map(|a| a.value)
    }
}

/// `θ` with `cos²(θ/2) = w0/(w0+w1)`, in `[0, π]`.
pub fn two_term_angle(w0: f64, w1: f64) -> Result<f64> {
    if !(w0.is_finite() && w1.is_finite()) || w0 < 0.0 || w1 < 0.0 {
        return Err(Error::InvalidGate(format!(
            "weights must be finite and >= 0, got ({w0}, {w1})"
        )));
    }
    let total = w0 + w1;
    if total == 0.0 {
        return Err(Error::ZeroWeights);
    }
    Ok(2.0 * (w0 / total).sqrt().min(1.0).acos())
}

/// Angles of the two-level `Ry` tree preparing `Σ c_k|k⟩` from `|00⟩`:
/// `(top, left branch, right branch)`. A branch with zero weight gets 0.
pub fn prep_angles_4(c: [f64; 4]) -> Result<(f64, f64, f64)> {
    if c.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::InvalidGate(format!(
            "amplitudes must be finite and >= 0, got {c:?}"
        )));
    }
    let total: f64 = c.iter().map(|x| x * x).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized(total));
    }
    let left = (c[0] * c[0] + c[1] * c[1]).sqrt();
    let right = (c[2] * c[2] + c[3] * c[3]).sqrt();
    let branch = |a: f64, norm: f64| {
        if norm == 0.0 {
            0.0
        } else {
            2.0 * (a / norm).min(1.0).acos()
        }
    };
    Ok((
        2.0 * left.min(1.0).acos(),
        branch(c[0], left),
        branch(c[2], right),
    ))
}

/// Gates applying the global phase `e^{iφ}` only on the branch where the
/// listed qubits hold the listed bits.
fn phase_on_pattern(pattern: &[Control], phase: f64) -> Vec<Gate> {
    let (last, rest) = pattern
        .split_last()
        .expect("pattern has at least one qubit");
    let gate = Gate::controlled(GateKind::Phase(phase), last.qubit, rest.to_vec());
    if last.state {
        vec![gate]
    } else {
        vec![
            Gate::new(GateKind::X, last.qubit),
            gate,
            Gate::new(GateKind::X, last.qubit),
        ]
    }
}

fn pauli_gate(p: Pauli) -> Option<GateKind> {
    match p {
        Pauli::I => None,
        Pauli::X => Some(GateKind::X),
        Pauli::Y => Some(GateKind::Y),
        Pauli::Z => Some(GateKind::Z),
    }
}

/// Controlled `e^{iφ}·P` on `pattern`, with `P` a string over `targets`.
fn select(pattern: &[Control], targets: &[usize], string: &[Pauli], phase: f64) -> Vec<Gate> {
    let mut gates: Vec<Gate> = targets
        .iter()
        .zip(string)
        .filter_map(|(&q, &p)| pauli_gate(p).map(|k| Gate::controlled(k, q, pattern.to_vec())))
        .collect();
    if phase.abs() > PHASE_EPSILON {
        gates.extend(phase_on_pattern(pattern, phase));
    }
    gates
}

/// Uncontrolled `e^{iφ}·P` on one qubit.
fn bare_unitary(target: usize, p: Pauli, phase: f64) -> Vec<Gate> {
    if phase.abs() <= PHASE_EPSILON {
        return pauli_gate(p)
            .map(|k| Gate::new(k, target))
            .into_iter()
            .collect();
    }
    let m = p.matrix();
    let e = Complex64::from_polar(1.0, phase);
    let u = [[m[0][0] * e, m[0][1] * e], [m[1][0] * e, m[1][1] * e]];
    vec![Gate::new(GateKind::U1q(u), target)]
}

/// Gates, ancillas and angles realizing one normalized single-qubit factor.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorFragment {
    pub gates: Vec<Gate>,
    pub ancillas: Vec<usize>,
    pub angles: Vec<NamedAngle>,
    /// Post-selected map is `gain · unit_factor()`.
    pub gain: f64,
}

/// Compile one factor acting on `target`, using fresh ancillas numbered
/// from `first_ancilla`. Angle names are prefixed with `label`.
pub fn compile_factor(
    factor: &NormalizedFactor,
    target: usize,
    first_ancilla: usize,
    label: &str,
) -> Result<FactorFragment> {
    if factor.terms.is_empty() {
        return Err(Error::ZeroFactor);
    }
    let mut angles = Vec::new();
    for t in &factor.terms {
        if t.phase.abs() > PHASE_EPSILON {
            angles.push(NamedAngle::new(
                format!("{label}.phase.{}", t.letter),
                t.phase,
            ));
        }
    }
    match (factor.rule, factor.terms.as_slice()) {
        (NormRule::Unit, [t]) => Ok(FactorFragment {
            gates: bare_unitary(target, t.pauli(), t.phase),
            ancillas: Vec::new(),
            angles,
            gain: 1.0,
        }),
        (NormRule::L1, [t0, t1]) => {
            let a = first_ancilla;
            let theta = two_term_angle(t0.magnitude, t1.magnitude)?;
            angles.insert(0, NamedAngle::new(format!("{label}.ry"), theta));
            let mut gates = vec![Gate::new(GateKind::Ry(theta), a)];
            for (t, branch) in [(t0, false), (t1, true)] {
                gates.extend(select(
                    &[Control::on(a, branch)],
                    &[target],
                    &[t.pauli()],
                    t.phase,
                ));
            }
            gates.push(Gate::new(GateKind::Ry(-theta), a));
            Ok(FactorFragment {
                gates,
                ancillas: vec![a],
                angles,
                gain: 1.0,
            })
        }
        (NormRule::L2, terms) if terms.len() <= 4 => {
            let (a0, a1) = (first_ancilla, first_ancilla + 1);
            let mut amplitudes = [0.0; 4];
            for t in terms {
                amplitudes[t.pauli().index()] = t.magnitude;
            }
            let (top, left, right) = prep_angles_4(amplitudes)?;
            let mut prefix = vec![
                NamedAngle::new(format!("{label}.prep_top"), top),
                NamedAngle::new(format!("{label}.prep_left"), left),
                NamedAngle::new(format!("{label}.prep_right"), right),
            ];
            prefix.append(&mut angles);
            let mut gates = vec![
                Gate::new(GateKind::Ry(top), a0),
                Gate::controlled(GateKind::Ry(left), a1, vec![Control::on(a0, false)]),
                Gate::controlled(GateKind::Ry(right), a1, vec![Control::on(a0, true)]),
            ];
            for t in terms {
                let k = t.pauli().index();
                let pattern = [Control::on(a0, k & 2 != 0), Control::on(a1, k & 1 != 0)];
                gates.extend(select(&pattern, &[target], &[t.pauli()], t.phase));
            }
            gates.push(Gate::new(GateKind::H, a0));
            gates.push(Gate::new(GateKind::H, a1));
            Ok(FactorFragment {
                gates,
                ancillas: vec![a0, a1],
                angles: prefix,
                gain: 0.5,
            })
        }
        _ => Err(Error::InvalidGate(format!(
            "factor with {} terms does not match rule {:?}",
            factor.terms.len(),
            factor.rule
        ))),
    }
}

/// The per-qubit factored form paper mode compiles: each qubit's pieces of
/// the padded operator summed across its ket-bra terms.
pub fn paper_factored_form(generator: Generator, spec: &FrobeniusSpec) -> Result<FactoredOperator> {
    match generator {
        Generator::Mu | Generator::Delta | Generator::Eta | Generator::Epsilon => {
            termwise_factor_sum(&build_padded(generator, spec)?)
        }
        other => Err(Error::UnsupportedOperator(other.to_string())),
    }
}

/// Compile a factored form qubit by qubit, fresh ancillas per factor.
pub fn compile_factored(form: &FactoredOperator) -> Result<(Circuit, CompileReport)> {
    let n = form.qubits();
    let mut circuit = Circuit::new(n, 0);
    let mut angles = Vec::new();
    let mut scale = form.scale();
    let mut term_count = 0;
    for (q, factor) in form.factors().iter().enumerate() {
        let normalized = normalize_factor(factor)?;
        let fragment = compile_factor(&normalized, q, circuit.qubit_count(), &format!("q{q}"))?;
        let ids = circuit.add_ancillas(fragment.ancillas.len());
        debug_assert_eq!(ids, fragment.ancillas);
        circuit.extend(fragment.gates)?;
        for a in ids {
            circuit.require(a, false)?;
        }
        angles.extend(fragment.angles);
        scale *= normalized.scale / fragment.gain;
        term_count += normalized.terms.len();
    }
    let report = CompileReport {
        mode: CompileMode::Paper,
        ancilla_count: circuit.ancilla_qubits().len(),
        term_count,
        nominal_scale: scale,
        angles,
    };
    Ok((circuit, report))
}

/// Paper-mode circuit for one of the four Frobenius generators. The target
/// it realizes (up to `nominal_scale`) is [`paper_factored_form`], not the
/// generator itself.
pub fn compile_paper(
    generator: Generator,
    spec: &FrobeniusSpec,
) -> Result<(Circuit, CompileReport)> {
    compile_factored(&paper_factored_form(generator, spec)?)
}

/// Binary tree of multi-controlled `Ry` rotations taking the ancilla
/// register from `|0…0⟩` to `Σ amplitudes[k]|k⟩` (nonnegative amplitudes,
/// first ancilla most significant). Zero-angle rotations are omitted.
pub fn prep_tree(amplitudes: &[f64], ancillas: &[usize]) -> (Vec<Gate>, Vec<NamedAngle>) {
    let m = ancillas.len();
    assert_eq!(
        amplitudes.len(),
        1 << m,
        "one amplitude per ancilla pattern"
    );
    let weight =
        |range: std::ops::Range<usize>| amplitudes[range].iter().map(|a| a * a).sum::<f64>();
    let mut gates = Vec::new();
    let mut angles = Vec::new();
    for level in 0..m {
        let span = 1usize << (m - level);
        for prefix in 0..(1usize << level) {
            let start = prefix * span;
            let left = weight(start..start + span / 2);
            let total = left + weight(start + span / 2..start + span);
            if total == 0.0 {
                continue;
            }
            let theta = 2.0 * (left / total).sqrt().min(1.0).acos();
            if theta == 0.0 {
                continue;
            }
            let controls = (0..level)
                .map(|l| Control::on(ancillas[l], (prefix >> (level - 1 - l)) & 1 == 1))
                .collect();
            let bits: String = (0..level)
                .map(|l| {
                    if (prefix >> (level - 1 - l)) & 1 == 1 {
                        '1'
                    } else {
                        '0'
                    }
                })
                .collect();
            angles.push(NamedAngle::new(format!("prep.l{level}.{bits}"), theta));
            gates.push(Gate::controlled(
                GateKind::Ry(theta),
                ancillas[level],
                controls,
            ));
        }
    }
    (gates, angles)
}

/// Exact LCU over the full Pauli expansion of `op` (at most
/// [`MAX_EXACT_QUBITS`] qubits). The post-selected map is `op / s` with
/// `s = Σ|α_k|`.
pub fn compile_exact(op: &DenseOperator) -> Result<(Circuit, CompileReport)> {
    let n = op.qubits()?;
    if n == 0 {
        return Err(Error::NotQubitOperator { rows: 1, cols: 1 });
    }
    if n > MAX_EXACT_QUBITS {
        return Err(Error::TooManyQubits(n));
    }
    let terms = pauli_expand(op)?;
    let k = terms.len();
    if k == 0 {
        return Err(Error::ZeroOperator);
    }
    let s: f64 = terms.iter().map(|t| t.coefficient.norm()).sum();
    let work: Vec<usize> = (0..n).collect();

    if k == 1 {
        let t = &terms[0];
        let mut circuit = Circuit::new(n, 0);
        let phase = t.coefficient.arg();
        let mut phase_done = false;
        for (q, &p) in t.string.letters().iter().enumerate() {
            if p == Pauli::I {
                continue;
            }
            let ph = if phase_done { 0.0 } else { phase };
            circuit.extend(bare_unitary(q, p, ph))?;
            phase_done = true;
        }
        if !phase_done {
            circuit.extend(bare_unitary(0, Pauli::I, phase))?;
        }
        let report = CompileReport {
            mode: CompileMode::Exact,
            ancilla_count: 0,
            term_count: 1,
            nominal_scale: Complex64::new(s, 0.0),
            angles: Vec::new(),
        };
        return Ok((circuit, report));
    }

    let m = (usize::BITS - (k - 1).leading_zeros()) as usize;
    let mut circuit = Circuit::new(n, 0);
    let ancillas = circuit.add_ancillas(m);
    let mut amplitudes = vec![0.0; 1 << m];
    for (slot, t) in amplitudes.iter_mut().zip(&terms) {
        *slot = (t.coefficient.norm() / s).sqrt();
    }
    let (prep, angles) = prep_tree(&amplitudes, &ancillas);
    circuit.extend(prep.iter().cloned())?;
    for (index, t) in terms.iter().enumerate() {
        let pattern: Vec<Control> = (0..m)
            .map(|l| Control::on(ancillas[l], (index >> (m - 1 - l)) & 1 == 1))
            .collect();
        circuit.extend(select(
            &pattern,
            &work,
            t.string.letters(),
            t.coefficient.arg(),
        ))?;
    }
    circuit.extend(prep.iter().rev().map(Gate::adjoint))?;
    for &a in &ancillas {
        circuit.require(a, false)?;
    }
    let report = CompileReport {
        mode: CompileMode::Exact,
        ancilla_count: m,
        term_count: k,
        nominal_scale: Complex64::new(s, 0.0),
        angles,
    };
    Ok((circuit, report))
}

/// Pauli strings selected by an exact-mode compilation, in pattern order.
pub fn exact_terms(op: &DenseOperator) -> Result<Vec<PauliString>> {
    Ok(pauli_expand(op)?.into_iter().map(|t| t.string).collect())
}
