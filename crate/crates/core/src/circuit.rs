//! Gate-list circuits over work and ancilla qubits, with an ancilla
//! post-selection mask.
//!
//! Two serializations exist: a JSON document and a line-oriented text form.
//! The text form names the k-th work qubit `qk` and the k-th ancilla `ak`.
//! Each controlled gate gets one `c` prefix per control, controls are
//! listed before the target, and a control on `|0⟩` is written `~a0`:
//!
//! ```text
//! ry(1.37) a0;
//! cry(2.21) ~a1, a2;
//! postselect a0 -> 0;
//! ```

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Matrix2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateKind {
    Ry(f64),
    Rz(f64),
    /// `diag(1, e^{iφ})`.
    Phase(f64),
    X,
    Y,
    Z,
    H,
    U1q(Matrix2),
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::Ry(_) => "ry",
            GateKind::Rz(_) => "rz",
            GateKind::Phase(_) => "phase",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::H => "h",
            GateKind::U1q(_) => "u1q",
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            GateKind::Ry(t) | GateKind::Rz(t) | GateKind::Phase(t) => vec![t],
            _ => Vec::new(),
        }
    }

    pub fn matrix(&self) -> Matrix2 {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let i = Complex64::new(0.0, 1.0);
        match *self {
            GateKind::Ry(t) => {
                let (s, c) = (t / 2.0).sin_cos();
                [[c.into(), (-s).into()], [s.into(), c.into()]]
            }
            GateKind::Rz(t) => [
                [Complex64::from_polar(1.0, -t / 2.0), ZERO],
                [ZERO, Complex64::from_polar(1.0, t / 2.0)],
            ],
            GateKind::Phase(p) => [[ONE, ZERO], [ZERO, Complex64::from_polar(1.0, p)]],
            GateKind::X => [[ZERO, ONE], [ONE, ZERO]],
            GateKind::Y => [[ZERO, -i], [i, ZERO]],
            GateKind::Z => [[ONE, ZERO], [ZERO, -ONE]],
            GateKind::H => [[h.into(), h.into()], [h.into(), (-h).into()]],
            GateKind::U1q(m) => m,
        }
    }

    pub fn adjoint(&self) -> GateKind {
        match *self {
            GateKind::Ry(t) => GateKind::Ry(-t),
            GateKind::Rz(t) => GateKind::Rz(-t),
            GateKind::Phase(p) => GateKind::Phase(-p),
            GateKind::U1q(m) => GateKind::U1q([
                [m[0][0].conj(), m[1][0].conj()],
                [m[0][1].conj(), m[1][1].conj()],
            ]),
            other => other,
        }
    }

    fn from_parts(kind: &str, params: &[f64], matrix: Option<&[[f64; 2]; 4]>) -> Result<Self> {
        let one_param = || match params {
            [t] if t.is_finite() => Ok(*t),
            _ => Err(Error::InvalidGate(format!(
                "`{kind}` takes exactly one finite parameter"
            ))),
        };
        let no_params = |g: GateKind| {
            if params.is_empty() {
                Ok(g)
            } else {
                Err(Error::InvalidGate(format!("`{kind}` takes no parameters")))
            }
        };
        match kind {
            "ry" => Ok(GateKind::Ry(one_param()?)),
            "rz" => Ok(GateKind::Rz(one_param()?)),
            "phase" => Ok(GateKind::Phase(one_param()?)),
            "x" => no_params(GateKind::X),
            "y" => no_params(GateKind::Y),
            "z" => no_params(GateKind::Z),
            "h" => no_params(GateKind::H),
            "u1q" => {
                let m = matrix.ok_or_else(|| Error::InvalidGate("u1q needs a matrix".into()))?;
                let z = |k: usize| Complex64::new(m[k][0], m[k][1]);
                no_params(GateKind::U1q([[z(0), z(1)], [z(2), z(3)]]))
            }
            other => Err(Error::InvalidGate(format!("unknown gate kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Control {
    pub qubit: usize,
    /// Required value of the control qubit.
    pub state: bool,
}

impl Control {
    pub fn on(qubit: usize, state: bool) -> Self {
        Control { qubit, state }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub target: usize,
    pub controls: Vec<Control>,
}

impl Gate {
    pub fn new(kind: GateKind, target: usize) -> Self {
        Gate {
            kind,
            target,
            controls: Vec::new(),
        }
    }

    pub fn controlled(kind: GateKind, target: usize, controls: Vec<Control>) -> Self {
        Gate {
            kind,
            target,
            controls,
        }
    }

    pub fn adjoint(&self) -> Gate {
        Gate {
            kind: self.kind.adjoint(),
            target: self.target,
            controls: self.controls.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.controls.iter().any(|c| c.qubit == self.target) {
            return Err(Error::InvalidGate(format!(
                "target {} is also a control",
                self.target
            )));
        }
        for (i, c) in self.controls.iter().enumerate() {
            if self.controls[..i].iter().any(|d| d.qubit == c.qubit) {
                return Err(Error::InvalidGate(format!("control {} repeated", c.qubit)));
            }
        }
        if self.kind.params().iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidGate("non-finite gate parameter".into()));
        }
        if let GateKind::U1q(m) = self.kind {
            // U†U = I to 1e-12
            for r in 0..2 {
                for c in 0..2 {
                    let entry: Complex64 = (0..2).map(|k| m[k][r].conj() * m[k][c]).sum();
                    let expected = if r == c { ONE } else { ZERO };
                    if (entry - expected).norm() > 1e-12 {
                        return Err(Error::InvalidGate("u1q matrix is not unitary".into()));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QubitRole {
    Work,
    Ancilla,
}

/// Qubits are numbered `0..qubit_count()`; qubit 0 is the leftmost bit of a
/// basis label. Work qubits come first by construction, but a loaded
/// document may interleave roles.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    work: Vec<usize>,
    ancillas: Vec<usize>,
    gates: Vec<Gate>,
    postselect: Vec<(usize, bool)>,
}

impl Circuit {
    /// Work qubits `0..work`, ancillas `work..work+ancillas`.
    pub fn new(work: usize, ancillas: usize) -> Self {
        Circuit {
            work: (0..work).collect(),
            ancillas: (work..work + ancillas).collect(),
            gates: Vec::new(),
            postselect: Vec::new(),
        }
    }

    pub fn from_parts(
        work: Vec<usize>,
        ancillas: Vec<usize>,
        gates: Vec<Gate>,
        postselect: Vec<(usize, bool)>,
    ) -> Result<Self> {
        let c = Circuit {
            work,
            ancillas,
            gates,
            postselect,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn work_qubits(&self) -> &[usize] {
        &self.work
    }

    pub fn ancilla_qubits(&self) -> &[usize] {
        &self.ancillas
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn postselect(&self) -> &[(usize, bool)] {
        &self.postselect
    }

    pub fn qubit_count(&self) -> usize {
        self.work.len() + self.ancillas.len()
    }

    pub fn role(&self, qubit: usize) -> Option<QubitRole> {
        if self.work.contains(&qubit) {
            Some(QubitRole::Work)
        } else if self.ancillas.contains(&qubit) {
            Some(QubitRole::Ancilla)
        } else {
            None
        }
    }

    /// Append fresh ancillas and return their ids.
    pub fn add_ancillas(&mut self, count: usize) -> Vec<usize> {
        let first = self.qubit_count();
        let ids: Vec<usize> = (first..first + count).collect();
        self.ancillas.extend_from_slice(&ids);
        ids
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        self.check_gate(&gate)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn require(&mut self, ancilla: usize, bit: bool) -> Result<()> {
        if self.role(ancilla) != Some(QubitRole::Ancilla) {
            return Err(Error::InvalidQubit {
                qubit: ancilla,
                reason: "post-selection must target an ancilla".into(),
            });
        }
        self.postselect.push((ancilla, bit));
        Ok(())
    }

    /// Append all of `other`'s gates (ids must already agree).
    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<()> {
        gates.into_iter().try_for_each(|g| self.push(g))
    }

    fn check_gate(&self, gate: &Gate) -> Result<()> {
        gate.validate()?;
        for q in std::iter::once(gate.target).chain(gate.controls.iter().map(|c| c.qubit)) {
            if self.role(q).is_none() {
                return Err(Error::InvalidQubit {
                    qubit: q,
                    reason: "not declared in the circuit".into(),
                });
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let mut ids: Vec<usize> = self.work.iter().chain(&self.ancillas).copied().collect();
        ids.sort_unstable();
        if ids != (0..ids.len()).collect::<Vec<_>>() {
            return Err(Error::InvalidCircuit(
                "qubit ids must be distinct and cover 0..n".into(),
            ));
        }
        self.gates.iter().try_for_each(|g| self.check_gate(g))?;
        for (i, &(q, _)) in self.postselect.iter().enumerate() {
            if self.role(q) != Some(QubitRole::Ancilla) {
                return Err(Error::InvalidQubit {
                    qubit: q,
                    reason: "post-selection must target an ancilla".into(),
                });
            }
            if self.postselect[..i].iter().any(|&(p, _)| p == q) {
                return Err(Error::InvalidCircuit(format!(
                    "ancilla {q} post-selected twice"
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&CircuitDocument::from(self)).expect("circuit serializes")
    }

    pub fn from_json(source: &str) -> Result<Self> {
        let doc: CircuitDocument = serde_json::from_str(source)?;
        doc.try_into()
    }

    fn qubit_name(&self, qubit: usize) -> String {
        if let Some(k) = self.work.iter().position(|&q| q == qubit) {
            format!("q{k}")
        } else {
            let k = self
                .ancillas
                .iter()
                .position(|&q| q == qubit)
                .expect("validated id");
            format!("a{k}")
        }
    }

    /// Line-oriented text form; see the module docs.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let names = |ids: &[usize]| {
            ids.iter()
                .map(|&q| self.qubit_name(q))
                .collect::<Vec<_>>()
                .join(", ")
        };
        writeln!(out, "// cqs circuit").unwrap();
        writeln!(out, "work {};", names(&self.work)).unwrap();
        if !self.ancillas.is_empty() {
            writeln!(out, "ancilla {};", names(&self.ancillas)).unwrap();
        }
        for g in &self.gates {
            let prefix = "c".repeat(g.controls.len());
            let mnemonic = match g.kind {
                GateKind::Phase(_) => "p",
                GateKind::U1q(_) => "u",
                ref k => k.name(),
            };
            let args = match g.kind {
                GateKind::U1q(m) => {
                    let v: Vec<String> = m
                        .iter()
                        .flatten()
                        .flat_map(|z| [z.re, z.im])
                        .map(|x| x.to_string())
                        .collect();
                    format!("({})", v.join(", "))
                }
                ref k => match k.params().as_slice() {
                    [] => String::new(),
                    ps => format!(
                        "({})",
                        ps.iter()
                            .map(|p| p.to_string())
                            .collect::<Vec<_>>()
                            .join(", ")
                    ),
                },
            };
            let mut operands: Vec<String> = g
                .controls
                .iter()
                .map(|c| {
                    format!(
                        "{}{}",
                        if c.state { "" } else { "~" },
                        self.qubit_name(c.qubit)
                    )
                })
                .collect();
            operands.push(self.qubit_name(g.target));
            writeln!(out, "{prefix}{mnemonic}{args} {};", operands.join(", ")).unwrap();
        }
        for &(q, bit) in &self.postselect {
            writeln!(
                out,
                "postselect {} -> {};",
                self.qubit_name(q),
                u8::from(bit)
            )
            .unwrap();
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct QubitRecord {
    id: usize,
    role: QubitRole,
}

#[derive(Serialize, Deserialize)]
struct ControlRecord {
    q: usize,
    state: u8,
}

#[derive(Serialize, Deserialize)]
struct GateRecord {
    kind: String,
    params: Vec<f64>,
    target: usize,
    controls: Vec<ControlRecord>,
    /// Row-major `[re, im]` pairs, `u1q` only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<[[f64; 2]; 4]>,
}

#[derive(Serialize, Deserialize)]
struct PostselectRecord {
    q: usize,
    bit: u8,
}

#[derive(Serialize, Deserialize)]
struct CircuitDocument {
    qubits: Vec<QubitRecord>,
    gates: Vec<GateRecord>,
    postselect: Vec<PostselectRecord>,
}

impl From<&Circuit> for CircuitDocument {
    fn from(c: &Circuit) -> Self {
        let mut qubits: Vec<QubitRecord> = c
            .work
            .iter()
            .map(|&id| QubitRecord {
                id,
                role: QubitRole::Work,
            })
            .chain(c.ancillas.iter().map(|&id| QubitRecord {
                id,
                role: QubitRole::Ancilla,
            }))
            .collect();
        qubits.sort_by_key(|r| r.id);
        let gates = c
            .gates
            .iter()
            .map(|g| GateRecord {
                kind: g.kind.name().to_string(),
                params: g.kind.params(),
                target: g.target,
                controls: g
                    .controls
                    .iter()
                    .map(|ct| ControlRecord {
                        q: ct.qubit,
                        state: u8::from(ct.state),
                    })
                    .collect(),
                matrix: match g.kind {
                    GateKind::U1q(m) => {
                        let flat = [m[0][0], m[0][1], m[1][0], m[1][1]];
                        Some(flat.map(|z| [z.re, z.im]))
                    }
                    _ => None,
                },
            })
            .collect();
        let postselect = c
            .postselect
            .iter()
            .map(|&(q, bit)| PostselectRecord {
                q,
                bit: u8::from(bit),
            })
            .collect();
        CircuitDocument {
            qubits,
            gates,
            postselect,
        }
    }
}

fn bit_from(value: u8, what: &str) -> Result<bool> {
    match value {
        0 => Ok(false),
        1 => Ok(true),
        v => Err(Error::InvalidCircuit(format!(
            "{what} must be 0 or 1, got {v}"
        ))),
    }
}

impl TryFrom<CircuitDocument> for Circuit {
    type Error = Error;

    fn try_from(doc: CircuitDocument) -> Result<Self> {
        let work = doc
            .qubits
            .iter()
            .filter(|q| q.role == QubitRole::Work)
            .map(|q| q.id)
            .collect();
        let ancillas = doc
            .qubits
            .iter()
            .filter(|q| q.role == QubitRole::Ancilla)
            .map(|q| q.id)
            .collect();
        let gates = doc
            .gates
            .iter()
            .map(|g| {
                let kind = GateKind::from_parts(&g.kind, &g.params, g.matrix.as_ref())?;
                let controls = g
                    .controls
                    .iter()
                    .map(|c| Ok(Control::on(c.q, bit_from(c.state, "control state")?)))
                    .collect::<Result<_>>()?;
                Ok(Gate::controlled(kind, g.target, controls))
            })
            .collect::<Result<_>>()?;
        let postselect = doc
            .postselect
            .iter()
            .map(|p| Ok((p.q, bit_from(p.bit, "post-selected bit")?)))
            .collect::<Result<_>>()?;
        Circuit::from_parts(work, ancillas, gates, postselect)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Circuit {
        let mut c = Circuit::new(2, 0);
        let a = c.add_ancillas(2);
        c.push(Gate::new(GateKind::Ry(1.37), a[0])).unwrap();
        c.push(Gate::controlled(
            GateKind::Ry(2.21),
            a[1],
            vec![Control::on(a[0], false)],
        ))
        .unwrap();
        c.push(Gate::controlled(
            GateKind::Z,
            0,
            vec![Control::on(a[0], true), Control::on(a[1], true)],
        ))
        .unwrap();
        c.push(Gate::new(GateKind::Phase(-0.5), a[1])).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let u = [
            [Complex64::new(s, 0.0), Complex64::new(0.0, s)],
            [Complex64::new(0.0, s), Complex64::new(s, 0.0)],
        ];
        c.push(Gate::new(GateKind::U1q(u), 1)).unwrap();
        c.require(a[0], false).unwrap();
        c.require(a[1], false).unwrap();
        c
    }

    #[test]
    fn json_round_trip() {
        let c = sample();
        let json = c.to_json();
        assert_eq!(Circuit::from_json(&json).unwrap(), c);
        assert!(json.contains("\"role\": \"ancilla\""));
    }

    #[test]
    fn text_form() {
        let text = sample().to_text();
        let expected = "\
// cqs circuit
work q0, q1;
ancilla a0, a1;
ry(1.37) a0;
cry(2.21) ~a0, a1;
ccz a0, a1, q0;
p(-0.5) a1;
u(0.7071067811865476, 0, 0, 0.7071067811865476, 0, 0.7071067811865476, 0.7071067811865476, 0) q1;
postselect a0 -> 0;
postselect a1 -> 0;
";
        assert_eq!(text, expected);
    }

    #[test]
    fn rejects_bad_gates_and_masks() {
        let mut c = Circuit::new(1, 1);
        assert!(c
            .push(Gate::controlled(GateKind::X, 0, vec![Control::on(0, true)]))
            .is_err());
        assert!(c.push(Gate::new(GateKind::X, 5)).is_err());
        assert!(c.push(Gate::new(GateKind::Ry(f64::NAN), 0)).is_err());
        let bad = [[ONE, ONE], [ZERO, ONE]];
        assert!(c.push(Gate::new(GateKind::U1q(bad), 0)).is_err());
        assert!(c.require(0, false).is_err());
        assert!(Circuit::from_parts(vec![0, 2], vec![], vec![], vec![]).is_err());

        let doc = r#"{"qubits":[{"id":0,"role":"work"}],"gates":[{"kind":"ry","params":[],"target":0,"controls":[]}],"postselect":[]}"#;
        assert!(Circuit::from_json(doc).is_err());
        let doc = r#"{"qubits":[{"id":0,"role":"work"}],"gates":[{"kind":"cx","params":[],"target":0,"controls":[]}],"postselect":[]}"#;
        assert!(Circuit::from_json(doc).is_err());
    }
}
