use cqs_core::duality::{compile_exact, compile_factored};
use cqs_core::operator::DenseOperator;
use cqs_core::pauli::{FactoredOperator, QubitFactor};
use cqs_core::statevector::{effective_operator, run_superposition};
use cqs_core::verify::compare_up_to_scale;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn random_operator(rng: &mut impl Rng, qubits: usize) -> DenseOperator {
    let dim = 1 << qubits;
    let mut op = DenseOperator::zeros(dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            // Some entries zero so sparse Pauli supports show up too.
            if rng.gen_bool(0.7) {
                op.set(r, c, random_complex(rng));
            }
        }
    }
    op
}

#[test]
fn exact_mode_realizes_random_operators() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut done = 0;
    while done < 100 {
        let qubits = 1 + done % 3;
        let op = random_operator(&mut rng, qubits);
        if op.frobenius_norm() == 0.0 {
            continue;
        }
        let (circuit, report) = compile_exact(&op).unwrap();
        let eff = effective_operator(&circuit).unwrap();
        let (res, scale) = compare_up_to_scale(&eff.matrix, &op).unwrap();
        assert!(res <= 1e-10, "case {done}: residual {res}");
        assert!(
            (scale * report.nominal_scale - 1.0).norm() < 1e-10,
            "case {done}: scale {scale}"
        );
        for (_, p) in &eff.success_probabilities {
            assert!((0.0..=1.0).contains(p), "case {done}: probability {p}");
        }
        done += 1;
    }
}

#[test]
fn paper_mode_realizes_random_product_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..40 {
        let qubits = 1 + case % 3;
        let factors: Vec<QubitFactor> = (0..qubits)
            .map(|_| {
                let mut coeffs = [Complex64::new(0.0, 0.0); 4];
                let support = rng.gen_range(1..=4);
                for slot in coeffs.iter_mut().take(support) {
                    *slot = random_complex(&mut rng);
                }
                // Shuffle which Paulis carry the weight.
                let shift = rng.gen_range(0..4);
                coeffs.rotate_right(shift);
                QubitFactor(coeffs)
            })
            .collect();
        let form = FactoredOperator::new(factors, Complex64::new(1.0, 0.0)).unwrap();
        let (circuit, report) = compile_factored(&form).unwrap();
        let eff = effective_operator(&circuit).unwrap();
        let target = form.to_dense();
        let expected = target.scaled(report.nominal_scale.inv());
        assert!(
            eff.matrix.max_abs_diff(&expected).unwrap() < 1e-10,
            "case {case}"
        );
    }
}

#[test]
fn effective_operator_is_linear_on_superpositions() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let op = random_operator(&mut rng, 2);
    let (circuit, _) = compile_exact(&op).unwrap();
    let eff = effective_operator(&circuit).unwrap();
    for _ in 0..10 {
        let mut input: Vec<Complex64> = (0..4).map(|_| random_complex(&mut rng)).collect();
        let norm = input.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        input.iter_mut().for_each(|z| *z /= norm);
        let out = run_superposition(&circuit, &input).unwrap();
        for (r, got) in out.amplitudes.iter().enumerate() {
            let want: Complex64 = (0..4).map(|c| eff.matrix.get(r, c) * input[c]).sum();
            assert!((got - want).norm() < 1e-12);
        }
    }
}
