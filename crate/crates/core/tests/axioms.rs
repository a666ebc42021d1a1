use cqs_core::encoding::default_encoding;
use cqs_core::frobenius::{FrobeniusSpec, PhaseConvention};
use cqs_core::reptheory::{Casimir, IrrepLabel, RepEntry, RepTable};
use cqs_core::verify::{axiom_suite, AXIOM_TOLERANCE};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_table(rng: &mut impl Rng) -> RepTable {
    let size = rng.gen_range(1..=6);
    let entries = (0..size)
        .map(|k| RepEntry {
            label: IrrepLabel::Named(format!("r{k}")),
            casimir: Casimir::Approx(rng.gen_range(0.0..10.0)),
            dim: rng.gen_range(1..=10),
        })
        .collect();
    RepTable::new("random", entries).unwrap()
}

fn spec(table: RepTable, beta: f64, convention: PhaseConvention) -> FrobeniusSpec {
    let encoding = default_encoding(&table);
    FrobeniusSpec::new(table, encoding, beta, convention).unwrap()
}

#[test]
fn axioms_hold_for_random_tables() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..20 {
        let table = random_table(&mut rng);
        let beta = rng.gen_range(0.0..2.0);
        for conv in [PhaseConvention::PaperLiteral, PhaseConvention::Euclidean] {
            for r in axiom_suite(&spec(table.clone(), beta, conv)).unwrap() {
                assert!(
                    r.deviation <= AXIOM_TOLERANCE,
                    "case {case} {conv}: {} = {}",
                    r.name,
                    r.deviation
                );
            }
        }
    }
}

#[test]
fn deviations_ignore_table_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for _ in 0..5 {
        let table = random_table(&mut rng);
        let mut shuffled = table.entries().to_vec();
        shuffled.shuffle(&mut rng);
        let permuted = RepTable::new("random", shuffled).unwrap();
        let a = axiom_suite(&spec(table, 0.8, PhaseConvention::PaperLiteral)).unwrap();
        let b = axiom_suite(&spec(permuted, 0.8, PhaseConvention::PaperLiteral)).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.name, y.name);
            assert!(x.deviation <= AXIOM_TOLERANCE && y.deviation <= AXIOM_TOLERANCE);
        }
    }
}
