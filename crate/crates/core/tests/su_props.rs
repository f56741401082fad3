mod common;

use common::*;
use lie_control::lie::closure_of;
use lie_control::linalg::{c, commutator, i_diag, CMatrix};
use lie_control::su::{analyze_pair, is_regular, is_strongly_regular, root_data, weyl_h, weyl_u, weyl_v, PairVerdict};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn random_weights(n: usize, rng: &mut StdRng) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
    let mean = w.iter().sum::<f64>() / n as f64;
    w.into_iter().map(|x| x - mean).collect()
}

#[test]
fn comm_relations_hold() {
    let mut rng = StdRng::seed_from_u64(5);
    for n in 2..=6 {
        let a = random_su(n, 3.0, &mut rng);
        let rd = root_data(&a).unwrap();
        let w = &rd.diagonalizer;
        let adapt = |x: CMatrix| w * x * w.adjoint();
        for p in 0..n {
            for q in p + 1..n {
                let (u, v) = (adapt(weyl_u(n, p, q)), adapt(weyl_v(n, p, q)));
                let alpha = rd.root(p, q).im;
                let r1 = commutator(&a, &u) - &v * c(alpha, 0.0);
                let r2 = commutator(&a, &v) + &u * c(alpha, 0.0);
                assert!(fro(&r1) <= 1e-9 && fro(&r2) <= 1e-9, "n={n} p={p} q={q}");
            }
        }
        for p in 0..n - 1 {
            let r = commutator(&weyl_u(n, p, p + 1), &weyl_v(n, p, p + 1)) - weyl_h(n, p) * c(2.0, 0.0);
            assert!(fro(&r) <= 1e-12);
        }
    }
}

#[test]
fn strongly_regular_implies_regular() {
    let mut rng = StdRng::seed_from_u64(6);
    let mut strong = 0;
    for i in 0..200 {
        let n = 2 + i % 5;
        let u = random_unitary(n, &mut rng);
        // Half the draws repeat a root on purpose.
        let mut w = random_weights(n, &mut rng);
        if i % 2 == 0 && n >= 3 {
            w[2] = 2.0 * w[1] - w[0];
            let mean = w.iter().sum::<f64>() / n as f64;
            w.iter_mut().for_each(|x| *x -= mean);
        }
        let a = &u * i_diag(&w) * u.adjoint();
        let a = (&a - a.adjoint()) * c(0.5, 0.0);
        if is_strongly_regular(&a, 1e-8).unwrap() {
            strong += 1;
            assert!(is_regular(&a, 1e-8).unwrap());
        }
    }
    assert!(strong > 50);
}

fn conj(u: &CMatrix, x: &CMatrix) -> CMatrix {
    let y = u * x * u.adjoint();
    (&y - y.adjoint()) * c(0.5, 0.0)
}

#[test]
fn sufficient_condition_cross_checked_by_closure() {
    let mut rng = StdRng::seed_from_u64(7);
    for n in 2..=5 {
        for _ in 0..10 {
            let u = random_unitary(n, &mut rng);
            let a = conj(&u, &i_diag(&random_weights(n, &mut rng)));
            let b = random_su(n, 1.0, &mut rng);
            let an = analyze_pair(&a, &b).unwrap();
            assert_eq!(an.verdict, PairVerdict::SufficientGenerates);
            assert_eq!(closure_of(n, &[a, b]).unwrap().dim(), n * n - 1);
        }
    }
}

#[test]
fn necessary_condition_cross_checked_by_closure() {
    let mut rng = StdRng::seed_from_u64(8);
    for n in 2..=5 {
        for _ in 0..10 {
            let u = random_unitary(n, &mut rng);
            let a = conj(&u, &i_diag(&random_weights(n, &mut rng)));
            // Block-diagonal in a's eigenbasis after a random split.
            let rd = root_data(&a).unwrap();
            let v = &rd.diagonalizer;
            let split = rng.random_range(1..n);
            let mut b = block_diag(&random_skew(split, 1.0, &mut rng), &random_skew(n - split, 1.0, &mut rng));
            let tr = b.trace() / c(n as f64, 0.0);
            for i in 0..n {
                b[(i, i)] -= tr;
            }
            let b = conj(v, &b);
            let an = analyze_pair(&a, &b).unwrap();
            assert!(matches!(an.verdict, PairVerdict::FailsNecessary { .. }), "n={n}");
            assert!(closure_of(n, &[a, b]).unwrap().dim() < n * n - 1);
        }
    }
}
