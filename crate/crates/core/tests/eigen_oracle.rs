use fvo::eigen::{
    davidson_lowest, jacobi_eigen, symmetric_eigenvalues, DavidsonOptions, SymmetricMatrix,
};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn symmetric(n: usize, raw: &[f64]) -> (SymmetricMatrix<f64>, DMatrix<f64>) {
    let mut m = SymmetricMatrix::zeros(n);
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            m.set(i, j, raw[k]);
            m.set(j, i, raw[k]);
            k += 1;
        }
    }
    let dense = DMatrix::from_fn(n, n, |i, j| m.get(i, j));
    (m, dense)
}

fn nalgebra_spectrum(d: DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = d.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

fn matrix() -> impl Strategy<Value = (usize, Vec<f64>)> {
    (1usize..=12).prop_flat_map(|n| {
        (
            Just(n),
            prop::collection::vec(-2.0f64..2.0, n * (n + 1) / 2),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigenvalues_match_nalgebra((n, raw) in matrix()) {
        let (m, d) = symmetric(n, &raw);
        let want = nalgebra_spectrum(d);
        let got = symmetric_eigenvalues(&m).unwrap();
        for (a, b) in got.iter().zip(&want) {
            prop_assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
        let (jac, vecs) = jacobi_eigen(&m).unwrap();
        for (k, (a, b)) in jac.iter().zip(&want).enumerate() {
            prop_assert!((a - b).abs() < 1e-10);
            // residual of each eigenpair
            for i in 0..n {
                let av: f64 = (0..n).map(|j| m.get(i, j) * vecs[k][j]).sum();
                prop_assert!((av - a * vecs[k][i]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn davidson_finds_lowest((n, raw) in matrix()) {
        let (mut m, _) = symmetric(n, &raw);
        // diagonally dominant spectrum, as for CI matrices
        for i in 0..n {
            m.set(i, i, m.get(i, i) + 3.0 * i as f64);
        }
        let d = DMatrix::from_fn(n, n, |i, j| m.get(i, j));
        let want = nalgebra_spectrum(d)[0];
        let (e, _) = davidson_lowest(&m, DavidsonOptions::default()).unwrap();
        prop_assert!((e - want).abs() < 1e-9, "{e} vs {want}");
    }
}
