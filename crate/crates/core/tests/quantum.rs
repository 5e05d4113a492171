mod common;

use common::{load, random_integrals, reference};
use fvo::eigen::symmetric_eigenvalues;
use fvo::resources::ansatz_estimate;
use fvo::solvers::{ci_determinants, fci_energy, fci_spectrum, SubspaceSpec};
use fvo::vqe::{
    expectation, jordan_wigner, normalize, sector_matrix, vqe_energy, AnsatzState, PauliString,
    PauliTerm, QubitHamiltonian, VqeOptions,
};
use fvo::OccupiedSpace;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;

fn jw_matches_fci(ints: &fvo::MoIntegrals, sub: &SubspaceSpec) {
    let h = jordan_wigner(ints, sub, 16).unwrap();
    let n = sub.n_spin_orbitals() / 2;
    let n_occ = sub.occupied.active().len();
    let jw =
        symmetric_eigenvalues(&sector_matrix(&h, &ci_determinants(n, n_occ)).unwrap()).unwrap();
    let fci = fci_spectrum(ints, sub, 16).unwrap();
    assert_eq!(jw.len(), fci.len());
    for (a, b) in jw.iter().zip(&fci) {
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }
}

#[test]
fn h2_vqe_reaches_fci() {
    let ints = load("h2_sto3g");
    let sub = SubspaceSpec::full(OccupiedSpace::closed_shell(&ints));
    let vqe = vqe_energy(&ints, &sub, &VqeOptions::default()).unwrap();
    let fci = reference("h2_sto3g", "e_fci");
    assert!((vqe.e_total - fci).abs() < 1e-6, "{} vs {fci}", vqe.e_total);
    assert!(vqe.e_total >= fci - 1e-10);
    jw_matches_fci(&ints, &sub);
}

#[test]
fn h4_subspace_spectra_match() {
    let ints = load("h4_631g");
    let occ = OccupiedSpace::closed_shell(&ints);
    for virtuals in [vec![2], vec![2, 5], vec![4, 7]] {
        let sub = SubspaceSpec::new(occ.clone(), virtuals).unwrap();
        jw_matches_fci(&ints, &sub);
    }
}

#[test]
fn h4_subspace_vqe_is_variational() {
    let ints = load("h4_631g");
    let sub = SubspaceSpec::new(OccupiedSpace::closed_shell(&ints), [2, 5]).unwrap();
    let vqe = vqe_energy(&ints, &sub, &VqeOptions::default()).unwrap();
    let fci = fci_energy(&ints, &sub, 16).unwrap();
    assert!(vqe.e_total >= fci.e_total - 1e-10);
    assert!(vqe.e_total <= vqe.e_reference);
    assert!(vqe.e_total - fci.e_total < 1e-3);
}

#[test]
fn ansatz_parameters_match_estimate() {
    for o in 0..=4 {
        for v in 0..=(8 - o) {
            let a = AnsatzState::<f64>::new(o, v);
            let e = ansatz_estimate(o, v);
            assert_eq!(a.n_parameters(), e.n_parameters(), "o={o} v={v}");
            assert_eq!(a.n_qubits, fvo::qubit_count(o, v));
        }
    }
}

fn pauli_matrix(c: char) -> DMatrix<Complex64> {
    let (o, i) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0));
    let z = Complex64::new(0.0, 0.0);
    match c {
        'I' => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        'X' => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        'Y' => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        _ => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

/// Kronecker product with qubit 0 as the least significant index bit.
fn dense(s: PauliString, n: usize) -> DMatrix<Complex64> {
    (0..n).fold(DMatrix::identity(1, 1), |acc, q| {
        pauli_matrix(s.symbol(q)).kronecker(&acc)
    })
}

fn string(n: usize) -> impl Strategy<Value = PauliString> {
    (0..1u64 << n, 0..1u64 << n).prop_map(|(x, z)| PauliString { x, z })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn products_match_matrices(a in string(3), b in string(3)) {
        let (k, c) = a.multiply(b);
        let phase = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
        ][k as usize % 4];
        let diff = dense(a, 3) * dense(b, 3) - dense(c, 3) * phase;
        prop_assert!(diff.norm() < 1e-14);
    }

    #[test]
    fn expectation_matches_dense_matrix(
        terms in prop::collection::vec((string(4), -1.0f64..1.0), 1..12),
        amps in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16),
    ) {
        let h = QubitHamiltonian::new(
            4,
            terms.iter().map(|&(string, coefficient)| PauliTerm { coefficient, string }),
        );
        let mut psi: Vec<Complex64> = amps.iter().map(|&(r, i)| Complex64::new(r, i)).collect();
        prop_assume!(normalize(&mut psi) > 1e-3);
        let m = h
            .terms
            .iter()
            .fold(DMatrix::zeros(16, 16), |acc, t| acc + dense(t.string, 4) * Complex64::new(t.coefficient, 0.0));
        let v = DVector::from_vec(psi.clone());
        let want = (v.adjoint() * &m * &v)[(0, 0)];
        let got = expectation(&h, &psi).unwrap();
        prop_assert!((got - want.re).abs() < 1e-12);
    }

    #[test]
    fn random_hamiltonians_match_fci(seed in any::<u64>(), n in 2usize..=4, occ in 1usize..=2) {
        prop_assume!(occ < n);
        let ints = random_integrals(n, 2 * occ, seed);
        let sub = SubspaceSpec::full(OccupiedSpace::closed_shell(&ints));
        jw_matches_fci(&ints, &sub);
    }
}
