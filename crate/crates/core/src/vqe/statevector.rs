//! Dense statevector evaluation of qubit Hamiltonians.

use std::collections::HashMap;

use num_complex::Complex;
use rayon::prelude::*;

use crate::eigen::SymmetricMatrix;
use crate::scalar::{to_f64, tolerance, Real};

use super::pauli::QubitHamiltonian;
use super::VqeError;

const NORM_TOLERANCE: f64 = 1e-10;
const IMAGINARY_TOLERANCE: f64 = 1e-9;

/// `⟨ψ|H|ψ⟩` for a normalized state over `2^n_qubits` amplitudes.
pub fn expectation<T: Real>(h: &QubitHamiltonian<T>, psi: &[Complex<T>]) -> Result<T, VqeError> {
    if h.n_qubits >= usize::BITS as usize || psi.len() != 1usize << h.n_qubits {
        return Err(VqeError::Dimension {
            expected: 1usize.checked_shl(h.n_qubits as u32).unwrap_or(0),
            found: psi.len(),
        });
    }
    let norm: T = psi.iter().map(|a| a.norm_sqr()).sum();
    if (norm - T::one()).abs() > tolerance(NORM_TOLERANCE) {
        return Err(VqeError::NotNormalized(to_f64(norm)));
    }
    let nonzero: Vec<(u64, Complex<T>)> = psi
        .iter()
        .enumerate()
        .filter(|(_, a)| a.re != T::zero() || a.im != T::zero())
        .map(|(b, &a)| (b as u64, a))
        .collect();
    // per-term values computed in parallel, summed in term order
    let per_term: Vec<Complex<T>> = h
        .terms
        .par_iter()
        .map(|t| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for &(b, amp) in &nonzero {
                let (b2, phase) = t.string.apply::<T>(b);
                acc = acc + psi[b2 as usize].conj() * phase * amp;
            }
            acc * t.coefficient
        })
        .collect();
    let total = per_term
        .into_iter()
        .fold(Complex::new(T::zero(), T::zero()), |a, b| a + b);
    if total.im.abs() > tolerance(IMAGINARY_TOLERANCE) {
        return Err(VqeError::ImaginaryExpectation(to_f64(total.im)));
    }
    Ok(total.re)
}

/// Row-major `2^n × 2^n` matrix of the Pauli sum.
pub fn to_dense<T: Real>(h: &QubitHamiltonian<T>) -> Vec<Complex<T>> {
    let dim = 1usize << h.n_qubits;
    let mut m = vec![Complex::new(T::zero(), T::zero()); dim * dim];
    for t in &h.terms {
        for col in 0..dim {
            let (row, phase) = t.string.apply::<T>(col as u64);
            m[row as usize * dim + col] = m[row as usize * dim + col] + phase * t.coefficient;
        }
    }
    m
}

/// The Hamiltonian restricted to the given basis states (a particle-number
/// sector). Real symmetric for Hamiltonians built from real integrals.
pub fn sector_matrix<T: Real>(
    h: &QubitHamiltonian<T>,
    basis: &[u64],
) -> Result<SymmetricMatrix<T>, VqeError> {
    let index: HashMap<u64, usize> = basis.iter().enumerate().map(|(i, &b)| (b, i)).collect();
    let dim = basis.len();
    let mut re = vec![T::zero(); dim * dim];
    let mut im = vec![T::zero(); dim * dim];
    for t in &h.terms {
        for (col, &b) in basis.iter().enumerate() {
            let (b2, phase) = t.string.apply::<T>(b);
            if let Some(&row) = index.get(&b2) {
                re[row * dim + col] = re[row * dim + col] + phase.re * t.coefficient;
                im[row * dim + col] = im[row * dim + col] + phase.im * t.coefficient;
            }
        }
    }
    let worst = im.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if worst > tolerance(1e-10) {
        return Err(VqeError::NonHermitian(to_f64(worst)));
    }
    Ok(SymmetricMatrix::from_row_major(dim, re).expect("square by construction"))
}

/// Computational basis state `|b⟩`.
pub fn basis_state<T: Real>(n_qubits: usize, b: u64) -> Vec<Complex<T>> {
    let mut psi = vec![Complex::new(T::zero(), T::zero()); 1 << n_qubits];
    psi[b as usize] = Complex::new(T::one(), T::zero());
    psi
}

/// Normalizes in place; returns the original norm.
pub fn normalize<T: Real>(psi: &mut [Complex<T>]) -> T {
    let norm = psi.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt();
    if norm > T::zero() {
        let inv = T::one() / norm;
        for a in psi.iter_mut() {
            *a = *a * inv;
        }
    }
    norm
}
