//! Jordan–Wigner encoding of the subspace Hamiltonian.
//!
//! Spin-orbitals are ordered all-alpha then all-beta over the active
//! orbitals: qubit `p` is `p↑`, qubit `n + p` is `p↓`.

use num_complex::Complex;

use crate::integrals::MoIntegrals;
use crate::scalar::{cast, to_f64, tolerance, Real};
use crate::solvers::{ActiveSpace, SubspaceSpec};

use super::pauli::{PauliString, PauliSum, PauliTerm, QubitHamiltonian};
use super::VqeError;

const IMAGINARY_TOLERANCE: f64 = 1e-10;

/// `a†_j` (`dagger`) or `a_j` as a two-term Pauli sum.
pub fn ladder<T: Real>(j: usize, dagger: bool) -> PauliSum<T> {
    let half: T = cast(0.5);
    let chain = PauliString::z_chain(j);
    let (_, x) = chain.multiply(PauliString::x(j));
    let (_, y) = chain.multiply(PauliString::y(j));
    let mut s = PauliSum::single(x, Complex::new(half, T::zero()));
    let im = if dagger { -half } else { half };
    s.add(y, Complex::new(T::zero(), im));
    s
}

/// Qubit form of `E_core + Σ h_pq a†_p a_q + ½ Σ ⟨pq|rs⟩ a†_p a†_q a_s a_r`
/// over the correlated orbitals of `sub`.
pub fn jordan_wigner<T: Real>(
    ints: &MoIntegrals<T>,
    sub: &SubspaceSpec,
    qubit_cap: usize,
) -> Result<QubitHamiltonian<T>, VqeError> {
    let n_qubits = sub.n_spin_orbitals();
    if n_qubits > qubit_cap.min(64) {
        return Err(VqeError::CapExceeded {
            required: n_qubits,
            allowed: qubit_cap.min(64),
        });
    }
    map_active_space(&ActiveSpace::new(ints, sub))
}

pub(crate) fn map_active_space<T: Real>(
    space: &ActiveSpace<T>,
) -> Result<QubitHamiltonian<T>, VqeError> {
    let n = space.n_orbitals();
    let n_qubits = 2 * n;
    let zero = T::zero();
    let creators: Vec<PauliSum<T>> = (0..n_qubits).map(|j| ladder(j, true)).collect();
    let annihilators: Vec<PauliSum<T>> = (0..n_qubits).map(|j| ladder(j, false)).collect();

    let mut total = PauliSum::single(PauliString::IDENTITY, Complex::new(space.core_energy, zero));

    for p in 0..n {
        for q in 0..n {
            let h = space.h(p, q);
            if h == zero {
                continue;
            }
            for shift in [0, n] {
                let hop = creators[p + shift].mul(&annihilators[q + shift]);
                total.add_scaled(&hop, Complex::new(h, zero));
            }
        }
    }

    // ½ Σ (pr|qs) a†_pσ a†_qτ a_sτ a_rσ
    let half: T = cast(0.5);
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let v = space.eri(p, r, q, s);
                    if v == zero {
                        continue;
                    }
                    for sigma in 0..2 {
                        for tau in 0..2 {
                            let (ps, rs) = (p + sigma * n, r + sigma * n);
                            let (qt, st) = (q + tau * n, s + tau * n);
                            if ps == qt || rs == st {
                                continue;
                            }
                            let op = creators[ps]
                                .mul(&creators[qt])
                                .mul(&annihilators[st])
                                .mul(&annihilators[rs]);
                            total.add_scaled(&op, Complex::new(v * half, zero));
                        }
                    }
                }
            }
        }
    }

    let residue = max_imaginary(&total);
    if residue > tolerance(IMAGINARY_TOLERANCE) {
        return Err(VqeError::NonHermitian(to_f64(residue)));
    }
    let eps: T = cast(1e-14);
    let terms = total.iter().filter_map(|(string, c)| {
        (string.is_identity() || c.re.abs() > eps).then_some(PauliTerm {
            coefficient: c.re,
            string,
        })
    });
    Ok(QubitHamiltonian::new(n_qubits, terms))
}

/// Largest imaginary part left after mapping; real integrals give zero.
pub fn max_imaginary<T: Real>(sum: &PauliSum<T>) -> T {
    sum.iter().fold(T::zero(), |m, (_, c)| m.max(c.im.abs()))
}
