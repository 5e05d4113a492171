//! Spin-adapted UCCSD in a first-order Trotter product.
//!
//! Generators, in the fixed order used by the product:
//!
//! - singles `(i, a)`: `Σ_σ a†_aσ a_iσ − h.c.`
//! - doubles `(i ≤ j, a ≤ b)`: `Σ_στ a†_aσ a†_bτ a_jτ a_iσ − h.c.`
//!
//! The state is `… e^{θ_2 G_2} e^{θ_1 G_1} |HF⟩`; each exponential is a
//! Taylor series applied to the sparse amplitude vector.

use crate::bits::apply_ladder;
use crate::scalar::{cast, Real};

/// One excitation operator `T` of a generator `T − T†`, as ladder products.
#[derive(Debug, Clone, PartialEq)]
pub struct Excitation {
    pub occupied: Vec<usize>,
    pub virtuals: Vec<usize>,
    terms: Vec<Vec<(usize, bool)>>,
}

impl Excitation {
    fn single(n: usize, i: usize, a: usize) -> Self {
        let terms = [0, n]
            .iter()
            .map(|&s| vec![(a + s, true), (i + s, false)])
            .collect();
        Self {
            occupied: vec![i],
            virtuals: vec![a],
            terms,
        }
    }

    fn double(n: usize, (i, j): (usize, usize), (a, b): (usize, usize)) -> Self {
        let mut terms = Vec::new();
        for s in [0, n] {
            for t in [0, n] {
                let ops = vec![(a + s, true), (b + t, true), (j + t, false), (i + s, false)];
                let modes = [a + s, b + t];
                let holes = [i + s, j + t];
                if modes[0] != modes[1] && holes[0] != holes[1] {
                    terms.push(ops);
                }
            }
        }
        Self {
            occupied: vec![i, j],
            virtuals: vec![a, b],
            terms,
        }
    }

    /// Adds `scale · (T − T†)|ψ⟩` into `out`.
    fn apply_generator<T: Real>(&self, psi: &[T], scale: T, out: &mut [T]) {
        for (b, &amp) in psi.iter().enumerate() {
            if amp == T::zero() {
                continue;
            }
            for ops in &self.terms {
                if let Some((b2, neg)) = apply_ladder(b as u64, ops) {
                    let v = scale * amp;
                    out[b2 as usize] = out[b2 as usize] + if neg { -v } else { v };
                }
                let adjoint: Vec<(usize, bool)> = ops.iter().rev().map(|&(m, d)| (m, !d)).collect();
                if let Some((b2, neg)) = apply_ladder(b as u64, &adjoint) {
                    let v = scale * amp;
                    out[b2 as usize] = out[b2 as usize] - if neg { -v } else { v };
                }
            }
        }
    }

    /// `|ψ⟩ ← e^{θ G}|ψ⟩`.
    fn exponentiate<T: Real>(&self, psi: &mut [T], theta: T) {
        if theta == T::zero() {
            return;
        }
        // squared norm of a term far below one ulp of the amplitudes
        let cutoff = (T::epsilon() * cast(0.01)).powi(2);
        let mut term = psi.to_vec();
        let mut next = vec![T::zero(); psi.len()];
        for k in 1..200 {
            next.iter_mut().for_each(|v| *v = T::zero());
            self.apply_generator(&term, theta / cast(k as f64), &mut next);
            std::mem::swap(&mut term, &mut next);
            let mut norm = T::zero();
            for (p, &t) in psi.iter_mut().zip(&term) {
                *p = *p + t;
                norm = norm + t * t;
            }
            if norm < cutoff {
                break;
            }
        }
    }
}

/// UCCSD parameters over a subspace with `n_occupied` doubly occupied and
/// `n_virtual` empty spatial orbitals (active numbering, occupied first).
#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzState<T> {
    pub parameters: Vec<T>,
    pub reference_occupation: u64,
    pub n_qubits: usize,
    excitations: Vec<Excitation>,
}

impl<T: Real> AnsatzState<T> {
    /// Zero amplitudes: the state is the reference determinant.
    pub fn new(n_occupied: usize, n_virtual: usize) -> Self {
        let n = n_occupied + n_virtual;
        let occ = 0..n_occupied;
        let virt = n_occupied..n;
        let mut excitations = Vec::new();
        for i in occ.clone() {
            for a in virt.clone() {
                excitations.push(Excitation::single(n, i, a));
            }
        }
        for i in occ.clone() {
            for j in i..n_occupied {
                for a in virt.clone() {
                    for b in a..n {
                        excitations.push(Excitation::double(n, (i, j), (a, b)));
                    }
                }
            }
        }
        let alpha = (1u64 << n_occupied) - 1;
        Self {
            parameters: vec![T::zero(); excitations.len()],
            reference_occupation: alpha | (alpha << n),
            n_qubits: 2 * n,
            excitations,
        }
    }

    pub fn n_parameters(&self) -> usize {
        self.parameters.len()
    }

    pub fn excitations(&self) -> &[Excitation] {
        &self.excitations
    }

    /// Real amplitudes of the prepared state over `2^n_qubits` basis states.
    pub fn amplitudes(&self, parameters: &[T]) -> Vec<T> {
        let mut psi = vec![T::zero(); 1 << self.n_qubits];
        psi[self.reference_occupation as usize] = T::one();
        for (exc, &theta) in self.excitations.iter().zip(parameters) {
            exc.exponentiate(&mut psi, theta);
        }
        psi
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_counts() {
        assert_eq!(AnsatzState::<f64>::new(2, 2).n_parameters(), 4 + 9);
        assert_eq!(AnsatzState::<f64>::new(1, 1).n_parameters(), 2);
        assert_eq!(AnsatzState::<f64>::new(3, 0).n_parameters(), 0);
    }

    #[test]
    fn reference_bits() {
        let a = AnsatzState::<f64>::new(2, 1);
        assert_eq!(a.reference_occupation, 0b011_011);
    }

    #[test]
    fn rotation_preserves_norm_and_mixes_determinants() {
        let a = AnsatzState::<f64>::new(1, 1);
        let psi = a.amplitudes(&[0.0, 0.3]);
        let norm: f64 = psi.iter().map(|v| v * v).sum();
        assert!((norm - 1.0).abs() < 1e-14);
        // pair double on one occupied/one virtual pair is a plane rotation
        // by 2θ between |0↑0↓⟩ and |1↑1↓⟩
        assert!((psi[0b0101].abs() - (0.6f64).cos()).abs() < 1e-14);
        assert!((psi[0b1010].abs() - (0.6f64).sin()).abs() < 1e-14);
    }

    #[test]
    fn zero_parameters_give_reference() {
        let a = AnsatzState::<f64>::new(2, 2);
        let psi = a.amplitudes(&a.parameters);
        assert_eq!(psi[a.reference_occupation as usize], 1.0);
        assert_eq!(psi.iter().filter(|&&v| v != 0.0).count(), 1);
    }
}
