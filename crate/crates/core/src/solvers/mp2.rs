//! Closed-shell second-order Møller–Plesset energy.
//!
//! `E = Σ_ij Σ_ab (ia|jb) [2(ia|jb) − (ib|ja)] / (ε_i + ε_j − ε_a − ε_b)`
//!
//! with `i, j` over correlated occupied orbitals and `a, b` over the subset
//! virtuals. Denominators always use the Fock diagonal, also for localized
//! virtuals; such results are flagged through `non_canonical`.

use crate::integrals::MoIntegrals;
use crate::reference::{fock_diagonal, fock_element};
use crate::scalar::{cast, to_f64, Real};

use super::{reference_energy, CorrelationResult, Method, SolverError, SubspaceSpec};

const NON_CANONICAL_THRESHOLD: f64 = 1e-6;

fn denominator<T: Real>(
    eps: &[T],
    (i, j, a, b): (usize, usize, usize, usize),
) -> Result<T, SolverError> {
    let d = eps[i] + eps[j] - eps[a] - eps[b];
    if d >= T::zero() {
        return Err(SolverError::DegenerateGap {
            i,
            j,
            a,
            b,
            denominator: to_f64(d),
        });
    }
    Ok(d)
}

#[inline]
fn amplitude_term<T: Real>(ints: &MoIntegrals<T>, i: usize, j: usize, a: usize, b: usize) -> T {
    let iajb = ints.eri(i, a, j, b);
    let ibja = ints.eri(i, b, j, a);
    iajb * (cast::<T>(2.0) * iajb - ibja)
}

/// MP2 correlation energy with explicit orbital energies.
pub fn mp2_correlation<T: Real>(
    ints: &MoIntegrals<T>,
    sub: &SubspaceSpec,
    eps: &[T],
) -> Result<T, SolverError> {
    if sub.virtuals().is_empty() {
        return Ok(T::zero());
    }
    let occ = sub.occupied.active();
    if occ.is_empty() {
        return Err(SolverError::NoActiveOccupied);
    }
    let mut e = T::zero();
    for &i in occ {
        for &j in occ {
            for &a in sub.virtuals() {
                for &b in sub.virtuals() {
                    let d = denominator(eps, (i, j, a, b))?;
                    e = e + amplitude_term(ints, i, j, a, b) / d;
                }
            }
        }
    }
    Ok(e)
}

/// Energy per ordered virtual pair `(a, b)`.
pub type PairContributions<T> = Vec<((usize, usize), T)>;

/// The MP2 energy split by ordered virtual pair `(a, b)`.
pub fn mp2_pair_contributions<T: Real>(
    ints: &MoIntegrals<T>,
    sub: &SubspaceSpec,
    eps: &[T],
) -> Result<PairContributions<T>, SolverError> {
    let occ = sub.occupied.active();
    if occ.is_empty() && !sub.virtuals().is_empty() {
        return Err(SolverError::NoActiveOccupied);
    }
    let mut out = Vec::with_capacity(sub.virtuals().len().pow(2));
    for &a in sub.virtuals() {
        for &b in sub.virtuals() {
            let mut e = T::zero();
            for &i in occ {
                for &j in occ {
                    let d = denominator(eps, (i, j, a, b))?;
                    e = e + amplitude_term(ints, i, j, a, b) / d;
                }
            }
            out.push(((a, b), e));
        }
    }
    Ok(out)
}

/// MP2 on `O ∪ V_S` with orbital energies from [`fock_diagonal`].
pub fn mp2_energy<T: Real>(
    ints: &MoIntegrals<T>,
    sub: &SubspaceSpec,
) -> Result<CorrelationResult<T>, SolverError> {
    let e_ref = reference_energy(ints, sub)?;
    let eps = fock_diagonal(ints, &sub.occupied);
    let e_corr = mp2_correlation(ints, sub, &eps.values)?;

    let mut offdiag = T::zero();
    for &a in sub.virtuals() {
        for &b in sub.virtuals() {
            if a != b {
                let f = fock_element(ints, &sub.occupied, a, b);
                offdiag = offdiag + f * f;
            }
        }
    }
    let offdiag = offdiag.sqrt();
    let mut result = CorrelationResult::new(Method::Mp2, sub.clone(), e_ref, e_corr);
    result.fock_offdiagonal_norm = Some(offdiag);
    result.non_canonical = offdiag > cast(NON_CANONICAL_THRESHOLD);
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::OccupiedSpace;

    /// One occupied, one virtual orbital with ε_i = −0.58, ε_a = 0.67 and
    /// (ia|ia) = 0.18.
    fn two_orbital() -> MoIntegrals<f64> {
        let mut ints = MoIntegrals::new(2, 2).unwrap();
        ints.set_h(0, 0, -0.58).unwrap();
        // ε_a = h_aa + 2(aa|ii) − (ai|ia) = h_aa − 0.18
        ints.set_h(1, 1, 0.85).unwrap();
        ints.set_eri(0, 1, 0, 1, 0.18).unwrap();
        ints
    }

    #[test]
    fn empty_virtual_space_is_exactly_zero() {
        let ints = two_orbital();
        let sub = SubspaceSpec::new(OccupiedSpace::closed_shell(&ints), []).unwrap();
        let r = mp2_energy(&ints, &sub).unwrap();
        assert_eq!(r.e_corr, 0.0);
        assert_eq!(r.e_total, r.e_reference);
    }

    #[test]
    fn single_term_hand_value() {
        let ints = two_orbital();
        let sub = SubspaceSpec::full(OccupiedSpace::closed_shell(&ints));
        let eps = fock_diagonal(&ints, &sub.occupied);
        assert!((eps.values[0] + 0.58).abs() < 1e-15);
        assert!((eps.values[1] - 0.67).abs() < 1e-15);
        let r = mp2_energy(&ints, &sub).unwrap();
        // 0.18 · (2·0.18 − 0.18) / (2·(−0.58 − 0.67))
        assert!((r.e_corr - (-0.01296)).abs() < 1e-14, "{}", r.e_corr);
        assert!(!r.non_canonical);
    }

    #[test]
    fn degenerate_gap_names_indices() {
        let ints = two_orbital();
        let sub = SubspaceSpec::full(OccupiedSpace::closed_shell(&ints));
        let err = mp2_correlation(&ints, &sub, &[0.5, 0.5]).unwrap_err();
        assert!(matches!(
            err,
            SolverError::DegenerateGap {
                i: 0,
                j: 0,
                a: 1,
                b: 1,
                ..
            }
        ));
    }

    #[test]
    fn all_frozen_is_rejected() {
        let ints = two_orbital();
        let occ = OccupiedSpace::closed_shell(&ints)
            .with_frozen_core(1)
            .unwrap();
        let sub = SubspaceSpec::full(occ);
        assert!(matches!(
            mp2_energy(&ints, &sub),
            Err(SolverError::NoActiveOccupied)
        ));
    }

    #[test]
    fn off_diagonal_fock_is_flagged() {
        let mut ints = MoIntegrals::<f64>::new(3, 2).unwrap();
        ints.set_h(0, 0, -1.0).unwrap();
        ints.set_h(1, 1, 0.5).unwrap();
        ints.set_h(2, 2, 0.7).unwrap();
        ints.set_h(1, 2, 0.01).unwrap();
        ints.set_eri(0, 1, 0, 1, 0.1).unwrap();
        let sub = SubspaceSpec::full(OccupiedSpace::closed_shell(&ints));
        let r = mp2_energy(&ints, &sub).unwrap();
        assert!(r.non_canonical);
        assert!((r.fock_offdiagonal_norm.unwrap() - 0.01 * 2f64.sqrt()).abs() < 1e-15);
    }
}
