//! Closed-shell Hartree–Fock reference quantities.

use serde::Serialize;
use thiserror::Error;

use crate::integrals::MoIntegrals;
use crate::scalar::{cast, Real};

/// File-supplied and computed orbital energies may disagree by this much
/// before the computed values win.
const ORBITAL_ENERGY_AGREEMENT: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReferenceError {
    #[error("{given} occupied orbitals given but {n_electrons} electrons need {expected}")]
    OccupationMismatch {
        given: usize,
        expected: usize,
        n_electrons: usize,
    },
    #[error("occupied orbital {0} is outside the basis")]
    OutOfRange(usize),
    #[error("occupied orbital {0} listed twice")]
    Duplicate(usize),
    #[error("cannot freeze {n_frozen} of {n_occupied} occupied orbitals")]
    TooManyFrozen { n_frozen: usize, n_occupied: usize },
}

/// The doubly occupied orbitals of the reference determinant.
///
/// `occupied` is kept sorted; the first `n_frozen_core` entries are the
/// frozen core.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OccupiedSpace {
    occupied: Vec<usize>,
    n_frozen_core: usize,
    n_orbitals: usize,
}

impl OccupiedSpace {
    /// Aufbau occupation: the lowest `n_electrons / 2` orbitals.
    pub fn closed_shell<T: Real>(ints: &MoIntegrals<T>) -> Self {
        Self {
            occupied: (0..ints.n_occupied()).collect(),
            n_frozen_core: 0,
            n_orbitals: ints.n_orbitals(),
        }
    }

    pub fn new<T: Real>(
        ints: &MoIntegrals<T>,
        occupied: impl IntoIterator<Item = usize>,
        n_frozen_core: usize,
    ) -> Result<Self, ReferenceError> {
        let mut occupied: Vec<usize> = occupied.into_iter().collect();
        occupied.sort_unstable();
        for w in occupied.windows(2) {
            if w[0] == w[1] {
                return Err(ReferenceError::Duplicate(w[0]));
            }
        }
        if let Some(&p) = occupied.iter().find(|&&p| p >= ints.n_orbitals()) {
            return Err(ReferenceError::OutOfRange(p));
        }
        if occupied.len() != ints.n_occupied() {
            return Err(ReferenceError::OccupationMismatch {
                given: occupied.len(),
                expected: ints.n_occupied(),
                n_electrons: ints.n_electrons(),
            });
        }
        Self {
            occupied,
            n_frozen_core: 0,
            n_orbitals: ints.n_orbitals(),
        }
        .with_frozen_core(n_frozen_core)
    }

    pub fn with_frozen_core(mut self, n_frozen_core: usize) -> Result<Self, ReferenceError> {
        if n_frozen_core > self.occupied.len() {
            return Err(ReferenceError::TooManyFrozen {
                n_frozen: n_frozen_core,
                n_occupied: self.occupied.len(),
            });
        }
        self.n_frozen_core = n_frozen_core;
        Ok(self)
    }

    pub fn occupied(&self) -> &[usize] {
        &self.occupied
    }

    pub fn n_frozen_core(&self) -> usize {
        self.n_frozen_core
    }

    pub fn n_orbitals(&self) -> usize {
        self.n_orbitals
    }

    pub fn frozen(&self) -> &[usize] {
        &self.occupied[..self.n_frozen_core]
    }

    /// Occupied orbitals that take part in the correlation treatment.
    pub fn active(&self) -> &[usize] {
        &self.occupied[self.n_frozen_core..]
    }

    pub fn is_occupied(&self, p: usize) -> bool {
        self.occupied.binary_search(&p).is_ok()
    }

    /// The complete virtual space, ascending.
    pub fn virtuals(&self) -> Vec<usize> {
        (0..self.n_orbitals)
            .filter(|&p| !self.is_occupied(p))
            .collect()
    }

    fn check_against<T: Real>(&self, ints: &MoIntegrals<T>) -> Result<(), ReferenceError> {
        if self.occupied.len() != ints.n_occupied() {
            return Err(ReferenceError::OccupationMismatch {
                given: self.occupied.len(),
                expected: ints.n_occupied(),
                n_electrons: ints.n_electrons(),
            });
        }
        if let Some(&p) = self.occupied.iter().find(|&&p| p >= ints.n_orbitals()) {
            return Err(ReferenceError::OutOfRange(p));
        }
        Ok(())
    }
}

/// `E_nuc + 2 Σ_i h_ii + Σ_ij [2(ii|jj) − (ij|ij)]` over the occupied set.
pub fn hf_reference_energy<T: Real>(
    ints: &MoIntegrals<T>,
    occ: &OccupiedSpace,
) -> Result<T, ReferenceError> {
    occ.check_against(ints)?;
    let two = cast::<T>(2.0);
    let mut one_body = T::zero();
    let mut two_body = T::zero();
    for &i in occ.occupied() {
        one_body = one_body + ints.h(i, i);
        for &j in occ.occupied() {
            two_body = two_body + two * ints.eri(i, i, j, j) - ints.eri(i, j, i, j);
        }
    }
    Ok(ints.e_nuclear() + two * one_body + two_body)
}

/// Closed-shell Fock matrix element `f_pq = h_pq + Σ_i [2(pq|ii) − (pi|iq)]`.
pub fn fock_element<T: Real>(ints: &MoIntegrals<T>, occ: &OccupiedSpace, p: usize, q: usize) -> T {
    let two = cast::<T>(2.0);
    occ.occupied().iter().fold(ints.h(p, q), |acc, &i| {
        acc + two * ints.eri(p, q, i, i) - ints.eri(p, i, i, q)
    })
}

/// Where a set of orbital energies came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitalEnergySource {
    File,
    Computed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FockDiagonal<T> {
    pub values: Vec<T>,
    pub source: OrbitalEnergySource,
}

/// Orbital energies `ε_p = f_pp`.
///
/// File-supplied energies are returned verbatim when they agree with the
/// computed diagonal to 1e-6 Ha; otherwise a warning is logged and the
/// computed values are used.
pub fn fock_diagonal<T: Real>(ints: &MoIntegrals<T>, occ: &OccupiedSpace) -> FockDiagonal<T> {
    let computed: Vec<T> = (0..ints.n_orbitals())
        .map(|p| fock_element(ints, occ, p, p))
        .collect();
    match ints.orbital_energies() {
        Some(file) => {
            let limit = cast::<T>(ORBITAL_ENERGY_AGREEMENT);
            let worst = file
                .iter()
                .zip(&computed)
                .map(|(a, b)| (*a - *b).abs())
                .fold(T::zero(), T::max);
            if worst > limit {
                log::warn!(
                    "file orbital energies differ from the Fock diagonal by up to {worst:e} Ha; \
                     using computed values"
                );
                FockDiagonal {
                    values: computed,
                    source: OrbitalEnergySource::Computed,
                }
            } else {
                FockDiagonal {
                    values: file.to_vec(),
                    source: OrbitalEnergySource::File,
                }
            }
        }
        None => FockDiagonal {
            values: computed,
            source: OrbitalEnergySource::Computed,
        },
    }
}
