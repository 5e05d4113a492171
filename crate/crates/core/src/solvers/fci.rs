//! Exact diagonalization in the determinant basis.
//!
//! Determinants are pairs of alpha/beta occupation strings over the active
//! orbitals, stored as one spin-orbital bitstring (alpha in bits `0..n`,
//! beta in bits `n..2n`). Alpha strings form the outer loop, both in
//! lexicographic order of their occupied index lists, so the reference
//! determinant is always first.

use rayon::prelude::*;

use crate::bits::{apply_ladder, combinations, ones};
use crate::eigen::{
    davidson_lowest, symmetric_eigenvalues, DavidsonOptions, SymmetricMatrix, SymmetricOperator,
};
use crate::integrals::MoIntegrals;
use crate::scalar::{cast, to_f64, tolerance, Real};

use super::{reference_energy, ActiveSpace, CorrelationResult, Method, SolverError, SubspaceSpec};

/// Up to this many determinants the Hamiltonian is stored dense and fully
/// diagonalized; above it the lowest root comes from Davidson iteration.
pub const DENSE_LIMIT: usize = 2000;

const SYMMETRY_TOLERANCE: f64 = 1e-10;

/// Ms = 0 determinants with `n_occupied` electrons of each spin.
pub fn ci_determinants(n_orbitals: usize, n_occupied: usize) -> Vec<u64> {
    let strings = combinations(n_orbitals, n_occupied);
    let mut dets = Vec::with_capacity(strings.len() * strings.len());
    for &alpha in &strings {
        for &beta in &strings {
            dets.push(alpha | (beta << n_orbitals));
        }
    }
    dets
}

/// Slater–Condon evaluation over a fixed active space.
struct SlaterCondon<'a, T> {
    space: &'a ActiveSpace<T>,
    n: usize,
}

impl<'a, T: Real> SlaterCondon<'a, T> {
    fn new(space: &'a ActiveSpace<T>) -> Self {
        Self {
            space,
            n: space.n_orbitals(),
        }
    }

    #[inline]
    fn split(&self, so: usize) -> (usize, usize) {
        (so % self.n, so / self.n)
    }

    #[inline]
    fn one_body(&self, p: usize, q: usize) -> T {
        let (sp, ip) = self.split(p);
        let (sq, iq) = self.split(q);
        if ip == iq {
            self.space.h(sp, sq)
        } else {
            T::zero()
        }
    }

    /// `⟨pq|rs⟩ = (pr|qs)` with spin selection.
    #[inline]
    fn physicist(&self, p: usize, q: usize, r: usize, s: usize) -> T {
        let (sp, ip) = self.split(p);
        let (sq, iq) = self.split(q);
        let (sr, ir) = self.split(r);
        let (ss, is) = self.split(s);
        if ip == ir && iq == is {
            self.space.eri(sp, sr, sq, ss)
        } else {
            T::zero()
        }
    }

    #[inline]
    fn antisymmetrized(&self, p: usize, q: usize, r: usize, s: usize) -> T {
        self.physicist(p, q, r, s) - self.physicist(p, q, s, r)
    }

    /// `⟨bra|H|ket⟩` without the core constant.
    fn element(&self, bra: u64, ket: u64) -> T {
        let diff = bra ^ ket;
        match diff.count_ones() {
            0 => {
                let mut e = T::zero();
                let mut two_body = T::zero();
                for p in ones(ket) {
                    e = e + self.one_body(p, p);
                    for q in ones(ket) {
                        two_body = two_body + self.antisymmetrized(p, q, p, q);
                    }
                }
                e + two_body * cast(0.5)
            }
            2 => {
                let p = (ket & diff).trailing_zeros() as usize;
                let a = (bra & diff).trailing_zeros() as usize;
                let (_, negative) = apply_ladder(ket, &[(a, true), (p, false)])
                    .expect("single excitation connects the pair");
                let mut v = self.one_body(a, p);
                for q in ones(ket & !(1u64 << p)) {
                    v = v + self.antisymmetrized(a, q, p, q);
                }
                if negative {
                    -v
                } else {
                    v
                }
            }
            4 => {
                let mut holes = ones(ket & diff);
                let (p, q) = (holes.next().unwrap(), holes.next().unwrap());
                let mut parts = ones(bra & diff);
                let (a, b) = (parts.next().unwrap(), parts.next().unwrap());
                let (_, negative) =
                    apply_ladder(ket, &[(a, true), (b, true), (q, false), (p, false)])
                        .expect("double excitation connects the pair");
                let v = self.antisymmetrized(a, b, p, q);
                if negative {
                    -v
                } else {
                    v
                }
            }
            _ => T::zero(),
        }
    }
}

/// Dense CI Hamiltonian (without the core constant) over
/// [`ci_determinants`]. Rows are built in parallel; each entry depends only
/// on its own pair of determinants.
pub fn ci_hamiltonian<T: Real>(space: &ActiveSpace<T>) -> SymmetricMatrix<T> {
    let dets = ci_determinants(space.n_orbitals(), space.n_occupied);
    let dim = dets.len();
    let sc = SlaterCondon::new(space);
    let mut data = vec![T::zero(); dim * dim];
    data.par_chunks_mut(dim.max(1))
        .zip(dets.par_iter())
        .for_each(|(row, &bra)| {
            for (slot, &ket) in row.iter_mut().zip(&dets) {
                *slot = sc.element(bra, ket);
            }
        });
    SymmetricMatrix::from_row_major(dim, data).expect("square by construction")
}

/// Row-sparse Hamiltonian for spaces above [`DENSE_LIMIT`].
struct SparseHamiltonian<T> {
    rows: Vec<Vec<(usize, T)>>,
}

impl<T: Real> SparseHamiltonian<T> {
    fn build(space: &ActiveSpace<T>) -> Self {
        let dets = ci_determinants(space.n_orbitals(), space.n_occupied);
        let sc = SlaterCondon::new(space);
        let rows = dets
            .par_iter()
            .map(|&bra| {
                dets.iter()
                    .enumerate()
                    .filter(|(_, &ket)| (bra ^ ket).count_ones() <= 4)
                    .map(|(j, &ket)| (j, sc.element(bra, ket)))
                    .filter(|(_, v)| *v != T::zero())
                    .collect()
            })
            .collect();
        Self { rows }
    }

    fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                let mirror = self.rows[j]
                    .binary_search_by_key(&i, |&(c, _)| c)
                    .map(|k| self.rows[j][k].1)
                    .unwrap_or_else(|_| T::zero());
                worst = worst.max((v - mirror).abs());
            }
        }
        worst
    }
}

impl<T: Real> SymmetricOperator<T> for SparseHamiltonian<T> {
    fn dim(&self) -> usize {
        self.rows.len()
    }

    fn diagonal(&self) -> Vec<T> {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.binary_search_by_key(&i, |&(c, _)| c)
                    .map(|k| row[k].1)
                    .unwrap_or_else(|_| T::zero())
            })
            .collect()
    }

    fn apply(&self, x: &[T], y: &mut [T]) {
        y.par_iter_mut()
            .zip(self.rows.par_iter())
            .for_each(|(yi, row)| {
                *yi = row.iter().map(|&(j, v)| v * x[j]).sum();
            });
    }
}

fn check_cap(sub: &SubspaceSpec, cap: usize) -> Result<(), SolverError> {
    let required = sub.n_spin_orbitals();
    if required > cap || required > 64 {
        return Err(SolverError::CapExceeded {
            required,
            allowed: cap.min(64),
        });
    }
    Ok(())
}

/// Every eigenvalue of the CI Hamiltonian for `sub`, ascending, including
/// the core constant. Dense only.
pub fn fci_spectrum<T: Real>(
    ints: &MoIntegrals<T>,
    sub: &SubspaceSpec,
    cap: usize,
) -> Result<Vec<T>, SolverError> {
    check_cap(sub, cap)?;
    let space = ActiveSpace::new(ints, sub);
    let h = ci_hamiltonian(&space);
    let asym = h.asymmetry();
    if asym > tolerance(SYMMETRY_TOLERANCE) {
        return Err(SolverError::NonSymmetric(to_f64(asym)));
    }
    Ok(symmetric_eigenvalues(&h)?
        .into_iter()
        .map(|e| e + space.core_energy)
        .collect())
}

/// Lowest eigenvalue of the CI Hamiltonian over `O ∪ V_S`.
pub fn fci_energy<T: Real>(
    ints: &MoIntegrals<T>,
    sub: &SubspaceSpec,
    cap: usize,
) -> Result<CorrelationResult<T>, SolverError> {
    check_cap(sub, cap)?;
    let e_ref = reference_energy(ints, sub)?;
    if sub.virtuals().is_empty() || sub.occupied.active().is_empty() {
        // a single determinant: the reference itself
        return Ok(CorrelationResult::new(
            Method::Fci,
            sub.clone(),
            e_ref,
            T::zero(),
        ));
    }
    let space = ActiveSpace::new(ints, sub);
    let n_dets = combinations(space.n_orbitals(), space.n_occupied)
        .len()
        .pow(2);
    let lowest = if n_dets <= DENSE_LIMIT {
        let h = ci_hamiltonian(&space);
        let asym = h.asymmetry();
        if asym > tolerance(SYMMETRY_TOLERANCE) {
            return Err(SolverError::NonSymmetric(to_f64(asym)));
        }
        symmetric_eigenvalues(&h)?[0]
    } else {
        let h = SparseHamiltonian::build(&space);
        let asym = h.asymmetry();
        if asym > tolerance(SYMMETRY_TOLERANCE) {
            return Err(SolverError::NonSymmetric(to_f64(asym)));
        }
        davidson_lowest(&h, DavidsonOptions::default())?.0
    };
    let e_total = lowest + space.core_energy;
    let mut result = CorrelationResult::new(Method::Fci, sub.clone(), e_ref, e_total - e_ref);
    // keep e_total exactly as diagonalized
    result.e_total = e_total;
    Ok(result)
}
