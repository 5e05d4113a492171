//! Correlation-energy kernels evaluated on `O ∪ V_S`: the full occupied
//! space plus a chosen subset of virtual orbitals.

mod fci;
mod mp2;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::eigen::EigenError;
use crate::integrals::MoIntegrals;
use crate::reference::{hf_reference_energy, OccupiedSpace, ReferenceError};
use crate::scalar::{cast, Real};
use crate::vqe::{self, VqeError, VqeOptions};

pub use fci::{ci_determinants, ci_hamiltonian, fci_energy, fci_spectrum, DENSE_LIMIT};
pub use mp2::{mp2_correlation, mp2_energy, mp2_pair_contributions, PairContributions};

/// Spin-orbital cap for exact diagonalization unless configured otherwise.
pub const DEFAULT_FCI_CAP: usize = 16;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("unknown solver {0:?} (expected mp2, fci or vqe)")]
    UnknownMethod(String),
    #[error("invalid subspace: {0}")]
    Subspace(String),
    #[error("non-negative MP2 denominator {denominator:e} for (i={i}, j={j}, a={a}, b={b})")]
    DegenerateGap {
        i: usize,
        j: usize,
        a: usize,
        b: usize,
        denominator: f64,
    },
    #[error("no correlated occupied orbitals (all occupied orbitals are frozen)")]
    NoActiveOccupied,
    #[error("subspace needs {required} spin-orbitals but the cap is {allowed}")]
    CapExceeded { required: usize, allowed: usize },
    #[error("CI Hamiltonian asymmetric by {0:e}")]
    NonSymmetric(f64),
    #[error(transparent)]
    Reference(#[from] ReferenceError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error(transparent)]
    Vqe(#[from] VqeError),
}

/// The orbital space of one subset calculation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubspaceSpec {
    pub occupied: OccupiedSpace,
    virtuals: Vec<usize>,
}

impl SubspaceSpec {
    /// Virtual indices are sorted; they must be in range and unoccupied.
    pub fn new(
        occupied: OccupiedSpace,
        virtuals: impl IntoIterator<Item = usize>,
    ) -> Result<Self, SolverError> {
        let mut virtuals: Vec<usize> = virtuals.into_iter().collect();
        virtuals.sort_unstable();
        virtuals.dedup();
        if let Some(&p) = virtuals.iter().find(|&&p| p >= occupied.n_orbitals()) {
            return Err(SolverError::Subspace(format!(
                "virtual orbital {p} outside basis of {}",
                occupied.n_orbitals()
            )));
        }
        if let Some(&p) = virtuals.iter().find(|&&p| occupied.is_occupied(p)) {
            return Err(SolverError::Subspace(format!(
                "orbital {p} is both occupied and virtual"
            )));
        }
        Ok(Self { occupied, virtuals })
    }

    /// Occupied space plus every virtual orbital.
    pub fn full(occupied: OccupiedSpace) -> Self {
        let virtuals = occupied.virtuals();
        Self { occupied, virtuals }
    }

    pub fn virtuals(&self) -> &[usize] {
        &self.virtuals
    }

    /// Spin-orbitals entering the correlation treatment.
    pub fn n_spin_orbitals(&self) -> usize {
        2 * (self.occupied.active().len() + self.virtuals.len())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Mp2,
    Fci,
    Vqe,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Mp2 => "mp2",
            Method::Fci => "fci",
            Method::Vqe => "vqe",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Method {
    type Err = SolverError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mp2" => Ok(Method::Mp2),
            "fci" => Ok(Method::Fci),
            "vqe" => Ok(Method::Vqe),
            _ => Err(SolverError::UnknownMethod(s.to_string())),
        }
    }
}

/// Outcome of one subset calculation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationResult<T> {
    pub e_corr: T,
    pub e_total: T,
    pub e_reference: T,
    pub method: Method,
    pub subspace: SubspaceSpec,
    /// Frobenius norm of the off-diagonal virtual–virtual Fock block (MP2).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fock_offdiagonal_norm: Option<T>,
    /// MP2 used diagonal denominators although the virtual Fock block is
    /// not diagonal (norm above 1e-6).
    pub non_canonical: bool,
}

impl<T: Real> CorrelationResult<T> {
    pub(crate) fn new(method: Method, subspace: SubspaceSpec, e_reference: T, e_corr: T) -> Self {
        Self {
            e_corr,
            e_total: e_reference + e_corr,
            e_reference,
            method,
            subspace,
            fock_offdiagonal_norm: None,
            non_canonical: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Maximum spin-orbitals for exact diagonalization.
    pub fci_cap: usize,
    pub vqe: VqeOptions,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            fci_cap: DEFAULT_FCI_CAP,
            vqe: VqeOptions::default(),
        }
    }
}

/// Routes a subset calculation to the kernel named by `tag`.
pub fn solve<T: Real>(
    tag: &str,
    ints: &MoIntegrals<T>,
    sub: &SubspaceSpec,
    opts: &SolverOptions,
) -> Result<CorrelationResult<T>, SolverError> {
    solve_with(tag.parse()?, ints, sub, opts)
}

pub fn solve_with<T: Real>(
    method: Method,
    ints: &MoIntegrals<T>,
    sub: &SubspaceSpec,
    opts: &SolverOptions,
) -> Result<CorrelationResult<T>, SolverError> {
    match method {
        Method::Mp2 => mp2_energy(ints, sub),
        Method::Fci => fci_energy(ints, sub, opts.fci_cap),
        Method::Vqe => vqe::vqe_energy(ints, sub, &opts.vqe),
    }
}

/// A solver bound to one integral set; the unit the expansion engine calls.
#[derive(Debug, Clone, Copy)]
pub struct Solver<'a, T> {
    pub ints: &'a MoIntegrals<T>,
    pub method: Method,
    pub options: SolverOptions,
}

impl<'a, T: Real> Solver<'a, T> {
    pub fn new(ints: &'a MoIntegrals<T>, method: Method) -> Self {
        Self {
            ints,
            method,
            options: SolverOptions::default(),
        }
    }

    pub fn with_options(mut self, options: SolverOptions) -> Self {
        self.options = options;
        self
    }

    pub fn solve(&self, sub: &SubspaceSpec) -> Result<CorrelationResult<T>, SolverError> {
        solve_with(self.method, self.ints, sub, &self.options)
    }
}

/// Integrals restricted to the correlated orbitals of a subspace, with the
/// frozen core folded into a constant and an effective one-body operator.
///
/// Active orbitals are numbered `0..n`: correlated occupied first, then the
/// subset virtuals, each ascending.
#[derive(Debug, Clone)]
pub struct ActiveSpace<T> {
    pub orbitals: Vec<usize>,
    /// Doubly occupied orbitals in the reference (the first `n_occupied`).
    pub n_occupied: usize,
    /// Nuclear repulsion plus frozen-core energy.
    pub core_energy: T,
    h: Vec<T>,
    eri: Vec<T>,
}

impl<T: Real> ActiveSpace<T> {
    pub fn new(ints: &MoIntegrals<T>, sub: &SubspaceSpec) -> Self {
        let frozen = sub.occupied.frozen();
        let orbitals: Vec<usize> = sub
            .occupied
            .active()
            .iter()
            .chain(sub.virtuals())
            .copied()
            .collect();
        let n = orbitals.len();
        let two = cast::<T>(2.0);

        let mut core_energy = ints.e_nuclear();
        for &c in frozen {
            core_energy = core_energy + two * ints.h(c, c);
            for &d in frozen {
                core_energy = core_energy + two * ints.eri(c, c, d, d) - ints.eri(c, d, d, c);
            }
        }
        let mut h = vec![T::zero(); n * n];
        for (i, &p) in orbitals.iter().enumerate() {
            for (j, &q) in orbitals.iter().enumerate() {
                h[i * n + j] = frozen.iter().fold(ints.h(p, q), |acc, &c| {
                    acc + two * ints.eri(p, q, c, c) - ints.eri(p, c, c, q)
                });
            }
        }
        let mut eri = vec![T::zero(); n * n * n * n];
        for (i, &p) in orbitals.iter().enumerate() {
            for (j, &q) in orbitals.iter().enumerate() {
                for (k, &r) in orbitals.iter().enumerate() {
                    for (l, &s) in orbitals.iter().enumerate() {
                        eri[((i * n + j) * n + k) * n + l] = ints.eri(p, q, r, s);
                    }
                }
            }
        }
        Self {
            n_occupied: sub.occupied.active().len(),
            orbitals,
            core_energy,
            h,
            eri,
        }
    }

    pub fn n_orbitals(&self) -> usize {
        self.orbitals.len()
    }

    #[inline]
    pub fn h(&self, p: usize, q: usize) -> T {
        self.h[p * self.orbitals.len() + q]
    }

    /// `(pq|rs)` over active indices.
    #[inline]
    pub fn eri(&self, p: usize, q: usize, r: usize, s: usize) -> T {
        let n = self.orbitals.len();
        self.eri[((p * n + q) * n + r) * n + s]
    }
}

/// Reference energy for a subspace, shared by every kernel.
pub(crate) fn reference_energy<T: Real>(
    ints: &MoIntegrals<T>,
    sub: &SubspaceSpec,
) -> Result<T, SolverError> {
    Ok(hf_reference_energy(ints, &sub.occupied)?)
}
