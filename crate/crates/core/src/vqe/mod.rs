//! Statevector variational eigensolver with a UCCSD ansatz under the
//! Jordan–Wigner mapping.

mod ansatz;
mod jw;
mod pauli;
mod statevector;

use std::cell::Cell;

use num_complex::Complex;
use thiserror::Error;

use crate::integrals::MoIntegrals;
use crate::scalar::{cast, to_f64, Real};
use crate::solvers::{ActiveSpace, CorrelationResult, Method, SolverError, SubspaceSpec};

pub use ansatz::{AnsatzState, Excitation};
pub use jw::{jordan_wigner, ladder, max_imaginary};
pub use pauli::{PauliString, PauliSum, PauliTerm, QubitHamiltonian};
pub use statevector::{basis_state, expectation, normalize, sector_matrix, to_dense};

/// Default qubit cap; a statevector holds at most `2^16` amplitudes.
pub const DEFAULT_QUBIT_CAP: usize = 16;

#[derive(Debug, Error)]
pub enum VqeError {
    #[error("qubit Hamiltonian has imaginary coefficient residue {0:e}")]
    NonHermitian(f64),
    #[error("statevector has {found} amplitudes, expected {expected}")]
    Dimension { expected: usize, found: usize },
    #[error("statevector norm² is {0}, expected 1")]
    NotNormalized(f64),
    #[error("expectation value has imaginary part {0:e}")]
    ImaginaryExpectation(f64),
    #[error("subspace needs {required} qubits but the cap is {allowed}")]
    CapExceeded { required: usize, allowed: usize },
    #[error("ansatz has {found} parameters, the Hamiltonian needs {expected}")]
    ParameterCount { expected: usize, found: usize },
    #[error("optimizer stopped after {evaluations} evaluations without converging (best energy {best_energy})")]
    Convergence {
        best_energy: f64,
        evaluations: usize,
    },
    #[error("optimizer failed: {0}")]
    Optimizer(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VqeOptions {
    /// Stop when the energy changes by less than this (Hartree).
    pub tol: f64,
    pub max_iterations: usize,
    pub qubit_cap: usize,
    /// Initial trust-region radius for the amplitudes.
    pub initial_step: f64,
}

impl Default for VqeOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iterations: 5000,
            qubit_cap: DEFAULT_QUBIT_CAP,
            initial_step: 0.1,
        }
    }
}

/// Outcome of one optimization.
#[derive(Debug, Clone, PartialEq)]
pub struct VqeRun<T> {
    pub energy: T,
    /// Energy of the zero-amplitude (reference) state.
    pub reference_energy: T,
    pub parameters: Vec<T>,
    pub evaluations: usize,
}

fn energy_of<T: Real>(
    h: &QubitHamiltonian<T>,
    ansatz: &AnsatzState<T>,
    parameters: &[T],
) -> Result<T, VqeError> {
    let psi: Vec<Complex<T>> = ansatz
        .amplitudes(parameters)
        .into_iter()
        .map(|a| Complex::new(a, T::zero()))
        .collect();
    expectation(h, &psi)
}

/// Minimizes `⟨ψ(θ)|H|ψ(θ)⟩` with COBYLA from the amplitudes in `ansatz`.
pub fn vqe_optimize<T: Real>(
    h: &QubitHamiltonian<T>,
    ansatz: &AnsatzState<T>,
    options: &VqeOptions,
) -> Result<VqeRun<T>, VqeError> {
    if h.n_qubits != ansatz.n_qubits {
        return Err(VqeError::Dimension {
            expected: 1 << h.n_qubits,
            found: 1 << ansatz.n_qubits,
        });
    }
    let reference_energy = energy_of(h, ansatz, &vec![T::zero(); ansatz.n_parameters()])?;
    if ansatz.n_parameters() == 0 {
        return Ok(VqeRun {
            energy: reference_energy,
            reference_energy,
            parameters: Vec::new(),
            evaluations: 1,
        });
    }

    let evaluations = Cell::new(0usize);
    let failure: Cell<Option<String>> = Cell::new(None);
    let objective = |x: &[f64], _: &mut ()| -> f64 {
        evaluations.set(evaluations.get() + 1);
        let theta: Vec<T> = x.iter().map(|&v| cast(v)).collect();
        match energy_of(h, ansatz, &theta) {
            Ok(e) => to_f64(e),
            Err(err) => {
                failure.set(Some(err.to_string()));
                f64::INFINITY
            }
        }
    };
    let x0: Vec<f64> = ansatz.parameters.iter().map(|&v| to_f64(v)).collect();
    let bounds = vec![(-std::f64::consts::PI, std::f64::consts::PI); x0.len()];
    let no_constraints: &[fn(&[f64], &mut ()) -> f64] = &[];
    let stop = cobyla::StopTols {
        ftol_abs: options.tol,
        ..Default::default()
    };
    let outcome = cobyla::minimize(
        objective,
        &x0,
        &bounds,
        no_constraints,
        (),
        options.max_iterations,
        cobyla::RhoBeg::All(options.initial_step),
        Some(stop),
    );
    if let Some(msg) = failure.take() {
        return Err(VqeError::Optimizer(msg));
    }
    let (x, _) = match outcome {
        Ok((cobyla::SuccessStatus::MaxEvalReached, _, best)) => {
            return Err(VqeError::Convergence {
                best_energy: best,
                evaluations: evaluations.get(),
            })
        }
        Ok((_, x, y)) => (x, y),
        Err((status, _, _)) => return Err(VqeError::Optimizer(format!("{status:?}"))),
    };
    let parameters: Vec<T> = x.iter().map(|&v| cast(v)).collect();
    // recompute in T so the reported energy matches the returned amplitudes
    let energy = energy_of(h, ansatz, &parameters)?;
    let (energy, parameters) = if energy <= reference_energy {
        (energy, parameters)
    } else {
        (reference_energy, vec![T::zero(); parameters.len()])
    };
    Ok(VqeRun {
        energy,
        reference_energy,
        parameters,
        evaluations: evaluations.get(),
    })
}

/// Solver-facing entry: map, build the ansatz, optimize.
pub fn vqe_energy<T: Real>(
    ints: &MoIntegrals<T>,
    sub: &SubspaceSpec,
    options: &VqeOptions,
) -> Result<CorrelationResult<T>, SolverError> {
    let h = jordan_wigner(ints, sub, options.qubit_cap)?;
    let e_ref = crate::reference::hf_reference_energy(ints, &sub.occupied)?;
    if sub.virtuals().is_empty() || sub.occupied.active().is_empty() {
        return Ok(CorrelationResult::new(
            Method::Vqe,
            sub.clone(),
            e_ref,
            T::zero(),
        ));
    }
    let space = ActiveSpace::new(ints, sub);
    let ansatz = AnsatzState::new(space.n_occupied, space.n_orbitals() - space.n_occupied);
    let run = vqe_optimize(&h, &ansatz, options)?;
    let mut result = CorrelationResult::new(Method::Vqe, sub.clone(), e_ref, run.energy - e_ref);
    result.e_total = run.energy;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::OccupiedSpace;
    use crate::solvers::fci_energy;

    fn two_orbital() -> MoIntegrals<f64> {
        let mut ints = MoIntegrals::new(2, 2).unwrap();
        ints.set_h(0, 0, -1.25).unwrap();
        ints.set_h(1, 1, -0.47).unwrap();
        ints.set_eri(0, 0, 0, 0, 0.67).unwrap();
        ints.set_eri(1, 1, 1, 1, 0.70).unwrap();
        ints.set_eri(0, 0, 1, 1, 0.66).unwrap();
        ints.set_eri(0, 1, 0, 1, 0.18).unwrap();
        ints.set_e_nuclear(0.71);
        ints
    }

    #[test]
    fn reference_state_energy_is_hf() {
        let ints = two_orbital();
        let sub = SubspaceSpec::full(OccupiedSpace::closed_shell(&ints));
        let h = jordan_wigner(&ints, &sub, 16).unwrap();
        let ansatz = AnsatzState::new(1, 1);
        let e = energy_of(&h, &ansatz, &[0.0, 0.0]).unwrap();
        let hf = crate::reference::hf_reference_energy(&ints, &sub.occupied).unwrap();
        assert!((e - hf).abs() < 1e-14);
    }

    #[test]
    fn two_electron_optimum_is_exact() {
        let ints = two_orbital();
        let sub = SubspaceSpec::full(OccupiedSpace::closed_shell(&ints));
        let vqe = vqe_energy(&ints, &sub, &VqeOptions::default()).unwrap();
        let fci = fci_energy(&ints, &sub, 16).unwrap();
        assert!(vqe.e_total >= fci.e_total - 1e-9);
        assert!(
            vqe.e_total - fci.e_total < 1e-6,
            "{} vs {}",
            vqe.e_total,
            fci.e_total
        );
    }

    #[test]
    fn empty_virtuals_return_reference() {
        let ints = two_orbital();
        let sub = SubspaceSpec::new(OccupiedSpace::closed_shell(&ints), []).unwrap();
        let r = vqe_energy(&ints, &sub, &VqeOptions::default()).unwrap();
        assert_eq!(r.e_corr, 0.0);
    }

    #[test]
    fn exhausted_budget_reports_best_energy() {
        let ints = two_orbital();
        let sub = SubspaceSpec::full(OccupiedSpace::closed_shell(&ints));
        let h = jordan_wigner(&ints, &sub, 16).unwrap();
        let opts = VqeOptions {
            max_iterations: 3,
            ..Default::default()
        };
        match vqe_optimize(&h, &AnsatzState::new(1, 1), &opts) {
            Err(VqeError::Convergence {
                best_energy,
                evaluations,
            }) => {
                assert!(best_energy.is_finite());
                assert!(evaluations <= 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
