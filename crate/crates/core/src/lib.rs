//! Virtual-orbital fragmentation: many-body expansion of correlation
//! energies over fragments of the virtual space.
//!
//! The numerical core is generic over [`scalar::Real`]; the aliases at the
//! crate root fix it to `f64` (and `f32` where useful).
//!
//! ```
//! use fvo::{mbe::mbe_expand, partition_blocks, MbeOptions, Method, OccupiedSpace};
//!
//! # fn main() -> Result<(), Box<dyn std::error::Error>> {
//! let ints: fvo::MoIntegrals = fvo::integrals::parse_fcidump_str(fvo::fixtures::H4_631G)?;
//! let partition = partition_blocks(OccupiedSpace::closed_shell(&ints), 3)?;
//! let options = MbeOptions { max_order: 3, compute_full: true, ..Default::default() };
//! let report = mbe_expand(&ints, &partition, Method::Fci, &options)?;
//! let last = report.errors_vs_full.unwrap().pop().unwrap();
//! assert!(last.hartree.abs() < 1e-10);
//! # Ok(())
//! # }
//! ```

pub mod bits;
pub mod eigen;
pub mod fixtures;
pub mod fragmentation;
pub mod integrals;
pub mod mbe;
pub mod reference;
pub mod resources;
pub mod scalar;
pub mod solvers;
pub mod vqe;

pub use fragmentation::{
    partition_blocks, partition_by_centroid, partition_by_energy, partition_explicit, subset_union,
    OrbitalCentroids, OrbitalPartition, PartitionError, PartitionStrategy, SubsetKey,
};
pub use integrals::IntegralsError;
pub use mbe::{MbeError, MbeOptions};
pub use reference::{OccupiedSpace, ReferenceError};
pub use resources::{ansatz_estimate, budget_for_plan, qubit_count, AnsatzEstimate, QubitBudget};
pub use scalar::{Real, HARTREE_TO_KCAL_PER_MOL};
pub use solvers::{Method, SolverError, SolverOptions, SubspaceSpec};
pub use vqe::{VqeError, VqeOptions};

pub type MoIntegrals = integrals::MoIntegrals<f64>;
pub type MoIntegrals32 = integrals::MoIntegrals<f32>;
pub type CorrelationResult = solvers::CorrelationResult<f64>;
pub type MbeReport = mbe::MbeReport<f64>;
pub type MbeTerm = mbe::MbeTerm<f64>;
pub type SpatialExpansionInput = mbe::SpatialExpansionInput<f64>;
pub type HierarchicalReport = mbe::HierarchicalReport<f64>;
pub type QubitHamiltonian = vqe::QubitHamiltonian<f64>;
pub type AnsatzState = vqe::AnsatzState<f64>;
pub type Solver<'a> = solvers::Solver<'a, f64>;
