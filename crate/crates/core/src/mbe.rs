//! Many-body expansion over virtual fragments and the two-body spatial
//! composition on top of it.
//!
//! Subset energies are correlation energies, so `E(O)` sits under the empty
//! key as zero and the increments are
//!
//! ```text
//! ΔE_S = Σ_{T⊆S} (−1)^{|S|−|T|} E(O ∪ V_T)
//! E^(n) = Σ_{|S|≤n} ΔE_S
//! ```

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::Num;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::fragmentation::{subset_union, OrbitalPartition, PartitionError, SubsetKey};
use crate::integrals::MoIntegrals;
use crate::scalar::{cast, Real, HARTREE_TO_KCAL_PER_MOL};
use crate::solvers::{Method, Solver, SolverError, SolverOptions, SubspaceSpec};

#[derive(Debug, Error, Clone)]
pub enum MbeError {
    #[error("subset energy for {0} is missing")]
    MissingSubset(SubsetKey),
    #[error("max_order {max_order} outside 1..={n_fragments}")]
    InvalidOrder {
        max_order: usize,
        n_fragments: usize,
    },
    #[error("subset {key}: {source}")]
    Subset {
        key: SubsetKey,
        #[source]
        source: Arc<SolverError>,
    },
    #[error("dimer ({i}, {j}) references a monomer outside 1..={n_monomers}")]
    DanglingPair {
        i: usize,
        j: usize,
        n_monomers: usize,
    },
    #[error("dimer ({0}, {0}) pairs a monomer with itself")]
    SelfPair(usize),
    #[error("dimer ({i}, {j}) given twice with different energies")]
    InconsistentPair { i: usize, j: usize },
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("spatial fragment {fragment}: {source}")]
    Spatial {
        fragment: String,
        #[source]
        source: Box<MbeError>,
    },
}

/// One expansion increment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MbeTerm<E> {
    pub key: SubsetKey,
    pub order: usize,
    pub delta_e: E,
}

/// `ΔE_key` by inclusion–exclusion over every subset of `key`.
pub fn delta_term<E: Num + Clone>(
    energies: &BTreeMap<SubsetKey, E>,
    key: SubsetKey,
) -> Result<MbeTerm<E>, MbeError> {
    let order = key.order();
    let mut delta = E::zero();
    for sub in key.subsets() {
        let e = energies
            .get(&sub)
            .ok_or(MbeError::MissingSubset(sub))?
            .clone();
        if (order - sub.order()).is_multiple_of(2) {
            delta = delta + e;
        } else {
            delta = delta - e;
        }
    }
    Ok(MbeTerm {
        key,
        order,
        delta_e: delta,
    })
}

/// Terms for every key of order ≤ `max_order` over `n_fragments`, in key
/// order (the empty key first).
pub fn expansion_terms<E: Num + Clone>(
    energies: &BTreeMap<SubsetKey, E>,
    n_fragments: usize,
    max_order: usize,
) -> Result<Vec<MbeTerm<E>>, MbeError> {
    SubsetKey::all_up_to(n_fragments, max_order)
        .into_iter()
        .map(|k| delta_term(energies, k))
        .collect()
}

/// Per-order sums `Σ_{|S|=n} ΔE_S` for `n = 0..=max_order`.
pub fn order_sums<E: Num + Clone>(terms: &[MbeTerm<E>], max_order: usize) -> Vec<E> {
    let mut sums = vec![E::zero(); max_order + 1];
    for t in terms {
        if t.order <= max_order {
            sums[t.order] = sums[t.order].clone() + t.delta_e.clone();
        }
    }
    sums
}

/// `E^(n)` for `n = 1..=max_order`. The order-0 term (`E(O)`, zero for
/// correlation energies) is included in every total.
pub fn truncated_totals<E: Num + Clone>(terms: &[MbeTerm<E>], max_order: usize) -> Vec<E> {
    let sums = order_sums(terms, max_order);
    let mut acc = sums[0].clone();
    sums[1..]
        .iter()
        .map(|s| {
            acc = acc.clone() + s.clone();
            acc.clone()
        })
        .collect()
}

/// Source of subset correlation energies `E(O ∪ V_S)`.
pub trait SubsetOracle<T>: Sync {
    fn correlation(&self, key: SubsetKey, sub: &SubspaceSpec) -> Result<T, SolverError>;

    fn tag(&self) -> String;
}

impl<'a, T: Real> SubsetOracle<T> for Solver<'a, T> {
    fn correlation(&self, _key: SubsetKey, sub: &SubspaceSpec) -> Result<T, SolverError> {
        Ok(self.solve(sub)?.e_corr)
    }

    fn tag(&self) -> String {
        self.method.tag().to_string()
    }
}

/// A closure used as an oracle, mostly for synthetic energies.
pub struct FnOracle<F> {
    pub name: String,
    pub f: F,
}

impl<T, F> SubsetOracle<T> for FnOracle<F>
where
    F: Fn(SubsetKey, &SubspaceSpec) -> Result<T, SolverError> + Sync,
{
    fn correlation(&self, key: SubsetKey, sub: &SubspaceSpec) -> Result<T, SolverError> {
        (self.f)(key, sub)
    }

    fn tag(&self) -> String {
        self.name.clone()
    }
}

type Slot<T> = Arc<OnceLock<Result<T, Arc<SolverError>>>>;

/// Evaluates each key at most once, also under concurrent requests.
pub struct SubsetCache<T> {
    slots: Mutex<HashMap<SubsetKey, Slot<T>>>,
    evaluations: AtomicUsize,
}

impl<T: Clone> Default for SubsetCache<T> {
    fn default() -> Self {
        Self {
            slots: Mutex::new(HashMap::new()),
            evaluations: AtomicUsize::new(0),
        }
    }
}

impl<T: Clone> SubsetCache<T> {
    pub fn get_or_eval(
        &self,
        key: SubsetKey,
        eval: impl FnOnce() -> Result<T, SolverError>,
    ) -> Result<T, MbeError> {
        let slot = {
            let mut slots = self.slots.lock().expect("cache lock");
            slots.entry(key).or_default().clone()
        };
        slot.get_or_init(|| {
            self.evaluations.fetch_add(1, Ordering::SeqCst);
            eval().map_err(Arc::new)
        })
        .clone()
        .map_err(|source| MbeError::Subset { key, source })
    }

    /// Number of oracle calls so far.
    pub fn evaluations(&self) -> usize {
        self.evaluations.load(Ordering::SeqCst)
    }
}

/// Error of a truncated total against the full-space energy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderError<T> {
    pub order: usize,
    pub hartree: T,
    pub kcal_per_mol: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MbeReport<T> {
    pub solver: String,
    pub n_fragments: usize,
    pub max_order: usize,
    /// `E(O)`, when known.
    pub e_reference: Option<T>,
    pub subset_energies: BTreeMap<SubsetKey, T>,
    pub terms: Vec<MbeTerm<T>>,
    /// `Σ_{|S|=n} ΔE_S` for `n = 0..=max_order`.
    pub order_sums: Vec<T>,
    /// `E^(n)` for `n = 1..=max_order`.
    pub truncated_totals: Vec<T>,
    pub full_energy: Option<T>,
    pub errors_vs_full: Option<Vec<OrderError<T>>>,
    /// Oracle calls made for this report.
    pub evaluations: usize,
    /// Subsets needed through each order, `n = 1..=max_order`.
    pub cumulative_subsets: Vec<usize>,
}

impl<T: Real> MbeReport<T> {
    /// Total energy `E(O) + E^(n)`, when the reference is known.
    pub fn total_energy(&self, order: usize) -> Option<T> {
        Some(self.e_reference? + *self.truncated_totals.get(order.checked_sub(1)?)?)
    }

    pub fn final_total(&self) -> Option<T> {
        self.total_energy(self.max_order)
    }
}

/// Builds a report from subset energies without evaluating anything.
pub fn assemble_report<T: Real>(
    solver: String,
    n_fragments: usize,
    max_order: usize,
    subset_energies: BTreeMap<SubsetKey, T>,
    full_energy: Option<T>,
    evaluations: usize,
) -> Result<MbeReport<T>, MbeError> {
    let terms = expansion_terms(&subset_energies, n_fragments, max_order)?;
    let sums = order_sums(&terms, max_order);
    let totals = truncated_totals(&terms, max_order);
    let kcal: T = cast(HARTREE_TO_KCAL_PER_MOL);
    let errors_vs_full = full_energy.map(|full| {
        totals
            .iter()
            .enumerate()
            .map(|(i, &e)| OrderError {
                order: i + 1,
                hartree: e - full,
                kcal_per_mol: (e - full) * kcal,
            })
            .collect()
    });
    let cumulative_subsets = (1..=max_order)
        .map(|n| terms.iter().filter(|t| t.order <= n).count())
        .collect();
    Ok(MbeReport {
        solver,
        n_fragments,
        max_order,
        e_reference: None,
        subset_energies,
        terms,
        order_sums: sums,
        truncated_totals: totals,
        full_energy,
        errors_vs_full,
        evaluations,
        cumulative_subsets,
    })
}

/// Runs the expansion through `max_order` with any oracle.
///
/// Subsets are evaluated in parallel through a shared cache; totals are
/// reduced afterwards in key order, so results do not depend on scheduling.
pub fn expand<T: Real, O: SubsetOracle<T>>(
    partition: &OrbitalPartition,
    oracle: &O,
    max_order: usize,
    compute_full: bool,
) -> Result<MbeReport<T>, MbeError> {
    let n = partition.n_fragments();
    if max_order == 0 || max_order > n {
        return Err(MbeError::InvalidOrder {
            max_order,
            n_fragments: n,
        });
    }
    let cache = SubsetCache::default();
    let eval = |key: SubsetKey| -> Result<T, MbeError> {
        let sub = subset_union(partition, key)?;
        cache.get_or_eval(key, || oracle.correlation(key, &sub))
    };

    let mut keys = SubsetKey::all_up_to(n, max_order);
    if compute_full && max_order < n {
        keys.push(SubsetKey::full(n));
    }
    let results: Vec<Result<T, MbeError>> = keys.par_iter().map(|&k| eval(k)).collect();

    let mut energies = BTreeMap::new();
    for (&k, r) in keys.iter().zip(results) {
        energies.insert(k, r?);
    }
    let full = compute_full.then(|| energies[&SubsetKey::full(n)]);
    if max_order < n {
        energies.remove(&SubsetKey::full(n));
    }
    assemble_report(
        oracle.tag(),
        n,
        max_order,
        energies,
        full,
        cache.evaluations(),
    )
}

/// Options for a solver-backed expansion.
#[derive(Debug, Clone, Copy)]
pub struct MbeOptions {
    pub max_order: usize,
    pub compute_full: bool,
    pub solver: SolverOptions,
}

impl Default for MbeOptions {
    fn default() -> Self {
        Self {
            max_order: 2,
            compute_full: false,
            solver: SolverOptions::default(),
        }
    }
}

/// Runs the expansion with the solver named by `method`; the report carries
/// `E(O)` as its reference energy.
pub fn mbe_expand<T: Real>(
    ints: &MoIntegrals<T>,
    partition: &OrbitalPartition,
    method: Method,
    options: &MbeOptions,
) -> Result<MbeReport<T>, MbeError> {
    let solver = Solver::new(ints, method).with_options(options.solver);
    let mut report = expand(partition, &solver, options.max_order, options.compute_full)?;
    let e_ref = crate::reference::hf_reference_energy(ints, &partition.occupied).map_err(|e| {
        MbeError::Subset {
            key: SubsetKey::EMPTY,
            source: Arc::new(e.into()),
        }
    })?;
    report.e_reference = Some(e_ref);
    Ok(report)
}

/// Monomer energies `E_i` and dimer energies `E_ij` (0-based pairs).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpatialExpansionInput<E> {
    pub monomer_energies: Vec<E>,
    dimer_energies: BTreeMap<(usize, usize), E>,
}

impl<E: Num + Clone + PartialEq> SpatialExpansionInput<E> {
    pub fn new(monomer_energies: Vec<E>) -> Self {
        Self {
            monomer_energies,
            dimer_energies: BTreeMap::new(),
        }
    }

    /// Stores `E_ij` under the unordered pair `{i, j}`.
    pub fn add_dimer(&mut self, i: usize, j: usize, energy: E) -> Result<(), MbeError> {
        if i == j {
            return Err(MbeError::SelfPair(i + 1));
        }
        let key = (i.min(j), i.max(j));
        match self.dimer_energies.get(&key) {
            Some(old) if *old != energy => Err(MbeError::InconsistentPair {
                i: key.0 + 1,
                j: key.1 + 1,
            }),
            _ => {
                self.dimer_energies.insert(key, energy);
                Ok(())
            }
        }
    }

    pub fn dimer(&self, i: usize, j: usize) -> Option<&E> {
        self.dimer_energies.get(&(i.min(j), i.max(j)))
    }

    pub fn dimers(&self) -> impl Iterator<Item = ((usize, usize), &E)> {
        self.dimer_energies.iter().map(|(&k, v)| (k, v))
    }
}

/// `Σ_i E_i + Σ_{(i,j)} (E_ij − E_i − E_j)` over the listed dimers.
pub fn spatial_expand<E: Num + Clone>(input: &SpatialExpansionInput<E>) -> Result<E, MbeError> {
    let n = input.monomer_energies.len();
    let mut total = E::zero();
    for e in &input.monomer_energies {
        total = total + e.clone();
    }
    for (&(i, j), e_ij) in &input.dimer_energies {
        if i >= n || j >= n {
            return Err(MbeError::DanglingPair {
                i: i + 1,
                j: j + 1,
                n_monomers: n,
            });
        }
        total = total + e_ij.clone()
            - input.monomer_energies[i].clone()
            - input.monomer_energies[j].clone();
    }
    Ok(total)
}

/// One spatial fragment (monomer or dimer) with its own integrals and
/// virtual partition.
#[derive(Debug, Clone)]
pub struct SpatialFragment<'a, T> {
    pub name: String,
    pub ints: &'a MoIntegrals<T>,
    pub partition: OrbitalPartition,
}

#[derive(Debug, Clone)]
pub struct ClusterSpec<'a, T> {
    pub monomers: Vec<SpatialFragment<'a, T>>,
    /// 0-based monomer pairs.
    pub dimers: Vec<((usize, usize), SpatialFragment<'a, T>)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FragmentOutcome<T> {
    pub name: String,
    /// `E(O) + E^(n)` at the highest order run.
    pub total_energy: T,
    pub report: MbeReport<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HierarchicalReport<T> {
    pub monomers: Vec<FragmentOutcome<T>>,
    pub dimers: Vec<((usize, usize), FragmentOutcome<T>)>,
    pub spatial_input: SpatialExpansionInput<T>,
    pub total_energy: T,
}

/// Virtual-fragment expansion inside every spatial fragment, then the
/// two-body spatial expansion over their totals. `options.max_order` is
/// clipped to each fragment's own fragment count.
pub fn hierarchical_expand<T: Real>(
    cluster: &ClusterSpec<'_, T>,
    method: Method,
    options: &MbeOptions,
) -> Result<HierarchicalReport<T>, MbeError> {
    let run = |frag: &SpatialFragment<'_, T>| -> Result<FragmentOutcome<T>, MbeError> {
        let opts = MbeOptions {
            max_order: options.max_order.min(frag.partition.n_fragments()),
            ..*options
        };
        let report = mbe_expand(frag.ints, &frag.partition, method, &opts).map_err(|e| {
            MbeError::Spatial {
                fragment: frag.name.clone(),
                source: Box::new(e),
            }
        })?;
        let total_energy = report.final_total().expect("solver reports carry E(O)");
        Ok(FragmentOutcome {
            name: frag.name.clone(),
            total_energy,
            report,
        })
    };
    let monomers = cluster
        .monomers
        .iter()
        .map(run)
        .collect::<Result<Vec<_>, _>>()?;
    let mut dimers = Vec::with_capacity(cluster.dimers.len());
    for ((i, j), frag) in &cluster.dimers {
        dimers.push(((*i, *j), run(frag)?));
    }

    let mut input = SpatialExpansionInput::new(monomers.iter().map(|m| m.total_energy).collect());
    for ((i, j), d) in &dimers {
        input.add_dimer(*i, *j, d.total_energy)?;
    }
    let total_energy = spatial_expand(&input)?;
    Ok(HierarchicalReport {
        monomers,
        dimers,
        spatial_input: input,
        total_energy,
    })
}
