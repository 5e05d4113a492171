//! Qubit counts and UCCSD resource estimates for expansion plans.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::fragmentation::{OrbitalPartition, SubsetKey};

/// One qubit per spin-orbital.
pub fn qubit_count(occupied: usize, virtuals: usize) -> usize {
    2 * (occupied + virtuals)
}

/// Layers charged per excitation in the linear depth model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DepthModel {
    pub per_single: usize,
    pub per_double: usize,
}

impl Default for DepthModel {
    fn default() -> Self {
        Self {
            per_single: 2,
            per_double: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AnsatzEstimate {
    pub n_singles: usize,
    /// Spin-adapted pairs `i ≤ j`, `a ≤ b`.
    pub n_doubles: usize,
    pub depth_estimate: usize,
}

impl AnsatzEstimate {
    pub fn n_parameters(&self) -> usize {
        self.n_singles + self.n_doubles
    }
}

pub fn ansatz_estimate(occupied: usize, virtuals: usize) -> AnsatzEstimate {
    ansatz_estimate_with(occupied, virtuals, DepthModel::default())
}

pub fn ansatz_estimate_with(occupied: usize, virtuals: usize, model: DepthModel) -> AnsatzEstimate {
    let n_singles = occupied * virtuals;
    let n_doubles = occupied * (occupied + 1) / 2 * (virtuals * (virtuals + 1) / 2);
    AnsatzEstimate {
        n_singles,
        n_doubles,
        depth_estimate: model.per_single * n_singles + model.per_double * n_doubles,
    }
}

/// Resources for one subset calculation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SubsetBudget {
    pub qubits: usize,
    pub n_virtuals: usize,
    pub ansatz: AnsatzEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QubitBudget {
    pub n_active_occupied: usize,
    pub per_subset: BTreeMap<SubsetKey, SubsetBudget>,
    /// Largest qubit count among subsets of each order `1..=max_order`.
    pub max_per_order: BTreeMap<usize, usize>,
    pub full_qubits: usize,
    pub full_ansatz: AnsatzEstimate,
    /// `(full − max) / full × 100` per order.
    pub reduction_percent: BTreeMap<usize, f64>,
}

/// Enumerates every subset of order `1..=max_order` (clipped to the
/// fragment count). `n_frozen` occupied orbitals are left out of the counts.
pub fn budget_for_plan(
    partition: &OrbitalPartition,
    max_order: usize,
    n_frozen: usize,
) -> QubitBudget {
    budget_for_plan_with(partition, max_order, n_frozen, DepthModel::default())
}

pub fn budget_for_plan_with(
    partition: &OrbitalPartition,
    max_order: usize,
    n_frozen: usize,
    model: DepthModel,
) -> QubitBudget {
    let n = partition.n_fragments();
    let max_order = max_order.clamp(1, n);
    let occ = partition.occupied.occupied().len().saturating_sub(n_frozen);
    let estimate = |v: usize| SubsetBudget {
        qubits: qubit_count(occ, v),
        n_virtuals: v,
        ansatz: ansatz_estimate_with(occ, v, model),
    };

    let mut per_subset = BTreeMap::new();
    let mut max_per_order = BTreeMap::new();
    for key in SubsetKey::all_up_to(n, max_order) {
        if key.is_empty() {
            continue;
        }
        let v: usize = key.indices().map(|i| partition.fragment(i).len()).sum();
        let b = estimate(v);
        let slot = max_per_order.entry(key.order()).or_insert(0);
        *slot = (*slot).max(b.qubits);
        per_subset.insert(key, b);
    }
    let full = estimate(partition.n_virtuals());
    let reduction_percent = max_per_order
        .iter()
        .map(|(&order, &q)| {
            let pct = if full.qubits == 0 {
                0.0
            } else {
                (full.qubits - q) as f64 / full.qubits as f64 * 100.0
            };
            (order, pct)
        })
        .collect();
    QubitBudget {
        n_active_occupied: occ,
        per_subset,
        max_per_order,
        full_qubits: full.qubits,
        full_ansatz: full.ansatz,
        reduction_percent,
    }
}

/// Orbital counts of six molecules: name, occupied, virtual, full qubits.
pub const REFERENCE_SYSTEMS: [(&str, usize, usize, usize); 6] = [
    ("acetaldehyde/6-31G", 12, 23, 70),
    ("water dimer/6-31G", 10, 16, 52),
    ("methylamine/6-31G(d)", 9, 29, 76),
    ("methanol/cc-pVDZ", 9, 39, 96),
    ("hydrogen peroxide/aug-cc-pVDZ", 9, 55, 128),
    ("ammonia/aug-cc-pVDZ", 5, 45, 100),
];
