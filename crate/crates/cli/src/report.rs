//! Report types and their JSON / CSV renderings.

use serde::Serialize;

use fvo::mbe::MbeReport;
use fvo::{QubitBudget, HARTREE_TO_KCAL_PER_MOL};

use crate::config::OutputFormat;

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FragmentSummary {
    pub label: String,
    /// 1-based orbital indices.
    pub orbitals: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionSummary {
    pub strategy: String,
    pub fragments: Vec<FragmentSummary>,
}

/// One row per expansion order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub order: usize,
    /// `E^(n)`, the truncated correlation energy.
    pub energy_hartree: f64,
    /// `E(O) + E^(n)`.
    pub total_energy_hartree: f64,
    pub error_hartree: Option<f64>,
    pub error_kcal_per_mol: Option<f64>,
    pub max_qubits: usize,
    pub cumulative_subsets: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub fn new(report: &MbeReport<f64>, budget: &QubitBudget) -> Self {
        let e_ref = report.e_reference.unwrap_or(0.0);
        let rows = report
            .truncated_totals
            .iter()
            .enumerate()
            .map(|(i, &e)| {
                let order = i + 1;
                let error = report.full_energy.map(|full| e - full);
                ConvergenceRow {
                    order,
                    energy_hartree: e,
                    total_energy_hartree: e_ref + e,
                    error_hartree: error,
                    error_kcal_per_mol: error.map(|x| x * HARTREE_TO_KCAL_PER_MOL),
                    max_qubits: budget.max_per_order.get(&order).copied().unwrap_or(0),
                    cumulative_subsets: report.cumulative_subsets[i],
                }
            })
            .collect();
        Self { rows }
    }
}

/// Everything computed for one molecular system.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemReport {
    pub name: String,
    pub integrals: String,
    pub n_orbitals: usize,
    pub n_electrons: usize,
    pub n_frozen_core: usize,
    pub e_nuclear: f64,
    pub e_reference: f64,
    pub partition: PartitionSummary,
    pub budget: QubitBudget,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expansion: Option<MbeReport<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceReport>,
}

impl SystemReport {
    /// `E(O) + E^(max_order)`, for expansion runs.
    pub fn final_total(&self) -> Option<f64> {
        self.expansion.as_ref()?.final_total()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimerSummary {
    pub monomers: [String; 2],
    pub system: SystemReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HierarchySummary {
    pub monomers: Vec<SystemReport>,
    pub dimers: Vec<DimerSummary>,
    /// Two-body spatial composite of the fragment totals.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_energy_hartree: Option<f64>,
    /// Composite minus the top-level system's total, when both exist.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deviation_hartree: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deviation_kcal_per_mol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Default)]
pub struct AppliedOverrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver: Option<String>,
}

impl AppliedOverrides {
    fn is_empty(&self) -> bool {
        self.max_order.is_none() && self.solver.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub report_version: u32,
    /// `run` or `budget`.
    pub mode: String,
    pub config_sha256: String,
    pub solver: String,
    pub max_order: usize,
    #[serde(skip_serializing_if = "AppliedOverrides::is_empty")]
    pub overrides: AppliedOverrides,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hierarchy: Option<HierarchySummary>,
}

impl RunReport {
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => self.to_json(),
            OutputFormat::Csv => self.to_csv(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Every system in report order, with the name used in CSV rows.
    pub fn systems(&self) -> Vec<&SystemReport> {
        let mut out: Vec<&SystemReport> = self.system.iter().collect();
        if let Some(h) = &self.hierarchy {
            out.extend(h.monomers.iter());
            out.extend(h.dimers.iter().map(|d| &d.system));
        }
        out
    }

    /// Provenance as `#` lines, then one table: convergence rows for `run`,
    /// qubit counts per order for `budget`.
    pub fn to_csv(&self) -> String {
        let mut head = String::new();
        head.push_str("# fvo report\n");
        head.push_str(&format!("# report_version={}\n", self.report_version));
        head.push_str(&format!("# mode={}\n", self.mode));
        head.push_str(&format!("# config_sha256={}\n", self.config_sha256));
        head.push_str(&format!("# solver={}\n", self.solver));
        head.push_str(&format!("# max_order={}\n", self.max_order));
        if let Some(n) = self.overrides.max_order {
            head.push_str(&format!("# override.max_order={n}\n"));
        }
        if let Some(s) = &self.overrides.solver {
            head.push_str(&format!("# override.solver={s}\n"));
        }
        for sys in self.systems() {
            head.push_str(&format!("# {}.e_reference={}\n", sys.name, sys.e_reference));
            head.push_str(&format!(
                "# {}.full_qubits={}\n",
                sys.name, sys.budget.full_qubits
            ));
            if let Some(full) = sys.expansion.as_ref().and_then(|e| e.full_energy) {
                head.push_str(&format!("# {}.full_energy={full}\n", sys.name));
            }
        }
        if let Some(h) = &self.hierarchy {
            if let Some(t) = h.total_energy_hartree {
                head.push_str(&format!("# hierarchy.total_energy_hartree={t}\n"));
            }
            if let Some(d) = h.deviation_hartree {
                head.push_str(&format!("# hierarchy.deviation_hartree={d}\n"));
            }
        }

        let mut w = csv::Writer::from_writer(Vec::new());
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        if self.mode == "budget" {
            w.write_record([
                "system",
                "order",
                "max_qubits",
                "reduction_percent",
                "subsets",
            ])
            .expect("in-memory write");
            for sys in self.systems() {
                for (&order, &q) in &sys.budget.max_per_order {
                    let subsets = sys
                        .budget
                        .per_subset
                        .keys()
                        .filter(|k| k.order() == order)
                        .count();
                    w.write_record([
                        sys.name.clone(),
                        order.to_string(),
                        q.to_string(),
                        sys.budget.reduction_percent[&order].to_string(),
                        subsets.to_string(),
                    ])
                    .expect("in-memory write");
                }
            }
        } else {
            w.write_record([
                "system",
                "order",
                "energy_hartree",
                "total_energy_hartree",
                "error_hartree",
                "error_kcal_per_mol",
                "max_qubits",
                "cumulative_subsets",
            ])
            .expect("in-memory write");
            for sys in self.systems() {
                for r in sys.convergence.iter().flat_map(|c| &c.rows) {
                    w.write_record([
                        sys.name.clone(),
                        r.order.to_string(),
                        r.energy_hartree.to_string(),
                        r.total_energy_hartree.to_string(),
                        opt(r.error_hartree),
                        opt(r.error_kcal_per_mol),
                        r.max_qubits.to_string(),
                        r.cumulative_subsets.to_string(),
                    ])
                    .expect("in-memory write");
                }
            }
        }
        let body = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8");
        head + &body
    }
}
