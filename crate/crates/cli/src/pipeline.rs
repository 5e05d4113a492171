//! parse → partition → budget → expand → report.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use fvo::fragmentation::{
    default_fragment_count, partition_blocks, partition_by_centroid, partition_by_energy,
    partition_explicit,
};
use fvo::integrals::parse_fcidump_str;
use fvo::mbe::{hierarchical_expand, mbe_expand, ClusterSpec, MbeError, SpatialFragment};
use fvo::reference::{fock_diagonal, hf_reference_energy};
use fvo::{
    budget_for_plan, MbeOptions, Method, MoIntegrals, OccupiedSpace, OrbitalCentroids,
    OrbitalPartition, HARTREE_TO_KCAL_PER_MOL,
};

use crate::config::{validate_config, PartitionConfig, RunConfig, SystemConfig, Violation};
use crate::report::{
    AppliedOverrides, ConvergenceReport, DimerSummary, FragmentSummary, HierarchySummary,
    PartitionSummary, RunReport, SystemReport, REPORT_VERSION,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration:\n{}", list(.0))]
    Validation(Vec<Violation>),
    #[error("{stage}: {message}")]
    Input {
        stage: &'static str,
        message: String,
    },
    #[error("{stage}: {message}")]
    Solver {
        stage: &'static str,
        message: String,
    },
    #[error("{stage}: {}: {source}", path.display())]
    Io {
        stage: &'static str,
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn list(v: &[Violation]) -> String {
    v.iter()
        .map(|v| format!("  {v}"))
        .collect::<Vec<_>>()
        .join("\n")
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) | Self::Input { .. } => 2,
            Self::Solver { .. } => 3,
            Self::Io { .. } => 4,
        }
    }
}

fn read(stage: &'static str, path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        stage,
        path: path.to_path_buf(),
        source,
    })
}

/// Reads and validates a config file; relative paths in it are resolved
/// against the file's directory.
pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = read("config", path)?;
    let base = path.parent().unwrap_or(Path::new("")).to_path_buf();
    validate_config(&text, &base).map_err(CliError::Validation)
}

/// Command-line replacements for config values.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub max_order: Option<usize>,
    pub solver: Option<String>,
}

pub fn apply_overrides(
    mut cfg: RunConfig,
    o: &Overrides,
) -> Result<(RunConfig, AppliedOverrides), CliError> {
    let mut violations = Vec::new();
    match o.max_order {
        Some(0) => violations.push(Violation {
            field: "--max-order".into(),
            message: "must be at least 1".into(),
        }),
        Some(n) => cfg.max_order = n,
        None => {}
    }
    if let Some(tag) = &o.solver {
        match tag.parse::<Method>() {
            Ok(m) => cfg.solver.method = m,
            Err(e) => violations.push(Violation {
                field: "--solver".into(),
                message: e.to_string(),
            }),
        }
    }
    if !violations.is_empty() {
        return Err(CliError::Validation(violations));
    }
    let applied = AppliedOverrides {
        max_order: o.max_order,
        solver: o.solver.clone(),
    };
    Ok((cfg, applied))
}

/// Integrals and partition for one system.
pub struct LoadedSystem {
    pub config: SystemConfig,
    pub ints: MoIntegrals,
    pub partition: OrbitalPartition,
}

fn input(stage: &'static str) -> impl Fn(String) -> CliError {
    move |message| CliError::Input { stage, message }
}

pub fn load_system(cfg: &RunConfig, sys: &SystemConfig) -> Result<LoadedSystem, CliError> {
    let text = read("integrals", &cfg.resolve(&sys.integrals))?;
    let ints: MoIntegrals = parse_fcidump_str(&text)
        .map_err(|e| input("integrals")(format!("{}: {e}", sys.integrals)))?;
    let occ = OccupiedSpace::closed_shell(&ints)
        .with_frozen_core(sys.frozen_core)
        .map_err(|e| input("reference")(e.to_string()))?;
    let n_virt = occ.virtuals().len();
    let count = |f: Option<usize>| f.unwrap_or_else(|| default_fragment_count(n_virt));
    let partition = match &sys.partition {
        PartitionConfig::Blocks { fragments } => partition_blocks(occ, count(*fragments)),
        PartitionConfig::Energy { fragments } => {
            let eps = fock_diagonal(&ints, &occ).values;
            partition_by_energy(occ, &eps, count(*fragments))
        }
        PartitionConfig::Centroid => {
            let name = sys.centroids.as_deref().expect("validated");
            let text = read("centroids", &cfg.resolve(name))?;
            let c = OrbitalCentroids::parse(&text)
                .map_err(|e| input("centroids")(format!("{name}: {e}")))?;
            partition_by_centroid(occ, &c)
        }
        PartitionConfig::Explicit { assignment } => {
            let pairs = assignment
                .iter()
                .flat_map(|(label, orbs)| orbs.iter().map(move |&o| (o - 1, label.as_str())));
            partition_explicit(occ, pairs)
        }
    }
    .map_err(|e| input("partition")(e.to_string()))?;
    Ok(LoadedSystem {
        config: sys.clone(),
        ints,
        partition,
    })
}

fn expansion_error(e: MbeError) -> CliError {
    match e {
        MbeError::InvalidOrder { .. } | MbeError::Partition(_) => input("expansion")(e.to_string()),
        MbeError::Spatial { ref source, .. }
            if matches!(**source, MbeError::InvalidOrder { .. }) =>
        {
            input("expansion")(e.to_string())
        }
        other => CliError::Solver {
            stage: "expansion",
            message: other.to_string(),
        },
    }
}

fn summary(sys: &LoadedSystem, max_order: usize) -> Result<SystemReport, CliError> {
    let p = &sys.partition;
    let e_reference = hf_reference_energy(&sys.ints, &p.occupied)
        .map_err(|e| input("reference")(e.to_string()))?;
    Ok(SystemReport {
        name: sys.config.name.clone(),
        integrals: sys.config.integrals.clone(),
        n_orbitals: sys.ints.n_orbitals(),
        n_electrons: sys.ints.n_electrons(),
        n_frozen_core: sys.config.frozen_core,
        e_nuclear: sys.ints.e_nuclear(),
        e_reference,
        partition: PartitionSummary {
            strategy: p.strategy.tag().to_string(),
            fragments: p
                .fragments()
                .iter()
                .zip(p.labels())
                .map(|(f, l)| FragmentSummary {
                    label: l.clone(),
                    orbitals: f.iter().map(|o| o + 1).collect(),
                })
                .collect(),
        },
        budget: budget_for_plan(p, max_order, sys.config.frozen_core),
        expansion: None,
        convergence: None,
    })
}

fn with_expansion(mut s: SystemReport, report: fvo::MbeReport) -> SystemReport {
    s.convergence = Some(ConvergenceReport::new(&report, &s.budget));
    s.expansion = Some(report);
    s
}

fn mbe_options(cfg: &RunConfig, max_order: usize) -> MbeOptions {
    MbeOptions {
        max_order,
        compute_full: cfg.compute_full,
        solver: cfg.solver.options,
    }
}

fn header(cfg: &RunConfig, mode: &str, overrides: AppliedOverrides) -> RunReport {
    RunReport {
        report_version: REPORT_VERSION,
        mode: mode.to_string(),
        config_sha256: cfg.checksum.clone(),
        solver: cfg.solver.method.tag().to_string(),
        max_order: cfg.max_order,
        overrides,
        system: None,
        hierarchy: None,
    }
}

struct LoadedHierarchy {
    monomers: Vec<LoadedSystem>,
    dimers: Vec<((usize, usize), LoadedSystem)>,
}

fn load_hierarchy(cfg: &RunConfig) -> Result<Option<LoadedHierarchy>, CliError> {
    let Some(h) = &cfg.hierarchy else {
        return Ok(None);
    };
    let monomers = h
        .monomers
        .iter()
        .map(|m| load_system(cfg, m))
        .collect::<Result<Vec<_>, _>>()?;
    let dimers = h
        .dimers
        .iter()
        .map(|d| Ok((d.pair, load_system(cfg, &d.system)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Some(LoadedHierarchy { monomers, dimers }))
}

/// Per-fragment order: the requested one clipped to the fragment count.
fn clipped(cfg: &RunConfig, sys: &LoadedSystem) -> usize {
    cfg.max_order.min(sys.partition.n_fragments())
}

/// Resource estimates only; no solver is called.
pub fn budget(cfg: &RunConfig, overrides: AppliedOverrides) -> Result<RunReport, CliError> {
    let mut report = header(cfg, "budget", overrides);
    if let Some(sys) = &cfg.system {
        let loaded = load_system(cfg, sys)?;
        report.system = Some(summary(&loaded, cfg.max_order)?);
    }
    if let Some(h) = load_hierarchy(cfg)? {
        let names: Vec<String> = h.monomers.iter().map(|m| m.config.name.clone()).collect();
        report.hierarchy = Some(HierarchySummary {
            monomers: h
                .monomers
                .iter()
                .map(|m| summary(m, clipped(cfg, m)))
                .collect::<Result<_, _>>()?,
            dimers: h
                .dimers
                .iter()
                .map(|((i, j), d)| {
                    Ok(DimerSummary {
                        monomers: [names[*i].clone(), names[*j].clone()],
                        system: summary(d, clipped(cfg, d))?,
                    })
                })
                .collect::<Result<_, CliError>>()?,
            total_energy_hartree: None,
            deviation_hartree: None,
            deviation_kcal_per_mol: None,
        });
    }
    Ok(report)
}

/// The full pipeline. Parallel work runs on the current rayon pool.
pub fn run(cfg: &RunConfig, overrides: AppliedOverrides) -> Result<RunReport, CliError> {
    let mut report = header(cfg, "run", overrides);
    let method = cfg.solver.method;
    if let Some(sys) = &cfg.system {
        let loaded = load_system(cfg, sys)?;
        log::info!(
            "{}: {} fragments, max_order {}",
            sys.integrals,
            loaded.partition.n_fragments(),
            cfg.max_order
        );
        let mbe = mbe_expand(
            &loaded.ints,
            &loaded.partition,
            method,
            &mbe_options(cfg, cfg.max_order),
        )
        .map_err(expansion_error)?;
        report.system = Some(with_expansion(summary(&loaded, cfg.max_order)?, mbe));
    }
    if let Some(h) = load_hierarchy(cfg)? {
        fn spatial(s: &LoadedSystem) -> SpatialFragment<'_, f64> {
            SpatialFragment {
                name: s.config.name.clone(),
                ints: &s.ints,
                partition: s.partition.clone(),
            }
        }
        let cluster = ClusterSpec {
            monomers: h.monomers.iter().map(spatial).collect(),
            dimers: h.dimers.iter().map(|(p, d)| (*p, spatial(d))).collect(),
        };
        log::info!(
            "hierarchy: {} monomers, {} dimers",
            cluster.monomers.len(),
            cluster.dimers.len()
        );
        let out = hierarchical_expand(&cluster, method, &mbe_options(cfg, cfg.max_order))
            .map_err(expansion_error)?;
        let names: Vec<String> = h.monomers.iter().map(|m| m.config.name.clone()).collect();
        let monomers = h
            .monomers
            .iter()
            .zip(out.monomers)
            .map(|(m, o)| Ok(with_expansion(summary(m, clipped(cfg, m))?, o.report)))
            .collect::<Result<Vec<_>, CliError>>()?;
        let dimers = h
            .dimers
            .iter()
            .zip(out.dimers)
            .map(|(((i, j), d), (_, o))| {
                Ok(DimerSummary {
                    monomers: [names[*i].clone(), names[*j].clone()],
                    system: with_expansion(summary(d, clipped(cfg, d))?, o.report),
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let deviation = report
            .system
            .as_ref()
            .and_then(SystemReport::final_total)
            .map(|e| out.total_energy - e);
        report.hierarchy = Some(HierarchySummary {
            monomers,
            dimers,
            total_energy_hartree: Some(out.total_energy),
            deviation_hartree: deviation,
            deviation_kcal_per_mol: deviation.map(|d| d * HARTREE_TO_KCAL_PER_MOL),
        });
    }
    Ok(report)
}
