//! Versioned run configuration (TOML) and its validation.
//!
//! Every violation is collected before reporting, so one pass over a bad
//! file lists all of its problems.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use fvo::{Method, SolverOptions, VqeOptions};
use sha2::{Digest, Sha256};
use toml::{Table, Value};

pub const CONFIG_VERSION: i64 = 1;

/// One problem with a config, tied to the offending key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(format!("unknown format {other:?} (expected json or csv)")),
        }
    }
}

impl OutputFormat {
    pub fn tag(self) -> &'static str {
        match self {
            Self::Json => "json",
            Self::Csv => "csv",
        }
    }
}

/// How virtual orbitals are split into fragments.
#[derive(Debug, Clone, PartialEq)]
pub enum PartitionConfig {
    Blocks {
        fragments: Option<usize>,
    },
    Energy {
        fragments: Option<usize>,
    },
    Centroid,
    /// Label → 1-based orbital indices.
    Explicit {
        assignment: BTreeMap<String, Vec<usize>>,
    },
}

impl PartitionConfig {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::Blocks { .. } => "blocks",
            Self::Energy { .. } => "energy",
            Self::Centroid => "centroid",
            Self::Explicit { .. } => "explicit",
        }
    }
}

/// One molecular system: integrals, optional centroids, partition.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub name: String,
    /// As written in the config (reports quote this form).
    pub integrals: String,
    pub centroids: Option<String>,
    pub partition: PartitionConfig,
    pub frozen_core: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub method: Method,
    pub options: SolverOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DimerConfig {
    /// 0-based monomer indices.
    pub pair: (usize, usize),
    pub system: SystemConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HierarchyConfig {
    pub monomers: Vec<SystemConfig>,
    pub dimers: Vec<DimerConfig>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputConfig {
    pub format: OutputFormat,
    pub path: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// The top-level system; absent only in hierarchical runs.
    pub system: Option<SystemConfig>,
    pub solver: SolverConfig,
    pub max_order: usize,
    pub compute_full: bool,
    pub hierarchy: Option<HierarchyConfig>,
    pub output: OutputConfig,
    /// Directory relative paths are resolved against.
    pub base_dir: PathBuf,
    /// SHA-256 of the config text, hex.
    pub checksum: String,
}

impl RunConfig {
    pub fn resolve(&self, path: &str) -> PathBuf {
        self.base_dir.join(path)
    }
}

pub fn checksum(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Collects violations while walking a TOML table.
struct Checker<'a> {
    base_dir: &'a Path,
    violations: Vec<Violation>,
}

impl Checker<'_> {
    fn fail(&mut self, field: &str, message: impl Into<String>) {
        self.violations.push(Violation {
            field: field.to_string(),
            message: message.into(),
        });
    }

    fn unknown_keys(&mut self, table: &Table, prefix: &str, allowed: &[&str]) {
        for k in table.keys() {
            if !allowed.contains(&k.as_str()) {
                self.fail(&join(prefix, k), "unknown key");
            }
        }
    }

    fn string(&mut self, table: &Table, prefix: &str, key: &str) -> Option<String> {
        match table.get(key)? {
            Value::String(s) => Some(s.clone()),
            _ => {
                self.fail(&join(prefix, key), "expected a string");
                None
            }
        }
    }

    fn count(&mut self, table: &Table, prefix: &str, key: &str) -> Option<usize> {
        match table.get(key)? {
            Value::Integer(i) if *i >= 0 => Some(*i as usize),
            _ => {
                self.fail(&join(prefix, key), "expected a non-negative integer");
                None
            }
        }
    }

    fn float(&mut self, table: &Table, prefix: &str, key: &str) -> Option<f64> {
        match table.get(key)? {
            Value::Float(f) if *f > 0.0 => Some(*f),
            Value::Integer(i) if *i > 0 => Some(*i as f64),
            _ => {
                self.fail(&join(prefix, key), "expected a positive number");
                None
            }
        }
    }

    fn boolean(&mut self, table: &Table, prefix: &str, key: &str) -> Option<bool> {
        match table.get(key)? {
            Value::Boolean(b) => Some(*b),
            _ => {
                self.fail(&join(prefix, key), "expected true or false");
                None
            }
        }
    }

    fn table<'t>(&mut self, table: &'t Table, prefix: &str, key: &str) -> Option<&'t Table> {
        match table.get(key)? {
            Value::Table(t) => Some(t),
            _ => {
                self.fail(&join(prefix, key), "expected a table");
                None
            }
        }
    }

    fn existing_path(&mut self, table: &Table, prefix: &str, key: &str) -> Option<String> {
        let p = self.string(table, prefix, key)?;
        if !self.base_dir.join(&p).is_file() {
            self.fail(&join(prefix, key), format!("file {p:?} does not exist"));
        }
        Some(p)
    }

    fn partition(
        &mut self,
        table: &Table,
        prefix: &str,
        has_centroids: bool,
    ) -> Option<PartitionConfig> {
        let here = join(prefix, "partition");
        let Some(t) = self.table(table, prefix, "partition") else {
            self.fail(&here, "missing partition table");
            return None;
        };
        let Some(strategy) = self.string(t, &here, "strategy") else {
            if !t.contains_key("strategy") {
                self.fail(
                    &join(&here, "strategy"),
                    "missing (blocks, energy, centroid or explicit)",
                );
            }
            return None;
        };
        let allowed: &[&str] = match strategy.as_str() {
            "blocks" | "energy" => &["strategy", "fragments"],
            "centroid" => &["strategy"],
            "explicit" => &["strategy", "assignment"],
            other => {
                self.fail(
                    &join(&here, "strategy"),
                    format!("unknown strategy {other:?} (expected blocks, energy, centroid or explicit)"),
                );
                return None;
            }
        };
        self.unknown_keys(t, &here, allowed);
        let fragments = self.count(t, &here, "fragments");
        if fragments == Some(0) {
            self.fail(&join(&here, "fragments"), "must be at least 1");
        }
        match strategy.as_str() {
            "blocks" => Some(PartitionConfig::Blocks { fragments }),
            "energy" => Some(PartitionConfig::Energy { fragments }),
            "centroid" => {
                if !has_centroids {
                    self.fail(
                        &join(prefix, "centroids"),
                        "centroid strategy needs a centroid sidecar file",
                    );
                }
                Some(PartitionConfig::Centroid)
            }
            _ => {
                let field = join(&here, "assignment");
                let Some(a) = self.table(t, &here, "assignment") else {
                    self.fail(&field, "explicit strategy needs an assignment table");
                    return None;
                };
                let mut assignment = BTreeMap::new();
                for (label, v) in a {
                    let orbitals: Option<Vec<usize>> = v.as_array().and_then(|arr| {
                        arr.iter()
                            .map(|x| x.as_integer().filter(|&i| i >= 1).map(|i| i as usize))
                            .collect()
                    });
                    match orbitals {
                        Some(o) if !o.is_empty() => {
                            assignment.insert(label.clone(), o);
                        }
                        _ => self.fail(
                            &join(&field, label),
                            "expected a non-empty list of 1-based orbital indices",
                        ),
                    }
                }
                Some(PartitionConfig::Explicit { assignment })
            }
        }
    }

    fn system(
        &mut self,
        table: &Table,
        prefix: &str,
        name: String,
        extra: &[&str],
    ) -> Option<SystemConfig> {
        let mut allowed = vec!["integrals", "centroids", "partition", "frozen_core"];
        allowed.extend_from_slice(extra);
        self.unknown_keys(table, prefix, &allowed);
        let integrals = self.existing_path(table, prefix, "integrals");
        if !table.contains_key("integrals") {
            self.fail(&join(prefix, "integrals"), "missing integrals path");
        }
        let centroids = self.existing_path(table, prefix, "centroids");
        let has_centroids = table.contains_key("centroids");
        let partition = self.partition(table, prefix, has_centroids);
        let frozen_core = self.count(table, prefix, "frozen_core").unwrap_or(0);
        Some(SystemConfig {
            name,
            integrals: integrals?,
            centroids,
            partition: partition?,
            frozen_core,
        })
    }

    fn solver(&mut self, root: &Table) -> Option<SolverConfig> {
        let Some(t) = self.table(root, "", "solver") else {
            self.fail("solver", "missing solver table");
            return None;
        };
        self.unknown_keys(
            t,
            "solver",
            &[
                "method",
                "fci_cap",
                "vqe_tol",
                "vqe_max_iterations",
                "qubit_cap",
                "vqe_initial_step",
            ],
        );
        let method = match self.string(t, "solver", "method") {
            Some(m) => match m.parse::<Method>() {
                Ok(m) => Some(m),
                Err(e) => {
                    self.fail("solver.method", e.to_string());
                    None
                }
            },
            None => {
                if !t.contains_key("method") {
                    self.fail("solver.method", "missing (mp2, fci or vqe)");
                }
                None
            }
        };
        let mut options = SolverOptions::default();
        let vqe_default = VqeOptions::default();
        if let Some(c) = self.count(t, "solver", "fci_cap") {
            options.fci_cap = c;
        }
        options.vqe = VqeOptions {
            tol: self
                .float(t, "solver", "vqe_tol")
                .unwrap_or(vqe_default.tol),
            max_iterations: self
                .count(t, "solver", "vqe_max_iterations")
                .unwrap_or(vqe_default.max_iterations),
            qubit_cap: self
                .count(t, "solver", "qubit_cap")
                .unwrap_or(vqe_default.qubit_cap),
            initial_step: self
                .float(t, "solver", "vqe_initial_step")
                .unwrap_or(vqe_default.initial_step),
        };
        Some(SolverConfig {
            method: method?,
            options,
        })
    }

    fn hierarchy(&mut self, root: &Table) -> Option<HierarchyConfig> {
        let t = self.table(root, "", "hierarchy")?;
        self.unknown_keys(t, "hierarchy", &["monomer", "dimer"]);
        let list = |c: &mut Self, key: &str| -> Vec<Table> {
            match t.get(key) {
                None => Vec::new(),
                Some(Value::Array(a)) if a.iter().all(Value::is_table) => {
                    a.iter().filter_map(|v| v.as_table().cloned()).collect()
                }
                Some(_) => {
                    c.fail(&join("hierarchy", key), "expected an array of tables");
                    Vec::new()
                }
            }
        };
        let monomer_tables = list(self, "monomer");
        let dimer_tables = list(self, "dimer");
        if monomer_tables.is_empty() {
            self.fail("hierarchy.monomer", "at least one monomer is required");
        }

        let mut names = Vec::new();
        let mut monomers = Vec::new();
        for (i, m) in monomer_tables.iter().enumerate() {
            let prefix = format!("hierarchy.monomer[{i}]");
            let name = self
                .string(m, &prefix, "name")
                .unwrap_or_else(|| format!("monomer{}", i + 1));
            if names.contains(&name) {
                self.fail(
                    &join(&prefix, "name"),
                    format!("duplicate monomer name {name:?}"),
                );
            }
            names.push(name.clone());
            monomers.push(self.system(m, &prefix, name, &["name"]));
        }
        let mut dimers = Vec::new();
        for (i, d) in dimer_tables.iter().enumerate() {
            let prefix = format!("hierarchy.dimer[{i}]");
            let pair = match d.get("monomers").and_then(Value::as_array) {
                Some(a) if a.len() == 2 => {
                    let idx: Vec<Option<usize>> = a
                        .iter()
                        .map(|v| v.as_str().and_then(|s| names.iter().position(|n| n == s)))
                        .collect();
                    match (idx[0], idx[1]) {
                        (Some(x), Some(y)) if x != y => Some((x.min(y), x.max(y))),
                        _ => {
                            self.fail(
                                &join(&prefix, "monomers"),
                                "expected two different monomer names",
                            );
                            None
                        }
                    }
                }
                _ => {
                    self.fail(
                        &join(&prefix, "monomers"),
                        "expected a pair of monomer names",
                    );
                    None
                }
            };
            let name = self
                .string(d, &prefix, "name")
                .unwrap_or_else(|| format!("dimer{}", i + 1));
            let system = self.system(d, &prefix, name, &["name", "monomers"]);
            if let (Some(pair), Some(system)) = (pair, system) {
                dimers.push(DimerConfig { pair, system });
            }
        }
        let monomers: Option<Vec<SystemConfig>> = monomers.into_iter().collect();
        Some(HierarchyConfig {
            monomers: monomers?,
            dimers,
        })
    }

    fn output(&mut self, root: &Table) -> OutputConfig {
        let Some(t) = self.table(root, "", "output") else {
            return OutputConfig::default();
        };
        self.unknown_keys(t, "output", &["format", "path"]);
        let format = match self.string(t, "output", "format") {
            Some(f) => f.parse().unwrap_or_else(|e: String| {
                self.fail("output.format", e);
                OutputFormat::Json
            }),
            None => OutputFormat::Json,
        };
        OutputConfig {
            format,
            path: self.string(t, "output", "path"),
        }
    }
}

fn join(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}.{key}")
    }
}

const TOP_LEVEL_KEYS: &[&str] = &[
    "version",
    "integrals",
    "centroids",
    "partition",
    "frozen_core",
    "solver",
    "max_order",
    "compute_full",
    "hierarchy",
    "output",
];

/// Parses and validates config text. Relative paths are checked against
/// `base_dir`.
pub fn validate_config(raw: &str, base_dir: &Path) -> Result<RunConfig, Vec<Violation>> {
    let root: Table = match raw.parse() {
        Ok(t) => t,
        Err(e) => {
            return Err(vec![Violation {
                field: "(document)".into(),
                message: e.to_string().trim().to_string(),
            }])
        }
    };
    let mut c = Checker {
        base_dir,
        violations: Vec::new(),
    };
    c.unknown_keys(&root, "", TOP_LEVEL_KEYS);
    match root.get("version") {
        Some(Value::Integer(CONFIG_VERSION)) => {}
        Some(_) => c.fail(
            "version",
            format!("unsupported version (this build reads {CONFIG_VERSION})"),
        ),
        None => c.fail(
            "version",
            format!("missing (set version = {CONFIG_VERSION})"),
        ),
    }
    let max_order = match c.count(&root, "", "max_order") {
        Some(0) => {
            c.fail("max_order", "must be at least 1");
            None
        }
        Some(n) => Some(n),
        None if root.contains_key("max_order") => None,
        None => Some(2),
    };
    let compute_full = c.boolean(&root, "", "compute_full").unwrap_or(false);
    let solver = c.solver(&root);
    let hierarchy = c.hierarchy(&root);

    let system = if hierarchy.is_some() && !root.contains_key("integrals") {
        for key in ["centroids", "partition", "frozen_core"] {
            if root.contains_key(key) {
                c.fail(key, "only meaningful together with integrals");
            }
        }
        None
    } else {
        let mut top = root.clone();
        top.retain(|k, _| ["integrals", "centroids", "partition", "frozen_core"].contains(&k));
        c.system(&top, "", "system".into(), &[])
    };
    let output = c.output(&root);

    if !c.violations.is_empty() {
        return Err(c.violations);
    }
    Ok(RunConfig {
        system,
        solver: solver.expect("no violations"),
        max_order: max_order.expect("no violations"),
        compute_full,
        hierarchy,
        output,
        base_dir: base_dir.to_path_buf(),
        checksum: checksum(raw),
    })
}
