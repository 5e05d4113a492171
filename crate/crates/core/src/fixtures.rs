//! Bundled test systems: FCIDUMP files and orbital-centroid sidecars.

/// `(file name, contents)` for every bundled file.
pub const FILES: &[(&str, &str)] = &[
    ("h2_sto3g.fcidump", H2_STO3G),
    ("h2o_sto3g.fcidump", H2O_STO3G),
    ("h2o_sto3g_eps.fcidump", H2O_STO3G_EPS),
    ("h4_631g.fcidump", H4_631G),
    ("h4_631g.centroids", H4_631G_CENTROIDS),
    ("h2trimer_a.fcidump", H2TRIMER_A),
    ("h2trimer_b.fcidump", H2TRIMER_B),
    ("h2trimer_c.fcidump", H2TRIMER_C),
    ("h2trimer_ab.fcidump", H2TRIMER_AB),
    ("h2trimer_ac.fcidump", H2TRIMER_AC),
    ("h2trimer_bc.fcidump", H2TRIMER_BC),
    ("h2trimer_abc.fcidump", H2TRIMER_ABC),
    ("h2trimer_a.centroids", H2TRIMER_A_CENTROIDS),
    ("h2trimer_b.centroids", H2TRIMER_B_CENTROIDS),
    ("h2trimer_c.centroids", H2TRIMER_C_CENTROIDS),
    ("h2trimer_ab.centroids", H2TRIMER_AB_CENTROIDS),
    ("h2trimer_ac.centroids", H2TRIMER_AC_CENTROIDS),
    ("h2trimer_bc.centroids", H2TRIMER_BC_CENTROIDS),
    ("h2trimer_abc.centroids", H2TRIMER_ABC_CENTROIDS),
];

/// Reference energies for the bundled systems, as JSON.
pub const REFERENCE_JSON: &str = include_str!("../fixtures/reference.json");

/// H2, STO-3G, bond length 1.4 bohr.
pub const H2_STO3G: &str = include_str!("../fixtures/h2_sto3g.fcidump");
/// H2O, STO-3G, 7 orbitals.
pub const H2O_STO3G: &str = include_str!("../fixtures/h2o_sto3g.fcidump");
/// As [`H2O_STO3G`] with explicit orbital-energy lines.
pub const H2O_STO3G_EPS: &str = include_str!("../fixtures/h2o_sto3g_eps.fcidump");
/// Linear H4, 6-31G, Boys-localized virtuals.
pub const H4_631G: &str = include_str!("../fixtures/h4_631g.fcidump");
pub const H4_631G_CENTROIDS: &str = include_str!("../fixtures/h4_631g.centroids");

pub const H2TRIMER_A: &str = include_str!("../fixtures/h2trimer_a.fcidump");
pub const H2TRIMER_B: &str = include_str!("../fixtures/h2trimer_b.fcidump");
pub const H2TRIMER_C: &str = include_str!("../fixtures/h2trimer_c.fcidump");
pub const H2TRIMER_AB: &str = include_str!("../fixtures/h2trimer_ab.fcidump");
pub const H2TRIMER_AC: &str = include_str!("../fixtures/h2trimer_ac.fcidump");
pub const H2TRIMER_BC: &str = include_str!("../fixtures/h2trimer_bc.fcidump");
pub const H2TRIMER_ABC: &str = include_str!("../fixtures/h2trimer_abc.fcidump");
pub const H2TRIMER_A_CENTROIDS: &str = include_str!("../fixtures/h2trimer_a.centroids");
pub const H2TRIMER_B_CENTROIDS: &str = include_str!("../fixtures/h2trimer_b.centroids");
pub const H2TRIMER_C_CENTROIDS: &str = include_str!("../fixtures/h2trimer_c.centroids");
pub const H2TRIMER_AB_CENTROIDS: &str = include_str!("../fixtures/h2trimer_ab.centroids");
pub const H2TRIMER_AC_CENTROIDS: &str = include_str!("../fixtures/h2trimer_ac.centroids");
pub const H2TRIMER_BC_CENTROIDS: &str = include_str!("../fixtures/h2trimer_bc.centroids");
pub const H2TRIMER_ABC_CENTROIDS: &str = include_str!("../fixtures/h2trimer_abc.centroids");

/// Contents of a bundled file by name.
pub fn get(name: &str) -> Option<&'static str> {
    FILES.iter().find(|(n, _)| *n == name).map(|(_, c)| *c)
}
