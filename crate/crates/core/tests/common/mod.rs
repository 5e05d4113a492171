#![allow(dead_code)]

use fvo::fixtures;
use fvo::integrals::parse_fcidump_str;
use fvo::MoIntegrals;
use serde_json::Value;

pub fn load(name: &str) -> MoIntegrals {
    let text = fixtures::get(&format!("{name}.fcidump")).expect("bundled fixture");
    parse_fcidump_str(text).expect("fixture parses")
}

pub fn reference(system: &str, field: &str) -> f64 {
    let json: Value = serde_json::from_str(fixtures::REFERENCE_JSON).unwrap();
    json[system][field]
        .as_f64()
        .unwrap_or_else(|| panic!("missing {system}.{field}"))
}

/// Random integrals with the full 8-fold symmetry and a diagonal-dominant
/// one-body part, so the aufbau determinant is a sensible reference.
pub fn random_integrals(n_orbitals: usize, n_electrons: usize, seed: u64) -> MoIntegrals {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut ints = MoIntegrals::new(n_orbitals, n_electrons).unwrap();
    for p in 0..n_orbitals {
        for q in 0..=p {
            let v = if p == q {
                -2.0 + 0.6 * p as f64 + rng.gen_range(-0.1..0.1)
            } else {
                rng.gen_range(-0.1..0.1)
            };
            ints.set_h(p, q, v).unwrap();
        }
    }
    for p in 0..n_orbitals {
        for q in 0..=p {
            for r in 0..n_orbitals {
                for s in 0..=r {
                    if (p, q) >= (r, s) {
                        let v = if p == q && r == s {
                            0.5 + rng.gen_range(0.0..0.2)
                        } else {
                            rng.gen_range(-0.05..0.05)
                        };
                        ints.set_eri(p, q, r, s, v).unwrap();
                    }
                }
            }
        }
    }
    ints.set_e_nuclear(rng.gen_range(0.0..1.0));
    ints
}

/// Relabels orbitals: orbital `p` of `ints` becomes `perm[p]`.
pub fn permuted(ints: &MoIntegrals, perm: &[usize]) -> MoIntegrals {
    let mut out = MoIntegrals::new(ints.n_orbitals(), ints.n_electrons()).unwrap();
    for ((p, q), v) in ints.h_entries() {
        out.set_h(perm[p], perm[q], v).unwrap();
    }
    for ([p, q, r, s], v) in ints.eri_entries() {
        out.set_eri(perm[p], perm[q], perm[r], perm[s], v).unwrap();
    }
    out.set_e_nuclear(ints.e_nuclear());
    out
}
