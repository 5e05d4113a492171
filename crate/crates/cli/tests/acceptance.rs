//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use fvo::eigen::symmetric_eigenvalues;
use fvo::fragmentation::{partition_blocks, partition_by_centroid, subset_union};
use fvo::integrals::{parse_fcidump_str, MoIntegrals};
use fvo::mbe::{expand, hierarchical_expand, mbe_expand, ClusterSpec, FnOracle, SpatialFragment};
use fvo::reference::hf_reference_energy;
use fvo::solvers::{ci_determinants, fci_energy, fci_spectrum, mp2_energy, SubspaceSpec};
use fvo::vqe::{jordan_wigner, sector_matrix, vqe_energy, VqeOptions};
use fvo::{
    budget_for_plan, qubit_count, MbeOptions, Method, OccupiedSpace, OrbitalCentroids,
    OrbitalPartition, SubsetKey,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn load(name: &str) -> MoIntegrals<f64> {
    parse_fcidump_str(fvo::fixtures::get(&format!("{name}.fcidump")).unwrap()).unwrap()
}

fn reference(system: &str, field: &str) -> f64 {
    let json: Value = serde_json::from_str(fvo::fixtures::REFERENCE_JSON).unwrap();
    json[system][field].as_f64().unwrap()
}

fn closed(ints: &MoIntegrals<f64>) -> OccupiedSpace {
    OccupiedSpace::closed_shell(ints)
}

fn fci_options(max_order: usize) -> MbeOptions {
    MbeOptions {
        max_order,
        compute_full: true,
        ..Default::default()
    }
}

fn qubit_formula() -> Check {
    let rows = [
        (12, 23, 70),
        (10, 16, 52),
        (9, 29, 76),
        (9, 39, 96),
        (9, 55, 128),
        (5, 45, 100),
    ];
    for (o, v, want) in rows {
        ensure(
            qubit_count(o, v) == want,
            format!("qubit_count({o}, {v}) = {}", qubit_count(o, v)),
        )?;
    }
    Ok("6/6 rows exact".into())
}

fn inclusion_exclusion() -> Check {
    const TOL: f64 = 1e-12;
    let mut rng = ChaCha8Rng::seed_from_u64(20240607);
    let mut worst = 0.0f64;
    for trial in 0..100 {
        let n = 2 + trial % 5;
        let ints = MoIntegrals::<f64>::new(1 + 2 * n, 2).unwrap();
        let p = partition_blocks(closed(&ints), n).unwrap();
        let table: BTreeMap<SubsetKey, f64> = SubsetKey::all_up_to(n, n)
            .into_iter()
            .map(|k| {
                (
                    k,
                    if k.is_empty() {
                        0.0
                    } else {
                        rng.gen_range(-1.0..0.0)
                    },
                )
            })
            .collect();
        let oracle = FnOracle {
            name: "synthetic".into(),
            f: |k: SubsetKey, _: &SubspaceSpec| Ok(table[&k]),
        };
        let report = expand(&p, &oracle, n, true).map_err(|e| e.to_string())?;
        let full = table[&SubsetKey::full(n)];
        worst = worst.max((report.truncated_totals[n - 1] - full).abs());

        let e = |ix: &[usize]| table[&SubsetKey::from_indices(ix.iter().copied())];
        let delta: BTreeMap<SubsetKey, f64> =
            report.terms.iter().map(|t| (t.key, t.delta_e)).collect();
        let d = |ix: &[usize]| delta[&SubsetKey::from_indices(ix.iter().copied())];
        let mut sums = [0.0f64; 4];
        for i in 0..n {
            worst = worst.max((d(&[i]) - e(&[i])).abs());
            sums[1] += e(&[i]);
            for j in i + 1..n {
                let dij = e(&[i, j]) - e(&[i]) - e(&[j]);
                worst = worst.max((d(&[i, j]) - dij).abs());
                sums[2] += dij;
                for k in j + 1..n {
                    let dijk = e(&[i, j, k]) - e(&[i, j]) - e(&[i, k]) - e(&[j, k])
                        + e(&[i])
                        + e(&[j])
                        + e(&[k]);
                    worst = worst.max((d(&[i, j, k]) - dijk).abs());
                    sums[3] += dijk;
                }
            }
        }
        for (got, want) in report.order_sums.iter().zip(&sums).skip(1).take(n.min(3)) {
            worst = worst.max((got - want).abs());
        }
        ensure(
            worst <= TOL,
            format!("trial {trial} (N={n}): deviation {worst:e}"),
        )?;
    }
    Ok(format!(
        "100 oracles, N=2..6, max deviation {worst:.1e} <= 1e-12"
    ))
}

fn convergence_order() -> Check {
    let ints = load("h4_631g");
    let c = OrbitalCentroids::parse(fvo::fixtures::H4_631G_CENTROIDS).unwrap();
    let plans = [
        (
            "centroid N=2",
            partition_by_centroid(closed(&ints), &c).unwrap(),
        ),
        ("blocks N=3", partition_blocks(closed(&ints), 3).unwrap()),
    ];
    let mut notes = Vec::new();
    for (name, p) in plans {
        let n = p.n_fragments();
        let r = mbe_expand(&ints, &p, Method::Fci, &fci_options(n)).map_err(|e| e.to_string())?;
        let errs: Vec<f64> = r
            .errors_vs_full
            .unwrap()
            .iter()
            .map(|e| e.hartree.abs())
            .collect();
        for w in errs.windows(2) {
            ensure(w[1] <= w[0], format!("{name}: error grows {errs:?}"))?;
        }
        ensure(
            errs[n - 1] <= 1e-10,
            format!("{name}: error(N) = {:e}", errs[n - 1]),
        )?;
        notes.push(format!(
            "{name} errors {}",
            errs.iter()
                .map(|e| format!("{e:.1e}"))
                .collect::<Vec<_>>()
                .join(" > ")
        ));
    }
    Ok(format!(
        "H4/6-31G FCI: {}; error(N) <= 1e-10",
        notes.join("; ")
    ))
}

fn solver_fidelity() -> Check {
    const TOL: f64 = 1e-8;
    let mut worst = 0.0f64;
    for sys in ["h2_sto3g", "h2o_sto3g"] {
        let ints = load(sys);
        let sub = SubspaceSpec::full(closed(&ints));
        let hf = hf_reference_energy(&ints, &sub.occupied).map_err(|e| e.to_string())?;
        let mp2 = mp2_energy(&ints, &sub).map_err(|e| e.to_string())?.e_corr;
        let fci = fci_energy(&ints, &sub, 16)
            .map_err(|e| e.to_string())?
            .e_total;
        for (label, got, want) in [
            ("HF", hf, reference(sys, "e_hf")),
            ("MP2", mp2, reference(sys, "e_mp2_corr")),
            ("FCI", fci, reference(sys, "e_fci")),
        ] {
            let d = (got - want).abs();
            worst = worst.max(d);
            ensure(d <= TOL, format!("{sys} {label}: {got} vs {want}"))?;
        }
    }
    Ok(format!(
        "H2 and H2O (7 orbitals) HF/MP2/FCI, max deviation {worst:.1e} <= 1e-8"
    ))
}

fn variational_monotonicity() -> Check {
    let ints = load("h4_631g");
    let p = partition_blocks(closed(&ints), 3).unwrap();
    let keys = SubsetKey::all_up_to(3, 3);
    let mut energy = BTreeMap::new();
    for &k in &keys {
        let sub = subset_union(&p, k).map_err(|e| e.to_string())?;
        energy.insert(
            k,
            fci_energy(&ints, &sub, 16)
                .map_err(|e| e.to_string())?
                .e_total,
        );
    }
    let mut links = 0;
    for &a in &keys {
        for &b in &keys {
            if a != b && a.is_subset_of(b) {
                ensure(energy[&b] <= energy[&a], format!("E({b}) > E({a})"))?;
                links += 1;
            }
        }
    }
    Ok(format!(
        "H4 3-fragment partition, {links} nested pairs (all chains) non-increasing"
    ))
}

fn mini_vqe() -> Check {
    let ints = load("h2_sto3g");
    let sub = SubspaceSpec::full(closed(&ints));
    let vqe = vqe_energy(&ints, &sub, &VqeOptions::default()).map_err(|e| e.to_string())?;
    let fci = fci_energy(&ints, &sub, 16)
        .map_err(|e| e.to_string())?
        .e_total;
    let gap = (vqe.e_total - fci).abs();
    ensure(gap <= 1e-6, format!("VQE {} vs FCI {fci}", vqe.e_total))?;

    let h = jordan_wigner(&ints, &sub, 16).map_err(|e| e.to_string())?;
    let basis = ci_determinants(2, 1);
    let jw = symmetric_eigenvalues(&sector_matrix(&h, &basis).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let det = fci_spectrum(&ints, &sub, 16).map_err(|e| e.to_string())?;
    ensure(jw.len() == det.len(), "spectrum sizes differ")?;
    let worst = jw
        .iter()
        .zip(&det)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    ensure(
        worst <= 1e-9,
        format!("JW vs determinant spectrum deviation {worst:e}"),
    )?;
    Ok(format!(
        "H2 4 qubits: |VQE - FCI| = {gap:.1e} <= 1e-6; spectrum deviation {worst:.1e} <= 1e-9"
    ))
}

fn size_consistency() -> Check {
    let h2 = load("h2_sto3g");
    let (pair, _, _) = MoIntegrals::direct_sum(&h2, &h2);
    let mono = partition_blocks(closed(&h2), 1).unwrap();
    let dimer = partition_blocks(closed(&pair), 2).unwrap();
    let frag = |name: &str, ints, p: &OrbitalPartition| SpatialFragment {
        name: name.into(),
        ints,
        partition: p.clone(),
    };
    let cluster = ClusterSpec {
        monomers: vec![frag("a", &h2, &mono), frag("b", &h2, &mono)],
        dimers: vec![((0, 1), frag("ab", &pair, &dimer))],
    };
    let r =
        hierarchical_expand(&cluster, Method::Fci, &fci_options(2)).map_err(|e| e.to_string())?;
    let gap = (r.total_energy - 2.0 * r.monomers[0].total_energy).abs();
    ensure(gap <= 1e-8, format!("block-diagonal dimer off by {gap:e}"))?;

    // small-cluster comparison: H2 trimer, two-body composite vs full FCI
    let names = ["a", "b", "c", "ab", "ac", "bc"];
    let ints: Vec<MoIntegrals<f64>> = names
        .iter()
        .map(|n| load(&format!("h2trimer_{n}")))
        .collect();
    let frags: Vec<SpatialFragment<'_, f64>> = names
        .iter()
        .zip(&ints)
        .map(|(n, i)| frag(n, i, &partition_blocks(closed(i), 1).unwrap()))
        .collect();
    let cluster = ClusterSpec {
        monomers: frags[..3].to_vec(),
        dimers: vec![
            ((0, 1), frags[3].clone()),
            ((0, 2), frags[4].clone()),
            ((1, 2), frags[5].clone()),
        ],
    };
    let r =
        hierarchical_expand(&cluster, Method::Fci, &fci_options(2)).map_err(|e| e.to_string())?;
    let trimer = (r.total_energy - reference("h2trimer_abc", "e_fci")).abs();
    ensure(
        trimer <= 5e-3,
        format!("trimer composite off by {trimer:e}"),
    )?;
    Ok(format!(
        "H2+H2 block-diagonal gap {gap:.1e} <= 1e-8; H2 trimer composite vs FCI {:.2} mHa <= 5 mHa",
        trimer * 1e3
    ))
}

fn resource_monotonicity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    for _ in 0..200 {
        let o = rng.gen_range(1..=12);
        let v = rng.gen_range(2..=60);
        let n = rng.gen_range(2..=v.min(6));
        let ints = MoIntegrals::<f64>::new(o + v, 2 * o).unwrap();
        let p = partition_blocks(closed(&ints), n).unwrap();
        let b = budget_for_plan(&p, n, 0);
        for (k, s) in &b.per_subset {
            if k.order() < n {
                ensure(
                    s.qubits < b.full_qubits
                        && s.ansatz.depth_estimate < b.full_ansatz.depth_estimate,
                    format!(
                        "o={o} v={v} N={n} subset {k}: {} qubits vs {}",
                        s.qubits, b.full_qubits
                    ),
                )?;
                checked += 1;
            }
        }
    }
    Ok(format!(
        "{checked} proper-subset estimates over 200 random plans strictly below full"
    ))
}

fn workspace() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn cli(config: &str, jobs: usize, format: &str) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_fvo"))
        .arg("run")
        .arg("--config")
        .arg(workspace().join("configs").join(config))
        .args(["--jobs", &jobs.to_string(), "--format", format])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(
        out.status.success(),
        String::from_utf8_lossy(&out.stderr).to_string(),
    )?;
    Ok(out.stdout)
}

fn determinism() -> Check {
    let mut runs = 0;
    for config in ["h4_fci.toml", "h2_trimer.toml", "h2o_mp2.toml"] {
        for format in ["json", "csv"] {
            let first = cli(config, 1, format)?;
            for jobs in [1, 2, 4, 8] {
                let again = cli(config, jobs, format)?;
                ensure(
                    again == first,
                    format!("{config} {format} differs with --jobs {jobs}"),
                )?;
                runs += 1;
            }
        }
        // same numbers in both renderings
        let json: Value =
            serde_json::from_slice(&cli(config, 1, "json")?).map_err(|e| e.to_string())?;
        let csv = String::from_utf8(cli(config, 1, "csv")?).unwrap();
        let rows = json["system"]["convergence"]["rows"].as_array().unwrap();
        let csv_rows: Vec<&str> = csv
            .lines()
            .skip_while(|l| !l.starts_with("system,order"))
            .skip(1)
            .filter(|l| l.starts_with("system,"))
            .collect();
        ensure(
            rows.len() == csv_rows.len(),
            format!("{config}: row counts differ"),
        )?;
        for (r, line) in rows.iter().zip(csv_rows) {
            let cells: Vec<&str> = line.split(',').collect();
            let e: f64 = cells[2].parse().unwrap();
            ensure(
                e == r["energy_hartree"].as_f64().unwrap(),
                format!("{config}: JSON/CSV mismatch"),
            )?;
        }
    }
    Ok(format!(
        "{runs} CLI reruns byte-identical across --jobs 1/2/4/8; JSON and CSV agree"
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("qubit-formula reproduction", qubit_formula),
        ("inclusion-exclusion exactness", inclusion_exclusion),
        ("convergence-order behavior", convergence_order),
        ("solver fidelity", solver_fidelity),
        ("variational monotonicity", variational_monotonicity),
        ("mini-VQE correctness", mini_vqe),
        ("hierarchical size-consistency", size_consistency),
        ("resource-estimator monotonicity", resource_monotonicity),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail} ({secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why} ({secs:.2}s)", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
