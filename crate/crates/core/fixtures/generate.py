"""Regenerate the FCIDUMP fixtures and reference energies with PySCF.

    python3 generate.py

Writes *.fcidump, *.centroids and reference.json next to this script.
Occupied orbitals stay canonical; where noted, the virtual block is
Boys-localized and a centroid sidecar is emitted for it.
"""

import json
import os

import numpy as np
from pyscf import ao2mo, fci, gto, lo, mcscf, mp, scf
from pyscf.tools import fcidump

HERE = os.path.dirname(os.path.abspath(__file__))
REFERENCE = {}


def build(atom, basis):
    mol = gto.M(atom=atom, basis=basis, unit="Bohr", verbose=0)
    mf = scf.RHF(mol)
    mf.conv_tol = 1e-13
    mf.kernel()
    assert mf.converged
    return mol, mf


def mo_integrals(mol, mf, coeff):
    h1 = coeff.T @ mf.get_hcore() @ coeff
    eri = ao2mo.full(mol, coeff, compact=False).reshape((coeff.shape[1],) * 4)
    return h1, eri


def write(name, mol, mf, coeff, eps=None):
    nmo = coeff.shape[1]
    h1, eri = mo_integrals(mol, mf, coeff)
    path = os.path.join(HERE, name + ".fcidump")
    fcidump.from_integrals(path, h1, ao2mo.restore(8, eri, nmo), nmo, mol.nelectron,
                           nuc=mol.energy_nuc(), ms=0, tol=1e-14)
    if eps is not None:
        text = open(path).read().splitlines()
        nuc_line = text.pop()
        text += [" %.16g  %d  0  0  0" % (e, i + 1) for i, e in enumerate(eps)]
        text.append(nuc_line)
        open(path, "w").write("\n".join(text) + "\n")
    return h1, eri


def fci_total(h1, eri, nmo, nelec, enuc, ncore=0):
    if ncore:
        core = slice(0, ncore)
        act = slice(ncore, nmo)
        ecore = enuc + 2 * np.einsum("ii", h1[core, core])
        ecore += 2 * np.einsum("iijj", eri[core, core, core, core])
        ecore -= np.einsum("ijji", eri[core, core, core, core])
        heff = h1[act, act] + 2 * np.einsum("pqii->pq", eri[act, act, core, core]) \
            - np.einsum("piiq->pq", eri[act, core, core, act])
        e, _ = fci.direct_spin1.kernel(heff, eri[act, act, act, act], nmo - ncore,
                                       nelec - 2 * ncore, ecore=ecore, conv_tol=1e-14)
        return e
    e, _ = fci.direct_spin1.kernel(h1, eri, nmo, nelec, ecore=enuc, conv_tol=1e-14)
    return e


def localize_virtuals(mol, mf):
    nocc = mol.nelectron // 2
    coeff = mf.mo_coeff.copy()
    if coeff.shape[1] - nocc > 1:
        boys = lo.Boys(mol, coeff[:, nocc:])
        boys.conv_tol = 1e-12
        coeff[:, nocc:] = boys.kernel()
    return coeff


def write_centroids(name, mol, coeff, groups):
    nocc = mol.nelectron // 2
    r = mol.intor("int1e_r")
    lines = ["# orbital centroids (bohr) for the virtual block of %s.fcidump" % name]
    for label, atoms in groups:
        lines.append("[group %s]" % label)
        for a in atoms:
            x, y, z = mol.atom_coord(a)
            lines.append("%.10f %.10f %.10f" % (x, y, z))
    lines.append("[orbitals]")
    for p in range(nocc, coeff.shape[1]):
        c = coeff[:, p]
        xyz = [c @ r[k] @ c for k in range(3)]
        lines.append("%d %.10f %.10f %.10f" % (p + 1, *xyz))
    open(os.path.join(HERE, name + ".centroids"), "w").write("\n".join(lines) + "\n")


def canonical(name, atom, basis, frozen=0, eps_variant=False):
    mol, mf = build(atom, basis)
    h1, eri = write(name, mol, mf, mf.mo_coeff)
    if eps_variant:
        write(name + "_eps", mol, mf, mf.mo_coeff, eps=mf.mo_energy)
    nmo = h1.shape[0]
    ref = {
        "e_nuclear": mol.energy_nuc(),
        "e_hf": mf.e_tot,
        "e_mp2_corr": mp.MP2(mf).kernel()[0],
        "e_fci": fci_total(h1, eri, nmo, mol.nelectron, mol.energy_nuc()),
    }
    if frozen:
        ref["n_frozen"] = frozen
        ref["e_mp2_corr_frozen"] = mp.MP2(mf, frozen=frozen).kernel()[0]
        cas = mcscf.CASCI(mf, nmo - frozen, mol.nelectron - 2 * frozen)
        cas.fcisolver.conv_tol = 1e-14
        ref["e_fci_frozen"] = cas.kernel()[0]
        ref["e_fci_frozen_check"] = fci_total(h1, eri, nmo, mol.nelectron,
                                              mol.energy_nuc(), ncore=frozen)
    REFERENCE[name] = ref


def localized(name, atom, basis, groups):
    mol, mf = build(atom, basis)
    coeff = localize_virtuals(mol, mf)
    h1, eri = write(name, mol, mf, coeff)
    write_centroids(name, mol, coeff, groups)
    nmo = h1.shape[0]
    REFERENCE[name] = {
        "e_nuclear": mol.energy_nuc(),
        "e_hf": mf.e_tot,
        "e_fci": fci_total(h1, eri, nmo, mol.nelectron, mol.energy_nuc()),
    }


H2 = "H 0 0 0; H 0 0 1.4"
H2O = "O 0 0 0.2217971; H 0 1.4308191 -0.8871884; H 0 -1.4308191 -0.8871884"
H4 = "H 0 0 0; H 0 0 1.4; H 0 0 3.6; H 0 0 5.0"

canonical("h2_sto3g", H2, "sto-3g")
canonical("h2o_sto3g", H2O, "sto-3g", frozen=1, eps_variant=True)
localized("h4_631g", H4, "6-31g", [("left", [0, 1]), ("right", [2, 3])])

# (H2)3 cluster: three H2 units on an equilateral triangle of side 4 bohr.
MONOMERS = {
    "a": [(0.0, 0.0, 0.0), (0.0, 0.0, 1.4)],
    "b": [(4.0, 0.0, 0.0), (4.0, 0.0, 1.4)],
    "c": [(2.0, 3.4641016151, 0.0), (2.0, 3.4641016151, 1.4)],
}


def cluster_atoms(keys):
    return "; ".join("H %.10f %.10f %.10f" % xyz for k in keys for xyz in MONOMERS[k])


for keys in ["a", "b", "c", "ab", "ac", "bc", "abc"]:
    groups = [(k, [2 * i, 2 * i + 1]) for i, k in enumerate(keys)]
    localized("h2trimer_" + keys, cluster_atoms(keys), "sto-3g", groups)

with open(os.path.join(HERE, "reference.json"), "w") as f:
    json.dump(REFERENCE, f, indent=2, sort_keys=True)
    f.write("\n")
print(json.dumps(REFERENCE, indent=2, sort_keys=True))
