"""Generate STO-3G integral fixtures (FCIDUMP plus metadata JSON) with PySCF.

Usage: python generate.py OUT_DIR [NAME ...]   (default: all molecules)
"""

import argparse
import json
import math
from pathlib import Path


def nh3_geometry(r=1.0, angle=107.0):
    """C3v placement: N at the origin, hydrogens below it with the requested H-N-H angle."""
    a = math.radians(angle)
    polar = math.asin(math.sqrt((1 - math.cos(a)) / 1.5))
    hydrogens = [
        ("H", (r * math.sin(polar) * math.cos(phi), r * math.sin(polar) * math.sin(phi), -r * math.cos(polar)))
        for phi in (2 * math.pi * k / 3 for k in range(3))
    ]
    return [("N", (0.0, 0.0, 0.0))] + hydrogens


def h2o_geometry(r=1.0, angle=107.6):
    half = math.radians(angle) / 2
    return [
        ("O", (0.0, 0.0, 0.0)),
        ("H", (r * math.sin(half), 0.0, r * math.cos(half))),
        ("H", (-r * math.sin(half), 0.0, r * math.cos(half))),
    ]


MOLECULES = {
    "h2": [("H", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, 1.0))],
    "lih": [("Li", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, 1.0))],
    "beh2": [("Be", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, 1.0)), ("H", (0.0, 0.0, -1.0))],
    "h2o": h2o_geometry(),
    "nh3": nh3_geometry(),
}


def generate(name, out_dir, basis="sto-3g"):
    from pyscf import ao2mo, fci, gto, scf
    from pyscf.tools import fcidump

    if basis.lower() != "sto-3g":
        raise ValueError(f"unsupported basis {basis!r}; only STO-3G fixtures are produced")
    geometry = MOLECULES[name]
    mol = gto.M(atom=geometry, basis=basis, unit="Angstrom", charge=0, spin=0, symmetry=False)
    mf = scf.RHF(mol)
    mf.conv_tol = 1e-12
    mf.kernel()
    if not mf.converged:
        raise RuntimeError(f"SCF did not converge for {name}")
    fcidump.from_scf(mf, str(out_dir / f"{name}.fcidump"), tol=1e-15)

    h1 = mf.mo_coeff.T @ mf.get_hcore() @ mf.mo_coeff
    eri = ao2mo.restore(1, ao2mo.kernel(mol, mf.mo_coeff), mol.nao)
    solver = fci.direct_spin1.FCI()
    solver.conv_tol = 1e-13
    e_fci, _ = solver.kernel(h1, eri, mol.nao, mol.nelectron, ecore=mol.energy_nuc(), nroots=1)
    meta = {
        "name": name,
        "e_fci": float(e_fci),
        "e_nuc": float(mol.energy_nuc()),
        "e_scf": float(mf.e_tot),
        "n_spatial": int(mol.nao),
        "nelec": int(mol.nelectron),
        "basis": "STO-3G",
        "geometry_angstrom": [[s, [float(x) for x in c]] for s, c in geometry],
    }
    (out_dir / f"{name}.meta.json").write_text(json.dumps(meta, indent=2))
    return meta


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out_dir", type=Path)
    parser.add_argument("names", nargs="*", help=f"subset of {sorted(MOLECULES)}")
    parser.add_argument("--basis", default="sto-3g")
    args = parser.parse_args()
    unknown = sorted(set(args.names) - set(MOLECULES))
    if unknown:
        parser.error(f"unknown molecules: {unknown}")
    args.out_dir.mkdir(parents=True, exist_ok=True)
    for name in args.names or MOLECULES:
        meta = generate(name, args.out_dir, args.basis)
        print(f"{name}: n_spatial={meta['n_spatial']} e_scf={meta['e_scf']:.10f} e_fci={meta['e_fci']:.10f}")


if __name__ == "__main__":
    main()
