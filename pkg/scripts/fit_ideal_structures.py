"""Fit ideal secondary-structure backbones onto the lattice.

    python3 scripts/fit_ideal_structures.py [--length 12]

Builds ideal-geometry backbones for a few (phi, psi) families, snaps each to
its nearest lattice code and prints code, rmsd and the mirror-image rmsd.
"""

import argparse

from diamondfold.structure import fit_to_lattice, ideal_backbone

FAMILIES = {
    "alpha helix": (-57.0, -47.0),
    "3-10 helix": (-49.0, -26.0),
    "beta strand": (-119.0, 113.0),
    "PPII": (-75.0, 145.0),
    "left helix": (57.0, 47.0),
}


def mirrored(chain):
    for r in chain.residues:
        r.n, r.ca, r.c = (v * [1, 1, -1] for v in (r.n, r.ca, r.c))
        if r.cb is not None:
            r.cb = r.cb * [1, 1, -1]
    return chain


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--length", type=int, default=12)
    n = ap.parse_args().length
    print(f"{'family':<12} {'code':<{3 * n + 2}} rmsd_A  mirror_rmsd_A")
    for name, (phi, psi) in FAMILIES.items():
        chain = ideal_backbone([phi] * n, [psi] * (n - 1), cb=True)
        fit = fit_to_lattice(chain)
        mir = fit_to_lattice(mirrored(ideal_backbone([phi] * n, [psi] * (n - 1), cb=True)))
        print(f"{name:<12} {fit.code.to_string():<{3 * n + 2}} {fit.rmsd:6.3f}  {mir.rmsd:6.3f}")


if __name__ == "__main__":
    main()
