"""Backbone torsions and their quantization onto the nine-star grid."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from . import aminoacids
from .chain import CHOICE_TORSION, TORSION_CHOICE, IncompleteChainError, Omega, RealizedChain

STAR_VALUES = (-60, 60, 180)
# Preference order for exact ties at a 60 degree midpoint.
_TIE_ORDER = (180, -60, 60)


class DegenerateGeometryError(ValueError):
    pass


class Star(NamedTuple):
    phi: int
    psi: int


STARS = tuple(Star(p, s) for p in STAR_VALUES for s in STAR_VALUES)


def _vec(p) -> tuple[float, float, float]:
    if hasattr(p, "to_float"):
        return p.to_float()
    x, y, z = p
    return (float(x), float(y), float(z))


def _sub(a, b):
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def dihedral(p1, p2, p3, p4) -> float:
    """Signed torsion about p2-p3 in degrees, in (-180, 180]."""
    a, b, c, d = map(_vec, (p1, p2, p3, p4))
    b1, b2, b3 = _sub(b, a), _sub(c, b), _sub(d, c)
    n1, n2 = _cross(b1, b2), _cross(b2, b3)
    lb2 = math.sqrt(_dot(b2, b2))
    scale = max(math.sqrt(_dot(b1, b1)), lb2, math.sqrt(_dot(b3, b3)), 1e-300)
    eps = 1e-12 * scale * scale
    if lb2 <= 1e-12 * scale or math.sqrt(_dot(n1, n1)) <= eps or math.sqrt(_dot(n2, n2)) <= eps:
        raise DegenerateGeometryError("dihedral undefined for collinear or coincident points")
    ang = math.degrees(math.atan2(lb2 * _dot(b1, n2), _dot(n1, n2)))
    return 180.0 if ang <= -180.0 else ang


def circular_distance(a: float, b: float) -> float:
    d = abs(a - b) % 360.0
    return min(d, 360.0 - d)


def quantize_angle(a: float) -> int:
    if not math.isfinite(a):
        raise ValueError("angle must be finite")
    return min(_TIE_ORDER, key=lambda s: (round(circular_distance(a, s), 12), _TIE_ORDER.index(s)))


def quantize(phi: float, psi: float) -> Star:
    """Nearest star, per axis, under circular distance."""
    return Star(quantize_angle(phi), quantize_angle(psi))


def quantize_omega(omega: float) -> Omega:
    return Omega.TRANS if circular_distance(omega, 0.0) > 90.0 else Omega.CIS


def star_to_choices(star: Star) -> tuple[int, int]:
    return TORSION_CHOICE[star.phi], TORSION_CHOICE[star.psi]


def choices_to_star(phi_choice: int, psi_choice: int) -> Star:
    return Star(CHOICE_TORSION[phi_choice], CHOICE_TORSION[psi_choice])


def allowed_stars(amino_acid: str) -> frozenset[Star]:
    code = aminoacids.normalize(amino_acid)
    if code == "Gly":
        return frozenset(STARS)
    if code == "Pro":
        return frozenset(s for s in STARS if s.phi == -60)
    return frozenset(s for s in STARS if s != Star(60, -60))


@dataclass(frozen=True)
class AngleRow:
    index: int
    phi: float | None
    psi: float | None
    omega: float | None  # bond to the next residue

    def star(self) -> tuple[int | None, int | None]:
        return (None if self.phi is None else quantize_angle(self.phi),
                None if self.psi is None else quantize_angle(self.psi))


AngleTable = list[AngleRow]


def _backbone(chain) -> list[tuple]:
    if isinstance(chain, RealizedChain):
        return chain.backbone()
    if hasattr(chain, "residues"):
        rows = []
        for r in chain.residues:
            if r.n is None or r.ca is None or r.c is None:
                raise IncompleteChainError(f"residue {getattr(r, 'seq', '?')} lacks N/CA/C")
            rows.append((r.n, r.ca, r.c))
        return rows
    rows = list(chain)
    for k, r in enumerate(rows):
        if len(r) != 3 or any(a is None for a in r):
            raise IncompleteChainError(f"residue {k} lacks N/CA/C")
    return rows


def phi_psi_omega(chain, indices: Sequence[int] | None = None) -> AngleTable:
    """phi, psi, omega per residue; undefined terminal values are None."""
    bb = _backbone(chain)
    if len(bb) < 2:
        raise IncompleteChainError("need at least two residues")
    if indices is None:
        indices = range(1, len(bb) + 1)
    out = []
    for i, (n, ca, c) in enumerate(bb):
        phi = dihedral(bb[i - 1][2], n, ca, c) if i > 0 else None
        if i + 1 < len(bb):
            nn, ca2 = bb[i + 1][0], bb[i + 1][1]
            psi = dihedral(n, ca, c, nn)
            omega = dihedral(ca, c, nn, ca2)
        else:
            psi = omega = None
        out.append(AngleRow(indices[i], phi, psi, omega))
    return out


def _fmt(x) -> str:
    return "" if x is None else f"{x:.6f}"


def angle_table_csv(table: AngleTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["residue_index", "phi", "psi", "omega", "star_phi", "star_psi"])
    for row in table:
        sp, ss = row.star()
        w.writerow([row.index, _fmt(row.phi), _fmt(row.psi), _fmt(row.omega),
                    "" if sp is None else sp, "" if ss is None else ss])
    return buf.getvalue()
