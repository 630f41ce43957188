"""Minimal PDB backbone I/O, rigid superposition, and lattice fitting."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import aminoacids
from .chain import (
    EXTENDED,
    ConformationCode,
    IncompleteChainError,
    RealizedChain,
    RealizeOptions,
    ResidueCode,
    realize,
)
from .rama import phi_psi_omega, quantize_angle, quantize_omega
from .chain import TORSION_CHOICE

DEFAULT_SCALE = 1.53  # Angstrom per lattice bond (C-C single bond)
BACKBONE_ATOMS = ("N", "CA", "C", "O", "CB")


class PDBParseError(ValueError):
    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        super().__init__(message if lineno is None else f"line {lineno}: {message}")


class EmptyChainError(PDBParseError):
    pass


class ConditioningError(ValueError):
    pass


@dataclass
class ParsedResidue:
    name: str
    seq: int
    n: np.ndarray | None = None
    ca: np.ndarray | None = None
    c: np.ndarray | None = None
    o: np.ndarray | None = None
    cb: np.ndarray | None = None


@dataclass
class ParsedChain:
    chain_id: str
    residues: list[ParsedResidue]

    def __len__(self) -> int:
        return len(self.residues)

    def ca_array(self) -> np.ndarray:
        return np.array([r.ca for r in self.residues])


def parse_pdb_subset(text: str) -> ParsedChain:
    """Backbone N/CA/C (plus O and CB when present) of the first chain in the first model."""
    chain_id = None
    residues: dict[int, ParsedResidue] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        rec = line[:6]
        if rec.startswith("ENDMDL") and residues:
            break
        if rec != "ATOM  ":
            continue
        if len(line) < 54:
            raise PDBParseError("ATOM record shorter than 54 columns", lineno)
        cid = line[21]
        if chain_id is None:
            chain_id = cid
        elif cid != chain_id:
            continue
        atom = line[12:16].strip()
        if atom not in BACKBONE_ATOMS:
            continue
        if line[16] not in (" ", "A"):
            continue
        if line[26] != " ":
            raise PDBParseError(f"insertion code {line[26]!r} not supported", lineno)
        try:
            seq = int(line[22:26])
        except ValueError:
            raise PDBParseError(f"bad residue number {line[22:26]!r}", lineno) from None
        try:
            xyz = np.array([float(line[30:38]), float(line[38:46]), float(line[46:54])])
        except ValueError:
            raise PDBParseError(f"non-numeric coordinate in {line[30:54]!r}", lineno) from None
        name = line[17:20].strip()
        res = residues.setdefault(seq, ParsedResidue(name, seq))
        if res.name != name:
            raise PDBParseError(f"residue {seq} named both {res.name} and {name}", lineno)
        slot = atom.lower()
        if getattr(res, slot) is None:
            setattr(res, slot, xyz)
    if not residues:
        raise EmptyChainError("no ATOM records found")
    ordered = [residues[k] for k in sorted(residues)]
    for r in ordered:
        missing = [a for a in ("n", "ca", "c") if getattr(r, a) is None]
        if missing:
            raise IncompleteChainError(
                f"residue {r.name} {r.seq} missing {', '.join(a.upper() for a in missing)}")
    return ParsedChain(chain_id, ordered)


def _pdb_name(label: str) -> str:
    try:
        return aminoacids.normalize(label).upper()
    except LookupError:
        return label.upper()[:3] if len(label) == 3 else "UNK"


def _atom_line(serial, atom, resname, chain_id, seq, xyz, element) -> str:
    name = f" {atom:<3s}" if len(atom) < 4 else atom
    x, y, z = (0.0 if abs(v) < 5e-4 else v for v in xyz)  # no "-0.000"
    return (f"ATOM  {serial:5d} {name:4s} {resname:>3s} {chain_id}{seq:4d}    "
            f"{x:8.3f}{y:8.3f}{z:8.3f}{1.0:6.2f}{0.0:6.2f}          {element:>2s}")


def lattice_to_angstrom(scale: float) -> float:
    """Factor from unit-cell coordinates to Angstrom (a bond is sqrt(3)/4 cells)."""
    return 4 * scale / math.sqrt(3)


def emit_pdb_subset(chain: RealizedChain, scale: float = DEFAULT_SCALE, chain_id: str = "A",
                    include_cb: bool = False) -> str:
    """ATOM records for N, CA, C and, when realized, O (and CB from the side-chain site)."""
    if not scale > 0:
        raise ValueError("scale must be positive")
    k = lattice_to_angstrom(scale)
    lines, serial = [], 1
    for i, s in enumerate(chain.residues, 1):
        resname = _pdb_name(s.amino_acid)
        atoms = [("N", s.n.to_float(), "N"), ("CA", s.ca.to_float(), "C"), ("C", s.c.to_float(), "C")]
        if s.o is not None:
            atoms.append(("O", s.o, "O"))
        if include_cb and s.r is not None:
            atoms.append(("CB", s.r.to_float(), "C"))
        for atom, xyz, el in atoms:
            lines.append(_atom_line(serial, atom, resname, chain_id, i,
                                    [v * k for v in xyz], el))
            serial += 1
    lines.append("END")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Superposition:
    rotation: np.ndarray
    translation: np.ndarray
    rmsd: float

    def apply(self, pts) -> np.ndarray:
        return np.asarray(pts, float) @ self.rotation.T + self.translation


def superpose(a, b) -> Superposition:
    """Least-squares proper rotation + translation taking ``a`` onto ``b`` (Kabsch)."""
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    if a.shape != b.shape or a.ndim != 2 or a.shape[1] != 3:
        raise ValueError("point sets must both be (n, 3)")
    if len(a) < 3:
        raise ConditioningError("need at least three points")
    ca, cb = a.mean(axis=0), b.mean(axis=0)
    x, y = a - ca, b - cb
    for pts in (x, y):
        sv = np.linalg.svd(pts, compute_uv=False)
        if sv[1] <= 1e-9 * max(sv[0], 1e-300):
            raise ConditioningError("point set is collinear")
    h = x.T @ y
    u, _, vt = np.linalg.svd(h)
    d = np.sign(np.linalg.det(vt.T @ u.T)) or 1.0
    rot = vt.T @ np.diag([1.0, 1.0, d]) @ u.T
    t = cb - rot @ ca
    diff = x @ rot.T - y
    rmsd = float(np.sqrt((diff ** 2).sum() / len(a)))
    return Superposition(rot, t, rmsd)


@dataclass
class FitResult:
    code: ConformationCode
    rmsd: float
    scale: float
    superposition: Superposition = field(repr=False)

    def to_json(self) -> str:
        return json.dumps({
            "code": self.code.to_json(),
            "code_string": self.code.to_string(),
            "rmsd_angstrom": self.rmsd,
            "scale": self.scale,
        }, indent=2)


def _label(name: str) -> str:
    try:
        return aminoacids.normalize(name)
    except LookupError:
        return name


def fit_code(parsed: ParsedChain) -> ConformationCode:
    """Quantize measured torsions to a canonical conformation code."""
    if len(parsed) < 3:
        raise ValueError("fitting needs at least three residues")
    angles = phi_psi_omega(parsed)
    n = len(angles)
    rcs = []
    for i, row in enumerate(angles):
        phi = EXTENDED if i == 0 else TORSION_CHOICE[quantize_angle(row.phi)]
        psi = EXTENDED if i == n - 1 else TORSION_CHOICE[quantize_angle(row.psi)]
        omega = quantize_omega(row.omega) if row.omega is not None else "trans"
        rcs.append(ResidueCode(_label(parsed.residues[i].name), phi, psi, omega))
    return ConformationCode(tuple(rcs)).canonical()


def fit_to_lattice(parsed: ParsedChain, scale: float = DEFAULT_SCALE,
                   opts: RealizeOptions | None = None, use_cb: bool = True) -> FitResult:
    """Snap a real backbone onto the lattice and measure the distortion.

    RMSD is over C-alpha sites, plus CB against the lattice side-chain site
    wherever the input carries a CB; the CB pairs make the fit chirality-aware.
    """
    if not scale > 0:
        raise ValueError("scale must be positive")
    code = fit_code(parsed)
    chain = realize(code, opts or RealizeOptions())
    k = lattice_to_angstrom(scale)
    model = [p.to_float() for p in chain.ca_positions()]
    target = [r.ca for r in parsed.residues]
    if use_cb:
        for site, r in zip(chain.residues, parsed.residues):
            if r.cb is not None and site.r is not None:
                model.append(site.r.to_float())
                target.append(r.cb)
    sup = superpose(np.array(model) * k, np.array(target))
    return FitResult(code, sup.rmsd, scale, sup)


# Engh & Huber style ideal backbone geometry.
_IDEAL_BONDS = {"n_ca": 1.458, "ca_c": 1.525, "c_n": 1.329}
_IDEAL_ANGLES = {"n_ca_c": 111.2, "ca_c_n": 116.2, "c_n_ca": 121.7}


def _place_atom(a, b, c, bond, angle, torsion):
    """NeRF: position d with |cd| = bond, angle bcd, torsion abcd (degrees)."""
    ang, tor = math.radians(angle), math.radians(torsion)
    bc = c - b
    bc /= np.linalg.norm(bc)
    nrm = np.cross(b - a, bc)
    nrm /= np.linalg.norm(nrm)
    m = np.array([bc, np.cross(nrm, bc), nrm]).T
    d2 = bond * np.array([-math.cos(ang), math.sin(ang) * math.cos(tor), math.sin(ang) * math.sin(tor)])
    return c + m @ d2


def ideal_backbone(phis, psis, omegas=None, names=None, cb: bool = False) -> ParsedChain:
    """Backbone with ideal bond lengths/angles and the given torsions (degrees).

    ``phis[0]`` is ignored; ``psis`` and ``omegas`` need ``len(phis) - 1`` entries.
    With ``cb`` an L-configured CB is added to every non-glycine residue.
    """
    n = len(phis)
    omegas = [180.0] * (n - 1) if omegas is None else list(omegas)
    names = ["ALA"] * n if names is None else list(names)
    N = np.array([0.0, 0.0, 0.0])
    CA = np.array([_IDEAL_BONDS["n_ca"], 0.0, 0.0])
    ang = math.radians(_IDEAL_ANGLES["n_ca_c"])
    C = CA + _IDEAL_BONDS["ca_c"] * np.array([-math.cos(ang), math.sin(ang), 0.0])
    res = [ParsedResidue(names[0], 1, N, CA, C)]
    for i in range(1, n):
        pn, pca, pc = res[-1].n, res[-1].ca, res[-1].c
        N = _place_atom(pn, pca, pc, _IDEAL_BONDS["c_n"], _IDEAL_ANGLES["ca_c_n"], psis[i - 1])
        CA = _place_atom(pca, pc, N, _IDEAL_BONDS["n_ca"], _IDEAL_ANGLES["c_n_ca"], omegas[i - 1])
        C = _place_atom(pc, N, CA, _IDEAL_BONDS["ca_c"], _IDEAL_ANGLES["n_ca_c"], phis[i])
        res.append(ParsedResidue(names[i], i + 1, N, CA, C))
    if cb:
        for r in res:
            if r.name.upper() != "GLY":
                r.cb = _place_atom(r.c, r.n, r.ca, 1.530, 110.5, -122.6)
    return ParsedChain("A", res)


def emit_parsed(chain: ParsedChain) -> str:
    lines, serial = [], 1
    for r in chain.residues:
        for atom, xyz, el in (("N", r.n, "N"), ("CA", r.ca, "C"), ("C", r.c, "C"),
                              ("O", r.o, "O"), ("CB", r.cb, "C")):
            if xyz is None:
                continue
            lines.append(_atom_line(serial, atom, r.name, chain.chain_id, r.seq, xyz, el))
            serial += 1
    lines.append("END")
    return "\n".join(lines) + "\n"
