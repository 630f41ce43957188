"""Conformation codes and their realization on the diamond lattice.

A residue's rotational state is a pair of choices ``(phi, psi)`` in 1..3.
Each choice picks one of the three bond directions available at the
C-alpha (phi) or carbonyl C (psi).  Candidates are labelled by the torsion
they produce against the preceding bond pair, so labels are internal
coordinates independent of how the chain is oriented in space:

    choice  1 -> -60 deg,  2 -> +60 deg,  3 -> 180 deg

The all-3 code is therefore the fully extended zig-zag.  ``phi`` of the first
residue and ``psi`` of the last only move the chain rigidly (or the dangling
next-N site), so :meth:`ConformationCode.canonical` fixes both to 3.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .geometry import (
    E,
    IDENTITY,
    ZERO,
    Frame,
    Parity,
    Rat3,
    bond_directions,
    e1,
    e2,
    rot_180_about,
    triple,
    triple_sign,
)

CHOICES = (1, 2, 3)
CHOICE_TORSION = {1: -60, 2: 60, 3: 180}
TORSION_CHOICE = {v: k for k, v in CHOICE_TORSION.items()}
EXTENDED = 3


class Omega(str, enum.Enum):
    TRANS = "trans"
    CIS = "cis"

    def flipped(self) -> "Omega":
        return Omega.CIS if self is Omega.TRANS else Omega.TRANS


class Chirality(str, enum.Enum):
    L = "L"
    D = "D"
    ACHIRAL = "achiral"


class IncompleteChainError(ValueError):
    pass


def is_glycine(label: str) -> bool:
    return label.strip().upper() in ("G", "GLY")


@dataclass(frozen=True)
class ResidueCode:
    amino_acid: str = "X"
    phi: int = EXTENDED
    psi: int = EXTENDED
    omega: Omega = Omega.TRANS

    def __post_init__(self):
        if self.phi not in CHOICES or self.psi not in CHOICES:
            raise ValueError(f"rotation choices must be in 1..3, got ({self.phi}, {self.psi})")
        object.__setattr__(self, "omega", Omega(self.omega))


@dataclass(frozen=True)
class ConformationCode:
    residues: tuple[ResidueCode, ...]
    chirality: Chirality = Chirality.L

    def __post_init__(self):
        object.__setattr__(self, "residues", tuple(self.residues))
        object.__setattr__(self, "chirality", Chirality(self.chirality))
        if not self.residues:
            raise ValueError("a conformation code needs at least one residue")
        if self.chirality is Chirality.ACHIRAL:
            raise ValueError("chain chirality must be L or D")

    def __len__(self) -> int:
        return len(self.residues)

    @property
    def sequence(self) -> tuple[str, ...]:
        return tuple(r.amino_acid for r in self.residues)

    @classmethod
    def from_choices(
        cls,
        choices: Sequence[tuple[int, int]],
        sequence: Sequence[str] | None = None,
        omegas: Sequence[Omega | str] | None = None,
        chirality: Chirality = Chirality.L,
    ) -> "ConformationCode":
        n = len(choices)
        sequence = ["X"] * n if sequence is None else list(sequence)
        omegas = [Omega.TRANS] * n if omegas is None else list(omegas)
        if len(sequence) != n or len(omegas) != n:
            raise ValueError("choices, sequence and omegas must have equal length")
        return cls(
            tuple(ResidueCode(a, p, s, w) for (p, s), a, w in zip(choices, sequence, omegas)),
            chirality,
        )

    @classmethod
    def extended(cls, sequence: Sequence[str] | int) -> "ConformationCode":
        if isinstance(sequence, int):
            sequence = ["X"] * sequence
        return cls(tuple(ResidueCode(a) for a in sequence))

    @classmethod
    def from_dofs(cls, dofs: Sequence[tuple[int, int]], sequence: Sequence[str],
                  omegas: Sequence[Omega | str] | None = None, **kw) -> "ConformationCode":
        """Build a canonical code from its free choices.

        ``dofs[k]`` is ``(psi_k, phi_{k+1})`` for peptide bond k, i.e. the two
        torsions that fix residue k+1 relative to residue k.
        """
        n = len(sequence)
        if len(dofs) != n - 1:
            raise ValueError(f"need {n - 1} (psi, phi) pairs for {n} residues")
        phis = [EXTENDED] + [p for _, p in dofs]
        psis = [s for s, _ in dofs] + [EXTENDED]
        if omegas is None:
            omegas = [Omega.TRANS] * n
        elif len(omegas) == n - 1:
            omegas = list(omegas) + [Omega.TRANS]
        return cls.from_choices(list(zip(phis, psis)), sequence, omegas, **kw)

    def dofs(self) -> tuple[tuple[int, int], ...]:
        rs = self.residues
        return tuple((rs[k].psi, rs[k + 1].phi) for k in range(len(rs) - 1))

    def canonical(self) -> "ConformationCode":
        """Fix the choices that carry no internal geometry (first phi, last psi, last omega)."""
        rs = list(self.residues)
        rs[0] = replace(rs[0], phi=EXTENDED)
        rs[-1] = replace(rs[-1], psi=EXTENDED, omega=Omega.TRANS)
        return replace(self, residues=tuple(rs))

    def to_string(self) -> str:
        """Compact text form: ``phi psi`` digits per residue, ``c`` marking a cis bond."""
        return "-".join(
            f"{r.phi}{r.psi}{'c' if r.omega is Omega.CIS else ''}" for r in self.residues
        )

    @classmethod
    def from_string(cls, text: str, sequence: Sequence[str] | None = None,
                    chirality: Chirality = Chirality.L) -> "ConformationCode":
        parts = text.strip().split("-")
        choices, omegas = [], []
        for p in parts:
            if len(p) not in (2, 3) or not p[:2].isdigit() or (len(p) == 3 and p[2] != "c"):
                raise ValueError(f"bad residue token {p!r}")
            choices.append((int(p[0]), int(p[1])))
            omegas.append(Omega.CIS if p.endswith("c") else Omega.TRANS)
        return cls.from_choices(choices, sequence, omegas, chirality)

    def to_json(self) -> list[dict]:
        return [
            {"amino_acid": r.amino_acid, "phi": r.phi, "psi": r.psi, "omega": r.omega.value}
            for r in self.residues
        ]


# ---------------------------------------------------------------------------
# edits


def _check(code: ConformationCode, i: int, upper: int | None = None) -> None:
    upper = len(code) if upper is None else upper
    if not 0 <= i < upper:
        raise IndexError(f"residue index {i} out of range for length {len(code)}")


def _with(code: ConformationCode, residues) -> ConformationCode:
    return replace(code, residues=tuple(residues))


def set_rotation(code: ConformationCode, i: int, phi: int, psi: int) -> ConformationCode:
    _check(code, i)
    rs = list(code.residues)
    rs[i] = replace(rs[i], phi=phi, psi=psi)
    return _with(code, rs)


def flip_omega(code: ConformationCode, i: int) -> ConformationCode:
    _check(code, i)
    rs = list(code.residues)
    rs[i] = replace(rs[i], omega=rs[i].omega.flipped())
    return _with(code, rs)


def insert(code: ConformationCode, i: int, residue: ResidueCode) -> ConformationCode:
    _check(code, i, len(code) + 1)
    rs = list(code.residues)
    rs.insert(i, residue)
    return _with(code, rs)


def delete(code: ConformationCode, i: int) -> ConformationCode:
    _check(code, i)
    if len(code) < 2:
        raise ValueError("cannot delete from a single-residue code")
    rs = list(code.residues)
    del rs[i]
    return _with(code, rs)


def swap_adjacent(code: ConformationCode, i: int) -> ConformationCode:
    """Exchange the amino acids of residues i and i+1; rotations stay in place."""
    _check(code, i, len(code) - 1)
    rs = list(code.residues)
    a, b = rs[i], rs[i + 1]
    rs[i] = replace(a, amino_acid=b.amino_acid)
    rs[i + 1] = replace(b, amino_acid=a.amino_acid)
    return _with(code, rs)


_EDITS = {
    "set_rotation": set_rotation,
    "flip_omega": flip_omega,
    "insert": insert,
    "delete": delete,
    "swap_adjacent": swap_adjacent,
}


def edit(code: ConformationCode, op: str, *args) -> ConformationCode:
    try:
        fn = _EDITS[op]
    except KeyError:
        raise ValueError(f"unknown edit {op!r}; expected one of {sorted(_EDITS)}") from None
    return fn(code, *args)


# ---------------------------------------------------------------------------
# realization


@dataclass(frozen=True)
class Start:
    """Anchor of residue 1.

    ``n_dir`` is the C-alpha -> N bond and ``c_prev_dir`` the N -> (virtual)
    preceding C bond that serves as the reference for the first phi.
    """

    origin: Rat3 = ZERO
    parity: Parity = Parity.A
    frame: Frame = IDENTITY
    n_dir: Rat3 = e2
    c_prev_dir: Rat3 = -e1

    def __post_init__(self):
        if self.n_dir not in bond_directions(self.parity, self.frame):
            raise ValueError("n_dir is not a bond direction at the start site")
        at_n = bond_directions(self.parity.flip(), self.frame)
        if self.c_prev_dir not in at_n or self.c_prev_dir == -self.n_dir:
            raise ValueError("c_prev_dir must be a free bond direction at N")


@dataclass(frozen=True)
class RealizeOptions:
    start: Start = field(default_factory=Start)
    side_chains: bool = True
    carbonyl: bool = False
    carbonyl_factor: float = 0.8


@dataclass(frozen=True)
class ResidueSites:
    amino_acid: str
    n: Rat3
    ca: Rat3
    c: Rat3
    r: Rat3 | None = None
    o: tuple[float, float, float] | None = None


@dataclass(frozen=True)
class _Cursor:
    # Everything needed to place the next residue.
    ca: Rat3
    parity: Parity
    frame: Frame
    d_cn: Rat3
    d_na: Rat3


@dataclass(frozen=True)
class RealizedChain:
    code: ConformationCode
    residues: tuple[ResidueSites, ...]
    prev_c: Rat3
    next_n: Rat3
    options: RealizeOptions
    cursor: _Cursor = field(repr=False)

    def __len__(self) -> int:
        return len(self.residues)

    @property
    def frame(self) -> Frame:
        return self.cursor.frame

    @property
    def parity(self) -> Parity:
        return self.cursor.parity

    @property
    def omegas(self) -> tuple[Omega, ...]:
        return tuple(r.omega for r in self.code.residues[:-1])

    def backbone(self) -> list[tuple[Rat3, Rat3, Rat3]]:
        return [(s.n, s.ca, s.c) for s in self.residues]

    def ca_positions(self) -> list[Rat3]:
        return [s.ca for s in self.residues]

    def bonds(self) -> Iterator[tuple[Rat3, Rat3]]:
        res = self.residues
        for k, s in enumerate(res):
            yield s.n, s.ca
            yield s.ca, s.c
            if k + 1 < len(res):
                yield s.c, res[k + 1].n


def _classify(b1: Rat3, b2: Rat3, cands: Iterable[Rat3]) -> dict[int, Rat3]:
    out = {}
    for c in cands:
        if c == b1:
            out[3] = c
        else:
            out[1 if triple_sign(b1, b2, c) < 0 else 2] = c
    if len(out) != 3:
        raise AssertionError("candidate torsions are not a staggered triple")
    return out


@dataclass(frozen=True)
class _Step:
    d_ac: Rat3
    d_cn: Rat3
    d_r: Rat3 | None
    o_dir: Rat3  # unnormalized carbonyl direction, |o_dir| = 1/2
    next_frame: Frame
    next_d_na: Rat3


@lru_cache(maxsize=1 << 16)
def _step(frame: Frame, parity: Parity, d_cn_prev: Rat3, d_na: Rat3,
          phi: int, psi: int, omega: Omega, chirality: Chirality,
          side_chain: bool) -> _Step:
    at_ca = bond_directions(parity, frame)
    d_ac = _classify(d_cn_prev, d_na, (d for d in at_ca if d != -d_na))[phi]
    at_c = bond_directions(parity.flip(), frame)
    d_cn = _classify(d_na, d_ac, (d for d in at_c if d != -d_ac))[psi]

    d_r = None
    if side_chain:
        free = [d for d in at_ca if d not in (-d_na, d_ac)]
        # L <=> det[N->CA, CA->C, CA->R] < 0 (CORN rule, checked on PDB L-Ala).
        want_negative = chirality is Chirality.L
        (d_r,) = [d for d in free if (triple_sign(d_na, d_ac, d) < 0) == want_negative]

    unused = [d for d in at_c if d not in (-d_ac, d_cn)]
    o_dir = unused[0] + unused[1]

    if omega is Omega.CIS:
        flip = rot_180_about(d_cn)
        next_frame = flip @ frame
        next_d_na = flip.apply(d_ac)
    else:
        next_frame = frame
        next_d_na = d_ac
    return _Step(d_ac, d_cn, d_r, o_dir, next_frame, next_d_na)


def _place(cursor: _Cursor, rc: ResidueCode, chirality: Chirality,
           opts: RealizeOptions) -> tuple[ResidueSites, Rat3, _Cursor]:
    side = opts.side_chains and not is_glycine(rc.amino_acid)
    st = _step(cursor.frame, cursor.parity, cursor.d_cn, cursor.d_na,
               rc.phi, rc.psi, rc.omega, chirality, side)
    ca = cursor.ca
    n = ca - cursor.d_na
    c = ca + st.d_ac
    next_n = c + st.d_cn
    r = ca + st.d_r if st.d_r is not None else None
    o = None
    if opts.carbonyl:
        # |o_dir| = 1/2 and a bond is sqrt(3)/4 long.
        k = opts.carbonyl_factor * math.sqrt(3) / 2
        o = tuple(float(p) + k * float(d) for p, d in zip(c, st.o_dir))
    sites = ResidueSites(rc.amino_acid, n, ca, c, r, o)
    nxt = _Cursor(next_n + st.next_d_na, cursor.parity.flip(), st.next_frame,
                  st.d_cn, st.next_d_na)
    return sites, next_n, nxt


def realize(code: ConformationCode, opts: RealizeOptions | None = None) -> RealizedChain:
    """Build exact backbone coordinates for ``code``."""
    opts = RealizeOptions() if opts is None else opts
    s = opts.start
    n1 = s.origin + s.n_dir
    cursor = _Cursor(s.origin, s.parity, s.frame, -s.c_prev_dir, -s.n_dir)
    prev_c = n1 + s.c_prev_dir
    sites = []
    next_n = None
    for rc in code.residues:
        site, next_n, cursor = _place(cursor, rc, code.chirality, opts)
        sites.append(site)
    return RealizedChain(code, tuple(sites), prev_c, next_n, opts, cursor)


def extend(chain: RealizedChain, residue: ResidueCode) -> RealizedChain:
    """Append one residue; the bond to it uses the current last residue's omega."""
    site, next_n, cursor = _place(chain.cursor, residue, chain.code.chirality, chain.options)
    code = replace(chain.code, residues=chain.code.residues + (residue,))
    return replace(chain, code=code, residues=chain.residues + (site,),
                   next_n=next_n, cursor=cursor)


def successors(prefix: RealizedChain, amino_acid: str = "X") -> list[tuple[tuple[int, int], RealizedChain]]:
    """The nine trans placements of a further residue, phi-choice major."""
    return [
        ((phi, psi), extend(prefix, ResidueCode(amino_acid, phi, psi)))
        for phi, psi in itertools.product(CHOICES, CHOICES)
    ]


ATOMS_DEFAULT = ("n", "ca", "c", "r")


def occupied_sites(chain: RealizedChain, atoms: Sequence[str] = ATOMS_DEFAULT) -> list[Rat3]:
    out = []
    for s in chain.residues:
        for a in atoms:
            p = getattr(s, a)
            if p is not None:
                out.append(p)
    return out


def self_avoiding(chain: RealizedChain, atoms: Sequence[str] = ATOMS_DEFAULT) -> bool:
    """True iff the selected atoms of ``chain`` occupy pairwise distinct points.

    ``o`` (carbonyl) is a float decoration and is never allowed here.
    """
    if "o" in atoms:
        raise ValueError("carbonyl O is not on the exact lattice; exclude it")
    pts = occupied_sites(chain, atoms)
    return len(set(pts)) == len(pts)


def chirality_of(chain: RealizedChain, i: int) -> Chirality:
    s = chain.residues[i]
    if is_glycine(s.amino_acid):
        return Chirality.ACHIRAL
    if s.r is None:
        raise IncompleteChainError(f"residue {i} ({s.amino_acid}) has no side-chain site")
    t = triple(s.ca - s.n, s.c - s.ca, s.r - s.ca)
    if t == 0:
        raise IncompleteChainError(f"residue {i} has a planar C-alpha")
    return Chirality.L if t < 0 else Chirality.D


def all_codes(n: int, sequence: Sequence[str] | None = None, cis: bool = False,
              chirality: Chirality = Chirality.L) -> Iterator[ConformationCode]:
    """Every canonical code of length ``n`` (9^(n-1), or 18^(n-1) with cis)."""
    sequence = ["X"] * n if sequence is None else list(sequence)
    pairs = list(itertools.product(CHOICES, CHOICES))
    omegas = [Omega.TRANS, Omega.CIS] if cis else [Omega.TRANS]
    for dofs in itertools.product(pairs, repeat=n - 1):
        for ws in itertools.product(omegas, repeat=n - 1):
            yield ConformationCode.from_dofs(dofs, sequence, ws, chirality=chirality)


def invert(chain: RealizedChain) -> list[ResidueSites]:
    """Point-invert every site through the origin (mirror image)."""
    neg = lambda p: None if p is None else -p  # noqa: E731
    return [
        ResidueSites(s.amino_acid, -s.n, -s.ca, -s.c, neg(s.r),
                     None if s.o is None else tuple(-x for x in s.o))
        for s in chain.residues
    ]


__all__ = [
    "CHOICES", "CHOICE_TORSION", "TORSION_CHOICE", "EXTENDED", "Omega", "Chirality",
    "IncompleteChainError", "ResidueCode", "ConformationCode", "Start", "RealizeOptions",
    "ResidueSites", "RealizedChain", "realize", "extend", "successors", "self_avoiding",
    "occupied_sites", "chirality_of", "edit", "set_rotation", "flip_omega", "insert",
    "delete", "swap_adjacent", "all_codes", "invert", "is_glycine", "E",
]
