"""Contact energies, exhaustive and annealed fold search, packing fractions."""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from . import aminoacids
from .chain import (
    CHOICES,
    EXTENDED,
    ConformationCode,
    Omega,
    RealizedChain,
    RealizeOptions,
    _Cursor,
    _step,
    Chirality,
    flip_omega,
    is_glycine,
    realize,
    self_avoiding,
    set_rotation,
)
from .geometry import is_one_bond

THREADS_ENV = "DIAMONDFOLD_THREADS"


class InvalidConformationError(ValueError):
    pass


class SearchTooLargeError(ValueError):
    pass


class InitializationError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# energy models


@dataclass(frozen=True)
class ContactRule:
    min_separation: int = 2


def _key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class EnergyModel:
    """Pair contact energies over labels, with an optional residue -> label alias."""

    pair_energies: Mapping[tuple[str, str], float]
    rule: ContactRule = field(default_factory=ContactRule)
    alias: Mapping[str, str] = field(default_factory=dict)
    name: str = "custom"

    def __post_init__(self):
        table: dict[tuple[str, str], float] = {}
        for (a, b), e in dict(self.pair_energies).items():
            e = float(e)
            if not math.isfinite(e):
                raise ValueError(f"energy for {a}-{b} is not finite")
            k = _key(a, b)
            if k in table and table[k] != e:
                raise ValueError(f"asymmetric energies for {a}-{b}")
            table[k] = e
        object.__setattr__(self, "pair_energies", table)
        object.__setattr__(self, "alias", dict(self.alias))

    @property
    def alphabet(self) -> set[str]:
        return {x for k in self.pair_energies for x in k}

    def label(self, residue: str) -> str:
        if residue in self.alphabet:
            return residue
        try:
            return self.alias[residue]
        except KeyError:
            raise KeyError(f"residue {residue!r} has no label in model {self.name!r}") from None

    def pair(self, a: str, b: str) -> float:
        return self.pair_energies.get(_key(self.label(a), self.label(b)), 0.0)

    def scaled(self, k: float) -> "EnergyModel":
        return EnergyModel({p: k * e for p, e in self.pair_energies.items()},
                           self.rule, self.alias, self.name)

    def dumps(self) -> str:
        lines = [f"# energy model: {self.name}", f"min_separation {self.rule.min_separation}"]
        lines += [f"{a} {b} {e!r}" for (a, b), e in sorted(self.pair_energies.items())]
        lines += [f"alias {k} {v}" for k, v in sorted(self.alias.items())]
        return "\n".join(lines) + "\n"


def hp_model() -> EnergyModel:
    """Binary hydrophobic/polar baseline: H-H contacts cost -1."""
    return EnergyModel({("H", "H"): -1.0, ("H", "P"): 0.0, ("P", "P"): 0.0}, name="hp")


def class_model() -> EnergyModel:
    """Synthetase-class contact table (illustrative values, not from data)."""
    alias = {}
    for r in aminoacids.records():
        alias[r.code3] = r.klass
        alias[r.code3.upper()] = r.klass
        alias[r.code1] = r.klass
    return EnergyModel({("I", "I"): -2.0, ("I", "II"): -1.5, ("II", "II"): -1.0},
                       alias=alias, name="class")


BUILTIN_MODELS = {"hp": hp_model, "class": class_model}


def parse_model(text: str, name: str = "file") -> EnergyModel:
    """Parse ``A B energy`` lines plus optional ``alias X Y`` / ``min_separation K``."""
    pairs, alias, sep = {}, {}, 2
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            if tok[0] == "alias" and len(tok) == 3:
                alias[tok[1]] = tok[2]
            elif tok[0] == "min_separation" and len(tok) == 2:
                sep = int(tok[1])
            elif len(tok) == 3:
                k = _key(tok[0], tok[1])
                e = float(tok[2])
                if k in pairs and pairs[k] != e:
                    raise ValueError("asymmetric pair")
                pairs[k] = e
            else:
                raise ValueError("expected 'A B energy'")
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}: {raw!r}") from None
    if not pairs:
        raise ValueError("energy model defines no pairs")
    return EnergyModel(pairs, ContactRule(sep), alias, name)


def load_model(source: str) -> EnergyModel:
    if source in BUILTIN_MODELS:
        return BUILTIN_MODELS[source]()
    with open(source) as fh:
        return parse_model(fh.read(), name=os.path.basename(source))


def contact_set(chain: RealizedChain, rule: ContactRule = ContactRule()) -> list[tuple[int, int]]:
    """Residue pairs whose C-alpha sites are exactly one lattice bond apart."""
    ca = chain.ca_positions()
    n = len(ca)
    return [
        (i, j)
        for i in range(n)
        for j in range(i + rule.min_separation, n)
        if is_one_bond(ca[i] - ca[j])
    ]


def energy(chain: RealizedChain, model: EnergyModel) -> float:
    if not self_avoiding(chain):
        raise InvalidConformationError("chain is not self-avoiding")
    seq = chain.code.sequence
    return sum((model.pair(seq[i], seq[j]) for i, j in contact_set(chain, model.rule)), 0.0)


# ---------------------------------------------------------------------------
# exhaustive enumeration


@dataclass(frozen=True)
class Conformation:
    dofs: tuple[tuple[int, int], ...]
    omegas: tuple[Omega, ...]
    contacts: tuple[tuple[int, int], ...]


def _canonical_rows(n: int, cis: bool):
    """Per residue: the (phi, psi, omega) triples the DFS may choose."""
    omegas = (Omega.TRANS, Omega.CIS) if cis else (Omega.TRANS,)
    rows = []
    for k in range(n):
        phis = (EXTENDED,) if k == 0 else CHOICES
        psis = (EXTENDED,) if k == n - 1 else CHOICES
        ws = (Omega.TRANS,) if k == n - 1 else omegas
        rows.append([(p, s, w) for p in phis for s in psis for w in ws])
    return rows


def _dfs(n, glycine, cis, chirality, opts, min_sep, first=None):
    rows = _canonical_rows(n, cis)
    if first is not None:
        rows = [[first]] + rows[1:]
    s = opts.start
    cursor0 = _Cursor(s.origin, s.parity, s.frame, -s.c_prev_dir, -s.n_dir)
    out: list[Conformation] = []
    occupied: set = set()
    cas: list = []
    picks: list = []
    contacts: list = []

    def rec(k, ca, parity, frame, d_cn, d_na):
        if k == n:
            dofs = tuple((picks[i][1], picks[i + 1][0]) for i in range(n - 1))
            out.append(Conformation(dofs, tuple(p[2] for p in picks[:-1]), tuple(contacts)))
            return
        side = not glycine[k]
        nsite = ca - d_na
        if nsite in occupied or ca in occupied:
            return
        occupied.add(nsite)
        occupied.add(ca)
        new_contacts = [(j, k) for j in range(0, k - min_sep + 1) if is_one_bond(cas[j] - ca)]
        cas.append(ca)
        contacts.extend(new_contacts)
        for phi, psi, w in rows[k]:
            st = _step(frame, parity, d_cn, d_na, phi, psi, w, chirality, side)
            c = ca + st.d_ac
            if c in occupied:
                continue
            r = ca + st.d_r if side else None
            if r is not None and (r in occupied or r == c):
                continue
            occupied.add(c)
            if r is not None:
                occupied.add(r)
            picks.append((phi, psi, w))
            nn = c + st.d_cn
            rec(k + 1, nn + st.next_d_na, parity.flip(), st.next_frame, st.d_cn, st.next_d_na)
            picks.pop()
            occupied.discard(c)
            if r is not None:
                occupied.discard(r)
        del contacts[len(contacts) - len(new_contacts):]
        cas.pop()
        occupied.discard(nsite)
        occupied.discard(ca)

    rec(0, cursor0.ca, cursor0.parity, cursor0.frame, cursor0.d_cn, cursor0.d_na)
    return out


def _dfs_worker(args):
    return _dfs(*args)


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


@lru_cache(maxsize=32)
def enumerate_conformations(n: int, glycine: tuple[bool, ...] | None = None, cis: bool = False,
                            chirality: Chirality = Chirality.L,
                            opts: RealizeOptions = RealizeOptions(), min_separation: int = 2,
                            workers: int | None = None) -> tuple[Conformation, ...]:
    """All self-avoiding canonical conformations of length ``n`` in code order.

    The subtrees below residue 1's choices may be searched in parallel; the
    merge keeps code order, so output is independent of ``workers``.
    """
    glycine = (False,) * n if glycine is None else tuple(glycine)
    workers = default_workers() if workers is None else workers
    if workers <= 1 or n < 4:
        return tuple(_dfs(n, glycine, cis, chirality, opts, min_separation))
    firsts = _canonical_rows(n, cis)[0]
    jobs = [(n, glycine, cis, chirality, opts, min_separation, f) for f in firsts]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_dfs_worker, jobs))
    return tuple(c for part in parts for c in part)


def code_space_size(n: int, cis: bool = False) -> int:
    return (18 if cis else 9) ** (n - 1)


@dataclass
class FoldReport:
    best_energy: float
    codes: list[ConformationCode]
    states_examined: int
    seed: int | None = None
    self_avoiding: int | None = None
    method: str = "exhaustive"
    n_optimal: int | None = None
    trajectory: list[tuple[int, float, float]] = field(default_factory=list, repr=False)

    def to_json(self) -> str:
        return json.dumps({
            "method": self.method,
            "best_energy": self.best_energy,
            "codes": [c.to_string() for c in self.codes],
            "sequence": list(self.codes[0].sequence) if self.codes else [],
            "states_examined": self.states_examined,
            "self_avoiding": self.self_avoiding,
            "n_optimal": self.n_optimal if self.n_optimal is not None else len(self.codes),
            "seed": self.seed,
        }, indent=2)

    def trajectory_csv(self) -> str:
        lines = ["step,energy,temperature"]
        lines += [f"{s},{e!r},{t!r}" for s, e, t in self.trajectory]
        return "\n".join(lines) + "\n"


def _glycine_mask(sequence: Sequence[str], opts: RealizeOptions) -> tuple[bool, ...]:
    if not opts.side_chains:
        return (True,) * len(sequence)  # no side-chain site anywhere
    return tuple(is_glycine(a) for a in sequence)


def exhaustive_fold(sequence: Sequence[str], model: EnergyModel, n_max: int = 8,
                    cis: bool = False, chirality: Chirality = Chirality.L,
                    opts: RealizeOptions = RealizeOptions(),
                    workers: int | None = None, max_codes: int | None = 1000) -> FoldReport:
    """Global minima over every canonical code of the given length.

    Only the first ``max_codes`` optima (in code order) are materialized;
    ``n_optimal`` always carries the full count.
    """
    seq = list(sequence)
    n = len(seq)
    if n < 1:
        raise ValueError("empty sequence")
    if n > n_max:
        raise SearchTooLargeError(
            f"length {n} exceeds n_max={n_max}: {code_space_size(n, cis):,} codes")
    labels = [model.label(a) for a in seq]
    confs = enumerate_conformations(n, _glycine_mask(seq, opts), cis, chirality, opts,
                                    model.rule.min_separation, workers)
    pair = {}
    best, winners = math.inf, []
    for conf in confs:
        e = 0.0
        for i, j in conf.contacts:
            key = (labels[i], labels[j])
            if key not in pair:
                pair[key] = model.pair(seq[i], seq[j])
            e += pair[key]
        if e < best:
            best, winners = e, [conf]
        elif e == best:
            winners.append(conf)
    keep = winners if max_codes is None else winners[:max_codes]
    codes = [ConformationCode.from_dofs(c.dofs, seq, c.omegas, chirality=chirality) for c in keep]
    return FoldReport(best, codes, code_space_size(n, cis), None, len(confs), "exhaustive",
                      n_optimal=len(winners))


# ---------------------------------------------------------------------------
# annealing


@dataclass(frozen=True)
class Schedule:
    """Geometric cooling from ``t_start`` to ``t_end`` over ``steps`` proposals."""

    t_start: float = 2.0
    t_end: float = 0.05
    steps: int = 20000

    def __post_init__(self):
        if self.t_start < 0 or self.t_end < 0:
            raise ValueError("temperatures must be non-negative")
        if self.steps < 1 or not math.isfinite(self.steps):
            raise ValueError("steps must be a positive integer")

    def temperature(self, step: int) -> float:
        if self.steps == 1 or self.t_start == 0:
            return self.t_start
        if self.t_end == 0:
            return self.t_start * (1 - step / (self.steps - 1))
        return self.t_start * (self.t_end / self.t_start) ** (step / (self.steps - 1))


def _evaluate(code: ConformationCode, model: EnergyModel, opts: RealizeOptions) -> float | None:
    chain = realize(code, opts)
    if not self_avoiding(chain):
        return None
    seq = code.sequence
    return sum((model.pair(seq[i], seq[j]) for i, j in contact_set(chain, model.rule)), 0.0)


def anneal_fold(sequence: Sequence[str], model: EnergyModel, schedule: Schedule = Schedule(),
                seed: int = 0, initial: ConformationCode | None = None, allow_cis: bool = False,
                chirality: Chirality = Chirality.L, opts: RealizeOptions = RealizeOptions(),
                init_retries: int = 1000, record_every: int = 0,
                max_codes: int = 64) -> FoldReport:
    """Metropolis search over codes with ``set_rotation`` / ``flip_omega`` moves.

    Proposals that are not self-avoiding are rejected outright.
    """
    seq = list(sequence)
    n = len(seq)
    rng = np.random.default_rng(seed)
    if initial is None:
        code = ConformationCode.extended(seq)
        code = ConformationCode(code.residues, chirality)
        e = _evaluate(code, model, opts)
        tries = 0
        while e is None and tries < init_retries:
            dofs = [tuple(int(x) for x in rng.integers(1, 4, 2)) for _ in range(n - 1)]
            code = ConformationCode.from_dofs(dofs, seq, chirality=chirality)
            e = _evaluate(code, model, opts)
            tries += 1
        if e is None:
            raise InitializationError("no self-avoiding start found")
    else:
        code = initial.canonical()
        e = _evaluate(code, model, opts)
        if e is None:
            raise InitializationError("initial code is not self-avoiding")

    best = e
    best_codes = {code: None}
    traj = []
    examined = 1
    for step in range(schedule.steps):
        t = schedule.temperature(step)
        if n == 1:
            break
        if allow_cis and rng.random() < 0.1:
            cand = flip_omega(code, int(rng.integers(0, n - 1)))
        else:
            i = int(rng.integers(0, n))
            phi, psi = (int(x) for x in rng.integers(1, 4, 2))
            cand = set_rotation(code, i, phi, psi).canonical()
        if cand != code:
            examined += 1
            ce = _evaluate(cand, model, opts)
            if ce is not None:
                de = ce - e
                if de <= 0 or (t > 0 and rng.random() < math.exp(-de / t)):
                    code, e = cand, ce
                    if e < best:
                        best, best_codes = e, {code: None}
                    elif e == best and len(best_codes) < max_codes:
                        best_codes.setdefault(code, None)
        if record_every and step % record_every == 0:
            traj.append((step, e, t))
    codes = sorted(best_codes, key=lambda c: c.to_string())
    return FoldReport(best, codes, examined, seed, method="anneal", trajectory=traj)


# ---------------------------------------------------------------------------
# packing


def packing_fraction_analytic(kind: str) -> float:
    if kind == "diamond":
        return math.pi * math.sqrt(3) / 16
    if kind == "fcc":
        return math.pi / math.sqrt(18)
    raise ValueError(f"unknown lattice kind {kind!r}")


BOND = math.sqrt(3) / 4  # lattice bond in unit-cell edges
DEFAULT_CLASS_RADII = {"I": 0.8, "II": 0.5}  # side-chain sites, in bonds
BACKBONE_RADIUS = 0.5


@dataclass(frozen=True)
class PackingResult:
    fraction: float
    stderr: float
    union_volume: float
    region_volume: float
    samples: int
    degenerate: str | None = None


def union_volume_mc(centers: np.ndarray, radii: np.ndarray, samples: int,
                    rng: np.random.Generator, batch: int = 200_000) -> tuple[float, float, float]:
    """Monte-Carlo volume of a union of spheres; returns (volume, stderr, box volume)."""
    centers = np.asarray(centers, float)
    radii = np.asarray(radii, float)
    lo = (centers - radii[:, None]).min(axis=0)
    hi = (centers + radii[:, None]).max(axis=0)
    box = float(np.prod(hi - lo))
    r2 = radii ** 2
    hits, done = 0, 0
    while done < samples:
        m = min(batch, samples - done)
        pts = rng.uniform(lo, hi, size=(m, 3))
        inside = np.zeros(m, bool)
        for c, rr in zip(centers, r2):
            inside |= ((pts - c) ** 2).sum(axis=1) <= rr
        hits += int(inside.sum())
        done += m
    p = hits / samples
    return box * p, box * math.sqrt(p * (1 - p) / samples), box


def dilated_hull_volume(points: np.ndarray, r: float) -> tuple[float, str | None]:
    """Volume of conv(points) dilated by r (Steiner formula); flags degenerate hulls."""
    pts = np.unique(np.asarray(points, float), axis=0)
    ball = 4 / 3 * math.pi * r ** 3
    if len(pts) == 1:
        return ball, "point"
    centred = pts - pts.mean(axis=0)
    sv = np.linalg.svd(centred, compute_uv=False)
    tol = 1e-9 * max(sv[0], 1.0)
    rank = int((sv > tol).sum())
    if rank == 1:
        d = centred @ np.linalg.svd(centred)[2][0]
        length = float(d.max() - d.min())
        return math.pi * r * r * length + ball, "capsule"
    if rank == 2:
        from scipy.spatial import ConvexHull

        basis = np.linalg.svd(centred)[2][:2]
        hull2 = ConvexHull(centred @ basis.T)
        area, perim = hull2.volume, hull2.area
        return 2 * area * r + math.pi / 2 * perim * r * r + ball, "planar"
    from scipy.spatial import ConvexHull

    hull = ConvexHull(pts)
    normals = hull.equations[:, :3]
    edge_term = 0.0
    for f, simplex in enumerate(hull.simplices):
        for j in range(3):
            g = hull.neighbors[f][j]
            if g < f:
                continue
            a, b = [simplex[k] for k in range(3) if k != j]
            cosang = float(np.clip(normals[f] @ normals[g], -1.0, 1.0))
            edge_term += float(np.linalg.norm(pts[a] - pts[b])) * math.acos(cosang)
    return hull.volume + hull.area * r + 0.5 * edge_term * r * r + ball, None


def chain_spheres(chain: RealizedChain, class_radii: Mapping[str, float] = DEFAULT_CLASS_RADII,
                  backbone_radius: float = BACKBONE_RADIUS,
                  radii: Mapping[str, float] | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Sphere centres and radii (unit-cell units) for backbone atoms and side-chain sites."""
    centers, rs = [], []
    for s in chain.residues:
        for p in (s.n, s.ca, s.c):
            centers.append(p.to_float())
            rs.append(backbone_radius * BOND)
        if s.r is not None:
            if radii is not None and s.amino_acid in radii:
                rad = radii[s.amino_acid]
            else:
                rad = class_radii[aminoacids.lookup(s.amino_acid).klass]
            if rad <= 0:
                raise ValueError("radii must be positive")
            centers.append(s.r.to_float())
            rs.append(rad * BOND)
    return np.array(centers), np.array(rs)


def packing_fraction_chain(chain: RealizedChain, class_radii: Mapping[str, float] = DEFAULT_CLASS_RADII,
                           mc_samples: int = 200_000, seed: int = 0,
                           backbone_radius: float = BACKBONE_RADIUS,
                           radii: Mapping[str, float] | None = None,
                           region_radius: float | None = None) -> PackingResult:
    """Sphere-union volume over the centre hull dilated by the largest radius.

    ``region_radius`` (bonds) pins the dilation so that runs with different
    radii share one bounding region.
    """
    if not self_avoiding(chain):
        raise InvalidConformationError("chain is not self-avoiding")
    centers, rs = chain_spheres(chain, class_radii, backbone_radius, radii)
    dil = rs.max() if region_radius is None else region_radius * BOND
    region, flag = dilated_hull_volume(centers, dil)
    rng = np.random.default_rng(seed)
    vol, se, _ = union_volume_mc(centers, rs, mc_samples, rng)
    return PackingResult(min(vol / region, 1.0), se / region, vol, region, mc_samples, flag)
