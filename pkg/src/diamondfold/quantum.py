"""Grover-search alphabet capacities and the sp3 hybrid transform."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


def grover_capacity(q: int) -> float:
    """Largest item count N found with certainty by q queries: (2q+1) asin(1/sqrt N) = pi/2."""
    if q < 1:
        raise ValueError("query count must be at least 1")
    return 1.0 / math.sin(math.pi / (2 * (2 * q + 1))) ** 2


def success_probability(n_items: float, q: int) -> float:
    """Closed-form amplitude-squared of the marked item after q iterations."""
    return math.sin((2 * q + 1) * math.asin(1 / math.sqrt(n_items))) ** 2


@dataclass(frozen=True)
class SearchInstance:
    n_items: int
    queries: int
    marked: int = 0

    def __post_init__(self):
        if self.n_items < 2:
            raise ValueError("need at least two items")
        if self.queries < 0:
            raise ValueError("query count must be non-negative")
        if not 0 <= self.marked < self.n_items:
            raise ValueError("marked index out of range")


def grover_simulate(instance: SearchInstance) -> float:
    """State-vector Grover search; all amplitudes stay real."""
    n = instance.n_items
    psi = np.full(n, 1 / math.sqrt(n))
    for _ in range(instance.queries):
        psi[instance.marked] = -psi[instance.marked]
        psi = 2 * psi.mean() - psi
    return float(psi[instance.marked] ** 2)


ALPHABETS = {1: "4 nucleotide bases", 2: "10 amino acids", 3: "20 amino acids"}


@dataclass(frozen=True)
class AlphabetRow:
    queries: int
    capacity: float
    floor: int
    alphabet: str


def alphabet_table() -> list[AlphabetRow]:
    rows = []
    for q in (1, 2, 3):
        cap = grover_capacity(q)
        # q=1 is exactly 4; guard against 3.9999999.
        rows.append(AlphabetRow(q, cap, int(math.floor(cap + 1e-9)), ALPHABETS[q]))
    return rows


_H = Fraction(1, 2)
SP3_ROWS = ("alpha", "beta", "gamma", "delta")
SP3_COLS = ("s", "px", "py", "pz")


def sp3_transform() -> tuple[tuple[Fraction, ...], ...]:
    """Rows: hybrid states; columns: (s, px, py, pz) orbitals."""
    return (
        (_H, _H, _H, _H),
        (_H, _H, -_H, -_H),
        (_H, -_H, _H, -_H),
        (_H, -_H, -_H, _H),
    )


def gram(m) -> list[list[Fraction]]:
    return [[sum((a * b for a, b in zip(r, s)), Fraction(0)) for s in m] for r in m]
