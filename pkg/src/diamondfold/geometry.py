"""Exact diamond-lattice geometry.

Coordinates are in units of the cubic unit-cell edge and are held as
:class:`fractions.Fraction` throughout, so that every lattice position and
every rotation is represented without rounding.
"""

from __future__ import annotations

import enum
import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterable, Sequence


class ExactnessError(ValueError):
    """Raised when an operation cannot be carried out in exact arithmetic."""


def _q(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise ExactnessError(f"{x!r} is not an exact rational")


class Rat3:
    """A 3-vector with exact rational components.

    Stored as three integer numerators over one positive common denominator,
    kept in lowest terms, so equality and hashing are exact and cheap.
    """

    __slots__ = ("_n", "_d")

    def __init__(self, x, y, z):
        fx, fy, fz = _q(x), _q(y), _q(z)
        d = math.lcm(fx.denominator, fy.denominator, fz.denominator)
        self._set(fx.numerator * (d // fx.denominator), fy.numerator * (d // fy.denominator),
                  fz.numerator * (d // fz.denominator), d)

    def _set(self, a: int, b: int, c: int, d: int) -> None:
        g = math.gcd(a, b, c, d)
        if g != 1:
            a, b, c, d = a // g, b // g, c // g, d // g
        self._n = (a, b, c)
        self._d = d

    @classmethod
    def _raw(cls, a: int, b: int, c: int, d: int) -> "Rat3":
        obj = object.__new__(cls)
        obj._set(a, b, c, d)
        return obj

    @property
    def x(self) -> Fraction:
        return Fraction(self._n[0], self._d)

    @property
    def y(self) -> Fraction:
        return Fraction(self._n[1], self._d)

    @property
    def z(self) -> Fraction:
        return Fraction(self._n[2], self._d)

    @property
    def denominator(self) -> int:
        return self._d

    def __iter__(self):
        yield self.x
        yield self.y
        yield self.z

    def __eq__(self, other) -> bool:
        if not isinstance(other, Rat3):
            return NotImplemented
        return self._d == other._d and self._n == other._n

    def __hash__(self) -> int:
        return hash((self._n, self._d))

    def __add__(self, other: "Rat3") -> "Rat3":
        (a, b, c), d = self._n, self._d
        (p, q, r), e = other._n, other._d
        if d == e:
            return Rat3._raw(a + p, b + q, c + r, d)
        return Rat3._raw(a * e + p * d, b * e + q * d, c * e + r * d, d * e)

    def __sub__(self, other: "Rat3") -> "Rat3":
        return self + (-other)

    def __neg__(self) -> "Rat3":
        a, b, c = self._n
        obj = object.__new__(Rat3)
        obj._n = (-a, -b, -c)
        obj._d = self._d
        return obj

    def __mul__(self, k) -> "Rat3":
        k = _q(k)
        a, b, c = self._n
        return Rat3._raw(a * k.numerator, b * k.numerator, c * k.numerator,
                         self._d * k.denominator)

    __rmul__ = __mul__

    def dot(self, other: "Rat3") -> Fraction:
        (a, b, c), (p, q, r) = self._n, other._n
        return Fraction(a * p + b * q + c * r, self._d * other._d)

    def cross(self, other: "Rat3") -> "Rat3":
        (a, b, c), (p, q, r) = self._n, other._n
        return Rat3._raw(b * r - c * q, c * p - a * r, a * q - b * p, self._d * other._d)

    def norm2(self) -> Fraction:
        return self.dot(self)

    def is_zero(self) -> bool:
        return not any(self._n)

    def to_float(self) -> tuple[float, float, float]:
        d = self._d
        return (self._n[0] / d, self._n[1] / d, self._n[2] / d)

    def __repr__(self) -> str:
        return f"Rat3({self.x}, {self.y}, {self.z})"

    def __reduce__(self):
        return (Rat3, (self.x, self.y, self.z))


ZERO = Rat3(0, 0, 0)

_QUARTER = Fraction(1, 4)

# Bond directions at a parity-A site, in index order 1..4.
E = (
    Rat3(_QUARTER, _QUARTER, _QUARTER),
    Rat3(_QUARTER, -_QUARTER, -_QUARTER),
    Rat3(-_QUARTER, _QUARTER, -_QUARTER),
    Rat3(-_QUARTER, -_QUARTER, _QUARTER),
)
e1, e2, e3, e4 = E

BOND_LENGTH2 = Fraction(3, 16)


def triple(a: Rat3, b: Rat3, c: Rat3) -> Fraction:
    """Exact scalar triple product a . (b x c)."""
    return a.dot(b.cross(c))


def is_one_bond(v: Rat3) -> bool:
    """Exact test |v|^2 == 3/16 without building a Fraction."""
    a, b, c = v._n
    return 16 * (a * a + b * b + c * c) == 3 * v._d * v._d


def triple_sign(a: Rat3, b: Rat3, c: Rat3) -> int:
    (a1, a2, a3), (b1, b2, b3), (c1, c2, c3) = a._n, b._n, c._n
    t = a1 * (b2 * c3 - b3 * c2) + a2 * (b3 * c1 - b1 * c3) + a3 * (b1 * c2 - b2 * c1)
    return (t > 0) - (t < 0)


class Frame:
    """A proper rotation with exact rational matrix entries.

    Internally nine integer numerators (row-major) over a common denominator.
    """

    __slots__ = ("_n", "_d")

    def __init__(self, m):
        rows = [[_q(v) for v in row] for row in m]
        if len(rows) != 3 or any(len(r) != 3 for r in rows):
            raise ValueError("Frame needs a 3x3 matrix")
        d = math.lcm(*(v.denominator for r in rows for v in r))
        self._set(tuple(v.numerator * (d // v.denominator) for r in rows for v in r), d)
        if (self @ self.transpose()) != IDENTITY:
            raise ValueError("matrix is not orthogonal")
        if self.det() != 1:
            raise ValueError("matrix is not a proper rotation")

    def _set(self, n: tuple[int, ...], d: int) -> None:
        g = math.gcd(*n, d)
        if g != 1:
            n = tuple(v // g for v in n)
            d //= g
        self._n = n
        self._d = d

    @classmethod
    def _raw(cls, n, d: int = 1) -> "Frame":
        # Skip validation; callers guarantee properness.
        obj = object.__new__(cls)
        obj._set(tuple(n), d)
        return obj

    @classmethod
    def _from_rows(cls, rows) -> "Frame":
        rows = [[_q(v) for v in r] for r in rows]
        d = math.lcm(*(v.denominator for r in rows for v in r))
        return cls._raw((v.numerator * (d // v.denominator) for r in rows for v in r), d)

    @classmethod
    def identity(cls) -> "Frame":
        return IDENTITY

    @property
    def m(self) -> tuple[tuple[Fraction, ...], ...]:
        n, d = self._n, self._d
        return tuple(tuple(Fraction(n[3 * i + j], d) for j in range(3)) for i in range(3))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Frame):
            return NotImplemented
        return self._d == other._d and self._n == other._n

    def __hash__(self) -> int:
        return hash((self._n, self._d))

    def __repr__(self) -> str:
        return f"Frame({[[str(v) for v in r] for r in self.m]})"

    def __reduce__(self):
        return (Frame._raw, (self._n, self._d))

    def transpose(self) -> "Frame":
        n = self._n
        return Frame._raw((n[0], n[3], n[6], n[1], n[4], n[7], n[2], n[5], n[8]), self._d)

    inverse = transpose

    def __matmul__(self, other):
        if isinstance(other, Frame):
            a, b = self._n, other._n
            return Frame._raw(
                (sum(a[3 * i + k] * b[3 * k + j] for k in range(3))
                 for i in range(3) for j in range(3)),
                self._d * other._d,
            )
        if isinstance(other, Rat3):
            return self.apply(other)
        return NotImplemented

    def apply(self, v: Rat3) -> Rat3:
        m = self._n
        x, y, z = v._n
        if self._d == 1:
            return Rat3._raw(m[0] * x + m[1] * y + m[2] * z, m[3] * x + m[4] * y + m[5] * z,
                             m[6] * x + m[7] * y + m[8] * z, v._d)
        return Rat3._raw(m[0] * x + m[1] * y + m[2] * z, m[3] * x + m[4] * y + m[5] * z,
                         m[6] * x + m[7] * y + m[8] * z, v._d * self._d)

    def det(self) -> Fraction:
        a, b, c, d, e, f, g, h, i = self._n
        return Fraction(a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g),
                        self._d ** 3)

    def trace(self) -> Fraction:
        n = self._n
        return Fraction(n[0] + n[4] + n[8], self._d)

    def __pow__(self, k: int) -> "Frame":
        out = IDENTITY
        base = self if k >= 0 else self.inverse()
        for _ in range(abs(k)):
            out = out @ base
        return out


IDENTITY = Frame._raw((1, 0, 0, 0, 1, 0, 0, 0, 1), 1)


class Parity(enum.Enum):
    A = "A"
    B = "B"

    def flip(self) -> "Parity":
        return Parity.B if self is Parity.A else Parity.A


def bond_directions(parity: Parity, frame: Frame = IDENTITY) -> list[Rat3]:
    """The four bond directions leaving a site of the given sublattice.

    Ordered by base index; parity B directions are the negations of parity A.
    """
    return list(_bond_directions(parity, frame))


@lru_cache(maxsize=4096)
def _bond_directions(parity: Parity, frame: Frame) -> tuple[Rat3, ...]:
    if parity is Parity.A:
        return tuple(frame.apply(e) for e in E)
    return tuple(-frame.apply(e) for e in E)


def _outer_over_norm(axis: Rat3):
    n2 = axis.norm2()
    if n2 == 0:
        raise ValueError("rotation axis must be non-zero")
    a = (axis.x, axis.y, axis.z)
    return [[a[i] * a[j] / n2 for j in range(3)] for i in range(3)]


def rot_180_about(axis: Rat3) -> Frame:
    """Half-turn about ``axis``: v -> 2 (v . n) n - v."""
    if not isinstance(axis, Rat3):
        if any(not isinstance(c, (Rational, str)) for c in axis):
            raise ExactnessError("axis components must be exact rationals")
        axis = Rat3(*axis)
    p = _outer_over_norm(axis)
    rows = [[2 * p[i][j] - (1 if i == j else 0) for j in range(3)] for i in range(3)]
    return Frame._from_rows(rows)


def rot_120_about(axis_index: int, sign: int = 1) -> Frame:
    """Rotation by ``sign`` x 120 degrees (right-handed) about bond direction e_i.

    With cos = -1/2 and sin = sqrt(3)/2 the sqrt(3) cancels against |e_i|, so
    Rodrigues' formula stays rational: R = -I/2 + 2 s [a]_x + (3/2) a a^T / |a|^2.
    """
    if axis_index not in (1, 2, 3, 4):
        raise ValueError("axis_index must be 1..4")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    a = E[axis_index - 1]
    p = _outer_over_norm(a)
    ax = (
        (0, -a.z, a.y),
        (a.z, 0, -a.x),
        (-a.y, a.x, 0),
    )
    half = Fraction(1, 2)
    rows = [
        [(-half if i == j else 0) + 2 * sign * ax[i][j] + Fraction(3, 2) * p[i][j]
         for j in range(3)]
        for i in range(3)
    ]
    return Frame._from_rows(rows)


def proper_rotation_group() -> frozenset[Frame]:
    """Closure of the 3-fold rotations about the bond axes (the group T)."""
    gens = [rot_120_about(i, s) for i in range(1, 5) for s in (1, -1)]
    seen = {IDENTITY}
    frontier = [IDENTITY]
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                k = g @ h
                if k not in seen:
                    seen.add(k)
                    nxt.append(k)
        frontier = nxt
    return frozenset(seen)


def rotation_classes(group: Iterable[Frame] | None = None) -> dict[str, list[Frame]]:
    """Split T into identity, +120, -120 and two-fold classes."""
    group = proper_rotation_group() if group is None else group
    plus = {rot_120_about(i, 1) for i in range(1, 5)}
    minus = {rot_120_about(i, -1) for i in range(1, 5)}
    out: dict[str, list[Frame]] = {"identity": [], "plus120": [], "minus120": [], "twofold": []}
    for g in group:
        if g == IDENTITY:
            out["identity"].append(g)
        elif g in plus:
            out["plus120"].append(g)
        elif g in minus:
            out["minus120"].append(g)
        elif g.trace() == -1:
            out["twofold"].append(g)
        else:
            raise AssertionError("element outside expected classes")
    return out


def simplex_state_count(d: int) -> int:
    """Number of equivalent, equidistant states in d dimensions (simplex vertices)."""
    if not isinstance(d, int) or d < 1:
        raise ValueError("dimension must be a positive integer")
    return d + 1


def bond_angle_deg() -> float:
    return math.degrees(2 * math.atan(math.sqrt(2)))


def cos_bond_angle() -> Fraction:
    """Exact cosine of the angle between two bonds at one site (-1/3)."""
    return e1.dot(e2) / BOND_LENGTH2


def distinct_directions(vs: Sequence[Rat3]) -> bool:
    return len(set(vs)) == len(vs)
