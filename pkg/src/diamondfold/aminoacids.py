"""Amino-acid reference data: R-group property, molecular weight, synthetase class."""

from __future__ import annotations

import csv
import io
import json
from collections import defaultdict
from dataclasses import asdict, dataclass
from functools import lru_cache
from importlib import resources
from statistics import fmean

PROPERTIES = ("non-polar", "polar", "negative", "positive", "ring")
CLASSES = ("I", "II")

ONE_LETTER = {
    "G": "Gly", "A": "Ala", "P": "Pro", "V": "Val", "L": "Leu", "I": "Ile",
    "S": "Ser", "T": "Thr", "N": "Asn", "C": "Cys", "M": "Met", "Q": "Gln",
    "D": "Asp", "E": "Glu", "K": "Lys", "R": "Arg", "H": "His", "F": "Phe",
    "Y": "Tyr", "W": "Trp",
}


@dataclass(frozen=True)
class AminoAcidRecord:
    code3: str
    name: str
    property: str
    weight: int
    klass: str

    @property
    def code1(self) -> str:
        return next(k for k, v in ONE_LETTER.items() if v == self.code3)


def table_text() -> str:
    return resources.files(__package__).joinpath("data/amino_acids.csv").read_text()


@lru_cache(maxsize=None)
def records() -> tuple[AminoAcidRecord, ...]:
    rows = csv.DictReader(io.StringIO(table_text()))
    out = tuple(
        AminoAcidRecord(r["code3"], r["name"], r["property"], int(r["weight"]), r["class"])
        for r in rows
    )
    assert len(out) == 20 and len({r.code3 for r in out}) == 20
    return out


def normalize(code: str) -> str:
    """Map a 1- or 3-letter code (any case) to the canonical 3-letter form."""
    c = code.strip()
    if len(c) == 1 and c.upper() in ONE_LETTER:
        return ONE_LETTER[c.upper()]
    c3 = c[:1].upper() + c[1:].lower()
    if c3 in _by_code():
        return c3
    raise LookupError(f"unknown amino acid {code!r}")


@lru_cache(maxsize=None)
def _by_code() -> dict[str, AminoAcidRecord]:
    return {r.code3: r for r in records()}


def lookup(code: str) -> AminoAcidRecord:
    return _by_code()[normalize(code)]


def class_partition() -> tuple[list[str], list[str]]:
    cls1 = [r.code3 for r in records() if r.klass == "I"]
    cls2 = [r.code3 for r in records() if r.klass == "II"]
    return cls1, cls2


def property_balance() -> dict[str, tuple[int, int]]:
    counts = defaultdict(lambda: [0, 0])
    for r in records():
        counts[r.property][CLASSES.index(r.klass)] += 1
    return {p: tuple(counts[p]) for p in PROPERTIES}


def weight_ordering() -> dict[str, tuple[float, float]]:
    """Mean molecular weight per property, (class I, class II).

    The comparison is made on means: element-wise it fails for the polar
    group (Asn 132 outweighs Cys 121).
    """
    w = defaultdict(lambda: ([], []))
    for r in records():
        w[r.property][CLASSES.index(r.klass)].append(r.weight)
    return {p: (fmean(w[p][0]), fmean(w[p][1])) for p in PROPERTIES}


def check_table() -> dict[str, bool]:
    """Run the class-structure checks; each entry is one named assertion."""
    c1, c2 = class_partition()
    bal = property_balance()
    wo = weight_ordering()
    return {
        "class_split_10_10": (len(c1), len(c2)) == (10, 10),
        "property_balance_equal": all(a == b for a, b in bal.values()),
        "class_I_heavier_on_mean": all(a > b for a, b in wo.values()),
        "pro_in_class_II": lookup("Pro").klass == "II",
        "cys_in_class_I": lookup("Cys").klass == "I",
    }


def table_json() -> str:
    return json.dumps([asdict(r) for r in records()], indent=2)
