"""Admissible quantum numbers and degeneracy counts on a covering.

For ``k = p/q`` the azimuthal number ``m`` is admissible for a given ``l``
when ``m/k`` is an integer with ``|m/k| <= l``.  Since ``m`` itself must be
an integer this forces ``m = p t`` with ``|t| <= l // q``, so each angular
eigenvalue ``l(l+1)`` carries ``2 (l // q) + 1`` independent harmonics.
The radial problem never sees ``k``, so hydrogen energies are unchanged.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

from .rational import CoveringParameter, parse_k

__all__ = [
    "QuantumNumbers",
    "TableRow",
    "DegeneracyTable",
    "admissible_m",
    "degeneracy",
    "level_degeneracy",
    "hydrogen_energy",
    "build_table",
    "shell_states",
]


@dataclass(frozen=True)
class QuantumNumbers:
    n: int
    l: int
    m: int
    j: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not 0 <= self.l <= self.n - 1:
            raise ValueError(f"l={self.l} must satisfy 0 <= l <= n-1 = {self.n - 1}")
        if abs(self.j) > self.l:
            raise ValueError(f"|j|={abs(self.j)} exceeds l={self.l}")

    @classmethod
    def from_nlm(cls, n: int, l: int, m: int, k: CoveringParameter) -> "QuantumNumbers":
        # j = m/k = m q / p must be integral
        if (m * k.q) % k.p:
            raise ValueError(f"m={m} is not an integer multiple of k={k}")
        return cls(n, l, m, m * k.q // k.p)

    def satisfies(self, k: CoveringParameter) -> bool:
        return self.j * k.p == self.m * k.q

    @property
    def lam(self) -> int:
        return self.l * (self.l + 1)

    @property
    def mu(self) -> int:
        return self.j * self.j


def admissible_m(l: int, k: CoveringParameter) -> list[int]:
    if l < 0:
        raise ValueError(f"l must be non-negative, got {l}")
    t_max = l // k.q
    return [k.p * t for t in range(-t_max, t_max + 1)]


def degeneracy(l: int, k: CoveringParameter) -> int:
    if l < 0:
        raise ValueError(f"l must be non-negative, got {l}")
    return 2 * (l // k.q) + 1


def level_degeneracy(n: int, k: CoveringParameter) -> int:
    """Number of independent states in hydrogen shell ``n`` on the covering.

    Shells keep the k = 1 structure (l = 0 .. n-1); only the per-l counts
    shrink.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return sum(degeneracy(l, k) for l in range(n))


def shell_states(n: int, k: CoveringParameter) -> list[QuantumNumbers]:
    return [QuantumNumbers.from_nlm(n, l, m, k) for l in range(n) for m in admissible_m(l, k)]


def hydrogen_energy(n: int) -> float:
    """Bound-state energy -1/(2 n^2) in units hbar = mass = 1, V = -1/r."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return -1.0 / (2 * n * n)


@dataclass(frozen=True)
class TableRow:
    l: int
    m: tuple[int, ...]
    count: int


@dataclass(frozen=True)
class DegeneracyTable:
    k: CoveringParameter
    rows: tuple[TableRow, ...]

    def to_dict(self) -> dict:
        return {
            "k": str(self.k),
            "rows": [{"l": r.l, "m": list(r.m), "count": r.count} for r in self.rows],
        }

    def to_json(self, indent=None) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["k", "l", "m", "count"])
        for row in self.rows:
            for m in row.m:
                writer.writerow([str(self.k), row.l, m, row.count])
        return buf.getvalue()

    @classmethod
    def from_dict(cls, data: dict) -> "DegeneracyTable":
        rows = tuple(TableRow(int(r["l"]), tuple(int(m) for m in r["m"]), int(r["count"])) for r in data["rows"])
        return cls(parse_k(data["k"]), rows)

    @classmethod
    def from_json(cls, text: str) -> "DegeneracyTable":
        return cls.from_dict(json.loads(text))

    @classmethod
    def from_csv(cls, text: str) -> "DegeneracyTable":
        reader = csv.DictReader(io.StringIO(text))
        k = None
        grouped: dict[int, list[int]] = {}
        counts: dict[int, int] = {}
        for rec in reader:
            k = parse_k(rec["k"])
            l = int(rec["l"])
            grouped.setdefault(l, []).append(int(rec["m"]))
            counts[l] = int(rec["count"])
        if k is None:
            raise ValueError("empty degeneracy CSV")
        rows = tuple(TableRow(l, tuple(grouped[l]), counts[l]) for l in sorted(grouped))
        return cls(k, rows)


def build_table(k: CoveringParameter, l_max: int) -> DegeneracyTable:
    if l_max < 0:
        raise ValueError(f"l_max must be non-negative, got {l_max}")
    rows = []
    for l in range(l_max + 1):
        ms = tuple(admissible_m(l, k))
        rows.append(TableRow(l, ms, len(ms)))
    return DegeneracyTable(k, tuple(rows))
