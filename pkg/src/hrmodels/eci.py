"""Extremal conditional independence for Huesler-Reiss variograms.

A statement A _|_ B | C holds at a strictly CND variogram G exactly when the
Cayley-Menger block CM(G[A u C, B u C]) has rank #C + 1. The determinantal
generators ("atoms") are the (#C+2)-minors of that block that contain the
bordering row and column.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np

from .config import get_tol
from .errors import InvalidStatement, NotStrictlyCND, SizeCap
from .graphs import UndirectedGraph
from .varalg import check_hollow_symmetric, cm, cm_block, is_strictly_cnd, theta_of_gamma

SEPARATION_CAP = 10


@dataclass(frozen=True)
class CIStatement:
    A: frozenset
    B: frozenset
    C: frozenset = frozenset()

    def __post_init__(self):
        a, b, c = (frozenset(int(v) for v in s) for s in (self.A, self.B, self.C))
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "B", b)
        object.__setattr__(self, "C", c)
        if not a or not b:
            raise InvalidStatement("A and B must be nonempty")
        if a & b or a & c or b & c:
            raise InvalidStatement("A, B, C must be pairwise disjoint")
        if min(a | b | c) < 1:
            raise InvalidStatement("vertices are labeled from 1")

    def check_dimension(self, d: int) -> None:
        if max(self.A | self.B | self.C) > d:
            raise InvalidStatement(f"statement mentions a vertex beyond {d}")

    def to_json(self) -> dict:
        return {"A": sorted(self.A), "B": sorted(self.B), "C": sorted(self.C)}

    @classmethod
    def from_json(cls, obj: dict) -> "CIStatement":
        return cls(frozenset(obj["A"]), frozenset(obj["B"]), frozenset(obj.get("C", [])))

    def __str__(self):
        fmt = lambda s: "{" + ",".join(map(str, sorted(s))) + "}"
        return f"{fmt(self.A)} _|_ {fmt(self.B)} | {fmt(self.C)}"


@dataclass(frozen=True)
class ECIResult:
    holds: bool
    rank: int
    expected_rank: int
    singular_values: np.ndarray
    margin: float  # the first singular value that must vanish, relative to the largest
    tolerance: float

    def __bool__(self):
        return self.holds

    def to_json(self) -> dict:
        return {"holds": self.holds, "rank": self.rank, "expected_rank": self.expected_rank,
                "margin": float(self.margin), "tolerance": self.tolerance,
                "singular_values": [float(s) for s in self.singular_values]}


def _normalized(gamma) -> np.ndarray:
    g = check_hollow_symmetric(gamma)
    top = np.max(np.abs(g), initial=0.0)
    return g / top if top > 0 else g


def test_eci(gamma, stmt: CIStatement, tol: float | None = None) -> ECIResult:
    """Rank test of CM(G[A u C, B u C]) against #C + 1."""
    tol = get_tol(tol)
    g = _normalized(gamma)
    stmt.check_dimension(g.shape[0])
    if not is_strictly_cnd(g, tol):
        raise NotStrictlyCND("the rank criterion needs a strictly CND variogram")
    rows = sorted(stmt.A | stmt.C)
    cols = sorted(stmt.B | stmt.C)
    s = np.linalg.svd(cm_block(g, rows, cols), compute_uv=False)
    k = len(stmt.C) + 1
    rank = int(np.sum(s > tol * s[0]))
    margin = s[k] / s[0] if s.size > k else 0.0
    return ECIResult(rank <= k, rank, k, s, float(margin), tol)


test_eci.__test__ = False  # keep pytest from collecting the name


def saturated_pair_test(gamma, i: int, j: int, tol: float | None = None) -> bool:
    """Whether Theta_ij vanishes, i.e. i _|_ j given all other vertices."""
    tol = get_tol(tol)
    theta = theta_of_gamma(_normalized(gamma), tol)
    return bool(abs(theta[i - 1, j - 1]) <= tol * np.max(np.abs(theta)))


def separation_statements(g: UndirectedGraph, cap: int = SEPARATION_CAP) -> list[CIStatement]:
    """Every (A, B, C) where A, B are distinct components of g - C, for all C with #C <= d-2."""
    if g.d > cap:
        raise SizeCap(f"statement enumeration is capped at d={cap}, got {g.d}")
    out = []
    for size in range(0, g.d - 1):
        for c in itertools.combinations(g.vertices, size):
            comps = g.components(c)
            for a, b in itertools.combinations(comps, 2):
                out.append(CIStatement(a, b, frozenset(c)))
    return out


# ---------------------------------------------------------------- atoms

@dataclass(frozen=True)
class GeneratorAtom:
    Aprime: tuple[int, ...]
    Bprime: tuple[int, ...]

    def matrix(self, gamma) -> np.ndarray:
        return cm_block(gamma, self.Aprime, self.Bprime)

    def value(self, gamma) -> float:
        return float(np.linalg.det(self.matrix(gamma)))


def generator_atoms(stmt: CIStatement) -> list[GeneratorAtom]:
    """All (A', B') with A' in A u C, B' in B u C and #A' = #B' = #C + 1."""
    k = len(stmt.C) + 1
    left = sorted(stmt.A | stmt.C)
    right = sorted(stmt.B | stmt.C)
    return [GeneratorAtom(a, b) for a in itertools.combinations(left, k)
            for b in itertools.combinations(right, k)]


def atom_count(stmt: CIStatement) -> int:
    k = len(stmt.C) + 1
    return comb(len(stmt.A) + len(stmt.C), k) * comb(len(stmt.B) + len(stmt.C), k)


@dataclass(frozen=True)
class AtomReport:
    values: np.ndarray
    normalized: np.ndarray
    max_normalized: float
    vanishes: bool
    atoms: tuple[GeneratorAtom, ...]

    def to_json(self) -> list[dict]:
        return [{"Aprime": list(a.Aprime), "Bprime": list(a.Bprime), "value": float(v),
                 "normalized": float(n)} for a, v, n in zip(self.atoms, self.values, self.normalized)]


def evaluate_atoms(gamma, atoms, tol: float | None = None) -> AtomReport:
    """Evaluate det CM(G[A', B']) for every atom.

    For the vanishing test G is first scaled to max |G| = 1 and each value is
    divided by the product of the s largest singular values of the full
    CM(G) (s = atom size). That product bounds every s x s minor of CM(G).
    """
    tol = get_tol(tol)
    g = np.asarray(gamma, dtype=float)
    atoms = tuple(atoms)
    if not atoms:
        return AtomReport(np.zeros(0), np.zeros(0), 0.0, True, atoms)
    values = np.array([a.value(g) for a in atoms])
    gn = _normalized(g)
    sv = np.linalg.svd(cm(gn), compute_uv=False)
    normalized = np.empty_like(values)
    for n, a in enumerate(atoms):
        size = len(a.Aprime) + 1
        normalized[n] = abs(a.value(gn)) / float(np.prod(sv[:size]))
    mx = float(np.max(normalized))
    return AtomReport(values, normalized, mx, mx <= tol, atoms)


# ---------------------------------------------------------------- determinant expansions

@dataclass(frozen=True)
class ExpansionResiduals:
    row_expansion: float  # |det M - sum_j m_1j D_j|
    column_expansion: float  # max over (j, x), x != j, of |D_j - sum_i m_ix D_ij|
    scale: float  # max(1, max|m|)^n

    def passes(self, rel: float = 1e-9) -> bool:
        return max(self.row_expansion, self.column_expansion) <= rel * self.scale


def _ones_column(m: np.ndarray, j: int) -> np.ndarray:
    out = m.copy()
    out[:, j] = 1.0
    return out


def _d_ij(m: np.ndarray, i: int, j: int) -> np.ndarray:
    out = m.copy()
    out[i, :] = 1.0
    out[:, j] = 1.0
    out[i, j] = 0.0
    return out


def det_expansion_check(m) -> ExpansionResiduals:
    """Check det M = sum_j m_1j D_j and D_j = sum_i m_ix D_ij by direct determinants.

    D_j replaces column j of M by ones. D_ij additionally replaces row i by
    ones and puts 0 at (i, j).
    """
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    if m.shape != (n, n) or not 1 <= n <= 8:
        raise ValueError("expected a square matrix of size 1..8")
    dj = np.array([np.linalg.det(_ones_column(m, j)) for j in range(n)])
    row = abs(np.linalg.det(m) - m[0] @ dj)
    col = 0.0
    for j in range(n):
        dij = np.array([np.linalg.det(_d_ij(m, i, j)) for i in range(n)])
        for x in range(n):
            if x != j:
                col = max(col, abs(dj[j] - m[:, x] @ dij))
    scale = max(1.0, float(np.max(np.abs(m)))) ** n
    return ExpansionResiduals(float(row), float(col), scale)


# ---------------------------------------------------------------- pentad

# Signed products of five factors (-g_ij + g_i8 + g_j8), listed by (i, j).
PENTAD_TERMS = (
    (-1, ((2, 3), (1, 4), (3, 4), (1, 5), (2, 5))),
    (1, ((1, 3), (2, 4), (3, 4), (1, 5), (2, 5))),
    (1, ((2, 3), (1, 4), (2, 4), (1, 5), (3, 5))),
    (-1, ((1, 2), (2, 4), (3, 4), (1, 5), (3, 5))),
    (-1, ((1, 3), (1, 4), (2, 4), (2, 5), (3, 5))),
    (1, ((1, 2), (1, 4), (3, 4), (2, 5), (3, 5))),
    (-1, ((1, 3), (2, 3), (2, 4), (1, 5), (4, 5))),
    (1, ((1, 2), (2, 3), (3, 4), (1, 5), (4, 5))),
    (1, ((1, 3), (2, 3), (1, 4), (2, 5), (4, 5))),
    (-1, ((1, 2), (1, 3), (3, 4), (2, 5), (4, 5))),
    (-1, ((1, 2), (2, 3), (1, 4), (3, 5), (4, 5))),
    (1, ((1, 2), (1, 3), (2, 4), (3, 5), (4, 5))),
)
PENTAD_APEX = 8


@dataclass(frozen=True)
class PentadResult:
    value: float
    scale: float  # largest absolute value among the 12 signed products

    @property
    def normalized(self) -> float:
        return abs(self.value) / self.scale if self.scale > 0 else 0.0


def pentad_residual(gamma) -> PentadResult:
    """Evaluate the transformed pentad polynomial on an 8 x 8 variogram.

    Each factor -g_ij + g_i8 + g_j8 equals 2 Sigma^(8)_ij, so the 12 products are
    the monomials of the polynomial in covariance coordinates; the largest of
    them in absolute value is the scale.
    """
    g = np.asarray(gamma, dtype=float)
    if g.shape != (8, 8):
        raise ValueError("the pentad polynomial lives on 8 x 8 variograms")
    terms = np.empty(len(PENTAD_TERMS))
    for n, (sign, factors) in enumerate(PENTAD_TERMS):
        prod = float(sign)
        for i, j in factors:
            prod *= -g[i - 1, j - 1] + g[i - 1, PENTAD_APEX - 1] + g[j - 1, PENTAD_APEX - 1]
        terms[n] = prod
    return PentadResult(float(terms.sum()), float(np.max(np.abs(terms))))
