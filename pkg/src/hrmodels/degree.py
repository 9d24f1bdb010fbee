"""Extremal and Gaussian maximum likelihood degrees.

Chordal graphs have degree 1, degrees multiply over clique separators, and a
few prime families have closed forms. The only numerical computation is for
K_{2,n}: once the nonedge value y between the two hubs is fixed, every other
missing entry is a rational function of y, and the completion equations
collapse to one polynomial of degree 2n in y.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import make_rng
from .errors import DegenerateData, Disconnected
from .graphs import UndirectedGraph, complete_bipartite, is_chordal, separate_decompose
from .varalg import cm, is_strictly_cnd, random_configuration_variogram

FORMULA = "Formula"
MULTIPLICATIVE = "Multiplicative"
NUMERIC_K2N = "NumericK2n"
UNKNOWN = "Unknown"


@dataclass
class DegreeReport:
    graph: dict
    emld: int | None
    mld: int | None
    method: str
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"graph": self.graph, "eMLD": self.emld if self.emld is not None else "Unknown",
                "MLD": self.mld if self.mld is not None else "Unknown", "method": self.method,
                "details": self.details}


# ---------------------------------------------------------------- closed forms

def emld_cycle(n: int) -> int:
    if n < 3:
        raise ValueError("cycles need n >= 3")
    return 2 ** (n - 1) - n


def mld_gaussian_cycle(n: int) -> int:
    if n < 3:
        raise ValueError("cycles need n >= 3")
    return (n - 3) * 2 ** (n - 2) + 1


@dataclass(frozen=True)
class CycleRelations:
    n: int
    emld: int
    mld: int
    difference_identity: bool  # MLD - eMLD = 2^(n-2)(n-5) + n + 1
    determinant_identity: bool  # MLD = eMLD(C_n)^2 - eMLD(C_(n-1)) eMLD(C_(n+1))

    @property
    def ok(self) -> bool:
        return self.difference_identity and self.determinant_identity


def mld_relations_check(n: int) -> CycleRelations:
    """Exact integer check of the two relations between cycle ML degrees."""
    e, m = emld_cycle(n), mld_gaussian_cycle(n)
    # for n = 3 the cycle formula is evaluated at n - 1 = 2, where it gives 0
    prev = 2 ** (n - 2) - (n - 1)
    first = m - e == 2 ** (n - 2) * (n - 5) + n + 1
    second = m == e * e - prev * emld_cycle(n + 1)
    return CycleRelations(n, e, m, bool(first), bool(second))


# ---------------------------------------------------------------- recognition

def _is_cycle(g: UndirectedGraph) -> bool:
    return g.d >= 3 and g.is_connected() and all(len(g.adjacency[v]) == 2 for v in g.vertices)


def _k2n_parts(g: UndirectedGraph) -> tuple[list[int], list[int]] | None:
    """(A, B) with #B = 2 when g is exactly K_{2,n}, n >= 2."""
    if g.d < 4:
        return None
    for b1 in g.vertices:
        for b2 in g.vertices:
            if b2 <= b1 or g.has_edge(b1, b2):
                continue
            a = [v for v in g.vertices if v not in (b1, b2)]
            if len(g.edges) != 2 * len(a):
                continue
            if all(g.has_edge(v, b1) and g.has_edge(v, b2) for v in a):
                return a, [b1, b2]
    return None


def _apex(g: UndirectedGraph) -> int | None:
    for v in g.vertices:
        if len(g.adjacency[v]) == g.d - 1:
            return v
    return None


def _known_mld(g: UndirectedGraph) -> int | None:
    """Gaussian ML degree where a closed form is on record."""
    if not g.is_connected():
        return None
    if is_chordal(g):
        return 1
    if _is_cycle(g):
        return mld_gaussian_cycle(g.d)
    if _k2n_parts(g):
        return 2 * (g.d - 2) + 1
    return None


def emld(g: UndirectedGraph) -> DegreeReport:
    """Extremal ML degree by formula, multiplicativity over clique separators, or family lookup."""
    if not g.is_connected():
        raise Disconnected("ML degrees are defined for connected graphs")
    gj = g.to_json()
    if is_chordal(g):
        return DegreeReport(gj, 1, 1, FORMULA, {"family": "chordal"})
    split = separate_decompose(g)
    if split is not None:
        left = emld(g.induced(split.left)[0])
        right = emld(g.induced(split.right)[0])
        value = left.emld * right.emld if left.emld is not None and right.emld is not None else None
        return DegreeReport(gj, value, None, MULTIPLICATIVE if value is not None else UNKNOWN,
                            {"separator": sorted(split.separator),
                             "factors": [left.to_json(), right.to_json()]})
    if _is_cycle(g):
        return DegreeReport(gj, emld_cycle(g.d), mld_gaussian_cycle(g.d), FORMULA,
                            {"family": f"C{g.d}"})
    if _k2n_parts(g):
        n = g.d - 2
        return DegreeReport(gj, 2 * n, 2 * n + 1, FORMULA, {"family": f"K2,{n}"})
    apex = _apex(g)
    if apex is not None:
        base = g.induced([v for v in g.vertices if v != apex])[0]
        m = _known_mld(base)
        if m is not None:
            return DegreeReport(gj, m, None, FORMULA, {"family": "suspension", "apex": apex})
    return DegreeReport(gj, None, None, UNKNOWN, {})


# ---------------------------------------------------------------- K_{2,n} numerics

def k2n_completion(a, b, y) -> np.ndarray:
    """Full variogram on K_{2,n} given the hub nonedge value y.

    Positions 0..n-1 are the n-side, n and n+1 the hubs; a_i and b_i are the
    entries to the two hubs. The n-side nonedges are forced by the vanishing
    Laplacian entries to

        z_ij = (a_i + b_i + a_j + b_j - y - (a_i - b_i)(a_j - b_j)/y) / 2.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    n = a.size
    m = np.zeros((n + 2, n + 2), dtype=complex)
    m[:n, n] = m[n, :n] = a
    m[:n, n + 1] = m[n + 1, :n] = b
    m[n, n + 1] = m[n + 1, n] = y
    u, s = a - b, a + b
    z = 0.5 * (s[:, None] + s[None, :] - y - np.outer(u, u) / y)
    np.fill_diagonal(z, 0)
    m[:n, :n] = z
    return m


def _k2n_minor(a, b, y) -> complex:
    """y^n times the Cayley-Menger minor that must vanish; a polynomial in y."""
    n = len(a)
    c = cm(k2n_completion(a, b, y), scaled=True)
    c[:n, :] *= y
    return np.linalg.det(np.delete(np.delete(c, n, axis=0), n + 1, axis=1))


def _circle_coefficients(a, b, r: float) -> np.ndarray:
    """Coefficients of x -> minor(r x), recovered exactly from samples on the unit circle."""
    n = len(a)
    pts = 4 * n + 4  # the minor has degree at most 2n + 1
    w = np.exp(2j * np.pi * np.arange(pts) / pts)
    vals = np.array([_k2n_minor(a, b, r * x) for x in w])
    return np.fft.fft(vals) / pts


def _degree(c: np.ndarray, tol: float) -> int:
    return int(np.max(np.flatnonzero(np.abs(c) > tol * np.max(np.abs(c)))))


def k2n_polynomial(a, b, coef_tol: float = 1e-10) -> tuple[np.ndarray, float]:
    """Coefficients (lowest first) of the minor polynomial in the scaled variable x = y / r.

    The radius r is chosen as the geometric mean of the root magnitudes,
    (|c_0| / |c_deg|)^(1/deg), which balances the coefficient sizes; a first
    pass at the median data value provides the estimate.
    """
    r = float(np.median(np.concatenate([a, b])))
    c = _circle_coefficients(a, b, r)
    deg = _degree(c, 1e-13)
    if deg >= 1 and abs(c[0]) > 0:
        r *= float(abs(c[0]) / abs(c[deg])) ** (1.0 / deg)
        c = _circle_coefficients(a, b, r)
    deg = _degree(c, coef_tol)
    return c[:deg + 1], r


def _polish(a, b, y: complex, steps: int = 8) -> complex:
    for _ in range(steps):
        h = 1e-7 * max(abs(y), 1e-12)
        f = _k2n_minor(a, b, y)
        fp = (_k2n_minor(a, b, y + h) - _k2n_minor(a, b, y - h)) / (2 * h)
        if fp == 0:
            break
        step = f / fp
        y = y - step
        if abs(step) < 1e-15 * abs(y):
            break
    return y


@dataclass(frozen=True)
class K2nCandidate:
    y: complex
    gamma: np.ndarray  # complex completion
    violation: float  # largest nonedge Laplacian entry relative to the largest entry
    is_real: bool


def k2n_candidates(a, b, rel_tol: float = 1e-6, coef_tol: float = 1e-10) -> list[K2nCandidate]:
    """All completions of K_{2,n} data from the roots of the minor polynomial."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = a.size
    c, r = k2n_polynomial(a, b, coef_tol)
    deg = c.size - 1
    if deg < 1:
        raise DegenerateData("minor polynomial is constant")
    comp = np.zeros((deg, deg), dtype=complex)
    comp[1:, :-1] = np.eye(deg - 1)
    comp[:, -1] = -c[:-1] / c[-1]
    roots = [_polish(a, b, r * x) for x in np.linalg.eigvals(comp)]
    d = n + 2
    out = []
    for y in roots:
        if abs(y) <= rel_tol * max(np.max(a), np.max(b)):
            continue
        full = k2n_completion(a, b, y)
        th = np.linalg.inv(cm(full))[:d, :d]
        nonedge = [abs(th[i, j]) for i in range(n) for j in range(i + 1, n)] + [abs(th[n, n + 1])]
        viol = float(max(nonedge) / np.max(np.abs(th)))
        out.append(K2nCandidate(complex(y), full, viol, abs(y.imag) <= rel_tol * abs(y)))
    return out


def _k2n_count(a, b, rel_tol: float) -> tuple[int, list[K2nCandidate]]:
    cands = k2n_candidates(a, b, rel_tol)
    ys = np.array([c.y for c in cands])
    for i in range(len(ys)):
        for j in range(i):
            if abs(ys[i] - ys[j]) <= rel_tol * max(abs(ys[i]), abs(ys[j])):
                raise DegenerateData("repeated roots within tolerance")
    bad = [c for c in cands if c.violation > rel_tol]
    if bad:
        raise DegenerateData(f"{len(bad)} roots do not give valid completions")
    return len(cands), cands


def emld_k2n_numeric(n: int, seed: int, rel_tol: float = 1e-6, retries: int = 5) -> DegreeReport:
    """Count distinct valid completions of random K_{2,n} data (hubs are vertices n+1, n+2).

    Data come from standard normal point configurations. Degenerate draws are
    redrawn from fresh substreams up to ``retries`` times.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    g = complete_bipartite(n, 2)
    last = None
    for attempt in range(retries + 1):
        rng = make_rng(seed, attempt)
        gamma = random_configuration_variogram(n + 2, rng)
        a, b = gamma[:n, n], gamma[:n, n + 1]
        try:
            count, cands = _k2n_count(a, b, rel_tol)
        except DegenerateData as exc:
            last = exc
            continue
        real = [c for c in cands if c.is_real]
        cnd = [c for c in real if is_strictly_cnd(c.gamma.real)]
        return DegreeReport(g.to_json(), count, 2 * n + 1, NUMERIC_K2N, {
            "seed": seed, "resamples": attempt,
            "roots": [[float(c.y.real), float(c.y.imag)] for c in cands],
            "max_violation": max(c.violation for c in cands),
            "real_roots": len(real), "strictly_cnd_roots": len(cnd)})
    raise DegenerateData(f"no usable draw after {retries} resamples: {last}")
