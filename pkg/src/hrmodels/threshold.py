"""Extremal ML thresholds: how low the dimensionality of an empirical variogram
can go while a strictly CND completion still exists generically.

Bounds come from the clique number and the treewidth. The algebraic
elimination test is replaced by a Jacobian rank test: the map from rank-r
point configurations to edge variogram entries has a full-dimensional image
exactly when the elimination ideal is zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import get_tol, make_rng
from .errors import CompleteGraph, DegenerateSample, Disconnected
from .degree import k2n_candidates
from .graphs import UndirectedGraph, clique_number, treewidth
from .varalg import covariance_mapping, numerical_rank, ones_complement, sigma_of_gamma

ZERO_LIKELY = "ZeroIdealLikely"
NOT_ZERO = "NotZero"
INCONCLUSIVE = "Inconclusive"

EXISTS_CND = "ExistsCND"
NO_CND = "NoCNDSolution"


@dataclass
class SurrogateVerdict:
    verdict: str
    r: int
    ranks: list[int]
    n_edges: int
    n_params: int

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "r": self.r, "ranks": self.ranks,
                "n_edges": self.n_edges, "n_params": self.n_params}


def edge_jacobian(g: UndirectedGraph, w: np.ndarray) -> np.ndarray:
    """Jacobian of W -> (G_e)_e for points b_i = W u_i, u_i the rows of a 1-perp basis.

    dG_ij / dW = 2 (b_i - b_j)(u_i - u_j)^T.
    """
    u = ones_complement(g.d)
    b = w @ u.T
    rows = [2.0 * np.outer(b[:, i - 1] - b[:, j - 1], u[i - 1] - u[j - 1]).ravel()
            for i, j in g.edge_list()]
    return np.array(rows)


def elimination_surrogate(g: UndirectedGraph, r: int, trials: int = 100, seed: int = 0,
                          tol: float | None = None) -> SurrogateVerdict:
    """Is the image of rank-r configurations in edge coordinates full-dimensional?

    ZeroIdealLikely if the Jacobian has rank #E at every trial, NotZero if it
    stays below #E at every trial, Inconclusive otherwise.
    """
    if not 1 <= r < g.d:
        raise ValueError(f"r must lie in 1..{g.d - 1}")
    rng = make_rng(seed)
    m = len(g.edges)
    ranks = []
    for _ in range(trials):
        w = rng.standard_normal((r, g.d - 1))
        ranks.append(numerical_rank(edge_jacobian(g, w), tol))
    if all(k == m for k in ranks):
        verdict = ZERO_LIKELY
    elif all(k < m for k in ranks):
        verdict = NOT_ZERO
    else:
        verdict = INCONCLUSIVE
    return SurrogateVerdict(verdict, r, ranks, m, r * (g.d - 1))


# ---------------------------------------------------------------- 4-cycle experiment

@dataclass
class C4Candidate:
    gamma12: complex
    gamma34: complex
    kind: str  # "complex", "degenerate", "cnd" or "not-cnd"
    minors: list[float]  # leading principal minors of Sigma^(4), scaled to be dimensionless

    def to_json(self) -> dict:
        return {"gamma12": [self.gamma12.real, self.gamma12.imag],
                "gamma34": [self.gamma34.real, self.gamma34.imag],
                "kind": self.kind, "minors": self.minors}


@dataclass
class C4Outcome:
    outcome: str
    sample: np.ndarray
    gamma: np.ndarray  # the rank-one variogram of the sample
    candidates: list[C4Candidate]

    def to_json(self) -> dict:
        return {"outcome": self.outcome, "sample": [float(x) for x in self.sample],
                "candidates": [c.to_json() for c in self.candidates]}


C4_EDGES = ((1, 3), (1, 4), (2, 3), (2, 4))


def c4_graph() -> UndirectedGraph:
    """The 4-cycle 1-3-2-4 with nonedges 12 and 34."""
    return UndirectedGraph.from_edges(4, C4_EDGES)


def cycle4_rank1_experiment(x2: float, x3: float, scale: float = 1.0,
                            tol: float | None = None) -> C4Outcome:
    """Does the single observation c(1, x2, x3, -(1+x2+x3)) admit a strictly CND completion?

    The 4-cycle is K_{2,2} with parts {1,2} and {3,4}; its completions are the
    roots of the K_{2,2} minor polynomial. The candidate equal to the rank-one
    input itself is reported as degenerate. The others are classified by the
    leading principal minors of Sigma^(4).
    """
    tol = get_tol(tol)
    v = scale * np.array([1.0, x2, x3, -(1.0 + x2 + x3)])
    spread = np.max(np.abs(v))
    if min(abs(v[i] - v[j]) for i in range(4) for j in range(i)) <= tol * spread:
        raise DegenerateSample("sample has coincident coordinates")
    gamma = (v[:, None] - v[None, :]) ** 2
    a = gamma[:2, 2]
    b = gamma[:2, 3]
    out = []
    top = np.max(gamma)
    for cand in k2n_candidates(a, b):
        full = cand.gamma
        g12, g34 = full[0, 1], full[2, 3]
        if not cand.is_real:
            out.append(C4Candidate(complex(g12), complex(g34), "complex", []))
            continue
        real = full.real / top
        s4 = covariance_mapping(real, 4)
        minors = [float(np.linalg.det(s4[:k, :k])) for k in (1, 2, 3)]
        ev = np.linalg.eigvalsh(sigma_of_gamma(real))
        ev = np.sort(np.abs(ev))[1:]  # drop the eigenvalue of the constant vector
        if ev[0] <= tol * ev[-1]:
            kind = "degenerate"
        elif all(mn > tol for mn in minors):
            kind = "cnd"
        else:
            kind = "not-cnd"
        out.append(C4Candidate(complex(g12), complex(g34), kind, minors))
    outcome = EXISTS_CND if any(c.kind == "cnd" for c in out) else NO_CND
    return C4Outcome(outcome, v, gamma, out)


# ---------------------------------------------------------------- bounds

@dataclass
class ThresholdBounds:
    lower: int
    upper: int
    exact: int | None = None
    evidence: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"lower": self.lower, "upper": self.upper,
                "exact": self.exact if self.exact is not None else "Unknown",
                "evidence": self.evidence}


def _is_four_cycle(g: UndirectedGraph) -> bool:
    return g.d == 4 and len(g.edges) == 4 and all(len(g.adjacency[v]) == 2 for v in g.vertices)


def emlt_bounds(g: UndirectedGraph, elim_trials: int = 0, seed: int = 0,
                counterexamples: bool = False) -> ThresholdBounds:
    """q(G) - 1 <= eMLT(G) <= tw(G), optionally tightened by experiments.

    With ``elim_trials`` > 0 the Jacobian surrogate is run for r between the
    bounds; a full-dimensional image at r shows eMLT <= r. With
    ``counterexamples`` the 4-cycle's rank-one sample without completion
    (and a small neighbourhood of it) is used to exclude r = 1.
    """
    if not g.is_connected():
        raise Disconnected("thresholds are defined for connected graphs")
    if g.is_complete():
        raise CompleteGraph("the bounds exclude complete graphs")
    lower = clique_number(g) - 1
    upper = treewidth(g).width
    res = ThresholdBounds(lower, upper)
    lo, hi = lower, upper
    if elim_trials > 0:
        for r in range(lower, upper + 1):
            if r < 1 or r >= g.d:
                continue
            verdict = elimination_surrogate(g, r, elim_trials, seed)
            res.evidence.append({"experiment": "elimination_surrogate", **verdict.to_json()})
            if verdict.verdict == ZERO_LIKELY:
                hi = min(hi, r)
                break
    if counterexamples and _is_four_cycle(g) and lo <= 1:
        base = cycle4_rank1_experiment(0.0, 0.5)
        sweep = [cycle4_rank1_experiment(dx, 0.5 + dy).outcome
                 for dx in (-1e-3, 0.0, 1e-3) for dy in (-1e-3, 0.0, 1e-3)]
        open_set = base.outcome == NO_CND and all(o == NO_CND for o in sweep)
        res.evidence.append({"experiment": "cycle4_rank1", "sample": [1, 0, 0.5, -1.5],
                             "outcome": base.outcome, "neighbourhood_without_completion": open_set})
        if open_set:
            lo = max(lo, 2)
    if lo == hi:
        res.exact = lo
    return res

