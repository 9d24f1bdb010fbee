"""Registered reproduction targets.

Each target reruns one experiment with fixed seeds and returns a list of
named checks with the numbers behind them. Trial i of a target draws from
``make_rng(seed, i)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import get_tol, make_rng
from .degree import emld, emld_k2n_numeric, mld_relations_check
from .eci import pentad_residual
from .graphs import cycle_graph, pentad_graph
from .threshold import (EXISTS_CND, NO_CND, ZERO_LIKELY, c4_graph, cycle4_rank1_experiment,
                        elimination_surrogate, emlt_bounds)
from .errors import UnknownTarget
from .varalg import (fiedler_bapat_check, gamma_of_sigma, is_strictly_cnd, kernel_witness,
                     model_point, numerical_rank, random_configuration_variogram, random_gram,
                     sigma_of_gamma)

TRIANGLE_GAMMA = np.array([[0.0, 9.0, 25.0], [9.0, 0.0, 16.0], [25.0, 16.0, 0.0]])
TRIANGLE_BORDERED = np.array([
    [1 / 9, -1 / 9, 0.0, 1 / 2],
    [-1 / 9, 25 / 144, -1 / 16, 0.0],
    [0.0, -1 / 16, 1 / 16, 1 / 2],
    [1 / 2, 0.0, 1 / 2, 25 / 4],
])
TRIANGLE_SIGMA = np.array([[52.0, -2.0, -50.0], [-2.0, 25.0, -23.0], [-50.0, -23.0, 73.0]]) / 9

PENTAD_MODEL_TOL = 1e-8
PENTAD_GENERIC_FLOOR = 1e-2


@dataclass
class Check:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name} {self.detail}"

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


def right_triangle(seed: int = 0) -> list[Check]:
    fb = fiedler_bapat_check(TRIANGLE_GAMMA)
    err_b = float(np.max(np.abs(fb.matrix() - TRIANGLE_BORDERED)))
    err_s = float(np.max(np.abs(sigma_of_gamma(TRIANGLE_GAMMA) - TRIANGLE_SIGMA)))
    return [Check("bordered-inverse", err_b <= 1e-12,
                  {"max_error": err_b, "matrix": fb.matrix().tolist()}),
            Check("theta-pinv", err_s <= 1e-12, {"max_error": err_s})]


def cycle_degrees(seed: int = 0) -> list[Check]:
    rows = [mld_relations_check(n) for n in range(3, 13)]
    table = [[r.n, r.emld, r.mld, r.difference_identity, r.determinant_identity] for r in rows]
    c4 = emld(cycle_graph(4))
    return [Check("cycle-identities", all(r.ok for r in rows), {"table": table}),
            Check("c4-degrees", c4.emld == 4 and c4.mld == 5, {"eMLD": c4.emld, "MLD": c4.mld})]


def k2n_degrees(seed: int = 0, seeds: int = 20) -> list[Check]:
    out = []
    for n in range(2, 7):
        counts = [emld_k2n_numeric(n, seed + s).emld for s in range(seeds)]
        out.append(Check(f"k2n-n{n}", all(c == 2 * n for c in counts),
                         {"expected": 2 * n, "counts": counts}))
    return out


def c4_thresholds(seed: int = 0, trials: int = 100) -> list[Check]:
    a = cycle4_rank1_experiment(0.0, 2.0)
    b = cycle4_rank1_experiment(0.0, 0.5)
    bounds = emlt_bounds(cycle_graph(4))
    surr = elimination_surrogate(c4_graph(), 2, trials, seed)
    return [Check("sample-(0,2)", a.outcome == EXISTS_CND, {"outcome": a.outcome}),
            Check("sample-(0,1/2)", b.outcome == NO_CND, {"outcome": b.outcome}),
            Check("bounds", (bounds.lower, bounds.upper) == (1, 2),
                  {"lower": bounds.lower, "upper": bounds.upper}),
            Check("surrogate-r2", surr.verdict == ZERO_LIKELY,
                  {"verdict": surr.verdict, "min_rank": min(surr.ranks), "n_edges": surr.n_edges})]


def pentad(seed: int = 0, points: int = 50) -> list[Check]:
    g = pentad_graph()
    model = [pentad_residual(model_point(g, make_rng(seed, i))[0]).normalized
             for i in range(points)]
    generic = np.array([pentad_residual(random_configuration_variogram(8, make_rng(seed, points + i)))
                        .normalized for i in range(points)])
    above = int(np.sum(generic > PENTAD_GENERIC_FLOOR))
    return [Check("model-points", max(model) < PENTAD_MODEL_TOL, {"max_normalized": max(model)}),
            Check("generic-points", above == points,
                  {"above_floor": above, "points": points, "min": float(generic.min()),
                   "median": float(np.median(generic)), "floor": PENTAD_GENERIC_FLOOR}),
            Check("generic-median", float(np.median(generic)) > PENTAD_GENERIC_FLOOR,
                  {"median": float(np.median(generic)), "floor": PENTAD_GENERIC_FLOOR})]


def rank_law(seed: int = 0, trials: int = 100, witness_trials: int = 50) -> list[Check]:
    tol = get_tol()
    fails = []
    for i in range(trials):
        rng = make_rng(seed, i)
        d = int(rng.integers(3, 10))
        r = int(rng.integers(1, d))
        k = numerical_rank(gamma_of_sigma(random_gram(d, r, rng)), tol)
        if k != min(r + 2, d):
            fails.append([d, r, k])
    wit = 0
    for i in range(witness_trials):
        rng = make_rng(seed, trials + i)
        d = int(rng.integers(3, 10))
        s = random_gram(d, d - 2, rng)
        x = kernel_witness(s, tol)
        g = gamma_of_sigma(s)
        if x is not None and abs(x @ g @ x) <= tol * np.max(np.abs(g)) and not is_strictly_cnd(g, tol):
            wit += 1
    sub_fail = 0
    for i in range(trials):
        rng = make_rng(seed, trials + witness_trials + i)
        d = int(rng.integers(3, 10))
        g = random_configuration_variogram(d, rng)
        size = int(rng.integers(2, d + 1))
        idx = np.sort(rng.choice(d, size, replace=False))
        if not is_strictly_cnd(g[np.ix_(idx, idx)], tol):
            sub_fail += 1
    return [Check("rank-min(r+2,d)", not fails, {"trials": trials, "failures": fails}),
            Check("boundary-witness", wit == witness_trials, {"found": wit, "trials": witness_trials}),
            Check("principal-submatrix", sub_fail == 0, {"trials": trials, "failures": sub_fail})]


TARGETS = {
    "example-2.2": right_triangle,
    "cycle-degrees": cycle_degrees,
    "k2n-degrees": k2n_degrees,
    "c4-thresholds": c4_thresholds,
    "pentad": pentad,
    "rank-law": rank_law,
}


def run(target: str, seed: int = 0) -> list[Check]:
    if target not in TARGETS:
        raise UnknownTarget(f"unknown target {target!r}; choose from {', '.join(TARGETS)}")
    return TARGETS[target](seed)
