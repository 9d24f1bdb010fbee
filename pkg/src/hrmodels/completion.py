"""Surrogate maximum likelihood by CND matrix completion.

Given variogram entries on the edges of a connected graph, find the strictly
CND completion whose Laplacian vanishes off the edges. Chordal graphs have a
closed form built from clique blocks; graphs with clique separators split into
smaller problems; prime blocks are solved by damped Newton ascent on

    f(q) = log Det Theta(q) - sum_e q_e G_e,      Theta(q) = sum_e q_e L_e,

whose stationarity condition is gamma(Theta^+)_e = G_e on every edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import get_tol, make_rng
from .errors import (CliqueBlockNotCND, Disconnected, LeftCone, NotChordal, NotStrictlyCND,
                     NotTwoCliqueCover, RankDeficient)
from .graphs import (UndirectedGraph, chordal_decomposition, is_chordal, maximal_cliques,
                     min_fill_order, separate_decompose)
from .varalg import (gamma_of_theta, is_strictly_cnd, log_pseudo_determinant,
                     ones_complement, theta_of_gamma)

CONVERGED = "Converged"
NO_CND = "NoCNDSolution"
MAX_ITER = "MaxIterations"


@dataclass(frozen=True)
class PartialVariogram:
    """Variogram entries known on the edges of ``graph``; everything else is unknown."""

    graph: UndirectedGraph
    entries: dict
    tol: float | None = None

    def __post_init__(self):
        ent = {}
        for (i, j), v in self.entries.items():
            key = (min(i, j), max(i, j))
            if key not in self.graph.edges:
                raise ValueError(f"entry {key} is not an edge")
            if not np.isfinite(v):
                raise ValueError(f"entry {key} is not finite")
            ent[key] = float(v)
        missing = self.graph.edges - ent.keys()
        if missing:
            raise ValueError(f"missing entries for edges {sorted(missing)}")
        object.__setattr__(self, "entries", ent)
        for clique in maximal_cliques(self.graph):
            if len(clique) > 1 and not is_strictly_cnd(self.block(clique), self.tol):
                raise CliqueBlockNotCND(f"clique {sorted(clique)} block is not strictly CND")

    @classmethod
    def from_matrix(cls, g: UndirectedGraph, gamma, tol: float | None = None) -> "PartialVariogram":
        gm = np.asarray(gamma, dtype=float)
        if gm.shape != (g.d, g.d):
            raise ValueError(f"matrix shape {gm.shape} does not match a graph on {g.d} vertices")
        return cls(g, {(i, j): gm[i - 1, j - 1] for i, j in g.edges}, tol)

    @property
    def d(self) -> int:
        return self.graph.d

    def matrix(self, fill: float = np.nan) -> np.ndarray:
        out = np.full((self.d, self.d), fill)
        np.fill_diagonal(out, 0.0)
        for (i, j), v in self.entries.items():
            out[i - 1, j - 1] = out[j - 1, i - 1] = v
        return out

    def block(self, vs) -> np.ndarray:
        idx = [v - 1 for v in sorted(vs)]
        blk = self.matrix()[np.ix_(idx, idx)]
        if np.isnan(blk).any():
            raise ValueError("block contains unknown entries")
        return blk

    def restrict(self, vs) -> tuple["PartialVariogram", list[int]]:
        sub, labels = self.graph.induced(vs)
        m = self.matrix(0.0)
        idx = [v - 1 for v in labels]
        return PartialVariogram.from_matrix(sub, m[np.ix_(idx, idx)], self.tol), labels

    def scale(self) -> float:
        return max((abs(v) for v in self.entries.values()), default=0.0)

    def to_json(self) -> dict:
        return {"graph": self.graph.to_json(),
                "entries": [[i, j, v] for (i, j), v in sorted(self.entries.items())]}

    @classmethod
    def from_json(cls, obj: dict, tol: float | None = None) -> "PartialVariogram":
        g = UndirectedGraph.from_json(obj["graph"])
        return cls(g, {(int(i), int(j)): float(v) for i, j, v in obj["entries"]}, tol)


@dataclass
class SolverOptions:
    tol: float = 1e-8  # max edge residual relative to max |G|
    max_iter: int = 10_000
    boundary_tol: float = 1e-8  # smallest / largest eigenvalue of Sigma on 1-perp
    init: str = "warm"  # "warm", "unit" or "random"
    seed: int | None = None
    newton: bool = True


@dataclass
class CompletionResult:
    gamma: np.ndarray
    theta: np.ndarray
    status: str
    edge_residual: float
    nonedge_residual: float
    iterations: int = 0
    objective_trace: list = field(default_factory=list)
    method: str = ""
    margin: float = float("nan")

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED

    def to_json(self) -> dict:
        tolist = lambda m: [[float(x) for x in row] for row in m]
        return {"status": self.status, "method": self.method, "iterations": self.iterations,
                "edge_residual": float(self.edge_residual),
                "nonedge_residual": float(self.nonedge_residual), "margin": float(self.margin),
                "gamma": tolist(self.gamma), "theta": tolist(self.theta),
                "objective_trace": [float(x) for x in self.objective_trace]}


def _residuals(p: PartialVariogram, gamma: np.ndarray, theta: np.ndarray) -> tuple[float, float]:
    edge = max((abs(gamma[i - 1, j - 1] - v) for (i, j), v in p.entries.items()), default=0.0)
    non = max((abs(theta[i - 1, j - 1]) for i, j in p.graph.nonedges()), default=0.0)
    return float(edge), float(non)


def _finish(p: PartialVariogram, theta: np.ndarray, method: str, **kw) -> CompletionResult:
    gamma = gamma_of_theta(theta)
    edge, non = _residuals(p, gamma, theta)
    margin = is_strictly_cnd(gamma).margin
    return CompletionResult(gamma, theta, kw.pop("status", CONVERGED), edge, non, method=method,
                            margin=margin, **kw)


def _embed(d: int, labels, block: np.ndarray) -> np.ndarray:
    out = np.zeros((d, d))
    idx = [v - 1 for v in labels]
    out[np.ix_(idx, idx)] = block
    return out


def _clique_theta(p: PartialVariogram, vs) -> np.ndarray:
    vs = sorted(vs)
    if len(vs) == 1:
        return np.zeros((1, 1))
    try:
        return theta_of_gamma(p.block(vs), p.tol)
    except NotStrictlyCND as exc:
        raise CliqueBlockNotCND(f"block {vs} is not strictly CND") from exc


def _assemble(p: PartialVariogram, plus, minus) -> np.ndarray:
    """sum of embedded clique Laplacians minus the weighted separator Laplacians."""
    theta = np.zeros((p.d, p.d))
    for c in plus:
        theta += _embed(p.d, sorted(c), _clique_theta(p, c))
    for s, nu in minus:
        theta -= nu * _embed(p.d, sorted(s), _clique_theta(p, s))
    return theta


def _require_connected(g: UndirectedGraph) -> None:
    if not g.is_connected():
        raise Disconnected("completion requires a connected graph")


def complete_chordal(p: PartialVariogram) -> CompletionResult:
    """Closed form on chordal graphs: cliques added, separators subtracted with multiplicity."""
    _require_connected(p.graph)
    if not is_chordal(p.graph):
        raise NotChordal("closed-form completion needs a chordal graph")
    dec = chordal_decomposition(p.graph)
    return _finish(p, _assemble(p, dec.cliques, dec.separators), "chordal")


def complete_two_clique(p: PartialVariogram) -> CompletionResult:
    """Closed form when the graph is the union of two cliques A and B."""
    _require_connected(p.graph)
    cliques = maximal_cliques(p.graph)
    if len(cliques) == 1:
        return _finish(p, _assemble(p, cliques, []), "two-clique")
    if len(cliques) != 2:
        raise NotTwoCliqueCover(f"graph has {len(cliques)} maximal cliques")
    a, b = sorted(cliques, key=lambda c: min(c))
    return _finish(p, _assemble(p, [a, b], [(a & b, 1)]), "two-clique")


# ---------------------------------------------------------------- iterative solver

class _Surrogate:
    """Objective, gradient and Newton system of the edge-weight parameterization."""

    def __init__(self, p: PartialVariogram):
        self.d = p.d
        self.edges = p.graph.edge_list()
        self.scale = p.scale() or 1.0
        self.target = np.array([p.entries[e] for e in self.edges]) / self.scale
        self.u = ones_complement(self.d)
        x = np.zeros((self.d, len(self.edges)))
        for n, (i, j) in enumerate(self.edges):
            x[i - 1, n] = 1.0
            x[j - 1, n] = -1.0
        self.x = x
        self.ux = self.u.T @ x  # edge vectors in 1-perp coordinates

    def reduced(self, q: np.ndarray) -> np.ndarray:
        return (self.ux * q) @ self.ux.T

    def theta(self, q: np.ndarray) -> np.ndarray:
        return (self.x * q) @ self.x.T

    def evaluate(self, q: np.ndarray):
        """Return (f, gradient, Newton matrix, reduced eigenvalues) or None outside the cone."""
        w, v = np.linalg.eigh(self.reduced(q))
        if w[0] <= 0:
            return None
        f = float(np.sum(np.log(w)) - q @ self.target)
        proj = v.T @ self.ux  # Sigma = U V diag(1/w) V^T U^T
        m = (proj / w[:, None]).T @ proj  # x_e^T Sigma x_f
        grad = np.diag(m) - self.target
        return f, grad, m * m, w


def _warm_start(p: PartialVariogram, model: _Surrogate) -> np.ndarray | None:
    """Truncated Laplacian of the closed-form completion on a min-fill chordal cover.

    Unknown cover entries are filled with shortest-path sums of edge variogram
    values, which is exact for the path model.
    """
    g = p.graph
    _, order = min_fill_order(g)
    adj = {v: set(g.adjacency[v]) for v in g.vertices}
    fill = set()
    for v in order:
        nb = adj.pop(v)
        for a in nb:
            adj[a].discard(v)
            for b in nb:
                if a < b and b not in adj[a]:
                    fill.add((a, b))
            adj[a] |= nb - {a}
    dist = p.matrix(np.inf) / model.scale
    for k in range(p.d):
        dist = np.minimum(dist, dist[:, [k]] + dist[[k], :])
    cover = UndirectedGraph.from_edges(p.d, list(g.edges) + list(fill))
    try:
        pc = PartialVariogram.from_matrix(cover, dist, p.tol)
        theta = _assemble(pc, *_chordal_parts(cover))
    except (CliqueBlockNotCND, NotChordal, NotStrictlyCND, RankDeficient, ValueError):
        return None
    q = np.array([-theta[i - 1, j - 1] for i, j in model.edges])
    return q if model.evaluate(q) is not None else None


def _chordal_parts(g: UndirectedGraph):
    dec = chordal_decomposition(g)
    return dec.cliques, dec.separators


def complete_general(p: PartialVariogram, opts: SolverOptions | None = None) -> CompletionResult:
    """Maximize the surrogate log-likelihood over Laplacians supported on the edges."""
    opts = opts or SolverOptions()
    _require_connected(p.graph)
    model = _Surrogate(p)
    m = len(model.edges)
    q = None
    if opts.init == "warm":
        q = _warm_start(p, model)
    elif opts.init == "random":
        rng = make_rng(0 if opts.seed is None else opts.seed)
        q = rng.uniform(0.5, 2.0, m)
    elif opts.init != "unit":
        raise ValueError(f"unknown init {opts.init!r}")
    if q is None:
        q = np.ones(m)
    state = model.evaluate(q)
    trace = [state[0]]
    status = MAX_ITER
    it = 0
    for it in range(1, opts.max_iter + 1):
        f, grad, hess, w = state
        margin = w[0] / w[-1]
        if opts.newton:
            try:
                step = np.linalg.solve(hess, grad)
            except np.linalg.LinAlgError:
                step = np.linalg.lstsq(hess, grad, rcond=None)[0]
        else:
            step = grad
        slope = float(grad @ step)  # squared Newton decrement when newton=True
        # a small gradient alone is not enough: along a ray where the objective is
        # unbounded the gradient decays while the decrement stays put
        if np.max(np.abs(grad)) <= opts.tol and (not opts.newton or slope <= opts.tol):
            status = CONVERGED
            it -= 1
            break
        if margin < opts.boundary_tol:
            status = NO_CND
            it -= 1
            break
        t = 1.0
        accepted = None
        # near the optimum f changes by less than its rounding error; allow that much slack
        slack = 8 * np.finfo(float).eps * (1.0 + abs(f))
        while t > 1e-14:
            cand = model.evaluate(q + t * step)
            if cand is not None and cand[0] >= f + 1e-4 * t * slope - slack:
                accepted = cand
                break
            t *= 0.5
        if accepted is None:
            if np.max(np.abs(grad)) <= 100 * opts.tol and slope <= 100 * opts.tol:
                status = CONVERGED
                break
            if margin < np.sqrt(opts.boundary_tol):
                status = NO_CND
                break
            raise LeftCone("no feasible ascent step from the current iterate")
        q = q + t * step
        state = accepted
        trace.append(state[0])
    theta = model.theta(q) / model.scale
    w = state[3]
    if status == CONVERGED:
        res = _finish(p, theta, "general", iterations=it, objective_trace=trace)
        if not res.margin > get_tol():
            res.status = NO_CND
        return res
    try:
        gamma = gamma_of_theta(theta)
    except RankDeficient:
        gamma = np.full((p.d, p.d), np.nan)
    edge, non = _residuals(p, gamma, theta)
    return CompletionResult(gamma, theta, status, edge, non, it, trace, "general",
                            float(w[0] / w[-1]))


def surrogate_objective(p: PartialVariogram, theta) -> float:
    """log Det(Theta) + tr(Theta G)/2 with unknown entries of G set to 0."""
    t = np.asarray(theta, dtype=float)
    return log_pseudo_determinant(t) + 0.5 * float(np.sum(t * p.matrix(0.0)))


# ---------------------------------------------------------------- decomposition

def _decomposed_theta(p: PartialVariogram, opts: SolverOptions, choice: int, stats: dict) -> np.ndarray:
    g = p.graph
    if g.is_complete():
        return _clique_theta(p, g.vertices)
    split = separate_decompose(g, choice) if choice else None
    if split is None:
        split = separate_decompose(g)
    if split is None:
        res = complete_general(p, opts)
        stats["iterations"] += res.iterations
        if res.status != CONVERGED:
            stats["status"] = res.status
        return res.theta
    theta = np.zeros((p.d, p.d))
    for side in (split.left, split.right):
        sub, labels = p.restrict(side)
        theta += _embed(p.d, labels, _decomposed_theta(sub, opts, 0, stats))
    theta -= _embed(p.d, sorted(split.separator), _clique_theta(p, split.separator))
    return theta


def complete_decomposed(p: PartialVariogram, opts: SolverOptions | None = None,
                        choice: int = 0) -> CompletionResult:
    """Split along clique separators, solve the pieces, and glue their Laplacians.

    ``choice`` picks which separator is used at the top level (see
    ``graphs.separate_decompose``); the answer does not depend on it.
    """
    opts = opts or SolverOptions()
    _require_connected(p.graph)
    stats = {"iterations": 0, "status": CONVERGED}
    theta = _decomposed_theta(p, opts, choice, stats)
    if stats["status"] != CONVERGED:
        try:
            gamma = gamma_of_theta(theta)
        except RankDeficient:
            gamma = np.full((p.d, p.d), np.nan)
        edge, non = _residuals(p, gamma, theta)
        return CompletionResult(gamma, theta, stats["status"], edge, non, stats["iterations"],
                                method="decomposed")
    return _finish(p, theta, "decomposed", iterations=stats["iterations"])


def complete(p: PartialVariogram, method: str = "auto", opts: SolverOptions | None = None) -> CompletionResult:
    """Dispatch: chordal closed form when possible, otherwise decomposition."""
    if method == "auto":
        method = "chordal" if is_chordal(p.graph) else "decomposed"
    if method == "chordal":
        return complete_chordal(p)
    if method == "two-clique":
        return complete_two_clique(p)
    if method == "general":
        return complete_general(p, opts)
    if method == "decomposed":
        return complete_decomposed(p, opts)
    raise ValueError(f"unknown method {method!r}")

