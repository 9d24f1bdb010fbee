"""Huesler-Reiss multivariate Pareto distributions.

Densities, conditional Gaussian laws, exact sampling, thresholding of raw
data and the empirical variogram.

Random streams. Every draw comes from ``make_rng(seed, stream)``:

* ``sample_halfspace(..., k, ...)`` uses stream ``(1, k)``;
* ``sample_pareto`` draws fixed-size blocks, block ``b`` from stream ``(2, b)``.

Because block contents depend only on ``(seed, b)`` and accepted rows are
concatenated in block order, the output does not depend on ``jobs``.

Exactness of ``sample_pareto``. The halfspace law Y^k has density
lambda(y) 1{y_k >= 0} because the exponent measure of {y_k >= 0} is one.
Choosing k uniformly gives the mixture density lambda(y) m(y) / d with
m(y) = #{j : y_j >= 0}. Accepting with probability 1 / m(y) leaves a density
proportional to lambda on L = {y : y not <= 0}. The acceptance rate is
Lambda(L) / d, which lies in [1/d, 1].
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

from .config import get_tol, make_rng
from .errors import (EmptyExceedanceSet, InsufficientHalfspaceData, NotStrictlyCND,
                     SingularConditioning)
from .varalg import check_hollow_symmetric, cm, covariance_mapping, is_strictly_cnd

BLOCK = 4096
HALFSPACE_STREAM = 1
PARETO_STREAM = 2


@dataclass
class ParetoSample:
    data: np.ndarray  # n x d exceedances, every row has a nonnegative coordinate
    acceptance: float | None = None
    seed: int | None = None
    gamma_ref: str | None = None
    halfspaces: list[np.ndarray] = field(init=False)

    def __post_init__(self):
        self.data = np.atleast_2d(np.asarray(self.data, dtype=float))
        if self.data.size and np.any(np.max(self.data, axis=1) < 0):
            raise ValueError("every row of a Pareto sample needs a nonnegative coordinate")
        self.halfspaces = [np.flatnonzero(self.data[:, k] >= 0) for k in range(self.d)]

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]

    def metadata(self) -> dict:
        return {"n": self.n, "d": self.d, "seed": self.seed, "gamma_ref": self.gamma_ref}


@dataclass(frozen=True)
class ConditionalGaussian:
    A: tuple[int, ...]
    C: tuple[int, ...]
    cov: np.ndarray
    mean: np.ndarray


def _strict(gamma, tol=None) -> np.ndarray:
    g = check_hollow_symmetric(gamma)
    if not is_strictly_cnd(g, tol):
        raise NotStrictlyCND("Huesler-Reiss parameters must be strictly CND")
    return g


def log_exponent_density(gamma, y, tol: float | None = None):
    """log lambda(y) = log c1 - (y, 1) CM(G)^{-1} (y, 1)^T / 2.

    c1 = (-det CM(2 pi G))^{-1/2}. The determinant is taken from the unscaled
    bordered matrix [[G, 1], [1^T, 0]], whose determinant is (-2)^(d-1) det CM(G).
    Accepts a single point or an n x d array of points.
    """
    g = _strict(gamma, tol)
    d = g.shape[0]
    _, logdet = np.linalg.slogdet(cm(g, scaled=True))
    # -det CM(2 pi G) = (2 pi)^(d-1) |det CM(G)| = pi^(d-1) |det [[G, 1], [1^T, 0]]|
    log_c1 = -0.5 * ((d - 1) * np.log(np.pi) + logdet)
    y = np.asarray(y, dtype=float)
    pts = np.atleast_2d(y)
    ext = np.hstack([pts, np.ones((pts.shape[0], 1))])
    sol = np.linalg.solve(cm(g), ext.T)
    quad = np.einsum("ij,ji->i", ext, sol)
    out = log_c1 - 0.5 * quad
    return float(out[0]) if y.ndim == 1 else out


def _labels(vs, d: int) -> tuple[int, ...]:
    out = tuple(sorted(int(v) for v in vs))
    if any(not 1 <= v <= d for v in out):
        raise ValueError(f"vertices must lie in 1..{d}")
    return out


def conditional_params(gamma, A, C, y_C, tol: float | None = None) -> ConditionalGaussian:
    """Gaussian law of Y_A given Y_C = y_C under the exponent measure density.

    With M = CM(G_CC)^{-1} and H = (-G_AC/2, 1):
    cov = -G_AA/2 - H M H^T and mean = H M (y_C, 1).
    """
    g = _strict(gamma, tol)
    d = g.shape[0]
    a, c = _labels(A, d), _labels(C, d)
    if not a or not c:
        raise ValueError("A and C must be nonempty")
    if set(a) & set(c):
        raise ValueError("A and C must be disjoint")
    ai = [v - 1 for v in a]
    ci = [v - 1 for v in c]
    border = cm(g[np.ix_(ci, ci)])
    if np.linalg.cond(border) > 1.0 / get_tol(tol) ** 2:
        raise SingularConditioning("CM(G_CC) is numerically singular")
    h = np.hstack([-0.5 * g[np.ix_(ai, ci)], np.ones((len(ai), 1))])
    hm = np.linalg.solve(border, h.T).T
    cov = -0.5 * g[np.ix_(ai, ai)] - hm @ h.T
    cov = 0.5 * (cov + cov.T)
    mean = hm @ np.append(np.asarray(y_C, dtype=float), 1.0)
    return ConditionalGaussian(a, c, cov, mean)


def _sqrt_psd(s: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(s)
    return v * np.sqrt(np.clip(w, 0.0, None))


def _halfspace_draw(g: np.ndarray, k: int, e: np.ndarray, z: np.ndarray,
                    root: np.ndarray | None = None) -> np.ndarray:
    """Rows of Y^k from exponentials e and standard normals z (k is 0-based)."""
    d = g.shape[0]
    rest = [i for i in range(d) if i != k]
    if root is None:
        root = _sqrt_psd(covariance_mapping(g, k + 1))
    out = np.empty((e.size, d))
    out[:, k] = e
    out[:, rest] = e[:, None] - 0.5 * g[rest, k][None, :] + z @ root.T
    return out


def sample_halfspace(gamma, k: int, n: int, seed: int, tol: float | None = None) -> ParetoSample:
    """n exact draws of Y^k: Y_k standard exponential, the rest Gaussian given Y_k.

    Y_rest | Y_k = y_k has mean y_k 1 - G_rest,k / 2 and covariance Sigma^(k).
    """
    g = _strict(gamma, tol)
    d = g.shape[0]
    if not 1 <= k <= d:
        raise ValueError(f"k must lie in 1..{d}")
    rng = make_rng(seed, (HALFSPACE_STREAM, k))
    e = rng.standard_exponential(n)
    z = rng.standard_normal((n, d - 1))
    return ParetoSample(_halfspace_draw(g, k - 1, e, z), seed=seed)


def _pareto_block(g: np.ndarray, roots: list[np.ndarray], seed: int, b: int) -> np.ndarray:
    d = g.shape[0]
    rng = make_rng(seed, (PARETO_STREAM, b))
    ks = rng.integers(d, size=BLOCK)
    e = rng.standard_exponential(BLOCK)
    z = rng.standard_normal((BLOCK, d - 1))
    u = rng.random(BLOCK)
    rows = np.empty((BLOCK, d))
    for k in range(d):
        sel = ks == k
        rows[sel] = _halfspace_draw(g, k, e[sel], z[sel], roots[k])
    m = np.sum(rows >= 0, axis=1)
    return rows[u * m < 1.0]


def sample_pareto(gamma, n: int, seed: int, jobs: int = 1,
                  tol: float | None = None) -> ParetoSample:
    """n exact draws from the Huesler-Reiss Pareto law by halfspace mixture and rejection."""
    g = _strict(gamma, tol)
    d = g.shape[0]
    roots = [_sqrt_psd(covariance_mapping(g, k + 1)) for k in range(d)]
    accepted: list[np.ndarray] = []
    count = 0
    b = 0
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        while count < n:
            # enough blocks for the remaining rows at the worst-case rate 1/d
            need = max(1, jobs, -(-(n - count) * d // BLOCK))
            blocks = list(pool.map(lambda i: _pareto_block(g, roots, seed, i), range(b, b + need)))
            b += need
            for blk in blocks:
                accepted.append(blk)
                count += blk.shape[0]
    data = np.vstack(accepted)[:n] if accepted else np.zeros((0, d))
    total = b * BLOCK
    rate = sum(x.shape[0] for x in accepted) / total if total else float("nan")
    return ParetoSample(data, acceptance=rate, seed=seed)


def empirical_variogram(s: ParetoSample, ddof: int = 1, weighted: bool = False) -> np.ndarray:
    """Average over halfspaces k of the sample variances of y_i - y_j on J_k.

    The plain average uses weight 1/d for every halfspace; ``weighted`` uses
    |J_k| / sum |J_k| instead. ``ddof`` is the variance denominator offset.
    """
    d = s.d
    acc = np.zeros((d, d))
    sizes = [idx.size for idx in s.halfspaces]
    for k, idx in enumerate(s.halfspaces):
        if idx.size < 2:
            raise InsufficientHalfspaceData(k + 1, idx.size)
    total = sum(sizes)
    for k, idx in enumerate(s.halfspaces):
        cov = np.cov(s.data[idx], rowvar=False, ddof=ddof)
        dg = np.diag(cov)
        v = dg[:, None] + dg[None, :] - 2 * cov
        w = sizes[k] / total if weighted else 1.0 / d
        acc += w * v
    acc = 0.5 * (acc + acc.T)
    np.fill_diagonal(acc, 0.0)
    return np.maximum(acc, 0.0)


def threshold_exceedances(raw, q: float) -> ParetoSample:
    """Rows x - u 1 with max x > u, u = -log(1 - q), for data on exponential margins."""
    if not 0 <= q < 1:
        raise ValueError("q must lie in [0, 1)")
    x = np.atleast_2d(np.asarray(raw, dtype=float))
    u = -np.log1p(-q)
    keep = np.max(x, axis=1) > u
    if not np.any(keep):
        raise EmptyExceedanceSet(f"no row exceeds u = {u}")
    return ParetoSample(x[keep] - u)


def rank_transform(raw) -> np.ndarray:
    """Columnwise x -> -log(1 - rank / (n + 1)), giving standard exponential margins."""
    x = np.atleast_2d(np.asarray(raw, dtype=float))
    r = rankdata(x, axis=0)
    return -np.log1p(-r / (x.shape[0] + 1))
