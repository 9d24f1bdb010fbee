"""Variograms, signed Laplacians, Gram matrices and Cayley-Menger matrices.

A variogram is a hollow symmetric matrix of squared distances. A signed
Laplacian is a PSD matrix with zero row sums. For strictly conditionally
negative definite (CND) variograms the two are in bijection through the
inverse of the bordered Cayley-Menger matrix

    CM(G) = [[-G/2, 1], [1^T, 0]],   CM(G)^{-1} = [[Theta, p], [p^T, R^2]].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import helmert

from .config import get_tol
from .errors import KernelViolation, NotCND, NotStrictlyCND, RankDeficient, SingularBorder


def _square(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


def ones_complement(d: int) -> np.ndarray:
    """Orthonormal basis of the complement of 1 as the columns of a d x (d-1) matrix."""
    return helmert(d).T


def numerical_rank(m, tol: float | None = None) -> int:
    """Number of singular values above tol * largest singular value."""
    s = np.linalg.svd(np.atleast_2d(m), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > get_tol(tol) * s[0]))


def cm(gamma, scaled: bool = False) -> np.ndarray:
    """Bordered Cayley-Menger matrix [[-G/2, 1],[1^T, 0]], or [[G, 1],[1^T, 0]] when scaled."""
    g = np.asarray(gamma)
    d = g.shape[0]
    out = np.zeros((d + 1, d + 1), dtype=np.result_type(g.dtype, float))
    out[:d, :d] = g if scaled else -0.5 * g
    out[:d, d] = 1
    out[d, :d] = 1
    return out


def cm_block(gamma, rows, cols, scaled: bool = False) -> np.ndarray:
    """Cayley-Menger matrix of the (possibly rectangular) block G[rows, cols], 1-based labels."""
    g = np.asarray(gamma)
    r = [i - 1 for i in rows]
    c = [j - 1 for j in cols]
    blk = g[np.ix_(r, c)]
    out = np.zeros((len(r) + 1, len(c) + 1), dtype=np.result_type(g.dtype, float))
    out[:-1, :-1] = blk if scaled else -0.5 * blk
    out[:-1, -1] = 1
    out[-1, :-1] = 1
    return out


def check_hollow_symmetric(gamma, atol: float = 0.0) -> np.ndarray:
    g = _square(gamma)
    scale = max(np.max(np.abs(g), initial=0.0), 1.0)
    if np.max(np.abs(g - g.T), initial=0.0) > max(atol, 1e-12) * scale:
        raise ValueError("variogram must be symmetric")
    if np.max(np.abs(np.diag(g)), initial=0.0) > max(atol, 1e-12) * scale:
        raise ValueError("variogram must have zero diagonal")
    return 0.5 * (g + g.T)


# ---------------------------------------------------------------- maps

def sigma_of_gamma(gamma) -> np.ndarray:
    """Gram matrix P(-G/2)P with P the centering projector; re-symmetrized and re-projected."""
    g = _square(gamma)
    d = g.shape[0]
    if d == 0:
        return np.zeros((0, 0))
    p = np.eye(d) - np.full((d, d), 1.0 / d)
    s = p @ (-0.5 * g) @ p
    s = 0.5 * (s + s.T)
    return p @ s @ p


def gamma_of_sigma(sigma, tol: float | None = None) -> np.ndarray:
    """Variogram d 1^T + 1 d^T - 2 Sigma from a Gram matrix with 1 in its kernel."""
    s = _square(sigma)
    tol = get_tol(tol)
    scale = max(np.max(np.abs(s), initial=0.0), np.finfo(float).tiny)
    if np.max(np.abs(s.sum(axis=1)), initial=0.0) > tol * scale * max(s.shape[0], 1):
        raise KernelViolation("Sigma 1 is not zero within tolerance")
    dg = np.diag(s)
    g = dg[:, None] + dg[None, :] - 2 * s
    g = 0.5 * (g + g.T)
    np.fill_diagonal(g, 0.0)
    return g


def covariance_mapping(gamma, k: int) -> np.ndarray:
    """Sigma^(k)_ij = (G_ik + G_jk - G_ij)/2 for i, j != k (k is 1-based)."""
    g = _square(gamma)
    d = g.shape[0]
    if not 1 <= k <= d:
        raise ValueError(f"k must lie in 1..{d}")
    idx = [i for i in range(d) if i != k - 1]
    col = g[idx, k - 1]
    return 0.5 * (col[:, None] + col[None, :] - g[np.ix_(idx, idx)])


@dataclass(frozen=True)
class Certificate:
    """Definiteness verdict of a variogram with the evidence behind it."""

    status: str  # "strict", "weak" or "none"
    margin: float  # smallest eigenvalue of sigma on 1-perp divided by the largest absolute one
    tolerance: float
    eigenvalues: np.ndarray

    def __bool__(self):
        return self.status == "strict"

    def to_json(self) -> dict:
        return {"status": self.status, "margin": float(self.margin), "tolerance": self.tolerance,
                "eigenvalues": [float(x) for x in self.eigenvalues]}


def is_strictly_cnd(gamma, tol: float | None = None) -> Certificate:
    """Classify G by the eigenvalues of sigma(G) restricted to the complement of 1.

    strict: all exceed tol * max; weak: none below -tol * max; none otherwise.
    The certificate is truthy only for strict.
    """
    tol = get_tol(tol)
    g = _square(gamma)
    d = g.shape[0]
    if d <= 1:
        return Certificate("strict", 1.0, tol, np.zeros(0))
    u = ones_complement(d)
    red = u.T @ (-0.5 * g) @ u
    ev = np.linalg.eigvalsh(0.5 * (red + red.T))
    top = np.max(np.abs(ev))
    if top == 0:
        return Certificate("weak", 0.0, tol, ev)
    margin = ev[0] / top
    if margin > tol:
        status = "strict"
    elif margin >= -tol:
        status = "weak"
    else:
        status = "none"
    return Certificate(status, float(margin), tol, ev)


def dimensionality(gamma, tol: float | None = None) -> int:
    """Embedding dimension of a CND variogram, i.e. the numerical rank of sigma(G)."""
    cert = is_strictly_cnd(gamma, tol)
    if cert.status == "none":
        raise NotCND(f"variogram is not CND (margin {cert.margin:.3g})")
    if cert.eigenvalues.size == 0:
        return 0
    top = np.max(np.abs(cert.eigenvalues))
    if top == 0:
        return 0
    return int(np.sum(cert.eigenvalues > cert.tolerance * top))


@dataclass(frozen=True)
class GramFactor:
    """Gram matrix with a point realization: sigma = B^T B, the columns of B are points."""

    sigma: np.ndarray
    B: np.ndarray
    m: int
    diag: np.ndarray


def gram_factor(gamma, tol: float | None = None) -> GramFactor:
    """Point realization of G from the eigenvectors of sigma(G).

    Coordinates are ordered by decreasing eigenvalue and every eigenvector is
    signed so that its first nonzero entry is positive.
    """
    tol = get_tol(tol)
    s = sigma_of_gamma(gamma)
    w, v = np.linalg.eigh(s)
    order = np.argsort(w)[::-1]
    w, v = w[order], v[:, order]
    top = np.max(np.abs(w), initial=0.0)
    keep = w > tol * top if top > 0 else np.zeros(w.shape, dtype=bool)
    w, v = w[keep], v[:, keep]
    for c in range(v.shape[1]):
        nz = np.flatnonzero(np.abs(v[:, c]) > 1e-12)
        if nz.size and v[nz[0], c] < 0:
            v[:, c] = -v[:, c]
    b = np.sqrt(w)[:, None] * v.T
    return GramFactor(sigma=s, B=b, m=int(keep.sum()), diag=np.diag(s).copy())


# ---------------------------------------------------------------- Laplacians

def laplacian_pinv(theta) -> np.ndarray:
    """Moore-Penrose inverse of a rank-(d-1) signed Laplacian, computed on 1-perp."""
    t = _square(theta)
    d = t.shape[0]
    u = ones_complement(d)
    red = u.T @ t @ u
    w, v = np.linalg.eigh(0.5 * (red + red.T))
    if w[0] <= 0:
        raise RankDeficient("Laplacian is singular on the complement of 1")
    inv = (v / w) @ v.T
    s = u @ inv @ u.T
    return 0.5 * (s + s.T)


def pseudo_determinant(theta, tol: float | None = None) -> float:
    """Product of the d-1 eigenvalues of a Laplacian on the complement of 1."""
    return float(np.exp(log_pseudo_determinant(theta, tol)))


def log_pseudo_determinant(theta, tol: float | None = None) -> float:
    t = _square(theta)
    d = t.shape[0]
    if d == 1:
        return 0.0
    u = ones_complement(d)
    red = u.T @ t @ u
    w = np.linalg.eigvalsh(0.5 * (red + red.T))
    top = np.max(np.abs(w), initial=0.0)
    if top == 0 or w[0] <= get_tol(tol) * top:
        raise RankDeficient("Laplacian has rank below d-1")
    return float(np.sum(np.log(w)))


def edge_laplacian(d: int, i: int, j: int) -> np.ndarray:
    """Elementary Laplacian (e_i - e_j)(e_i - e_j)^T, 1-based."""
    out = np.zeros((d, d))
    out[i - 1, i - 1] = out[j - 1, j - 1] = 1.0
    out[i - 1, j - 1] = out[j - 1, i - 1] = -1.0
    return out


def laplacian_from_weights(d: int, weights: dict) -> np.ndarray:
    """Laplacian with off-diagonal entries -q_e for edges e = (i, j)."""
    out = np.zeros((d, d))
    for (i, j), q in weights.items():
        out[i - 1, j - 1] -= q
        out[j - 1, i - 1] -= q
        out[i - 1, i - 1] += q
        out[j - 1, j - 1] += q
    return out


def edge_weights(theta, edges) -> dict:
    t = np.asarray(theta)
    return {(i, j): float(-t[i - 1, j - 1]) for i, j in edges}


def theta_of_gamma(gamma, tol: float | None = None) -> np.ndarray:
    """Signed Laplacian Theta read off the top-left block of CM(G)^{-1}."""
    tol = get_tol(tol)
    g = check_hollow_symmetric(gamma)
    cert = is_strictly_cnd(g, tol)
    if not cert:
        raise NotStrictlyCND(f"variogram is not strictly CND (margin {cert.margin:.3g})")
    c = cm(g)
    if np.linalg.cond(c) > 1.0 / (tol * np.finfo(float).eps ** 0.5):
        raise SingularBorder("Cayley-Menger matrix is numerically singular")
    d = g.shape[0]
    inv = np.linalg.inv(c)
    t = inv[:d, :d]
    return 0.5 * (t + t.T)


def gamma_of_theta(theta) -> np.ndarray:
    """Variogram gamma(Theta^+)."""
    return gamma_of_sigma(laplacian_pinv(theta), tol=1e-6)


@dataclass(frozen=True)
class BorderedLaplacian:
    theta: np.ndarray
    p: np.ndarray
    r2: float
    residual: float

    def matrix(self) -> np.ndarray:
        d = self.theta.shape[0]
        out = np.empty((d + 1, d + 1))
        out[:d, :d] = self.theta
        out[:d, d] = out[d, :d] = self.p
        out[d, d] = self.r2
        return out


def fiedler_bapat_check(gamma, tol: float | None = None) -> BorderedLaplacian:
    """Assemble [[Theta, p],[p^T, R^2]] from Sigma = Theta^+ and measure how far it is from CM(G)^{-1}.

    p = Theta d_S / 2 + 1/d and R^2 = d_S^T Theta d_S / 4 + 1^T d_S / d with d_S = diag(Sigma).
    """
    tol = get_tol(tol)
    g = check_hollow_symmetric(gamma)
    if not is_strictly_cnd(g, tol):
        raise NotStrictlyCND("variogram is not strictly CND")
    d = g.shape[0]
    s = sigma_of_gamma(g)
    u = ones_complement(d)
    red = u.T @ s @ u
    w, v = np.linalg.eigh(0.5 * (red + red.T))
    theta = u @ ((v / w) @ v.T) @ u.T
    theta = 0.5 * (theta + theta.T)
    ds = np.diag(s)
    p = 0.5 * theta @ ds + 1.0 / d
    r2 = 0.25 * ds @ theta @ ds + ds.sum() / d
    out = BorderedLaplacian(theta, p, float(r2), 0.0)
    res = np.max(np.abs(out.matrix() @ cm(g) - np.eye(d + 1)))
    return BorderedLaplacian(theta, p, float(r2), float(res))


# ---------------------------------------------------------------- generators

def random_laplacian(g, rng, low: float = 0.5, high: float = 2.0) -> np.ndarray:
    """Laplacian with independent uniform positive weights on the edges of g."""
    return laplacian_from_weights(g.d, {e: rng.uniform(low, high) for e in g.edge_list()})


def model_point(g, rng, low: float = 0.5, high: float = 2.0) -> tuple[np.ndarray, np.ndarray]:
    """A variogram in the graphical model of g together with its Laplacian."""
    theta = random_laplacian(g, rng, low, high)
    return gamma_of_theta(theta), theta


def random_configuration_variogram(d: int, rng, dim: int | None = None) -> np.ndarray:
    """Squared distances of d standard normal points in R^dim (default dim = d-1)."""
    dim = d - 1 if dim is None else dim
    x = rng.standard_normal((d, dim))
    sq = np.sum(x * x, axis=1)
    g = sq[:, None] + sq[None, :] - 2 * x @ x.T
    g = 0.5 * (g + g.T)
    np.fill_diagonal(g, 0.0)
    return np.maximum(g, 0.0)


def random_gram(d: int, r: int, rng) -> np.ndarray:
    """Generic PSD Gram matrix of rank r with 1 in its kernel."""
    if not 0 <= r <= d - 1:
        raise ValueError(f"rank must lie in 0..{d - 1}")
    b = rng.standard_normal((r, d - 1)) @ ones_complement(d).T
    return b.T @ b


def kernel_witness(sigma, tol: float | None = None) -> np.ndarray | None:
    """A unit x with Sigma x = 0 and x orthogonal to 1, or None if there is none.

    For such x one has x^T gamma(Sigma) x = -2 x^T Sigma x = 0, so gamma(Sigma)
    is not strictly CND.
    """
    s = _square(sigma)
    u = ones_complement(s.shape[0])
    w, v = np.linalg.eigh(u.T @ s @ u)
    top = max(np.max(np.abs(w), initial=0.0), np.finfo(float).tiny)
    if w[0] > get_tol(tol) * top:
        return None
    return u @ v[:, 0]
