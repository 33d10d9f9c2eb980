"""Trigonometric function system, truncation spaces and scaled design blocks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .densities import Density
from .errors import AddselError, ConfigError

#: midpoint-rule nodes per covariate for 1-D population integrals
QUAD_NODES_1D = 2048
#: nodes per axis for pairwise (dependent-covariate) integrals
QUAD_NODES_2D = 512


def eval_basis(k: int, x: float) -> float:
    """Value of the k-th trigonometric basis function at x in [0,1].

    phi_1 = 1, phi_{2k} = sqrt(2) cos(2 pi k x), phi_{2k+1} = sqrt(2) sin(2 pi k x).
    """
    if k < 1:
        raise AddselError(f"basis index must be >= 1, got {k}")
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0.0) or np.any(x_arr > 1.0):
        raise AddselError("basis argument outside [0,1]")
    if k == 1:
        out = np.ones_like(x_arr)
    elif k % 2 == 0:
        out = np.sqrt(2.0) * np.cos(2.0 * np.pi * (k // 2) * x_arr)
    else:
        out = np.sqrt(2.0) * np.sin(2.0 * np.pi * (k // 2) * x_arr)
    return float(out) if np.isscalar(x) else out


def basis_matrix(ks, x):
    """Matrix of phi_k(x_i), shape (len(x), len(ks)). No domain checks."""
    x = np.asarray(x, dtype=float)
    ks = np.asarray(ks, dtype=int)
    out = np.empty((len(x), len(ks)))
    for c, k in enumerate(ks):
        if k == 1:
            out[:, c] = 1.0
        elif k % 2 == 0:
            out[:, c] = np.sqrt(2.0) * np.cos(2.0 * np.pi * (k // 2) * x)
        else:
            out[:, c] = np.sqrt(2.0) * np.sin(2.0 * np.pi * (k // 2) * x)
    return out


@dataclass(frozen=True)
class BasisSpec:
    """Per-covariate truncation levels and centering convention.

    ``m[j] >= 1``; the space V_j is spanned by phi_2..phi_{m_j} when centered
    (dimension m_j - 1) and by phi_1..phi_{m_j} otherwise (dimension m_j).
    """

    q: int
    m: tuple
    centered: tuple

    @staticmethod
    def create(q: int, m, centered=True) -> "BasisSpec":
        m_arr = np.broadcast_to(np.asarray(m, dtype=int), (q,))
        if np.any(m_arr < 1):
            raise ConfigError("all truncation levels m_j must be >= 1")
        cent = np.broadcast_to(np.asarray(centered, dtype=bool), (q,))
        return BasisSpec(q=q, m=tuple(int(v) for v in m_arr),
                         centered=tuple(bool(v) for v in cent))

    def dim(self, j: int) -> int:
        return self.m[j] - 1 if self.centered[j] else self.m[j]

    def basis_indices(self, j: int):
        start = 2 if self.centered[j] else 1
        return np.arange(start, self.m[j] + 1)

    def d_J(self, J) -> int:
        return int(sum(self.dim(j) for j in J))

    def d_l(self, l: int) -> int:
        """max over |J| = l of d_J (sum of the l largest block dimensions)."""
        dims = sorted((self.dim(j) for j in range(self.q)), reverse=True)
        return int(sum(dims[:l]))


def build_design_block(xcol, m: int, centered: bool, empirical_center: bool = False):
    """n x dim(V_j) block with entries phi_k(x_i)/sqrt(n).

    With ``empirical_center`` each column has its sample mean removed before
    scaling (used for non-uniform marginals, where phi_k is not population
    centered).
    """
    xcol = np.asarray(xcol, dtype=float)
    if xcol.ndim != 1 or len(xcol) == 0:
        raise AddselError("design column must be a nonempty 1-d array")
    if np.any(xcol < 0.0) or np.any(xcol > 1.0):
        raise AddselError("design entries must lie in [0,1]")
    if m < 1:
        raise AddselError(f"truncation level must be >= 1, got {m}")
    n = len(xcol)
    start = 2 if centered else 1
    ks = np.arange(start, m + 1)
    B = basis_matrix(ks, xcol)
    if centered and empirical_center:
        B -= B.mean(axis=0, keepdims=True)
    return B / np.sqrt(n)


@dataclass
class DesignBlocks:
    """Per-covariate scaled design matrices A_j, concatenated in ascending j."""

    blocks: list

    @property
    def n(self) -> int:
        return self.blocks[0].shape[0]

    @property
    def q(self) -> int:
        return len(self.blocks)

    def dims(self):
        return [b.shape[1] for b in self.blocks]

    def concat(self, J) -> np.ndarray:
        """Column concatenation A_J over sorted subset J."""
        J = sorted(J)
        if not J:
            return np.empty((self.n, 0))
        return np.concatenate([self.blocks[j] for j in J], axis=1)

    def gram(self, J) -> np.ndarray:
        A = self.concat(J)
        return A.T @ A


def build_design_blocks(X, spec: BasisSpec, empirical_center: bool = False) -> DesignBlocks:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != spec.q:
        raise AddselError(f"design matrix must be n x {spec.q}")
    blocks = [
        build_design_block(X[:, j], spec.m[j], spec.centered[j], empirical_center)
        for j in range(spec.q)
    ]
    return DesignBlocks(blocks)


def _quad_nodes(n):
    return (np.arange(n) + 0.5) / n


def _marginal_block_gram(spec, density, j):
    """dim V_j x dim V_j Gram of covariate j under its marginal density."""
    t = _quad_nodes(QUAD_NODES_1D)
    p = density.marginal_pdf(j, t)
    total = p.mean()
    if abs(total - 1.0) > 1e-6:
        raise ConfigError(
            f"marginal density of covariate {j} integrates to {total:.8f}, not 1"
        )
    B = basis_matrix(spec.basis_indices(j), t)
    return (B * p[:, None]).T @ B / QUAD_NODES_1D


def _marginal_means(spec, density, j):
    t = _quad_nodes(QUAD_NODES_1D)
    p = density.marginal_pdf(j, t)
    B = basis_matrix(spec.basis_indices(j), t)
    return (B * p[:, None]).mean(axis=0)


def _cross_block_gram(spec, density, j1, j2):
    if density.independent:
        return np.outer(_marginal_means(spec, density, j1),
                        _marginal_means(spec, density, j2))
    t = _quad_nodes(QUAD_NODES_2D)
    W = density.pair_pdf(j1, j2, t, t) / (QUAD_NODES_2D ** 2)
    B1 = basis_matrix(spec.basis_indices(j1), t)
    B2 = basis_matrix(spec.basis_indices(j2), t)
    return B1.T @ W @ B2


def population_gram(spec: BasisSpec, density: Density, J) -> np.ndarray:
    """Gram matrix of the concatenated basis of V_J under the covariate law.

    Blocks follow ascending covariate order, columns ascending basis index.
    """
    J = sorted(J)
    dims = [spec.dim(j) for j in J]
    d = sum(dims)
    G = np.zeros((d, d))
    offs = np.concatenate([[0], np.cumsum(dims)]).astype(int)
    for a, j1 in enumerate(J):
        G[offs[a]:offs[a + 1], offs[a]:offs[a + 1]] = _marginal_block_gram(spec, density, j1)
        for b in range(a + 1, len(J)):
            j2 = J[b]
            C = _cross_block_gram(spec, density, j1, j2)
            G[offs[a]:offs[a + 1], offs[b]:offs[b + 1]] = C
            G[offs[b]:offs[b + 1], offs[a]:offs[a + 1]] = C.T
    return 0.5 * (G + G.T)


def full_block_gram(spec: BasisSpec, density: Density):
    """Gram of V_{1..q} plus the per-covariate column slices into it."""
    G = population_gram(spec, density, range(spec.q))
    dims = [spec.dim(j) for j in range(spec.q)]
    offs = np.concatenate([[0], np.cumsum(dims)]).astype(int)
    slices = [slice(int(offs[j]), int(offs[j + 1])) for j in range(spec.q)]
    return G, slices
