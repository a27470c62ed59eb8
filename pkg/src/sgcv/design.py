"""Polynomial constraint matrices and nested orthonormal bases for SG windows.

A window of ``N`` samples at abscissas ``nodes`` is smoothed by projecting onto
polynomials of degree ``<= p``. Every quantity the order selector needs (smoother
outputs, residuals, leverages) depends only on that column space, so the
production path never touches the raw monomial matrix: nodes are mapped
affinely onto ``[-1, 1]``, sampled Chebyshev polynomials are orthonormalised by
unpivoted Householder QR, and the resulting columns span the nested spaces
``span{1}, span{1, t}, ...`` in degree order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial import chebyshev

MAX_WINDOW = 512


@dataclass(frozen=True, eq=False)
class DesignSpec:
    """Window length, largest candidate order and sample abscissas.

    ``nodes`` defaults to ``1..N``. Non-uniform nodes are accepted; the
    leave-one-out identity does not rely on uniform spacing, but that use is
    experimental.
    """

    window_len: int
    max_order: int
    nodes: np.ndarray | None = field(default=None)

    def __post_init__(self):
        n = int(self.window_len)
        p = int(self.max_order)
        if n != self.window_len or n < 3:
            raise ValueError(f"window_len must be an integer >= 3, got {self.window_len!r}")
        if n > MAX_WINDOW:
            raise ValueError(f"window_len must be <= {MAX_WINDOW}, got {n}")
        if p != self.max_order or p < 0 or p > n - 2:
            raise ValueError(f"max_order must lie in [0, window_len - 2] = [0, {n - 2}], got {self.max_order!r}")
        if self.nodes is None:
            nodes = np.arange(1, n + 1, dtype=float)
        else:
            nodes = np.array(self.nodes, dtype=float).reshape(-1)
            if nodes.shape != (n,):
                raise ValueError(f"expected {n} nodes, got {nodes.size}")
            if not np.all(np.isfinite(nodes)) or np.any(np.diff(nodes) <= 0):
                raise ValueError("nodes must be finite and strictly increasing")
        nodes.setflags(write=False)
        object.__setattr__(self, "window_len", n)
        object.__setattr__(self, "max_order", p)
        object.__setattr__(self, "nodes", nodes)

    @property
    def scaled_nodes(self) -> np.ndarray:
        """Nodes mapped affinely onto [-1, 1]."""
        lo, hi = self.nodes[0], self.nodes[-1]
        return 2.0 * (self.nodes - lo) / (hi - lo) - 1.0

    def with_max_order(self, max_order: int) -> "DesignSpec":
        return DesignSpec(self.window_len, max_order, self.nodes)

    def _key(self):
        return (self.window_len, self.max_order, self.nodes.tobytes())


def _check_order(spec: DesignSpec, order: int) -> int:
    if int(order) != order or not 0 <= order <= spec.max_order:
        raise ValueError(f"order must lie in [0, {spec.max_order}], got {order!r}")
    return int(order)


def build_design_matrix(spec: DesignSpec, order: int) -> np.ndarray:
    """Monomial constraint matrix ``A`` with ``A[r, n] = nodes[n] ** r``.

    This is the literal textbook matrix (rows 1, t, t^2, ...). It is badly
    conditioned for long windows and is only used for display and in tests.
    """
    order = _check_order(spec, order)
    return np.vander(spec.nodes, order + 1, increasing=True).T


def chebyshev_design(spec: DesignSpec, order: int) -> np.ndarray:
    """Well-conditioned ``(order+1) x N`` matrix with the same row space as
    :func:`build_design_matrix`: Chebyshev polynomials on the scaled nodes."""
    if int(order) != order or not 0 <= order <= spec.window_len - 1:
        raise ValueError(f"order must lie in [0, {spec.window_len - 1}], got {order!r}")
    return chebyshev.chebvander(spec.scaled_nodes, int(order)).T


@dataclass(frozen=True, eq=False)
class NestedBasis:
    """Orthonormal basis of the nested polynomial subspaces of one window.

    Attributes
    ----------
    spec : DesignSpec
    q_columns : ndarray, shape (N, P_max + 1)
        ``q_columns[:, :p+1]`` spans polynomials of degree ``<= p``.
    leverage_by_order : ndarray, shape (N, P_max + 1)
        Column ``p`` is the diagonal of the projector onto degree ``<= p``.
    complement_by_order : ndarray, shape (N, P_max + 1)
        ``1 - leverage_by_order``, accumulated from the orthogonal complement
        so that values near zero keep their relative accuracy.
    q_full : ndarray, shape (N, N)
        ``q_columns`` completed to an orthogonal matrix; the trailing columns
        span the complement of the largest candidate space.
    """

    spec: DesignSpec
    q_columns: np.ndarray
    leverage_by_order: np.ndarray
    complement_by_order: np.ndarray
    q_full: np.ndarray

    @property
    def window_len(self) -> int:
        return self.spec.window_len

    @property
    def max_order(self) -> int:
        return self.spec.max_order

    def projector(self, order: int) -> np.ndarray:
        order = _check_order(self.spec, order)
        q = self.q_columns[:, : order + 1]
        proj = q @ q.T
        return 0.5 * (proj + proj.T)


@lru_cache(maxsize=64)
def _orthogonal_polynomials(n: int, nodes_bytes: bytes) -> np.ndarray:
    nodes = np.frombuffer(nodes_bytes, dtype=float)
    scaled = 2.0 * (nodes - nodes[0]) / (nodes[-1] - nodes[0]) - 1.0
    vander = chebyshev.chebvander(scaled, n - 1)
    # LAPACK geqrf: Householder, no pivoting, so column order (= degree) is kept
    q, r = np.linalg.qr(vander, mode="complete")
    signs = np.where(np.diag(r) < 0, -1.0, 1.0)
    q = q * signs
    q.setflags(write=False)
    return q


def build_nested_basis(spec: DesignSpec) -> NestedBasis:
    """Householder QR (unpivoted) of the transposed design matrix.

    Bases are cached per ``(N, nodes)``; the returned arrays are read-only.
    """
    n, p = spec.window_len, spec.max_order
    q_full = _orthogonal_polynomials(n, spec.nodes.tobytes())
    sq = q_full**2
    leverage = np.cumsum(sq[:, : p + 1], axis=1)
    # reverse cumulative sums over the complement avoid 1 - d cancellation
    tail = np.cumsum(sq[:, ::-1], axis=1)[:, ::-1]
    complement = tail[:, 1 : p + 2]
    q_cols = q_full[:, : p + 1]
    for arr in (leverage, complement):
        arr.setflags(write=False)
    return NestedBasis(spec, q_cols, leverage, complement, q_full)


def projection_matrix(spec: DesignSpec, order: int) -> np.ndarray:
    """Orthogonal projector onto polynomials of degree ``<= order`` (the hat
    matrix ``A^T (A A^T)^{-1} A``), built from the nested basis."""
    order = _check_order(spec, order)
    return build_nested_basis(spec).projector(order)
