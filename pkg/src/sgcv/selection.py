"""Polynomial order selection for SG windows.

The leave-one-out prediction error of sample ``k`` equals the smoothing
residual scaled by ``gamma_k = 1 / (1 - [P]_kk)``, so the total squared
prediction error of every candidate order follows from one pass over the
nested orthonormal basis. :func:`conventional_cv` refits every fold from
scratch and exists as an oracle and benchmark baseline.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .design import DesignSpec, NestedBasis, build_nested_basis, chebyshev_design
from .filters import LEVERAGE_FLOOR, DegenerateLeverageError, _min_norm_predictor

# Scores below (ROUNDOFF_RTOL * ||x||)^2 * sum(gamma) are rounding noise and
# count as exact zeros when ranking orders.
ROUNDOFF_RTOL = 1e-13
LOG_FLOOR = 1e-300


@dataclass(frozen=True, eq=False)
class SelectionResult:
    tpe_by_order: np.ndarray
    residual_norm_by_order: np.ndarray
    best_order: int
    gamma_by_order: np.ndarray


@dataclass(frozen=True, eq=False)
class BaselineScores:
    bic_n_by_order: np.ndarray
    bic_snr_by_order: np.ndarray
    best_order_bic_n: int
    best_order_bic_snr: int


def _as_columns(x, n: int) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    cols = arr[:, None] if single else arr
    if cols.ndim != 2 or cols.shape[0] != n:
        raise ValueError(f"expected windows of length {n}, got shape {arr.shape}")
    return cols, single


def _roundoff_floor(x_norm_sq: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    # gamma: (N, P+1), x_norm_sq: (M,) -> (P+1, M)
    return ROUNDOFF_RTOL**2 * gamma.sum(axis=0)[:, None] * x_norm_sq[None, :]


def smallest_argmin(scores: np.ndarray, floor: np.ndarray | float = 0.0) -> np.ndarray:
    """First index of the minimum along axis 0, after zeroing entries that sit
    at or below ``floor`` (so exact-fit orders tie and the lowest one wins)."""
    s = np.where(scores <= floor, 0.0, scores)
    return np.argmin(s, axis=0)


def cv_scores(basis: NestedBasis, windows: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Order-recursive leave-one-out scores for a batch of windows.

    ``windows`` has shape ``(N, M)``. Returns ``(tpe, residual, smoothed)``
    with shapes ``(P+1, M)``, ``(P+1, M)`` and ``(N, P+1, M)``.

    Per order ``p`` the recursion adds ``q_p q_p^T x`` to the projection; the
    residual and the complementary leverage are accumulated from the trailing
    basis columns instead of being formed as ``x - xhat`` and ``1 - d``, which
    is algebraically identical and keeps small values accurate.
    """
    p_max = basis.max_order
    coef = basis.q_full.T @ windows                       # (N, M)
    contrib = basis.q_full[:, :, None] * coef[None, :, :]  # (N, N, M)
    smoothed = np.cumsum(contrib[:, : p_max + 1], axis=1)
    tail = np.cumsum(contrib[:, ::-1], axis=1)[:, ::-1]
    eps_s = tail[:, 1 : p_max + 2]                        # (N, P+1, M)
    complement = basis.complement_by_order
    if not np.all(complement > LEVERAGE_FLOOR):
        raise DegenerateLeverageError("complementary leverage below the invertible range")
    eps_p = eps_s / complement[:, :, None]
    tpe = np.einsum("npm,npm->pm", eps_p, eps_p)
    residual = np.einsum("npm,npm->pm", eps_s, eps_s)
    return tpe, residual, smoothed


def _check_window(x, basis: NestedBasis) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.shape != (basis.window_len,):
        raise ValueError(f"expected a window of length {basis.window_len}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("window contains non-finite values")
    return arr


def select_order_cv(x, basis: NestedBasis) -> SelectionResult:
    """Leave-one-out order selection from a precomputed nested basis."""
    x = _check_window(x, basis)
    tpe, residual, _ = cv_scores(basis, x[:, None])
    gamma = 1.0 / basis.complement_by_order
    floor = _roundoff_floor(np.array([x @ x]), gamma)
    best = int(smallest_argmin(tpe, floor)[0])
    return SelectionResult(tpe[:, 0], residual[:, 0], best, gamma)


def select_order(x, max_order: int, nodes=None) -> SelectionResult:
    """Convenience wrapper that builds (or reuses the cached) basis."""
    x = np.asarray(x, dtype=float)
    spec = DesignSpec(x.size, max_order, nodes)
    return select_order_cv(x, build_nested_basis(spec))


def conventional_cv(x, spec: DesignSpec) -> SelectionResult:
    """Brute-force leave-one-out CV: every fold of every order is refit.

    For order ``p`` and fold ``k`` the constraint system with column ``k``
    deleted is solved for its minimum-norm predictor, which then predicts
    ``x_k``. Smoothing residuals and leverages come from a separate
    minimum-norm solve for the full-window smoothers. Roughly ``O(N^5)``.
    """
    x = np.asarray(x, dtype=float)
    n, p_max = spec.window_len, spec.max_order
    if x.shape != (n,):
        raise ValueError(f"expected a window of length {n}, got shape {x.shape}")
    tpe = np.empty(p_max + 1)
    residual = np.empty(p_max + 1)
    gamma = np.empty((n, p_max + 1))
    for p in range(p_max + 1):
        a = chebyshev_design(spec, p)
        smoothers = np.linalg.lstsq(a, a, rcond=None)[0]  # column k = h^s_k
        eps_s = x - smoothers.T @ x
        residual[p] = eps_s @ eps_s
        gamma[:, p] = 1.0 / (1.0 - np.diag(smoothers))
        eps_p = np.empty(n)
        for k in range(n):
            h = _min_norm_predictor(a, k)
            eps_p[k] = x[k] - h @ x
        tpe[p] = eps_p @ eps_p
    floor = _roundoff_floor(np.array([x @ x]), gamma)
    best = int(smallest_argmin(tpe[:, None], floor)[0])
    return SelectionResult(tpe, residual, best, gamma)


def bic_scores(residual_norm, n: int, x_norm_sq=0.0) -> tuple[np.ndarray, np.ndarray]:
    """BIC_N and BIC_SNR for residual norms ``||eps^s||^2`` indexed by order.

    ``residual_norm`` may be ``(P+1,)`` or ``(P+1, M)``. Residuals are floored
    at ``N * 1e-300`` and at the rounding level implied by ``x_norm_sq``.
    """
    res = np.asarray(residual_norm, dtype=float)
    floor = np.maximum(n * LOG_FLOOR, n * ROUNDOFF_RTOL**2 * np.asarray(x_norm_sq, dtype=float))
    log_mse = np.log(np.maximum(res, floor) / n)
    order = np.arange(res.shape[0], dtype=float).reshape((-1,) + (1,) * (res.ndim - 1))
    bic_n = (order + 1) ** 2 * np.log(n) + n * log_mse
    bic_snr = n * log_mse + np.maximum(0.0, -(order + 2) * log_mse)
    return bic_n, bic_snr


def score_bic(x, basis: NestedBasis) -> BaselineScores:
    x = _check_window(x, basis)
    _, residual, _ = cv_scores(basis, x[:, None])
    bic_n, bic_snr = bic_scores(residual[:, 0], basis.window_len, x @ x)
    return BaselineScores(bic_n, bic_snr, int(np.argmin(bic_n)), int(np.argmin(bic_snr)))


def smooth_with_selected_order(x, basis: NestedBasis, k: int) -> tuple[float, int]:
    """Smoothed value of sample ``k`` (1-based) at the CV-selected order."""
    x = _check_window(x, basis)
    if int(k) != k or not 1 <= k <= basis.window_len:
        raise ValueError(f"target index must lie in [1, {basis.window_len}], got {k!r}")
    result = select_order_cv(x, basis)
    q = basis.q_columns[:, : result.best_order + 1]
    return float(q[k - 1] @ (q.T @ x)), result.best_order


def smooth_series(y, window_len: int, max_order: int, target_index: int | None = None, nodes=None):
    """Slide a window over ``y`` and smooth each target sample at its own
    CV-selected order.

    The window covering ``y[i : i + window_len]`` smooths sample
    ``i + target_index - 1``; the default target is the central sample, which
    requires an odd window. Samples no full window can reach get order ``-1``
    and a NaN smoothed value.

    Returns ``(orders, smoothed)``.
    """
    y = np.asarray(y, dtype=float)
    if target_index is None:
        if window_len % 2 == 0:
            raise ValueError("window_len must be odd unless target_index is given")
        target_index = (window_len + 1) // 2
    if not 1 <= target_index <= window_len:
        raise ValueError(f"target index must lie in [1, {window_len}], got {target_index}")
    if y.ndim != 1 or y.size < window_len:
        raise ValueError(f"series of length {y.size} is shorter than the window ({window_len})")
    basis = build_nested_basis(DesignSpec(window_len, max_order, nodes))
    windows = np.lib.stride_tricks.sliding_window_view(y, window_len).T.copy()  # (N, M)
    tpe, _, smoothed = cv_scores(basis, windows)
    gamma = 1.0 / basis.complement_by_order
    floor = _roundoff_floor(np.einsum("nm,nm->m", windows, windows), gamma)
    best = smallest_argmin(tpe, floor)
    m = windows.shape[1]
    orders = np.full(y.size, -1, dtype=int)
    values = np.full(y.size, np.nan)
    sl = slice(target_index - 1, target_index - 1 + m)
    orders[sl] = best
    values[sl] = smoothed[target_index - 1, best, np.arange(m)]
    return orders, values
