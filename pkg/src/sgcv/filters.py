"""SG smoothing and leave-one-out prediction filters.

Both filters are minimum-norm solutions of a polynomial constraint system.
The smoother for target ``k`` is column ``k`` of the hat matrix; the predictor
for ``k`` solves the same system with column ``k`` zeroed, so it never looks
at the sample it predicts. Target indices are 1-based throughout, matching the
usual "k-th sample of the window" convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .design import DesignSpec, NestedBasis, build_nested_basis, chebyshev_design

# Basis entries carry absolute error ~N*eps, so complementary leverages
# (sums of their squares) below this cannot be resolved in float64.
LEVERAGE_FLOOR = 1e-24


class DegenerateLeverageError(ValueError):
    """Complementary leverage ``1 - [P]_kk`` too small to invert."""


class SingularSystemError(ValueError):
    """The column-deleted constraint system has no unique minimum-norm solution."""


def _check_target(spec: DesignSpec, k: int) -> int:
    if int(k) != k or not 1 <= k <= spec.window_len:
        raise ValueError(f"target index must lie in [1, {spec.window_len}], got {k!r}")
    return int(k)


def _basis_for(spec: DesignSpec, order: int) -> NestedBasis:
    if int(order) != order or not 0 <= order <= spec.window_len - 2:
        raise ValueError(f"order must lie in [0, {spec.window_len - 2}], got {order!r}")
    return build_nested_basis(spec.with_max_order(int(order)))


@dataclass(frozen=True, eq=False)
class SmootherBank:
    """All ``N`` smoothers of one order; column ``k-1`` targets sample ``k``."""

    coefficients: np.ndarray
    order: int

    def apply(self, x) -> np.ndarray:
        return self.coefficients.T @ np.asarray(x, dtype=float)


@dataclass(frozen=True, eq=False)
class PredictorFilter:
    coefficients: np.ndarray
    target_index: int
    order: int

    def apply(self, x) -> float:
        """Predicted value of sample ``target_index`` (which is ignored)."""
        return float(self.coefficients @ np.asarray(x, dtype=float))


def make_smoother_bank(spec: DesignSpec, order: int) -> SmootherBank:
    basis = _basis_for(spec, order)
    return SmootherBank(basis.projector(order), int(order))


def make_smoother(spec: DesignSpec, order: int, k: int) -> np.ndarray:
    """Smoother ``h^s_k = Q Q^T e_k`` for sample ``k`` at polynomial ``order``."""
    k = _check_target(spec, k)
    basis = _basis_for(spec, order)
    return basis.q_columns @ basis.q_columns[k - 1]


def make_predictor_direct(spec: DesignSpec, order: int, k: int) -> PredictorFilter:
    """Minimum-norm solution of the column-deleted constraint system.

    Column ``k`` is dropped, the reduced ``(order+1) x (N-1)`` system is solved
    by SVD-based least squares (its minimum-norm solution), and a literal zero
    is reinserted at position ``k``.
    """
    k = _check_target(spec, k)
    if int(order) != order or order < 0:
        raise ValueError(f"order must be a non-negative integer, got {order!r}")
    order = int(order)
    if order > spec.window_len - 2:
        raise SingularSystemError(
            f"order {order} needs at least {order + 1} training samples; "
            f"only {spec.window_len - 1} remain after leaving one out"
        )
    a = chebyshev_design(spec, order)
    h = _min_norm_predictor(a, k - 1)
    return PredictorFilter(h, k, order)


def _min_norm_predictor(a: np.ndarray, idx: int) -> np.ndarray:
    rows, n = a.shape
    keep = np.arange(n) != idx
    sol, _, rank, _ = np.linalg.lstsq(a[:, keep], a[:, idx], rcond=None)
    if rank < rows:
        raise SingularSystemError("column-deleted constraint matrix is rank deficient")
    h = np.zeros(n)
    h[keep] = sol
    return h


def make_predictor_from_smoother(spec: DesignSpec, order: int, k: int) -> PredictorFilter:
    """Predictor rebuilt from the smoother via the rank-one (Woodbury) update
    ``h^p_k = (h^s_k - [P]_kk e_k) / (1 - [P]_kk)``."""
    k = _check_target(spec, k)
    basis = _basis_for(spec, order)
    h_s = basis.q_columns @ basis.q_columns[k - 1]
    complement = basis.complement_by_order[k - 1, -1]
    if not complement > LEVERAGE_FLOOR:
        raise DegenerateLeverageError(
            f"1 - [P]_kk = {complement:.3g} at k={k}, order={order}"
        )
    h = h_s / complement
    h[k - 1] = 0.0
    return PredictorFilter(h, k, int(order))
