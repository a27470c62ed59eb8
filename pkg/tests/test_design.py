import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from sgcv.design import DesignSpec, build_design_matrix, build_nested_basis, projection_matrix


@st.composite
def specs(draw, max_n=24):
    n = draw(st.integers(3, max_n))
    p = draw(st.integers(0, n - 2))
    return DesignSpec(n, p)


class TestDesignSpec:
    def test_defaults_to_unit_nodes(self):
        np.testing.assert_array_equal(DesignSpec(5, 2).nodes, [1, 2, 3, 4, 5])

    @pytest.mark.parametrize("n,p", [(2, 0), (5, 4), (5, -1), (513, 3)])
    def test_rejects_invalid(self, n, p):
        with pytest.raises(ValueError):
            DesignSpec(n, p)

    def test_rejects_non_increasing_nodes(self):
        with pytest.raises(ValueError):
            DesignSpec(4, 1, [0.0, 1.0, 1.0, 2.0])
        with pytest.raises(ValueError):
            DesignSpec(4, 1, [0.0, 1.0, 2.0])

    def test_accepts_512(self):
        assert DesignSpec(512, 5).window_len == 512


class TestDesignMatrix:
    def test_worked_example(self):
        a = build_design_matrix(DesignSpec(5, 2), 2)
        np.testing.assert_array_equal(a, [[1, 1, 1, 1, 1], [1, 2, 3, 4, 5], [1, 4, 9, 16, 25]])

    def test_order_zero(self):
        np.testing.assert_array_equal(build_design_matrix(DesignSpec(3, 0), 0), [[1, 1, 1]])

    def test_full_row_rank(self):
        a = build_design_matrix(DesignSpec(4, 2), 2)
        s = np.linalg.svd(a, compute_uv=False)
        assert np.sum(s > s[0] * 1e-12) == 3

    def test_order_out_of_range(self):
        with pytest.raises(ValueError):
            build_design_matrix(DesignSpec(5, 2), 3)


class TestNestedBasis:
    def test_constant_basis(self):
        b = build_nested_basis(DesignSpec(5, 0))
        np.testing.assert_allclose(b.q_columns[:, 0], np.ones(5) / np.sqrt(5), atol=1e-15)
        np.testing.assert_allclose(b.leverage_by_order[:, 0], 0.2, atol=1e-15)

    def test_trace(self):
        b = build_nested_basis(DesignSpec(5, 2))
        assert b.leverage_by_order[:, 2].sum() == pytest.approx(3, abs=1e-12)

    def test_leverages_match_exact_normal_equations(self):
        b = build_nested_basis(DesignSpec(6, 4))
        for p in range(5):
            h = oracles.hat_matrix(range(1, 7), p)
            exact = np.array([float(h[i, i]) for i in range(6)])
            np.testing.assert_allclose(b.leverage_by_order[:, p], exact, atol=1e-10)
            np.testing.assert_allclose(b.complement_by_order[:, p], 1 - exact, atol=1e-10)

    def test_complement_has_relative_accuracy(self):
        # last complement at order N-2 is binom(N-1, k)^2 / binom(2N-2, N-1)
        from math import comb
        n = 20
        b = build_nested_basis(DesignSpec(n, n - 2))
        exact = np.array([comb(n - 1, k) ** 2 / comb(2 * n - 2, n - 1) for k in range(n)])
        np.testing.assert_allclose(b.complement_by_order[:, -1], exact, rtol=1e-9)

    def test_read_only(self):
        b = build_nested_basis(DesignSpec(6, 3))
        with pytest.raises(ValueError):
            b.q_columns[0, 0] = 1.0

    @settings(max_examples=60, deadline=None)
    @given(specs())
    def test_invariants(self, spec):
        b = build_nested_basis(spec)
        p = spec.max_order
        np.testing.assert_allclose(b.q_columns.T @ b.q_columns, np.eye(p + 1), atol=1e-12)
        np.testing.assert_allclose(b.leverage_by_order.sum(axis=0), np.arange(1, p + 2), atol=1e-10)
        assert np.all(b.leverage_by_order > 0) and np.all(b.leverage_by_order < 1)
        assert np.all(b.complement_by_order > 0)
        assert np.all(np.diff(b.leverage_by_order, axis=1) >= -1e-15)
        # nested spans: monomials of degree <= j are reproduced by the first j+1 columns
        t = spec.scaled_nodes
        for j in range(p + 1):
            q = b.q_columns[:, : j + 1]
            mono = t**j / np.linalg.norm(t**j) if np.any(t**j) else t**j
            assert np.linalg.norm(mono - q @ (q.T @ mono)) <= 1e-10

    @settings(max_examples=40, deadline=None)
    @given(specs(max_n=16), st.floats(0.1, 50), st.floats(-100, 100))
    def test_affine_invariance(self, spec, a, c):
        moved = DesignSpec(spec.window_len, spec.max_order, a * spec.nodes + c)
        b0, b1 = build_nested_basis(spec), build_nested_basis(moved)
        np.testing.assert_allclose(b0.leverage_by_order, b1.leverage_by_order, atol=1e-10)
        for p in range(spec.max_order + 1):
            np.testing.assert_allclose(projection_matrix(spec, p), projection_matrix(moved, p), atol=1e-10)


class TestProjectionMatrix:
    def test_mean_projector(self):
        np.testing.assert_allclose(projection_matrix(DesignSpec(5, 0), 0), np.full((5, 5), 0.2), atol=1e-15)

    def test_quadratic_fixed_point(self):
        x = np.array([7 * n**2 - 3 for n in range(-2, 3)], dtype=float)
        np.testing.assert_array_equal(x, [25, 4, -3, 4, 25])
        np.testing.assert_allclose(projection_matrix(DesignSpec(5, 2), 2) @ x, x, atol=1e-12)

    def test_idempotent(self):
        p = projection_matrix(DesignSpec(4, 2), 2)
        assert np.max(np.abs(p @ p - p)) <= 1e-12

    def test_matches_exact(self):
        exact = np.array(oracles.hat_matrix(range(1, 8), 3), dtype=float)
        np.testing.assert_allclose(projection_matrix(DesignSpec(7, 3), 3), exact, atol=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(specs())
    def test_projector_properties(self, spec):
        b = build_nested_basis(spec)
        for order in range(spec.max_order + 1):
            p = projection_matrix(spec, order)
            np.testing.assert_array_equal(p, p.T)
            assert np.max(np.abs(p @ p - p)) <= 1e-10
            assert np.trace(p) == pytest.approx(order + 1, abs=1e-10)
            np.testing.assert_allclose(np.diag(p), b.leverage_by_order[:, order], atol=1e-10)
