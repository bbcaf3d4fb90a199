"""Finite-difference stencils: exactness on low-degree polynomials.

Every row is a 5-point Fornberg stencil, so any polynomial of degree <= 4
is reproduced exactly (up to round-off) by both derivative orders, interior
and one-sided edge rows alike.
"""

import numpy as np
import pytest
from numpy.polynomial import polynomial as P

from driftgeo import stencils
from driftgeo.errors import ResolutionTooLow


@pytest.mark.parametrize("deg", range(5))
@pytest.mark.parametrize("order", [1, 2])
def test_open_derivative_exact_on_polynomials(deg, order):
    h = 0.37
    x = -1.9 + h * np.arange(13)
    D = stencils.derivative_matrix(x.size, h, order, periodic=False)
    c = np.arange(1.0, deg + 2.0)  # 1 + 2x + 3x^2 + ...
    vals = P.polyval(x, c)
    exact = P.polyval(x, P.polyder(c, order))
    np.testing.assert_allclose(D @ vals, exact, atol=1e-10)


@pytest.mark.parametrize("order", [1, 2])
def test_periodic_rows_are_polynomial_exact_too(order):
    # wrap-around rows see the same centered weights; check on a quartic
    # evaluated over one period of a linear coordinate (no wrap in values,
    # so only the interior rows are meaningful and they must be exact)
    h = 0.11
    x = h * np.arange(32)
    D = stencils.derivative_matrix(x.size, h, order, periodic=True)
    c = np.array([2.0, -1.0, 0.5, 0.25, -0.125])
    got = (D @ P.polyval(x, c))[2:-2]
    exact = P.polyval(x, P.polyder(c, order))[2:-2]
    np.testing.assert_allclose(got, exact, atol=1e-10)


def test_weight_tables_sum_to_raw_roundoff():
    for order in (1, 2):
        st = stencils.stencil(order)
        assert abs(st.interior.sum()) < 1e-15
        for w in st.boundary.values():
            assert abs(w.sum()) < 1e-15


def test_derivative_matrices_annihilate_constants_to_row_scale():
    for periodic in (False, True):
        for order in (1, 2):
            h = 0.123
            D = stencils.derivative_matrix(17, h, order, periodic)
            np.testing.assert_allclose(D @ np.ones(17), 0.0, atol=1e-12 / h ** order)


def test_fd_weights_central_first_derivative():
    w = stencils.fd_weights(0.0, np.array([-1.0, 0.0, 1.0]), 1)
    np.testing.assert_allclose(w, [-0.5, 0.0, 0.5], atol=1e-14)


def test_fd_weights_one_sided_edge_row():
    w = stencils.fd_weights(0.0, np.arange(5.0), 1)
    np.testing.assert_allclose(w, [-25 / 12, 4.0, -3.0, 4 / 3, -1 / 4], atol=1e-12)


def test_fd_weights_order_needs_enough_nodes():
    with pytest.raises(ValueError):
        stencils.fd_weights(0.0, np.arange(3.0), 3)


def test_sparse_matches_dense():
    for periodic in (False, True):
        for order in (1, 2):
            D = stencils.derivative_matrix(11, 0.2, order, periodic)
            S = stencils.derivative_matrix_sparse(11, 0.2, order, periodic)
            assert np.array_equal(S.toarray(), D)


def test_apply_along_axis_matches_matmul():
    rng = np.random.default_rng(7)
    vals = rng.standard_normal((9, 11, 8))
    D = stencils.derivative_matrix(11, 0.3, 1, periodic=False)
    out = stencils.apply_along_axis(D, vals, 1)
    ref = np.einsum("ij,ajb->aib", D, vals)
    np.testing.assert_allclose(out, ref, atol=1e-13)


def test_resolution_below_stencil_width_rejected():
    with pytest.raises(ResolutionTooLow):
        stencils.derivative_matrix(4, 0.1, 1, periodic=False)
