"""Differential operators: exactness on polynomials and round-sphere oracles."""

import math

import numpy as np
import pytest

from driftgeo import calculus, catalog
from driftgeo.chart import ScalarField
from driftgeo.errors import (
    EqualDimensionResidualUndefined,
    InvalidDimensionParameter,
    NonconstantPhiAtEqualDimension,
)


def box(size=9, phi_fn=None, V_fn=None):
    return catalog.flat_box2(size, phi_fn=phi_fn, V_fn=V_fn)


# ------------------------------------------------------------- derivatives


def test_partial_derivative_exact_on_cubics():
    m = box(9)
    X, Y = m.domain.meshes()
    f = ScalarField(m.domain, X**2 * Y)
    np.testing.assert_allclose(
        calculus.partial_derivative(f, 0).values, 2 * X * Y, atol=1e-11
    )
    np.testing.assert_allclose(
        calculus.partial_derivative(f, 0, axis2=1).values, 2 * X, atol=1e-10
    )
    np.testing.assert_allclose(
        calculus.partial_derivative(f, 0, order=2).values, 2 * Y, atol=1e-10
    )


def test_hessian_and_laplacians_flat_cubic():
    m = box(9, phi_fn=lambda env: env["x"])
    X, Y = m.domain.meshes()
    f = ScalarField(m.domain, X**2 * Y)
    hess, lap, drift = calculus.hessian_and_laplacians(m, f)
    np.testing.assert_allclose(hess.values[..., 0, 0], 2 * Y, atol=1e-10)
    np.testing.assert_allclose(hess.values[..., 0, 1], 2 * X, atol=1e-10)
    np.testing.assert_allclose(hess.values[..., 1, 1], 0.0, atol=1e-10)
    np.testing.assert_allclose(lap.values, 2 * Y, atol=1e-10)
    # drift term subtracts <grad phi, grad f> = d_x f on this weight
    np.testing.assert_allclose(drift.values, 2 * Y - 2 * X * Y, atol=1e-10)


def test_hessian_on_disk_radial_quadratic():
    # f = r^2 has covariant Hessian 2 g on the flat disk, any chart
    m = catalog.flat_disk(17)
    R, _ = m.domain.meshes()
    f = ScalarField(m.domain, R**2)
    an = calculus.analyze(m, f.values)
    np.testing.assert_allclose(an.hess, 2.0 * m.metric.g, atol=1e-9)
    np.testing.assert_allclose(an.lap, 4.0, atol=1e-9)


# ------------------------------------------------------ curvature oracles


def test_christoffel_round_sphere():
    rho = 1.3
    m = catalog.round_sphere2(33, rho=rho)
    T, _ = m.domain.meshes()
    gam = calculus.christoffel(m)
    np.testing.assert_allclose(gam[..., 0, 1, 1], -np.sin(T) * np.cos(T), atol=1e-4)
    # the cot symbol is steep near the excised poles; compare away from them
    win = (T > 0.3) & (T < math.pi - 0.3)
    np.testing.assert_allclose(gam[..., 1, 0, 1][win], 1.0 / np.tan(T)[win], atol=1e-5)
    np.testing.assert_allclose(gam[..., 0, 0, 0], 0.0, atol=1e-10)


def test_ricci_analytic_path_round_sphere():
    m = catalog.round_sphere2(17, rho=2.0)
    np.testing.assert_allclose(calculus.ricci(m), m.metric.g / 4.0, atol=1e-14)
    np.testing.assert_allclose(calculus.scalar_curvature(m), 0.5, atol=1e-13)


def test_ricci_numeric_matches_metric_on_sphere():
    # pointwise differences do not converge on the excised pole rows (the
    # one-sided stencils hit the cot singularity), so the oracle is stated
    # on a window that is fixed across resolutions
    m = catalog.round_sphere2(33)
    T, _ = m.domain.meshes()
    win = (T > 0.3) & (T < math.pi - 0.3)
    ric = calculus.ricci(m, numeric=True)
    err = np.abs(ric - m.metric.g).max(axis=(-1, -2))
    assert float(err[win].max()) < 0.5


def test_ricci_numeric_flat_cartesian_chart_is_zero():
    m = catalog.flat_box2(17)
    assert float(np.max(np.abs(calculus.ricci(m, numeric=True)))) < 1e-9


# -------------------------------------------------- weighted curvature data


def test_bakry_emery_dimension_validation():
    m = box(9)
    with pytest.raises(InvalidDimensionParameter):
        calculus.bakry_emery(m, 1.5)  # inside [0, n)
    with pytest.raises(InvalidDimensionParameter):
        calculus.bakry_emery(m, math.nan)
    with pytest.raises(InvalidDimensionParameter):
        calculus.bakry_emery(m, None)


def test_bakry_emery_equal_dimension_needs_constant_phi():
    weighted = box(9, phi_fn=lambda env: env["x"])
    with pytest.raises(NonconstantPhiAtEqualDimension):
        calculus.bakry_emery(weighted, 2.0)
    plain = box(9, phi_fn=lambda env: 0.7 + 0.0 * env["x"])
    np.testing.assert_allclose(
        calculus.bakry_emery(plain, 2.0).values, calculus.ricci(plain), atol=1e-13
    )


def test_bakry_emery_flat_quadratic_phi():
    m = box(9, phi_fn=lambda env: (env["x"] ** 2 + env["y"] ** 2) / 2.0)
    X, Y = m.domain.meshes()
    eye = np.broadcast_to(np.eye(2), m.domain.shape + (2, 2))
    np.testing.assert_allclose(calculus.bakry_emery(m, math.inf).values, eye, atol=1e-10)
    # finite mdim subtracts dphi x dphi / (mdim - n)
    be3 = calculus.bakry_emery(m, 3.0).values
    np.testing.assert_allclose(be3[..., 0, 0], 1.0 - X**2, atol=1e-10)
    np.testing.assert_allclose(be3[..., 0, 1], -X * Y, atol=1e-10)


def test_hat_ric_linear_weight_is_exact():
    m = box(9, V_fn=lambda env: 1.0 + env["x"])
    hr = calculus.hat_ric(m, math.inf).values
    np.testing.assert_allclose(hr, 0.0, atol=1e-11)
    assert float(np.max(np.abs(calculus.hat_ric_min_eig(m, math.inf)))) < 1e-11


def test_min_generalized_eigenvalue_uses_metric():
    m = catalog.flat_disk(9)
    # T = g is the identity operator: smallest relative eigenvalue 1 everywhere
    out = calculus.min_generalized_eigenvalue(m, m.metric.g.copy())
    np.testing.assert_allclose(out, 1.0, atol=1e-12)


def test_hessian_noise_floor_tracks_resolution():
    coarse = catalog.flat_box2(9)
    fine = catalog.flat_box2(33)
    assert 0.0 < calculus.hessian_noise_floor(coarse) < calculus.hessian_noise_floor(fine)


# ---------------------------------------------------------- pair (f, V) data


def test_difference_fields_consistency():
    m = catalog.flat_disk(17, phi_fn=lambda env: np.sin(env["x"]) / 5.0,
                          V_fn=lambda env: 1.0 + env["x"] ** 2 / 4.0)
    env = m.alias_fields()
    f = ScalarField(m.domain, env["x"] ** 2 + env["y"])
    d = calculus.difference_fields(m, f)
    # documented identities between the stored fields
    np.testing.assert_allclose(d.u, f.values / m.V.values, atol=1e-14)
    trA = np.einsum("...ij,...ij->...", m.metric.ginv, d.A)
    np.testing.assert_allclose(d.trA, trA, atol=1e-12)
    ring_trace = np.einsum("...ij,...ij->...", m.metric.ginv, d.Aring)
    np.testing.assert_allclose(ring_trace, 0.0, atol=1e-10)
    # T_phi = trA - W holds for the continuum fields; the discrete versions
    # differ by the quotient-rule truncation error of the stencils
    np.testing.assert_allclose(d.T_phi, d.trA - d.W, atol=1e-3)


def test_decomposition_sides_match_pointwise():
    # the trace decomposition is an algebraic identity, so both sides agree
    # at every node once mdim is admissible (mdim = n needs constant phi,
    # so it is exercised separately)
    m = catalog.flat_disk(17, phi_fn=lambda env: np.sin(env["x"]) / 5.0)
    env = m.alias_fields()
    f = ScalarField(m.domain, env["x"] ** 2 + env["y"])
    for mdim in (3.5, math.inf, -4.0):
        lhs, rhs = calculus.decomposition_sides(m, f, mdim)
        scale = float(np.max(np.abs(lhs.values))) + 1e-30
        assert float(np.max(np.abs(lhs.values - rhs.values))) / scale < 1e-10


def test_equality_case_residuals_guard_equal_dimension():
    m = catalog.flat_disk(9)
    env = m.alias_fields()
    f = ScalarField(m.domain, env["x"])
    with pytest.raises(EqualDimensionResidualUndefined):
        calculus.equality_case_residuals(m, f, 2.0)


def test_drift_ratio_vanishes_for_unit_weight():
    m = catalog.flat_disk(9)
    np.testing.assert_allclose(calculus.drift_ratio(m), 0.0, atol=1e-10)
