"""Quadrature against closed-form areas/volumes and synthetic order series."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from driftgeo import boundary, catalog, integrate
from driftgeo.chart import ParamDomain
from driftgeo.errors import InsufficientRefinements

coeff = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False)


def test_axis_weights_are_composite_simpson():
    dom = ParamDomain(("x",), (0.0,), (1.0,), (False,), (9,))
    w = integrate.axis_weights(dom, 0)
    h = 1.0 / 8.0
    np.testing.assert_allclose(w, np.array([1, 4, 2, 4, 2, 4, 2, 4, 1]) * h / 3.0)


def test_axis_weights_periodic_uniform():
    dom = ParamDomain(("t",), (0.0,), (2 * math.pi,), (True,), (10,))
    np.testing.assert_allclose(integrate.axis_weights(dom, 0), 2 * math.pi / 10)


def test_quadrature_weights_are_tensor_products():
    dom = ParamDomain(("x", "t"), (0.0, 0.0), (1.0, 1.0), (False, True), (9, 7))
    w = integrate.quadrature_weights(dom)
    ref = np.multiply.outer(integrate.axis_weights(dom, 0), integrate.axis_weights(dom, 1))
    assert np.array_equal(w, ref)


def test_integrate_values_is_weighted_summation():
    rng = np.random.default_rng(11)
    dom = ParamDomain(("x", "y"), (0.0, 0.0), (1.0, 2.0), (False, False), (9, 11))
    vals = rng.standard_normal(dom.shape)
    direct = float(np.sum(vals * integrate.quadrature_weights(dom)))
    assert integrate.integrate_values(dom, vals) == pytest.approx(direct, rel=1e-15)


@given(c0=coeff, c1=coeff, c2=coeff, c3=coeff)
@settings(max_examples=25, deadline=None)
def test_simpson_exact_on_cubics(c0, c1, c2, c3):
    dom = ParamDomain(("x", "y"), (-1.0, 0.0), (1.0, 1.0), (False, False), (9, 9))
    X, _ = dom.meshes()
    vals = c0 + c1 * X + c2 * X**2 + c3 * X**3
    exact = (2 * c0 + (2.0 / 3.0) * c2) * 1.0  # odd powers cancel on [-1, 1]
    got = integrate.integrate_values(dom, vals)
    assert got == pytest.approx(exact, abs=1e-12)


# ----------------------------------------------------- closed-form measures


def test_disk_area_with_core_correction():
    m = catalog.flat_disk(33)
    area = integrate.integrate_weighted_volume(m)
    assert abs(area + m.core_volume - math.pi) < 1e-4


def test_ball_volume_with_core_correction():
    m = catalog.flat_ball3(17)
    vol = integrate.integrate_weighted_volume(m)
    assert abs(vol + m.core_volume - 4.0 * math.pi / 3.0) < 1e-3


def test_constant_weight_halves_the_volume():
    plain = catalog.flat_box2(9)
    weighted = catalog.flat_box2(9, phi_fn=lambda env: math.log(2.0) + 0.0 * env["x"])
    v0 = integrate.integrate_weighted_volume(plain)
    v1 = integrate.integrate_weighted_volume(weighted)
    assert v1 == pytest.approx(0.5 * v0, rel=1e-13)


def test_circle_circumference_spectrally_accurate():
    m = catalog.flat_disk(17)
    bg = boundary.all_boundary_geometry(m)[0]
    assert abs(integrate.integrate_boundary(bg) - 2 * math.pi) < 1e-8


def test_odd_integrand_on_circle_cancels():
    m = catalog.flat_disk(17)
    bg = boundary.all_boundary_geometry(m)[0]
    theta = bg.face_domain.meshes()[0]
    assert abs(integrate.integrate_boundary(bg, np.cos(theta))) < 1e-10


def test_sphere_area_from_ball_boundary():
    # the boundary face misses two polar caps of height 1 - cos(h/2); at this
    # angular resolution the deficit sits well below 1e-4 relative
    m = catalog.flat_ball3(9, n_theta=221, n_phi=16)
    bg = boundary.all_boundary_geometry(m)[0]
    area = integrate.integrate_boundary(bg)
    assert abs(area - 4 * math.pi) / (4 * math.pi) < 1e-4


def test_weighted_boundary_measure():
    m = catalog.flat_disk(17, phi_fn=lambda env: env["x"])
    bg = boundary.all_boundary_geometry(m)[0]
    theta = bg.face_domain.meshes()[0]
    got = integrate.integrate_boundary(bg, weighted=True)
    # int e^{-cos t} dt over the unit circle, by dense midpoint reference
    t = np.linspace(0.0, 2 * math.pi, 20001)[:-1]
    ref = float(np.mean(np.exp(-np.cos(t)))) * 2 * math.pi
    assert got == pytest.approx(ref, rel=1e-8)
    unweighted = integrate.integrate_boundary(bg, np.exp(-np.cos(theta)))
    assert got == pytest.approx(unweighted, rel=1e-13)


def test_core_tolerance_scales_with_field():
    m = catalog.flat_disk(17)
    base = integrate.core_tolerance(m)
    assert base == pytest.approx(m.core_volume)
    assert integrate.core_tolerance(m, 3.0 * np.ones(m.domain.shape)) == pytest.approx(3 * base)


# ------------------------------------------------------------ order studies


def test_convergence_order_quadratic():
    hs = np.array([0.1, 0.05, 0.025, 0.0125])
    est = integrate.convergence_order(0.7 * hs**2, 0.0, hs)
    assert est.order == pytest.approx(2.0, abs=1e-6)
    assert not est.plateau
    assert est.n_used == 4


def test_convergence_order_quartic_with_reference():
    hs = np.array([0.2, 0.1, 0.05])
    vals = 1.5 + 3.0 * hs**4
    est = integrate.convergence_order(vals, 1.5, hs)
    assert est.order == pytest.approx(4.0, abs=1e-6)


def test_convergence_order_plateau_flagged():
    hs = np.array([0.1, 0.05, 0.025, 0.0125, 0.00625])
    errs = 0.5 * hs**2
    errs[-2:] = 1e-15  # round-off floor
    est = integrate.convergence_order(errs, 0.0, hs)
    assert est.plateau
    assert est.n_used == 3
    assert est.order == pytest.approx(2.0, abs=1e-6)


def test_convergence_order_needs_three_levels():
    with pytest.raises(InsufficientRefinements):
        integrate.convergence_order([1.0, 0.5], 0.0, [0.1, 0.05])


def test_float_conversion_of_order_estimate():
    hs = np.array([0.1, 0.05, 0.025])
    est = integrate.convergence_order(hs, 0.0, hs)
    assert float(est) == pytest.approx(1.0, abs=1e-9)
