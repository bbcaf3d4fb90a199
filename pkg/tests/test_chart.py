"""Chart data structures: grids, fields, metric validation, manifolds."""

import math

import numpy as np
import pytest

from driftgeo import catalog
from driftgeo.chart import (
    ChartManifold,
    Face,
    MetricField,
    ParamDomain,
    ScalarField,
    build_chart_manifold,
    symmetrize_pair,
    volume_element,
)
from driftgeo.errors import DegenerateMetric, NonPositivePotential, ResolutionTooLow


def square_domain(n=9, periodic=(False, False)):
    return ParamDomain(
        names=("x", "y"), lower=(0.0, 0.0), upper=(1.0, 1.0),
        periodic=periodic, resolution=(n, n),
    )


def euclidean(x, y):
    return np.broadcast_to(np.eye(2), x.shape + (2, 2))


# ------------------------------------------------------------- ParamDomain


def test_spacing_and_nodes():
    dom = square_domain(9)
    assert dom.spacing == (0.125, 0.125)
    np.testing.assert_allclose(dom.axis_nodes(0), np.linspace(0.0, 1.0, 9))


def test_periodic_axis_excludes_upper_endpoint():
    dom = ParamDomain(("t",), (0.0,), (2 * math.pi,), (True,), (8,))
    nodes = dom.axis_nodes(0)
    assert nodes.size == 8
    assert nodes[-1] < 2 * math.pi
    assert dom.spacing[0] == pytest.approx(math.pi / 4)


def test_meshes_are_ij_indexed():
    dom = square_domain(9)
    X, Y = dom.meshes()
    assert X.shape == (9, 9)
    assert X[3, 0] == pytest.approx(dom.axis_nodes(0)[3])
    assert Y[0, 3] == pytest.approx(dom.axis_nodes(1)[3])


def test_even_count_rejected_on_open_axis():
    with pytest.raises(ValueError, match="odd"):
        square_domain(10)


def test_resolution_floor():
    with pytest.raises(ResolutionTooLow):
        ParamDomain(("x",), (0.0,), (1.0,), (False,), (3,))


def test_empty_interval_rejected():
    with pytest.raises(ValueError, match="empty"):
        ParamDomain(("x",), (1.0,), (1.0,), (False,), (9,))


def test_mismatched_tuples_rejected():
    with pytest.raises(ValueError, match="length"):
        ParamDomain(("x", "y"), (0.0,), (1.0, 1.0), (False, False), (9, 9))


# ---------------------------------------------------------------- fields


def test_scalar_field_values_frozen():
    dom = square_domain()
    f = ScalarField(dom, np.zeros(dom.shape))
    with pytest.raises(ValueError):
        f.values[0, 0] = 1.0


def test_scalar_field_shape_checked():
    dom = square_domain()
    with pytest.raises(ValueError, match="shape"):
        ScalarField(dom, np.zeros((3, 3)))


def test_scalar_field_rejects_nan():
    dom = square_domain()
    vals = np.zeros(dom.shape)
    vals[2, 2] = np.nan
    with pytest.raises(ValueError, match="finite"):
        ScalarField(dom, vals)


def test_symmetrize_pair_is_exact():
    rng = np.random.default_rng(3)
    t = rng.standard_normal((4, 3, 3))
    s = symmetrize_pair(t)
    assert np.array_equal(s, np.swapaxes(s, -1, -2))


# ---------------------------------------------------------------- metric


def test_metric_inverse_and_density():
    dom = square_domain()
    g = np.zeros(dom.shape + (2, 2))
    g[..., 0, 0] = 2.0
    g[..., 1, 1] = 8.0
    metric = MetricField(dom, g)
    np.testing.assert_allclose(metric.ginv[..., 0, 0], 0.5)
    np.testing.assert_allclose(metric.sqrt_det, 4.0)


def test_metric_must_be_spd():
    dom = square_domain()
    g = np.zeros(dom.shape + (2, 2))
    g[..., 0, 0] = 1.0
    g[..., 1, 1] = -1.0
    with pytest.raises(DegenerateMetric):
        MetricField(dom, g)


def test_metric_rejects_nan():
    dom = square_domain()
    g = np.broadcast_to(np.eye(2), dom.shape + (2, 2)).copy()
    g[0, 0, 0, 0] = np.nan
    with pytest.raises(DegenerateMetric):
        MetricField(dom, g)


# ---------------------------------------------------------- ChartManifold


def test_weight_must_be_positive():
    dom = square_domain()
    metric = MetricField.sample(dom, euclidean)
    phi = ScalarField.constant(dom, 0.0)
    V = ScalarField(dom, np.zeros(dom.shape))
    with pytest.raises(NonPositivePotential):
        ChartManifold(dom, metric, phi, V)


def test_boundary_faces_not_on_periodic_axes():
    dom = square_domain(periodic=(True, False))
    metric = MetricField.sample(dom, euclidean)
    one = ScalarField.constant(dom, 1.0)
    with pytest.raises(ValueError, match="periodic"):
        ChartManifold(dom, metric, ScalarField.constant(dom, 0.0), one,
                      boundary_faces=(Face(0, 0),))


def test_singular_edges_validated():
    dom = square_domain(periodic=(False, True))
    metric = MetricField.sample(dom, euclidean)
    one = ScalarField.constant(dom, 1.0)
    zero = ScalarField.constant(dom, 0.0)
    with pytest.raises(ValueError, match="singular"):
        ChartManifold(dom, metric, zero, one, singular_edges=((1, 0),))
    with pytest.raises(ValueError, match="singular"):
        ChartManifold(dom, metric, zero, one,
                      boundary_faces=(Face(0, 0),), singular_edges=((0, 0),))


def test_build_chart_manifold_defaults():
    dom = square_domain(9)
    m = build_chart_manifold(dom, euclidean)
    assert m.has_boundary
    assert len(m.boundary_faces) == 4
    np.testing.assert_allclose(m.V.values, 1.0)
    np.testing.assert_allclose(m.phi.values, 0.0)
    np.testing.assert_allclose(volume_element(m), 1.0)


def test_build_chart_manifold_public_resolution_floor():
    dom = ParamDomain(("x", "y"), (0.0, 0.0), (1.0, 1.0), (False, False), (7, 9))
    with pytest.raises(ResolutionTooLow, match=">= 8"):
        build_chart_manifold(dom, euclidean)


def test_volume_element_carries_weight_factor():
    dom = square_domain(9)
    m = build_chart_manifold(dom, euclidean, phi_eval=lambda x, y: x)
    np.testing.assert_allclose(volume_element(m), np.exp(-dom.meshes()[0]))


def test_alias_fields_exposes_cartesian_names():
    m = catalog.flat_disk(9)
    env = m.alias_fields()
    for key in ("r", "theta", "x", "y"):
        assert key in env
    np.testing.assert_allclose(env["x"], env["r"] * np.cos(env["theta"]))


def test_cache_is_per_instance():
    m1 = catalog.flat_disk(9)
    m2 = catalog.flat_disk(9)
    m1.cache()["probe"] = 1
    assert "probe" not in m2.cache()


def test_catalog_singular_edge_metadata():
    assert catalog.flat_disk(9).singular_edges == frozenset({(0, 0)})
    assert catalog.flat_ball3(9).singular_edges == frozenset({(0, 0), (1, 0), (1, 1)})
    assert catalog.round_sphere2(9).singular_edges == frozenset({(0, 0), (0, 1)})
    assert catalog.flat_annulus(9).singular_edges == frozenset()
