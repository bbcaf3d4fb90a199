"""Named chart geometries with exact reference data.

Every builder returns a ChartManifold whose metric is sampled from a closed
form, so tests can compare derived quantities (curvature, volumes, boundary
data, eigenvalues) against pencil-and-paper values.  Charts with coordinate
singularities (polar origin, sphere poles) excise a strip of width half a
grid spacing; the exact measure of the excised set is recorded in
``core_volume`` so integral comparisons can fold it into their tolerance.

Weight functions are passed as callables over an "alias environment", a dict
holding the raw coordinate meshes plus Cartesian-style aliases (x, y, z where
meaningful).  Both tests and the CLI expression layer use the same hook.
"""

from __future__ import annotations

import math

import numpy as np

from .chart import ChartManifold, Face, ParamDomain, build_chart_manifold
from .errors import InvalidTarget


def _odd(n: int) -> int:
    n = int(n)
    return n if n % 2 == 1 else n + 1


def _env(domain: ParamDomain, aliases: dict) -> dict:
    env = {name: mesh for name, mesh in zip(domain.names, domain.meshes())}
    env.update(aliases)
    return env


def _weights(domain, aliases, phi_fn, V_fn):
    env = _env(domain, aliases)
    shape = domain.shape
    phi_eval = None
    V_eval = None
    if phi_fn is not None:
        phi_vals = np.broadcast_to(np.asarray(phi_fn(env), dtype=float), shape).copy()
        phi_eval = lambda *xs: phi_vals
    if V_fn is not None:
        V_vals = np.broadcast_to(np.asarray(V_fn(env), dtype=float), shape).copy()
        V_eval = lambda *xs: V_vals
    return phi_eval, V_eval


def _diag_metric(*entries):
    def fn(*meshes):
        shape = np.broadcast_shapes(*(np.shape(e(*meshes)) for e in entries))
        n = len(entries)
        g = np.zeros(shape + (n, n))
        for i, e in enumerate(entries):
            g[..., i, i] = e(*meshes)
        return g

    return fn


def flat_disk(size: int = 33, radius: float = 1.0, n_theta: int | None = None,
              phi_fn=None, V_fn=None) -> ChartManifold:
    """Flat disk of the given radius in polar coordinates.

    The origin is a chart singularity: the radial axis starts at half a
    spacing, r in [h/2, R] with h = 2R/(2*size - 1).
    """
    N = _odd(size)
    h = 2.0 * radius / (2 * N - 1)
    eps = 0.5 * h
    nt = n_theta or 2 * N
    dom = ParamDomain(
        names=("r", "theta"),
        lower=(eps, 0.0),
        upper=(radius, 2.0 * math.pi),
        periodic=(False, True),
        resolution=(N, nt),
    )
    r, th = dom.meshes()
    aliases = {"x": r * np.cos(th), "y": r * np.sin(th)}
    phi_eval, V_eval = _weights(dom, aliases, phi_fn, V_fn)
    return build_chart_manifold(
        dom,
        _diag_metric(lambda r, t: np.ones_like(r), lambda r, t: r ** 2),
        phi_eval,
        V_eval,
        boundary_faces=[Face(0, 1)],
        coord_aliases=aliases,
        core_volume=math.pi * eps ** 2,
        label=f"flat-disk(R={radius:g})",
        singular_edges={(0, 0)},
        analytic_ricci=lambda r, t: np.zeros(r.shape + (2, 2)),
    )


def flat_annulus(size: int = 33, r_inner: float = 0.5, r_outer: float = 1.0,
                 n_theta: int | None = None, phi_fn=None, V_fn=None) -> ChartManifold:
    """Flat annulus; no singular axes, both circles are boundary."""
    N = _odd(size)
    nt = n_theta or 2 * N
    dom = ParamDomain(
        names=("r", "theta"),
        lower=(r_inner, 0.0),
        upper=(r_outer, 2.0 * math.pi),
        periodic=(False, True),
        resolution=(N, nt),
    )
    r, th = dom.meshes()
    aliases = {"x": r * np.cos(th), "y": r * np.sin(th)}
    phi_eval, V_eval = _weights(dom, aliases, phi_fn, V_fn)
    return build_chart_manifold(
        dom,
        _diag_metric(lambda r, t: np.ones_like(r), lambda r, t: r ** 2),
        phi_eval,
        V_eval,
        boundary_faces=[Face(0, 0), Face(0, 1)],
        coord_aliases=aliases,
        label=f"flat-annulus({r_inner:g},{r_outer:g})",
        analytic_ricci=lambda r, t: np.zeros(r.shape + (2, 2)),
    )


def _ball_core_volume(eps_r: float, eps_t: float, radius: float) -> float:
    # excised set: origin ball union two polar cone shells, disjoint pieces
    core = 4.0 * math.pi * eps_r ** 3 / 3.0
    core += 2.0 * (2.0 * math.pi / 3.0) * (1.0 - math.cos(eps_t)) * (radius ** 3 - eps_r ** 3)
    return core


def flat_ball3(size: int = 17, radius: float = 1.0, n_phi: int | None = None,
               n_theta: int | None = None, phi_fn=None, V_fn=None) -> ChartManifold:
    """Flat 3-ball in spherical coordinates (r, theta, phi_c).

    Origin and polar axis are excised; only r = radius is boundary.
    For data independent of the azimuth a small n_phi loses nothing.
    Boundary eigenvalue accuracy is set by n_theta (polar cap excision),
    so it can exceed the radial count without inflating the grid.
    """
    N = _odd(size)
    h_r = 2.0 * radius / (2 * N - 1)
    eps_r = 0.5 * h_r
    Nt = _odd(n_theta or size)
    h_t = math.pi / Nt
    eps_t = 0.5 * h_t
    np_ = n_phi or 2 * N
    dom = ParamDomain(
        names=("r", "theta", "phi_c"),
        lower=(eps_r, eps_t, 0.0),
        upper=(radius, math.pi - eps_t, 2.0 * math.pi),
        periodic=(False, False, True),
        resolution=(N, Nt, np_),
    )
    r, th, ph = dom.meshes()
    aliases = {
        "x": r * np.sin(th) * np.cos(ph),
        "y": r * np.sin(th) * np.sin(ph),
        "z": r * np.cos(th),
    }
    phi_eval, V_eval = _weights(dom, aliases, phi_fn, V_fn)
    return build_chart_manifold(
        dom,
        _diag_metric(
            lambda r, t, p: np.ones_like(r),
            lambda r, t, p: r ** 2,
            lambda r, t, p: (r * np.sin(t)) ** 2,
        ),
        phi_eval,
        V_eval,
        boundary_faces=[Face(0, 1)],
        coord_aliases=aliases,
        core_volume=_ball_core_volume(eps_r, eps_t, radius),
        label=f"flat-ball3(R={radius:g})",
        singular_edges={(0, 0), (1, 0), (1, 1)},
        analytic_ricci=lambda r, t, p: np.zeros(r.shape + (3, 3)),
    )


def stretched_ball3(size: int = 17, a: float = 1.2, b: float = 1.2, c: float = 0.8,
                    n_phi: int | None = None, phi_fn=None, V_fn=None) -> ChartManifold:
    """Flat solid ellipsoid: spherical chart pushed through diag(a, b, c).

    The boundary r = 1 is an ellipsoid, hence non-umbilic when the semi-axes
    differ; a convex Euclidean domain for curvature-free inequality checks.
    """
    N = _odd(size)
    h_r = 2.0 / (2 * N - 1)
    eps_r = 0.5 * h_r
    Nt = _odd(size)
    h_t = math.pi / Nt
    eps_t = 0.5 * h_t
    np_ = n_phi or 2 * N
    dom = ParamDomain(
        names=("r", "theta", "phi_c"),
        lower=(eps_r, eps_t, 0.0),
        upper=(1.0, math.pi - eps_t, 2.0 * math.pi),
        periodic=(False, False, True),
        resolution=(N, Nt, np_),
    )

    def metric(r, t, p):
        st, ct = np.sin(t), np.cos(t)
        sp, cp = np.sin(p), np.cos(p)
        J = np.empty(r.shape + (3, 3))
        J[..., 0, 0] = a * st * cp
        J[..., 0, 1] = a * r * ct * cp
        J[..., 0, 2] = -a * r * st * sp
        J[..., 1, 0] = b * st * sp
        J[..., 1, 1] = b * r * ct * sp
        J[..., 1, 2] = b * r * st * cp
        J[..., 2, 0] = c * ct
        J[..., 2, 1] = -c * r * st
        J[..., 2, 2] = np.zeros_like(r)
        return np.einsum("...ki,...kj->...ij", J, J, optimize=True)

    r, th, ph = dom.meshes()
    aliases = {
        "x": a * r * np.sin(th) * np.cos(ph),
        "y": b * r * np.sin(th) * np.sin(ph),
        "z": c * r * np.cos(th),
    }
    phi_eval, V_eval = _weights(dom, aliases, phi_fn, V_fn)
    return build_chart_manifold(
        dom,
        metric,
        phi_eval,
        V_eval,
        boundary_faces=[Face(0, 1)],
        coord_aliases=aliases,
        core_volume=a * b * c * _ball_core_volume(eps_r, eps_t, 1.0),
        label=f"stretched-ball3({a:g},{b:g},{c:g})",
        singular_edges={(0, 0), (1, 0), (1, 1)},
        analytic_ricci=lambda r, t, p: np.zeros(r.shape + (3, 3)),
    )


def round_sphere2(size: int = 33, rho: float = 1.0, n_phi: int | None = None,
                  phi_fn=None, V_fn=None) -> ChartManifold:
    """Round 2-sphere of radius rho; closed, poles excised."""
    N = _odd(size)
    h = math.pi / N
    eps = 0.5 * h
    np_ = n_phi or 2 * N
    dom = ParamDomain(
        names=("theta", "phi_c"),
        lower=(eps, 0.0),
        upper=(math.pi - eps, 2.0 * math.pi),
        periodic=(False, True),
        resolution=(N, np_),
    )
    th, ph = dom.meshes()
    aliases = {
        "x": rho * np.sin(th) * np.cos(ph),
        "y": rho * np.sin(th) * np.sin(ph),
        "z": rho * np.cos(th),
    }
    phi_eval, V_eval = _weights(dom, aliases, phi_fn, V_fn)

    def metric(t, p):
        g = np.zeros(t.shape + (2, 2))
        g[..., 0, 0] = rho ** 2
        g[..., 1, 1] = (rho * np.sin(t)) ** 2
        return g

    return build_chart_manifold(
        dom,
        metric,
        phi_eval,
        V_eval,
        boundary_faces=[],
        coord_aliases=aliases,
        core_volume=2.0 * 2.0 * math.pi * rho ** 2 * (1.0 - math.cos(eps)),
        label=f"round-sphere2(rho={rho:g})",
        singular_edges={(0, 0), (0, 1)},
        analytic_ricci=lambda t, p: metric(t, p) / rho ** 2,
    )


def round_sphere3(size: int = 17, rho: float = 1.0, n_phi: int | None = None,
                  phi_fn=None, V_fn=None) -> ChartManifold:
    """Round 3-sphere of radius rho; closed, both polar axes excised."""
    N = _odd(size)
    h = math.pi / N
    eps = 0.5 * h
    np_ = n_phi or 2 * N
    dom = ParamDomain(
        names=("theta1", "theta2", "phi_c"),
        lower=(eps, eps, 0.0),
        upper=(math.pi - eps, math.pi - eps, 2.0 * math.pi),
        periodic=(False, False, True),
        resolution=(N, N, np_),
    )

    def metric(t1, t2, p):
        g = np.zeros(t1.shape + (3, 3))
        g[..., 0, 0] = rho ** 2
        g[..., 1, 1] = (rho * np.sin(t1)) ** 2
        g[..., 2, 2] = (rho * np.sin(t1) * np.sin(t2)) ** 2
        return g

    t1, t2, ph = dom.meshes()
    aliases = {
        "w": rho * np.cos(t1),
        "x": rho * np.sin(t1) * np.cos(t2),
        "y": rho * np.sin(t1) * np.sin(t2) * np.cos(ph),
        "z": rho * np.sin(t1) * np.sin(t2) * np.sin(ph),
    }
    phi_eval, V_eval = _weights(dom, aliases, phi_fn, V_fn)
    cap = math.pi * rho ** 3 * (2.0 * eps - math.sin(2.0 * eps))
    collar = (
        2.0 * math.pi * rho ** 3
        * ((math.pi - 2.0 * eps + math.sin(2.0 * eps)) / 2.0)
        * (1.0 - math.cos(eps)) * 2.0
    )
    return build_chart_manifold(
        dom,
        metric,
        phi_eval,
        V_eval,
        boundary_faces=[],
        coord_aliases=aliases,
        core_volume=2.0 * cap + collar,
        label=f"round-sphere3(rho={rho:g})",
        singular_edges={(0, 0), (0, 1), (1, 0), (1, 1)},
        analytic_ricci=lambda t1, t2, p: 2.0 * metric(t1, t2, p) / rho ** 2,
    )


def spherical_cap(size: int = 33, theta0: float = 1.0, rho: float = 1.0,
                  n_phi: int | None = None, phi_fn=None, V_fn=None) -> ChartManifold:
    """Geodesic cap of opening angle theta0 on the round 2-sphere.

    Boundary is the circle theta = theta0; the pole is excised.
    """
    N = _odd(size)
    h = 2.0 * theta0 / (2 * N - 1)
    eps = 0.5 * h
    np_ = n_phi or 2 * N
    dom = ParamDomain(
        names=("theta", "phi_c"),
        lower=(eps, 0.0),
        upper=(theta0, 2.0 * math.pi),
        periodic=(False, True),
        resolution=(N, np_),
    )
    th, ph = dom.meshes()
    aliases = {
        "x": rho * np.sin(th) * np.cos(ph),
        "y": rho * np.sin(th) * np.sin(ph),
        "z": rho * np.cos(th),
    }
    phi_eval, V_eval = _weights(dom, aliases, phi_fn, V_fn)

    def metric(t, p):
        g = np.zeros(t.shape + (2, 2))
        g[..., 0, 0] = rho ** 2
        g[..., 1, 1] = (rho * np.sin(t)) ** 2
        return g

    return build_chart_manifold(
        dom,
        metric,
        phi_eval,
        V_eval,
        boundary_faces=[Face(0, 1)],
        coord_aliases=aliases,
        core_volume=2.0 * math.pi * rho ** 2 * (1.0 - math.cos(eps)),
        label=f"spherical-cap(theta0={theta0:g})",
        singular_edges={(0, 0)},
        analytic_ricci=lambda t, p: metric(t, p) / rho ** 2,
    )


def flat_torus2(size: int = 48, a: float = 1.0, b: float = 1.0,
                phi_fn=None, V_fn=None) -> ChartManifold:
    """Flat 2-torus with side circumferences 2*pi*a and 2*pi*b."""
    N = int(size)
    dom = ParamDomain(
        names=("u", "v"),
        lower=(0.0, 0.0),
        upper=(2.0 * math.pi, 2.0 * math.pi),
        periodic=(True, True),
        resolution=(N, N),
    )
    aliases = {}
    phi_eval, V_eval = _weights(dom, aliases, phi_fn, V_fn)
    return build_chart_manifold(
        dom,
        _diag_metric(lambda u, v: np.full_like(u, a ** 2), lambda u, v: np.full_like(u, b ** 2)),
        phi_eval,
        V_eval,
        boundary_faces=[],
        label=f"flat-torus2({a:g},{b:g})",
        analytic_ricci=lambda u, v: np.zeros(u.shape + (2, 2)),
    )


def flat_torus3(size: int = 24, a: float = 1.0, b: float = 1.0, c: float = 1.0,
                phi_fn=None, V_fn=None) -> ChartManifold:
    N = int(size)
    dom = ParamDomain(
        names=("u", "v", "w"),
        lower=(0.0, 0.0, 0.0),
        upper=(2.0 * math.pi, 2.0 * math.pi, 2.0 * math.pi),
        periodic=(True, True, True),
        resolution=(N, N, N),
    )
    phi_eval, V_eval = _weights(dom, {}, phi_fn, V_fn)
    return build_chart_manifold(
        dom,
        _diag_metric(
            lambda u, v, w: np.full_like(u, a ** 2),
            lambda u, v, w: np.full_like(u, b ** 2),
            lambda u, v, w: np.full_like(u, c ** 2),
        ),
        phi_eval,
        V_eval,
        boundary_faces=[],
        label=f"flat-torus3({a:g},{b:g},{c:g})",
        analytic_ricci=lambda u, v, w: np.zeros(u.shape + (3, 3)),
    )


def flat_box2(size: int = 33, lx: float = 1.0, ly: float = 1.0,
              phi_fn=None, V_fn=None) -> ChartManifold:
    """Flat rectangle with all four edges as boundary faces.

    Corners make the boundary merely piecewise smooth; fine for flux and
    integration-by-parts checks, not for boundary eigenvalue problems.
    """
    N = _odd(size)
    dom = ParamDomain(
        names=("x", "y"),
        lower=(0.0, 0.0),
        upper=(lx, ly),
        periodic=(False, False),
        resolution=(N, N),
    )
    phi_eval, V_eval = _weights(dom, {}, phi_fn, V_fn)
    return build_chart_manifold(
        dom,
        _diag_metric(lambda x, y: np.ones_like(x), lambda x, y: np.ones_like(x)),
        phi_eval,
        V_eval,
        label=f"flat-box2({lx:g},{ly:g})",
        analytic_ricci=lambda x, y: np.zeros(x.shape + (2, 2)),
    )


CATALOG = {
    "flat-disk": (flat_disk, "flat unit disk, polar chart, origin excised"),
    "flat-annulus": (flat_annulus, "flat annulus, two boundary circles"),
    "flat-ball3": (flat_ball3, "flat 3-ball, spherical chart, axis excised"),
    "stretched-ball3": (stretched_ball3, "flat solid ellipsoid, non-umbilic boundary"),
    "round-sphere2": (round_sphere2, "round 2-sphere, closed"),
    "round-sphere3": (round_sphere3, "round 3-sphere, closed"),
    "spherical-cap": (spherical_cap, "geodesic cap on the round 2-sphere"),
    "flat-torus2": (flat_torus2, "flat 2-torus, closed"),
    "flat-torus3": (flat_torus3, "flat 3-torus, closed"),
    "flat-box2": (flat_box2, "flat rectangle, piecewise smooth boundary"),
}


def make(name: str, size: int | None = None, phi_fn=None, V_fn=None, **params) -> ChartManifold:
    """Build a catalog geometry by name."""
    if name not in CATALOG:
        known = ", ".join(sorted(CATALOG))
        raise InvalidTarget(f"unknown geometry {name!r}; known: {known}")
    builder, _ = CATALOG[name]
    kwargs = dict(params)
    if size is not None:
        kwargs["size"] = size
    return builder(phi_fn=phi_fn, V_fn=V_fn, **kwargs)
