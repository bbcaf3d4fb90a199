"""Boundary geometry of chart faces.

Each declared boundary face is itself a tensor-product chart of one lower
dimension; its induced metric, outward normal, second fundamental form and
weighted mean curvature are sampled on the face grid.  The face is also
wrapped as a ChartManifold so the tangential weighted operators reuse the
interior calculus unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import calculus, stencils
from .chart import (
    ChartManifold,
    Face,
    MetricField,
    ParamDomain,
    ScalarField,
    symmetrize_pair,
)
from .errors import NoBoundary


def _face_slicer(m: ChartManifold, face: Face):
    idx = [slice(None)] * m.dim
    idx[face.axis] = -1 if face.side == 1 else 0
    return tuple(idx)


def restrict(m: ChartManifold, values: np.ndarray, face: Face) -> np.ndarray:
    return values[_face_slicer(m, face)]


def _boundary_row_derivative(m: ChartManifold, values: np.ndarray, face: Face) -> np.ndarray:
    """d/dx_a of a grid field evaluated only on the face (one-sided row)."""
    D = m.domain.deriv_matrix(face.axis, 1)
    row = D[-1] if face.side == 1 else D[0]
    return np.tensordot(row, values, axes=(0, face.axis))


@dataclass(frozen=True)
class BoundaryGeometry:
    """Induced geometry of one boundary face."""

    parent: ChartManifold
    face: Face
    tangential_axes: tuple
    face_domain: ParamDomain
    gbar: np.ndarray
    gbar_inv: np.ndarray
    area_element: np.ndarray
    nu: np.ndarray          # outward unit normal, parent components, face nodes
    II: np.ndarray
    H: np.ndarray
    phi: np.ndarray         # restrictions
    V: np.ndarray
    phi_nu: np.ndarray
    V_nu: np.ndarray

    @property
    def H_phi(self) -> np.ndarray:
        return self.H - self.phi_nu

    @property
    def II_V(self) -> np.ndarray:
        return self.II - (self.V_nu / self.V)[..., None, None] * self.gbar

    def normal_derivative(self, values: np.ndarray) -> np.ndarray:
        """nu^i d_i of a full-chart field, evaluated on the face."""
        m, face = self.parent, self.face
        out = self.nu[..., face.axis] * _boundary_row_derivative(m, values, face)
        rest = restrict(m, values, face)
        for alpha, a in enumerate(self.tangential_axes):
            D = self.face_domain.deriv_matrix(alpha, 1)
            out = out + self.nu[..., a] * stencils.apply_along_axis(D, rest, alpha)
        return out

    def face_manifold(self) -> ChartManifold:
        cache = self.parent.cache()
        key = ("face_manifold", self.face)
        if key not in cache:
            # tangential axes keep their singular-edge flags, reindexed
            edges = frozenset(
                (a - (a > self.face.axis), s)
                for a, s in self.parent.singular_edges
                if a != self.face.axis
            )
            cache[key] = ChartManifold(
                self.face_domain,
                MetricField(self.face_domain, self.gbar.copy()),
                ScalarField(self.face_domain, self.phi.copy()),
                ScalarField(self.face_domain, self.V.copy()),
                boundary_faces=(),
                label=f"{self.parent.label}|{self.face}",
                singular_edges=edges,
            )
        return cache[key]

    def tangential_gradient(self, face_values: np.ndarray) -> np.ndarray:
        """Raised tangential gradient of a field given on the face grid."""
        fm = self.face_manifold()
        df = calculus.grad_covector(fm.domain, face_values)
        return np.einsum("...ij,...j->...i", self.gbar_inv, df, optimize=True)

    def drift_operator(self, face_values: np.ndarray) -> np.ndarray:
        """Tangential drift Laplacian minus the weight ratio term:
        lapbar_phi f - (lapbar_phi V / V) f on the face."""
        fm = self.face_manifold()
        an = calculus.analyze(fm, face_values)
        return an.drift_lap - calculus.drift_ratio(fm) * face_values


def boundary_geometry(m: ChartManifold, face: Face) -> BoundaryGeometry:
    """Sample the induced geometry of one boundary face.

    The second fundamental form is II(d_alpha, d_beta) = g(D_alpha nu, d_beta)
    with nu the metric-normalized coordinate conormal; only tangential
    derivatives of nu enter, so everything is computed from face data plus
    the ambient Christoffel symbols restricted to the face.
    """
    if face not in m.boundary_faces:
        raise NoBoundary(f"{face} is not a declared boundary face")
    cache = m.cache()
    key = ("boundary_geometry", face)
    if key in cache:
        return cache[key]
    dom = m.domain
    a = face.axis
    taxes = tuple(t for t in range(dom.dim) if t != a)
    face_domain = ParamDomain(
        names=tuple(dom.names[t] for t in taxes),
        lower=tuple(dom.lower[t] for t in taxes),
        upper=tuple(dom.upper[t] for t in taxes),
        periodic=tuple(dom.periodic[t] for t in taxes),
        resolution=tuple(dom.resolution[t] for t in taxes),
    )
    g_f = restrict(m, m.metric.g, face)
    ginv_f = restrict(m, m.metric.ginv, face)
    tax = list(taxes)
    gbar = g_f[..., tax, :][..., :, tax]
    gbar = symmetrize_pair(np.ascontiguousarray(gbar))
    gbar_inv = symmetrize_pair(np.linalg.inv(gbar))
    area = np.sqrt(np.linalg.det(gbar))
    sign = 1.0 if face.side == 1 else -1.0
    nu = sign * ginv_f[..., :, a] / np.sqrt(ginv_f[..., a, a])[..., None]
    gamma_f = restrict(m, calculus.christoffel(m), face)
    # cov[..., alpha, k] = d_alpha nu^k + Gamma^k_{alpha m} nu^m
    nt = len(taxes)
    cov = np.empty(face_domain.shape + (nt, dom.dim))
    for alpha, t in enumerate(taxes):
        D = face_domain.deriv_matrix(alpha, 1)
        dnu = stencils.apply_along_axis(D, nu, alpha)
        cov[..., alpha, :] = dnu + np.einsum(
            "...km,...m->...k", gamma_f[..., :, t, :], nu, optimize=True
        )
    II = np.einsum("...kb,...ak->...ab", g_f[..., :, tax], cov, optimize=True)
    II = symmetrize_pair(II)
    H = np.einsum("...ab,...ab->...", gbar_inv, II, optimize=True)
    phi_f = restrict(m, m.phi.values, face)
    V_f = restrict(m, m.V.values, face)
    bg = BoundaryGeometry(
        parent=m,
        face=face,
        tangential_axes=taxes,
        face_domain=face_domain,
        gbar=gbar,
        gbar_inv=gbar_inv,
        area_element=area,
        nu=nu,
        II=II,
        H=H,
        phi=phi_f,
        V=V_f,
        phi_nu=None,
        V_nu=None,
    )
    object.__setattr__(bg, "phi_nu", bg.normal_derivative(m.phi.values))
    object.__setattr__(bg, "V_nu", bg.normal_derivative(m.V.values))
    cache[key] = bg
    return bg


def all_boundary_geometry(m: ChartManifold) -> list:
    if not m.has_boundary:
        raise NoBoundary("manifold is closed")
    return [boundary_geometry(m, f) for f in m.boundary_faces]


def min_generalized_eig_face(bg: BoundaryGeometry, T: np.ndarray) -> np.ndarray:
    L = np.linalg.cholesky(bg.gbar)
    Linv = np.linalg.inv(L)
    A = Linv @ T @ np.swapaxes(Linv, -1, -2)
    return np.linalg.eigvalsh(symmetrize_pair(A))[..., 0]


def hypothesis_constants(m: ChartManifold):
    """(c1, c2): min over the boundary of the smallest eigenvalue of
    V * II_V relative to gbar, and of the weighted mean curvature H_phi."""
    c1 = np.inf
    c2 = np.inf
    for bg in all_boundary_geometry(m):
        eigs = min_generalized_eig_face(bg, bg.V[..., None, None] * bg.II_V)
        c1 = min(c1, float(np.min(eigs)))
        c2 = min(c2, float(np.min(bg.H_phi)))
    return c1, c2


def umbilicity_defect(m: ChartManifold) -> float:
    """max over the boundary of |II - (H/(n-1)) gbar| in the induced norm."""
    from ._kernels import tensor_norm2

    worst = 0.0
    for bg in all_boundary_geometry(m):
        nt = m.dim - 1
        dev = bg.II - (bg.H / nt)[..., None, None] * bg.gbar
        worst = max(worst, float(np.sqrt(np.max(tensor_norm2(bg.gbar_inv, dev)))))
    return worst


def mean_curvature_spread(m: ChartManifold) -> float:
    vals = [float(np.ptp(bg.H)) for bg in all_boundary_geometry(m)]
    return max(vals)
