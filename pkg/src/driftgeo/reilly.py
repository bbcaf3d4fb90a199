"""Term-by-term evaluation of the weighted integral identity.

The identity couples three boundary integrals against the weighted boundary
measure with three interior integrals against d mu.  Every term is computed
independently from grid data, so a small residual genuinely certifies the
whole derivative/curvature/quadrature chain rather than an algebraic
cancellation.  On closed manifolds the boundary terms are zero and the same
residual tests the closed-manifold reduction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels, boundary, calculus, integrate
from .chart import ChartManifold, ScalarField


@dataclass(frozen=True)
class ReillyBreakdown:
    """The six integrals; they sum to zero for exact fields."""

    B_II: float
    B_H: float
    B_cross: float
    I_sq: float
    I_A: float
    I_ric: float

    @property
    def residual(self) -> float:
        return self.B_II + self.B_H + self.B_cross + self.I_sq + self.I_A + self.I_ric

    @property
    def scale(self) -> float:
        return max(
            abs(self.B_II), abs(self.B_H), abs(self.B_cross),
            abs(self.I_sq), abs(self.I_A), abs(self.I_ric),
        )

    def passes(self, h: float, C_tol: float = 10.0) -> bool:
        if self.scale == 0.0:
            return self.residual == 0.0
        return abs(self.residual) <= C_tol * self.scale * h ** 1.5


def _raised_scaled_gradient(m: ChartManifold, du: np.ndarray) -> np.ndarray:
    """V g^{ij} d_j u: the vector the quadratic forms are evaluated on."""
    up = np.einsum("...ij,...j->...i", m.metric.ginv, du, optimize=True)
    return m.V.values[..., None] * up


def _boundary_terms(m: ChartManifold, f: ScalarField, u: np.ndarray):
    B_II = B_H = B_cross = 0.0
    for bg in boundary.all_boundary_geometry(m) if m.has_boundary else []:
        V_b = bg.V
        u_b = boundary.restrict(m, u, bg.face)
        f_b = boundary.restrict(m, f.values, bg.face)
        u_nu = bg.normal_derivative(u)
        X = V_b[..., None] * bg.tangential_gradient(u_b)
        t_II = -V_b * _kernels.quad_form(bg.II_V, X)
        t_H = -V_b ** 3 * bg.H_phi * u_nu ** 2
        t_cross = -2.0 * V_b ** 2 * u_nu * bg.drift_operator(f_b)
        B_II += integrate.integrate_boundary(bg, t_II, weighted=True)
        B_H += integrate.integrate_boundary(bg, t_H, weighted=True)
        B_cross += integrate.integrate_boundary(bg, t_cross, weighted=True)
    return B_II, B_H, B_cross


def reilly_term_breakdown(m: ChartManifold, f: ScalarField) -> ReillyBreakdown:
    """All six integrals of the identity for the pair (f, V).

    Closed manifolds are allowed: the boundary terms are identically zero
    and the residual tests the closed-manifold form of the identity.
    """
    dfld = calculus.difference_fields(m, f)
    B_II, B_H, B_cross = _boundary_terms(m, f, dfld.u)
    V = m.V.values
    Wvec = _raised_scaled_gradient(m, dfld.du)
    hric = calculus.hat_ric(m, math.inf).values
    I_sq = integrate.integrate_weighted_volume(m, V * dfld.T_phi ** 2)
    I_A = -integrate.integrate_weighted_volume(
        m, V * _kernels.tensor_norm2(m.metric.ginv, dfld.A)
    )
    I_ric = -integrate.integrate_weighted_volume(
        m, V * _kernels.quad_form(hric, Wvec)
    )
    return ReillyBreakdown(B_II, B_H, B_cross, I_sq, I_A, I_ric)


@dataclass(frozen=True)
class CorollaryGap:
    """Value of the inequality gap plus its equality-case residual norms."""

    gap: float
    scale: float
    mdim: float
    trace_residual: float   # weighted L2 norm of A - (trA/n) g
    drift_residual: float   # weighted L2 norm of trA + n W / |mdim - n|; nan at mdim == n


def corollary_gap(m: ChartManifold, f: ScalarField, mdim: float) -> CorollaryGap:
    """Gap of the trace-decomposed inequality; nonnegative up to O(h^2).

    gap = boundary terms + int V [ ((mdim-1)/mdim) T_phi^2
          - hat-Ric_mdim(V grad(f/V), .) ] d mu
    """
    n = m.dim
    mdim = calculus._validate_mdim(mdim, n)
    dfld = calculus.difference_fields(m, f)
    B_II, B_H, B_cross = _boundary_terms(m, f, dfld.u)
    V = m.V.values
    Wvec = _raised_scaled_gradient(m, dfld.du)
    cm = 1.0 if math.isinf(mdim) else (mdim - 1.0) / mdim
    hric = calculus.hat_ric(m, mdim).values
    I_m_sq = integrate.integrate_weighted_volume(m, cm * V * dfld.T_phi ** 2)
    I_m_ric = -integrate.integrate_weighted_volume(m, V * _kernels.quad_form(hric, Wvec))
    gap = B_II + B_H + B_cross + I_m_sq + I_m_ric
    scale = max(abs(B_II), abs(B_H), abs(B_cross), abs(I_m_sq), abs(I_m_ric))
    trace_res = math.sqrt(
        max(
            integrate.integrate_weighted_volume(
                m, V * _kernels.tensor_norm2(m.metric.ginv, dfld.Aring)
            ),
            0.0,
        )
    )
    if mdim == n:
        drift_res = math.nan
    else:
        coeff = 0.0 if math.isinf(mdim) else n / abs(mdim - n)
        res5 = dfld.trA + coeff * dfld.W
        drift_res = math.sqrt(
            max(integrate.integrate_weighted_volume(m, V * res5 ** 2), 0.0)
        )
    return CorollaryGap(gap, scale, mdim, trace_res, drift_res)


def grid_parameter(m: ChartManifold) -> float:
    """Coarsest spacing across axes; the h in every tolerance policy."""
    return max(m.domain.spacing)


def identity_refinement(build, sizes, f_fn) -> tuple:
    """Run the breakdown on a family of refinements.

    build: size -> ChartManifold; f_fn: alias env -> node values.
    Returns (hs, relative_residuals, OrderEstimate of the absolute residuals).
    """
    hs = []
    rel = []
    res = []
    for size in sizes:
        m = build(size)
        env = m.alias_fields()
        f = ScalarField(m.domain, np.broadcast_to(
            np.asarray(f_fn(env), dtype=float), m.domain.shape).copy())
        bd = reilly_term_breakdown(m, f)
        hs.append(grid_parameter(m))
        res.append(abs(bd.residual))
        rel.append(abs(bd.residual) / bd.scale if bd.scale > 0 else 0.0)
    order = integrate.convergence_order(np.array(res), 0.0, np.array(hs))
    return np.array(hs), np.array(rel), order
