"""Finite-difference tensor calculus on a chart.

Conventions:
  Gamma^k_ij = (1/2) g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)
  Ric_jk     = d_l Gamma^l_jk - d_j Gamma^l_lk
               + Gamma^l_lm Gamma^m_jk - Gamma^l_jm Gamma^m_lk
  hess(f)_ij = d_i d_j f - Gamma^k_ij d_k f
  drift Laplacian: lap_phi f = lap f - <grad phi, grad f>

With these signs the round sphere has Ric = (n-1)/rho^2 * g.  The Ricci
tensor is assembled by differencing the Christoffel field, so its accuracy
near non-periodic faces is one order below the interior stencils.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels, stencils
from .chart import ChartManifold, ScalarField, TensorField, symmetrize_pair
from .errors import (
    EqualDimensionResidualUndefined,
    InvalidDimensionParameter,
    NonconstantPhiAtEqualDimension,
)


# ----------------------------------------------------------- raw derivatives


def d_values(domain, values: np.ndarray, axis: int, order: int = 1) -> np.ndarray:
    return stencils.apply_along_axis(domain.deriv_matrix(axis, order), values, axis)


def partial_derivative(f: ScalarField, axis: int, order: int = 1, axis2=None) -> ScalarField:
    """Grid derivative of a scalar field; axis2 selects a mixed second partial."""
    if axis2 is not None:
        if axis2 == axis:
            return partial_derivative(f, axis, order=2)
        out = d_values(f.domain, d_values(f.domain, f.values, axis, 1), axis2, 1)
        return ScalarField(f.domain, out)
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    return ScalarField(f.domain, d_values(f.domain, f.values, axis, order))


def grad_covector(domain, values: np.ndarray) -> np.ndarray:
    """(..., n) array of coordinate partials d_i f."""
    return np.stack([d_values(domain, values, a, 1) for a in range(domain.dim)], axis=-1)


def hessian_values(m: ChartManifold, values: np.ndarray, df: np.ndarray | None = None) -> np.ndarray:
    """Covariant Hessian components; exactly symmetric by construction."""
    dom = m.domain
    n = dom.dim
    if df is None:
        df = grad_covector(dom, values)
    H = np.empty(dom.shape + (n, n))
    for i in range(n):
        H[..., i, i] = d_values(dom, values, i, 2)
        for j in range(i + 1, n):
            mixed = d_values(dom, d_values(dom, values, i, 1), j, 1)
            H[..., i, j] = mixed
            H[..., j, i] = mixed
    gamma = christoffel(m)
    H -= np.einsum("...kij,...k->...ij", gamma, df, optimize=True)
    return symmetrize_pair(H)


# --------------------------------------------------------- curvature pipeline


def metric_first_derivatives(m: ChartManifold) -> np.ndarray:
    """dg[..., a, i, j] = d_a g_ij (not cached; large and transient)."""
    dom = m.domain
    n = dom.dim
    dg = np.empty(dom.shape + (n, n, n))
    for a in range(n):
        dg[..., a, :, :] = stencils.apply_along_axis(
            dom.deriv_matrix(a, 1), m.metric.g, a
        )
    return dg


def christoffel(m: ChartManifold) -> np.ndarray:
    cache = m.cache()
    if "gamma" not in cache:
        dg = metric_first_derivatives(m)
        cache["gamma"] = _kernels.christoffel(m.metric.ginv, dg)
        del dg
    return cache["gamma"]


def ricci(m: ChartManifold, numeric: bool = False) -> np.ndarray:
    """Ricci tensor values on the grid.

    Charts that carry a closed-form curvature (the catalog's flat and
    round geometries) return it directly; numeric=True forces the
    difference pipeline, which refinement studies exercise.
    """
    cache = m.cache()
    if not numeric and m.analytic_ricci is not None:
        if "ricci_exact" not in cache:
            vals = np.asarray(m.analytic_ricci(*m.domain.meshes()), dtype=float)
            target = m.domain.shape + (m.dim, m.dim)
            cache["ricci_exact"] = np.ascontiguousarray(np.broadcast_to(vals, target))
        return cache["ricci_exact"]
    if "ricci" not in cache:
        dom = m.domain
        n = dom.dim
        gamma = christoffel(m)
        ric = _kernels.ricci_gamma_terms(gamma)
        for l in range(n):
            ric += stencils.apply_along_axis(dom.deriv_matrix(l, 1), gamma[..., l, :, :], l)
        contracted = np.einsum("...lli->...i", gamma)
        for j in range(n):
            dcontr = stencils.apply_along_axis(dom.deriv_matrix(j, 1), contracted, j)
            ric[..., j, :] -= dcontr
        cache["ricci"] = symmetrize_pair(ric)
    return cache["ricci"]


def christoffel_and_curvature(m: ChartManifold):
    """(Gamma, Ric) as TensorFields; components cached on the manifold."""
    gam = TensorField(m.domain, christoffel(m), (1, 2))
    ric = TensorField(m.domain, ricci(m), (0, 2))
    return gam, ric


def scalar_curvature(m: ChartManifold) -> np.ndarray:
    return np.einsum("...ij,...ij->...", m.metric.ginv, ricci(m), optimize=True)


# ------------------------------------------------------ scalar-field analysis


@dataclass(frozen=True)
class FieldAnalysis:
    """Derivatives of one scalar field that several formulas share."""

    df: np.ndarray        # covector d_i f
    grad: np.ndarray      # vector g^{ij} d_j f
    hess: np.ndarray      # covariant Hessian
    lap: np.ndarray       # metric Laplacian
    drift_lap: np.ndarray  # lap - <grad phi, grad f>


def analyze(m: ChartManifold, values: np.ndarray, key=None) -> FieldAnalysis:
    cache = m.cache()
    if key is not None and ("analysis", key) in cache:
        return cache[("analysis", key)]
    df = grad_covector(m.domain, values)
    grad = np.einsum("...ij,...j->...i", m.metric.ginv, df, optimize=True)
    hess = hessian_values(m, values, df)
    lap = np.einsum("...ij,...ij->...", m.metric.ginv, hess, optimize=True)
    dphi = grad_covector(m.domain, m.phi.values)
    drift = lap - np.einsum("...ij,...i,...j->...", m.metric.ginv, dphi, df, optimize=True)
    out = FieldAnalysis(df, grad, hess, lap, drift)
    if key is not None:
        cache[("analysis", key)] = out
    return out


def hessian_and_laplacians(m: ChartManifold, f: ScalarField):
    """(hess f, lap f, drift-lap f) for a scalar field on m."""
    an = analyze(m, f.values)
    return (
        TensorField(m.domain, an.hess, (0, 2)),
        ScalarField(m.domain, an.lap),
        ScalarField(m.domain, an.drift_lap),
    )


def weight_analysis(m: ChartManifold) -> FieldAnalysis:
    return analyze(m, m.V.values, key="V")


def phi_analysis(m: ChartManifold) -> FieldAnalysis:
    return analyze(m, m.phi.values, key="phi")


def drift_ratio(m: ChartManifold) -> np.ndarray:
    """lap_phi V / V, the zeroth-order coefficient of the main operator."""
    return weight_analysis(m).drift_lap / m.V.values


# ----------------------------------------------------- curvature with weights


def _validate_mdim(mdim: float, n: int) -> float:
    if mdim is None:
        raise InvalidDimensionParameter("mdim must be a number or inf")
    mdim = float(mdim)
    if math.isnan(mdim):
        raise InvalidDimensionParameter("mdim is NaN")
    if math.isinf(mdim):
        return math.inf
    if 0.0 <= mdim < n:
        raise InvalidDimensionParameter(
            f"mdim={mdim} inadmissible: must lie in (-inf,0), [n,inf) or be inf (n={n})"
        )
    return mdim


def _phi_is_constant(m: ChartManifold) -> bool:
    p = m.phi.values
    return float(np.ptp(p)) <= 1e-13 * (1.0 + float(np.max(np.abs(p))))


def bakry_emery(m: ChartManifold, mdim: float) -> TensorField:
    """Generalized curvature Ric + hess(phi) - dphi x dphi / (mdim - n).

    mdim = inf drops the last term; mdim = n requires constant phi and
    degenerates to the plain Ricci tensor.
    """
    n = m.dim
    mdim = _validate_mdim(mdim, n)
    ric = ricci(m)
    if mdim == n:
        if not _phi_is_constant(m):
            raise NonconstantPhiAtEqualDimension(
                "mdim == dim requires a constant drift potential"
            )
        return TensorField(m.domain, ric, (0, 2))
    dphi = phi_analysis(m).df
    comp = ric + phi_analysis(m).hess
    if not math.isinf(mdim):
        comp = comp - np.einsum("...i,...j->...ij", dphi, dphi) / (mdim - n)
    return TensorField(m.domain, symmetrize_pair(comp), (0, 2))


def hat_ric(m: ChartManifold, mdim: float) -> TensorField:
    """Modified tensor (lap_phi V / V) g - hess(V)/V + bakry_emery(mdim)."""
    Va = weight_analysis(m)
    comp = (
        drift_ratio(m)[..., None, None] * m.metric.g
        - Va.hess / m.V.values[..., None, None]
        + bakry_emery(m, mdim).values
    )
    return TensorField(m.domain, symmetrize_pair(comp), (0, 2))


def min_generalized_eigenvalue(m: ChartManifold, T: np.ndarray) -> np.ndarray:
    """Pointwise smallest eigenvalue of T relative to the metric."""
    L = np.linalg.cholesky(m.metric.g)
    Linv = np.linalg.inv(L)
    A = Linv @ T @ np.swapaxes(Linv, -1, -2)
    return np.linalg.eigvalsh(symmetrize_pair(A))[..., 0]


def hat_ric_min_eig(m: ChartManifold, mdim: float) -> np.ndarray:
    return min_generalized_eigenvalue(m, hat_ric(m, mdim).values)


def hessian_noise_floor(m: ChartManifold) -> float:
    """Round-off level of curvature-type tensors on this grid.

    Second-derivative stencils applied to smooth fields carry cancellation
    noise of order eps/h_i^2 per axis, and contracting with the metric
    inverse amplifies it by g^{ii} (large near excised coordinate
    singularities).  Eigenvalue sign checks cannot resolve anything below
    this floor.
    """
    ginv = m.metric.ginv
    amp = 0.0
    for i, h in enumerate(m.domain.spacing):
        amp = max(amp, float(np.max(ginv[..., i, i])) / (h * h))
    return float(np.finfo(float).eps) * amp


# --------------------------------------------------------- Reilly-type fields


@dataclass(frozen=True)
class DifferenceFields:
    """Pointwise quantities built from the pair (f, V).

    A      : hess f - (f/V) hess V
    trA    : metric trace of A
    Aring  : traceless part of A
    u      : f / V
    du     : covector d(f/V)
    W      : V <grad phi, grad u>  (drift coupling scalar)
    T_phi  : drift-lap f - (f/V) drift-lap V  (equals trA - W)
    """

    A: np.ndarray
    trA: np.ndarray
    Aring: np.ndarray
    u: np.ndarray
    du: np.ndarray
    W: np.ndarray
    T_phi: np.ndarray


def difference_fields(m: ChartManifold, f: ScalarField) -> DifferenceFields:
    fa = analyze(m, f.values)
    Va = weight_analysis(m)
    ratio = f.values / m.V.values
    A = symmetrize_pair(fa.hess - ratio[..., None, None] * Va.hess)
    trA = np.einsum("...ij,...ij->...", m.metric.ginv, A, optimize=True)
    n = m.dim
    Aring = A - (trA / n)[..., None, None] * m.metric.g
    u = ratio
    du = grad_covector(m.domain, u)
    dphi = phi_analysis(m).df
    W = m.V.values * np.einsum("...ij,...i,...j->...", m.metric.ginv, dphi, du, optimize=True)
    T_phi = fa.drift_lap - ratio * Va.drift_lap
    return DifferenceFields(A, trA, Aring, u, du, W, T_phi)


def traceless_A(m: ChartManifold, f: ScalarField):
    """(A, trA, traceless A) as fields; trace of the traceless part vanishes
    to round-off by construction."""
    dfld = difference_fields(m, f)
    return (
        TensorField(m.domain, dfld.A, (0, 2)),
        ScalarField(m.domain, dfld.trA),
        TensorField(m.domain, dfld.Aring, (0, 2)),
    )


def equality_case_residuals(m: ChartManifold, f: ScalarField, mdim: float):
    """Residual fields of the two equality cases of the integral identity.

    res_trace  : A - (trA/n) g  (vanishes iff the Hessian difference is pure trace)
    res_drift  : trA + (n/|mdim-n|) W  (undefined at mdim == n)
    """
    n = m.dim
    mdim = _validate_mdim(mdim, n)
    if mdim == n:
        raise EqualDimensionResidualUndefined("residual undefined at mdim == dim")
    dfld = difference_fields(m, f)
    coeff = 0.0 if math.isinf(mdim) else n / abs(mdim - n)
    res5 = dfld.trA + coeff * dfld.W
    return (
        TensorField(m.domain, dfld.Aring, (0, 2)),
        ScalarField(m.domain, res5),
    )


def decomposition_sides(m: ChartManifold, f: ScalarField, mdim: float):
    """Both sides of the pointwise trace decomposition, for property tests.

    Left:  |A|^2 + Ric_phi(V grad u, V grad u)
    Right: |Aring|^2 + (1/mdim) T_phi^2 + Ric_{phi,mdim}(V grad u, .)
           + ((mdim-n)/(mdim n)) (trA + n W / (mdim-n))^2

    The square is stored in the algebraically expanded form, which agrees
    with the two-real-square-roots form for mdim > n and remains an exact
    perfect square for mdim < 0 (where the literal square-root cross term
    would carry the wrong sign).
    """
    n = m.dim
    mdim = _validate_mdim(mdim, n)
    dfld = difference_fields(m, f)
    ginv = m.metric.ginv
    Vgrad = m.V.values[..., None, None] * ginv  # raises du and scales by V
    Wvec = np.einsum("...ij,...j->...i", Vgrad, dfld.du, optimize=True)
    lhs = _kernels.tensor_norm2(ginv, dfld.A) + _kernels.quad_form(
        bakry_emery(m, math.inf).values, Wvec
    )
    rhs = _kernels.tensor_norm2(ginv, dfld.Aring) + _kernels.quad_form(
        bakry_emery(m, mdim).values, Wvec
    )
    if math.isinf(mdim):
        rhs = rhs + dfld.trA**2 / n
    elif mdim == n:
        rhs = rhs + dfld.T_phi**2 / n
    else:
        rhs = rhs + dfld.T_phi**2 / mdim
        a = (mdim - n) / (mdim * n)
        rhs = rhs + a * (dfld.trA + (n / (mdim - n)) * dfld.W) ** 2
    return lhs, rhs
