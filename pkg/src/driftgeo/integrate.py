"""Composite quadrature on chart grids and refinement-order estimation.

Non-periodic axes use composite Simpson (the grid builder guarantees odd
node counts); periodic axes use the trapezoid rule, which on a full period
is the plain rectangle sum and is spectrally accurate for smooth data.
Sums are plain numpy reductions (pairwise), so results are reproducible
for a fixed grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chart import ChartManifold, ParamDomain, ScalarField, volume_element
from .errors import InsufficientRefinements


def axis_weights(domain: ParamDomain, a: int) -> np.ndarray:
    n = domain.resolution[a]
    h = domain.spacing[a]
    if domain.periodic[a]:
        return np.full(n, h)
    w = np.full(n, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return w * (h / 3.0)


def quadrature_weights(domain: ParamDomain) -> np.ndarray:
    w = axis_weights(domain, 0)
    for a in range(1, domain.dim):
        w = np.multiply.outer(w, axis_weights(domain, a))
    return w


def integrate_values(domain: ParamDomain, values: np.ndarray) -> float:
    return float(np.sum(values * quadrature_weights(domain)))


def _as_values(f, shape) -> np.ndarray:
    if f is None:
        return np.ones(shape)
    if isinstance(f, ScalarField):
        return f.values
    return np.asarray(f, dtype=float)


def integrate_weighted_volume(m: ChartManifold, f=None) -> float:
    """Integral of f against the weighted measure e^{-phi} dv_g.

    The value is the raw quadrature over the chart box; any excised core
    contributes at most max|f| * m.core_volume, which callers fold into
    their tolerance rather than into the value.
    """
    vals = _as_values(f, m.domain.shape)
    return integrate_values(m.domain, vals * volume_element(m))


def core_tolerance(m: ChartManifold, f=None) -> float:
    vals = _as_values(f, m.domain.shape)
    weight = float(np.max(np.abs(vals) * np.exp(-m.phi.values)))
    return weight * m.core_volume


def integrate_boundary(bg, f=None, weighted: bool = False) -> float:
    """Integral over one boundary face against the induced measure.

    With weighted=True the induced measure carries the e^{-phi} factor,
    which is the measure appearing in every integration-by-parts boundary
    term of the weighted calculus.
    """
    vals = _as_values(f, bg.face_domain.shape)
    dens = bg.area_element
    if weighted:
        dens = dens * np.exp(-bg.phi)
    return integrate_values(bg.face_domain, vals * dens)


def integrate_boundary_total(m: ChartManifold, fields_by_face, weighted: bool = False) -> float:
    """Sum face integrals over the whole boundary; fields_by_face maps
    BoundaryGeometry -> values (or None for the constant 1)."""
    return float(sum(integrate_boundary(bg, v, weighted) for bg, v in fields_by_face))


# ------------------------------------------------------------ order estimation


@dataclass(frozen=True)
class OrderEstimate:
    """Least-squares slope of log(error) against log(h).

    plateau is set when trailing entries sat at round-off level and were
    excluded from the fit; n_used counts the entries that remained.
    """

    order: float
    plateau: bool
    n_used: int

    def __float__(self):
        return float(self.order)


def convergence_order(values, reference, hs, plateau_floor=None) -> OrderEstimate:
    values = np.asarray(values, dtype=float)
    hs = np.asarray(hs, dtype=float)
    if values.shape != hs.shape or values.ndim != 1:
        raise ValueError("values and hs must be 1-D of equal length")
    if len(values) < 3:
        raise InsufficientRefinements("need at least three refinement levels")
    errs = np.abs(values - float(reference))
    if plateau_floor is None:
        plateau_floor = 1e-14 * (1.0 + abs(float(reference)))
    usable = errs > plateau_floor
    plateau = bool(np.any(~usable))
    # keep the contiguous prefix above the floor (ordered coarse -> fine)
    keep = []
    for i in range(len(errs)):
        if not usable[i]:
            break
        keep.append(i)
    if len(keep) < 2:
        return OrderEstimate(math.inf, True, len(keep))
    x = np.log(hs[keep])
    y = np.log(errs[keep])
    slope = np.polyfit(x, y, 1)[0]
    return OrderEstimate(float(slope), plateau, len(keep))
