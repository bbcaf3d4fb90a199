"""Chart-represented weighted manifolds on tensor-product grids.

A manifold-with-boundary is a coordinate box with a metric sampled on a
uniform node-centered grid.  Non-periodic axes place nodes exactly on the
box faces; periodic axes omit the duplicate endpoint.  Charts with
coordinate singularities (poles of polar/spherical coordinates) are built
on a box that stops half a grid spacing short of the singular locus; the
excluded core volume is recorded so integration tolerances can account
for it.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional, Sequence

import numpy as np

from . import stencils
from .errors import DegenerateMetric, NonPositivePotential, ResolutionTooLow

MIN_RESOLUTION = 5  # stencil width; public charts enforce 8


@dataclass(frozen=True)
class Face:
    """One coordinate face of the chart box."""

    axis: int
    side: int  # 0 = lower end, 1 = upper end

    def __str__(self):
        return f"axis{self.axis}:{'upper' if self.side else 'lower'}"


@dataclass(frozen=True)
class ParamDomain:
    """Uniform tensor-product grid over a coordinate box.

    names: coordinate names, one per axis.
    lower/upper: box bounds per axis.
    periodic: per-axis periodicity; periodic axes identify upper with lower.
    resolution: node count per axis.  Non-periodic axes must be odd so the
    composite Simpson rule applies; the catalog constructors always choose
    odd counts.
    """

    names: tuple
    lower: tuple
    upper: tuple
    periodic: tuple
    resolution: tuple

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "lower", tuple(float(x) for x in self.lower))
        object.__setattr__(self, "upper", tuple(float(x) for x in self.upper))
        object.__setattr__(self, "periodic", tuple(bool(x) for x in self.periodic))
        object.__setattr__(self, "resolution", tuple(int(x) for x in self.resolution))
        n = len(self.names)
        if not (len(self.lower) == len(self.upper) == len(self.periodic) == len(self.resolution) == n):
            raise ValueError("per-axis tuples must share one length")
        if n < 1:
            raise ValueError("domain needs at least one axis")
        for a in range(n):
            if self.upper[a] <= self.lower[a]:
                raise ValueError(f"axis {a}: empty interval")
            if self.resolution[a] < MIN_RESOLUTION:
                raise ResolutionTooLow(
                    f"axis {a}: resolution {self.resolution[a]} < {MIN_RESOLUTION}"
                )
            if not self.periodic[a] and self.resolution[a] % 2 == 0:
                raise ValueError(
                    f"axis {a}: non-periodic axes need an odd node count "
                    "(composite Simpson quadrature)"
                )

    @property
    def dim(self) -> int:
        return len(self.names)

    @property
    def spacing(self) -> tuple:
        out = []
        for a in range(self.dim):
            span = self.upper[a] - self.lower[a]
            if self.periodic[a]:
                out.append(span / self.resolution[a])
            else:
                out.append(span / (self.resolution[a] - 1))
        return tuple(out)

    @property
    def shape(self) -> tuple:
        return tuple(self.resolution)

    def axis_nodes(self, a: int) -> np.ndarray:
        h = self.spacing[a]
        return self.lower[a] + h * np.arange(self.resolution[a])

    def meshes(self) -> list:
        axes = [self.axis_nodes(a) for a in range(self.dim)]
        return list(np.meshgrid(*axes, indexing="ij"))

    def deriv_matrix(self, a: int, order: int) -> np.ndarray:
        key = (a, order)
        cache = _DMAT_CACHE.setdefault(self, {})
        if key not in cache:
            cache[key] = stencils.derivative_matrix(
                self.resolution[a], self.spacing[a], order, self.periodic[a]
            )
        return cache[key]


_DMAT_CACHE: dict = {}


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ScalarField:
    """Grid samples of a scalar, optionally with the analytic evaluator."""

    domain: ParamDomain
    values: np.ndarray
    analytic: Optional[Callable] = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.domain.shape:
            raise ValueError(f"field shape {v.shape} != grid shape {self.domain.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("field contains non-finite values")
        object.__setattr__(self, "values", _freeze(v))

    @staticmethod
    def sample(domain: ParamDomain, fn: Callable) -> "ScalarField":
        vals = np.asarray(fn(*domain.meshes()), dtype=float)
        vals = np.broadcast_to(vals, domain.shape).copy()
        return ScalarField(domain, vals, analytic=fn)

    @staticmethod
    def constant(domain: ParamDomain, c: float) -> "ScalarField":
        return ScalarField(domain, np.full(domain.shape, float(c)), analytic=lambda *xs: np.full(xs[0].shape, float(c)))


@dataclass(frozen=True)
class TensorField:
    """Componentwise grid samples of a tensor; index axes trail the grid axes."""

    domain: ParamDomain
    values: np.ndarray
    valence: tuple  # (contravariant, covariant)

    def __post_init__(self):
        rank = sum(self.valence)
        v = np.asarray(self.values, dtype=float)
        expect = self.domain.shape + (self.domain.dim,) * rank
        if v.shape != expect:
            raise ValueError(f"tensor shape {v.shape} != {expect}")
        object.__setattr__(self, "values", _freeze(v))


def symmetrize_pair(t: np.ndarray) -> np.ndarray:
    """Exact bitwise symmetry in the trailing two axes via averaging."""
    return 0.5 * (t + np.swapaxes(t, -1, -2))


@dataclass(frozen=True)
class MetricField:
    """SPD metric samples with cached inverse and volume density."""

    domain: ParamDomain
    g: np.ndarray
    ginv: np.ndarray = dc_field(default=None, repr=False)
    sqrt_det: np.ndarray = dc_field(default=None, repr=False)

    def __post_init__(self):
        n = self.domain.dim
        g = np.asarray(self.g, dtype=float)
        if g.shape != self.domain.shape + (n, n):
            raise ValueError("metric component array has wrong shape")
        g = symmetrize_pair(g)
        if not np.all(np.isfinite(g)):
            raise DegenerateMetric("metric has non-finite entries")
        try:
            chol = np.linalg.cholesky(g)
        except np.linalg.LinAlgError as exc:
            raise DegenerateMetric(f"metric not SPD: {exc}") from exc
        det = np.prod(np.einsum("...ii->...i", chol), axis=-1) ** 2
        if np.any(det <= 0):
            raise DegenerateMetric("metric determinant non-positive")
        ginv = symmetrize_pair(np.linalg.inv(g))
        object.__setattr__(self, "g", _freeze(g))
        object.__setattr__(self, "ginv", _freeze(ginv))
        object.__setattr__(self, "sqrt_det", _freeze(np.sqrt(det)))

    @staticmethod
    def sample(domain: ParamDomain, fn: Callable) -> "MetricField":
        """fn(*meshes) -> (..., n, n) metric components."""
        comp = np.asarray(fn(*domain.meshes()), dtype=float)
        n = domain.dim
        comp = np.broadcast_to(comp, domain.shape + (n, n)).copy()
        return MetricField(domain, comp)


@dataclass(frozen=True)
class ChartManifold:
    """A weighted manifold (M, g, e^{-phi} dv, V) on one chart.

    boundary_faces lists the coordinate faces that belong to the manifold
    boundary; other non-periodic faces (excised cores, singular-axis
    offsets) carry no boundary condition and are differenced one-sidedly.
    core_volume bounds the Riemannian volume excluded by such offsets.
    singular_edges marks the offsets that sit against a coordinate
    singularity of polar type, as (axis, side) pairs with side 0 = lower;
    variational assemblies use it to restore the excised cap.
    """

    domain: ParamDomain
    metric: MetricField
    phi: ScalarField
    V: ScalarField
    boundary_faces: tuple = ()
    coord_aliases: dict = dc_field(default_factory=dict)
    core_volume: float = 0.0
    label: str = "chart"
    analytic_ricci: Optional[Callable] = None
    singular_edges: frozenset = frozenset()

    def __post_init__(self):
        if np.any(self.V.values <= 0):
            raise NonPositivePotential("V must be strictly positive")
        for f in self.boundary_faces:
            if self.domain.periodic[f.axis]:
                raise ValueError("periodic axes cannot carry boundary faces")
        edges = frozenset(self.singular_edges)
        for a, s in edges:
            if self.domain.periodic[a]:
                raise ValueError("periodic axes cannot carry singular edges")
            if any(f.axis == a and f.side == s for f in self.boundary_faces):
                raise ValueError("a boundary face cannot be a singular edge")
        object.__setattr__(self, "singular_edges", edges)
        object.__setattr__(self, "boundary_faces", tuple(self.boundary_faces))
        object.__setattr__(self, "_cache", {})

    @property
    def dim(self) -> int:
        return self.domain.dim

    @property
    def has_boundary(self) -> bool:
        return len(self.boundary_faces) > 0

    def cache(self) -> dict:
        return object.__getattribute__(self, "_cache")

    def alias_fields(self) -> dict:
        """Coordinate meshes plus derived aliases, for expression evaluation."""
        out = {name: mesh for name, mesh in zip(self.domain.names, self.domain.meshes())}
        out.update(self.coord_aliases)
        return out


def build_chart_manifold(
    domain: ParamDomain,
    metric_eval: Callable,
    phi_eval: Optional[Callable] = None,
    V_eval: Optional[Callable] = None,
    boundary_faces: Optional[Sequence[Face]] = None,
    coord_aliases: Optional[dict] = None,
    core_volume: float = 0.0,
    label: str = "chart",
    analytic_ricci: Optional[Callable] = None,
    singular_edges=(),
) -> ChartManifold:
    """Sample metric and weights on the grid and validate the bundle.

    By default every non-periodic face is a boundary face; pass an explicit
    list (possibly empty, for excised singular axes or closed manifolds)
    to override.
    """
    if domain.dim < 2:
        raise ValueError("public charts must have dimension >= 2")
    for a in range(domain.dim):
        if domain.resolution[a] < 8:
            raise ResolutionTooLow(f"axis {a}: public charts need resolution >= 8")
    metric = MetricField.sample(domain, metric_eval)
    phi = ScalarField.sample(domain, phi_eval) if phi_eval else ScalarField.constant(domain, 0.0)
    V = ScalarField.sample(domain, V_eval) if V_eval else ScalarField.constant(domain, 1.0)
    if boundary_faces is None:
        boundary_faces = [
            Face(a, s) for a in range(domain.dim) if not domain.periodic[a] for s in (0, 1)
        ]
    return ChartManifold(
        domain,
        metric,
        phi,
        V,
        tuple(boundary_faces),
        coord_aliases or {},
        core_volume,
        label,
        analytic_ricci,
        frozenset(singular_edges),
    )


def volume_element(m: ChartManifold) -> np.ndarray:
    """Weighted volume density e^{-phi} sqrt(det g) at every node."""
    return np.exp(-m.phi.values) * m.metric.sqrt_det
