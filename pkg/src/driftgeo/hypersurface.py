"""Closed hypersurfaces embedded in space forms, and almost-Schur audits.

A hypersurface is given by a parametrization of a closed chart into the
model of the space form: Euclidean R^{n+1} (curvature 0), the unit
sphere in R^{n+2} (curvature 1), or the hyperboloid in Minkowski
R^{n+1,1} (curvature -1).  Induced metric, normal, and second
fundamental form come from chart derivatives of the parametrization;
the normal is oriented so the average mean curvature is nonnegative,
which makes round spheres have positive principal curvatures.

The almost-Schur audits all route through one inequality for a
symmetric 2-tensor T whose divergence is a constant multiple of the
gradient of its trace:

    ((n c - 1)^2 / n^2) * int V (trT - avg_V trT)^2 dmu
        <=  schur_constant(n, K1, K2, eta1) * int V |T - (trT/n) g|^2 dmu

with K2 = max V |grad phi|^2 and eta1 the first nonzero eigenvalue of
the weighted closed problem.  The individual targets differ only in the
tensor and its drift constant c.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import spectral
from ._kernels import tensor_norm2
from .audits import (
    Hypothesis,
    _build_report,
    _psd_hypothesis,
    diagnostic,
    schur_constant,
)
from .calculus import (
    christoffel,
    d_values,
    grad_covector,
    hat_ric,
    hessian_noise_floor,
    min_generalized_eigenvalue,
    phi_analysis,
    ricci,
    scalar_curvature,
)
from .chart import (
    ChartManifold,
    MetricField,
    ParamDomain,
    ScalarField,
    symmetrize_pair,
)
from .errors import (
    DegenerateImmersion,
    DegenerateMetric,
    DimensionTooLow,
    InvalidTarget,
)
from .integrate import integrate_weighted_volume

MODEL_TOL = 1e-10

# Almost-Schur targets: name -> drift constant of the divergence identity
# div T = c * grad(tr T).  The tensor itself depends on the target.
TARGET_DRIFT = {
    "H": 1.0,          # second fundamental form; Codazzi in a space form
    "S_r": 0.0,        # Newton transforms are divergence free
    "R": 0.5,          # Ricci; contracted second Bianchi identity
    "sigma_k": 0.0,    # intrinsic Newton tensors, conformally flat case
    "tensor": None,    # caller supplies c
}


def _bilinear_diag(c: int, amb: int) -> np.ndarray:
    d = np.ones(amb)
    if c == -1:
        d[0] = -1.0
    return d


def _model_defect(Xv: np.ndarray, c: int, bdiag: np.ndarray) -> float:
    if c == 0:
        return 0.0
    q = np.einsum("...a,a,...a->...", Xv, bdiag, Xv)
    return float(np.max(np.abs(q - float(c))))


def _cofactor_orthogonal(rows: np.ndarray) -> np.ndarray:
    """Vector orthogonal (Euclidean) to the k row vectors in R^{k+1}."""
    amb = rows.shape[-1]
    comps = []
    for k in range(amb):
        sub = np.delete(rows, k, axis=-1)
        comps.append(((-1.0) ** k) * np.linalg.det(sub))
    return np.stack(comps, axis=-1)


@dataclass(frozen=True)
class EmbeddedHypersurface:
    """Induced geometry of one closed parametrized hypersurface."""

    domain: ParamDomain
    c: int                    # ambient curvature sign
    ambient: np.ndarray       # (..., A) model coordinates
    tangents: np.ndarray      # (..., n, A)
    normal: np.ndarray        # (..., A), unit, mean-convex orientation
    metric: MetricField
    II: np.ndarray            # (..., n, n) covariant second fundamental form
    shape: np.ndarray         # (..., n, n) mixed shape operator
    kappa: np.ndarray         # (..., n) principal curvatures, ascending
    H: np.ndarray             # (...,) mean curvature, sum of kappa
    model_defect: float
    core_area: float          # excised polar caps, quadrature metadata
    label: str

    @property
    def dim(self) -> int:
        return self.domain.dim

    def manifold(self, phi_fn=None, V_fn=None) -> ChartManifold:
        """Closed chart manifold carrying the induced metric.

        phi_fn / V_fn are evaluated on the parameter meshes; defaults are
        the unweighted case phi = 0, V = 1.  The default manifold is
        cached so repeated audits share curvature and operator state.
        """
        plain = phi_fn is None and V_fn is None
        if plain and hasattr(self, "_plain_manifold"):
            return object.__getattribute__(self, "_plain_manifold")
        meshes = self.domain.meshes()
        shape = self.domain.shape
        phi_vals = np.zeros(shape) if phi_fn is None else np.broadcast_to(
            np.asarray(phi_fn(*meshes), dtype=float), shape
        ).copy()
        V_vals = np.ones(shape) if V_fn is None else np.broadcast_to(
            np.asarray(V_fn(*meshes), dtype=float), shape
        ).copy()
        m = ChartManifold(
            self.domain,
            self.metric,
            ScalarField(self.domain, phi_vals),
            ScalarField(self.domain, V_vals),
            boundary_faces=(),
            core_volume=self.core_area,
            label=self.label,
        )
        if plain:
            object.__setattr__(self, "_plain_manifold", m)
        return m

    def self_adjointness_defect(self) -> float:
        """Asymmetry of g . shape, which vanishes for a true shape operator."""
        gh = np.einsum("...ik,...kj->...ij", self.metric.g, self.shape)
        scale = float(np.max(np.abs(gh))) + 1e-30
        return float(np.max(np.abs(gh - np.swapaxes(gh, -1, -2)))) / scale

    def codazzi_defect(self) -> float:
        """max |div II - grad H| in the induced norm; 0 in space forms."""
        return divergence_defect(self.manifold(), self.II, 1.0)


def embed_and_curvatures(domain: ParamDomain, X, c: int = 0,
                         label: str = "hypersurface") -> EmbeddedHypersurface:
    """Build the induced geometry of X: domain -> R^{n+1}(c).

    X takes the parameter meshes and returns the ambient components
    (sequence or stacked last-axis array): n+1 of them for c = 0, n+2
    model coordinates for c = +-1.  Raises DegenerateImmersion when the
    induced metric degenerates or the image leaves the model surface.
    """
    if c not in (-1, 0, 1):
        raise ValueError(f"ambient curvature must be -1, 0, or 1, got {c}")
    dom = domain
    n = dom.dim
    amb = n + 1 + (1 if c != 0 else 0)
    meshes = dom.meshes()
    comps = X(*meshes)
    if isinstance(comps, np.ndarray) and comps.shape[-1:] == (amb,):
        Xv = np.asarray(comps, dtype=float)
    else:
        Xv = np.stack(
            [np.broadcast_to(np.asarray(cmp, dtype=float), dom.shape) for cmp in comps],
            axis=-1,
        )
    if Xv.shape != dom.shape + (amb,):
        raise ValueError(
            f"parametrization returned shape {Xv.shape}, expected {dom.shape + (amb,)}"
        )
    bdiag = _bilinear_diag(c, amb)
    defect = _model_defect(Xv, c, bdiag)
    if defect > MODEL_TOL:
        raise DegenerateImmersion(
            f"image leaves the ambient model by {defect:.3g} (tolerance {MODEL_TOL})"
        )
    if c == -1 and np.min(Xv[..., 0]) <= 0:
        raise DegenerateImmersion("hyperboloid model requires a positive first coordinate")

    tang = np.empty(dom.shape + (n, amb))
    for i in range(n):
        for a in range(amb):
            tang[..., i, a] = d_values(dom, Xv[..., a], i, 1)
    g = np.einsum("...ia,a,...ja->...ij", tang, bdiag, tang, optimize=True)
    try:
        metric = MetricField(dom, symmetrize_pair(g))
    except DegenerateMetric as exc:
        raise DegenerateImmersion(f"induced metric degenerates: {exc}") from exc

    second = np.empty(dom.shape + (n, n, amb))
    for a in range(amb):
        for i in range(n):
            second[..., i, i, a] = d_values(dom, Xv[..., a], i, 2)
            for j in range(i + 1, n):
                mixed = d_values(dom, tang[..., j, a], i, 1)
                second[..., i, j, a] = mixed
                second[..., j, i, a] = mixed

    if c == 0:
        rows = tang
    else:
        rows = np.concatenate([Xv[..., None, :], tang], axis=-2)
    w = _cofactor_orthogonal(rows)
    normal = w * bdiag  # raise the index of the cofactor covector
    nn = np.einsum("...a,a,...a->...", normal, bdiag, normal)
    if np.min(nn) <= 1e-24:
        raise DegenerateImmersion("normal direction degenerates (rank-deficient Jacobian)")
    normal = normal / np.sqrt(nn)[..., None]

    II = np.einsum("...ija,a,...a->...ij", second, bdiag, normal, optimize=True)
    II = symmetrize_pair(II)
    H = np.einsum("...ij,...ij->...", metric.ginv, II, optimize=True)
    if float(np.sum(H * metric.sqrt_det)) < 0.0:
        normal = -normal
        II = -II
        H = -H

    shape_op = np.einsum("...ik,...kj->...ij", metric.ginv, II, optimize=True)
    L = np.linalg.cholesky(metric.g)
    Linv = np.linalg.inv(L)
    kappa = np.linalg.eigvalsh(symmetrize_pair(Linv @ II @ np.swapaxes(Linv, -1, -2)))

    return EmbeddedHypersurface(
        domain=dom, c=c, ambient=Xv, tangents=tang, normal=normal,
        metric=metric, II=II, shape=shape_op, kappa=kappa, H=H,
        model_defect=defect, core_area=0.0, label=label,
    )


# ------------------------------------------------- symmetric curvature data


def elementary_symmetric(vals: np.ndarray) -> np.ndarray:
    """e_r of the last axis for r = 0..n, stacked on a new last axis."""
    n = vals.shape[-1]
    e = np.zeros(vals.shape[:-1] + (n + 1,))
    e[..., 0] = 1.0
    for i in range(n):
        x = vals[..., i]
        for r in range(min(i + 1, n), 0, -1):
            e[..., r] = e[..., r] + x * e[..., r - 1]
    return e


@dataclass(frozen=True)
class SymmetricFunctionData:
    """Elementary symmetric functions and Newton transforms of one operator.

    values[..., r] is e_r of the operator's eigenvalues; transforms[r] is
    the mixed r-th Newton transform, satisfying tr = (n - r) * values[..., r].
    """

    values: np.ndarray
    transforms: tuple
    trace_defect: float
    source: str

    @property
    def order(self) -> int:
        return self.values.shape[-1] - 1


def _newton_from_operator(op_mixed: np.ndarray, eigs: np.ndarray, source: str):
    n = op_mixed.shape[-1]
    e = elementary_symmetric(eigs)
    eye = np.broadcast_to(np.eye(n), op_mixed.shape)
    transforms = [np.array(np.broadcast_to(np.eye(n), op_mixed.shape))]
    for r in range(1, n + 1):
        transforms.append(
            e[..., r, None, None] * eye
            - np.einsum("...ik,...kj->...ij", op_mixed, transforms[r - 1], optimize=True)
        )
    defect = 0.0
    for r in range(n + 1):
        tr = np.einsum("...ii->...", transforms[r])
        defect = max(defect, float(np.max(np.abs(tr - (n - r) * e[..., r]))))
    return SymmetricFunctionData(e, tuple(transforms), defect, source)


def newton_transforms(hs: EmbeddedHypersurface) -> SymmetricFunctionData:
    """r-mean curvatures S_r = e_r(kappa) and Newton transforms of the shape
    operator, via the recursion P_r = S_r Id - shape . P_{r-1}."""
    return _newton_from_operator(hs.shape, hs.kappa, "shape")


def schouten_tensor(m: ChartManifold) -> np.ndarray:
    """Covariant Schouten tensor (Ric - R g / (2(n-1))) / (n-2); needs n >= 3."""
    n = m.dim
    if n < 3:
        raise DimensionTooLow(f"Schouten tensor needs dimension >= 3, got {n}")
    ric = ricci(m)
    R = scalar_curvature(m)
    return (ric - (R / (2.0 * (n - 1.0)))[..., None, None] * m.metric.g) / (n - 2.0)


def schouten_and_Tk(m: ChartManifold, k: int = None) -> SymmetricFunctionData:
    """sigma_r and intrinsic Newton tensors T^(r) of the Schouten tensor.

    Computes every order r = 0..n; k only validates that the requested
    order exists.  Closed manifolds only (curvature by chart differences).
    """
    if m.has_boundary:
        raise ValueError("intrinsic Newton tensors are audited on closed manifolds")
    n = m.dim
    A = schouten_tensor(m)
    if k is not None and not (0 <= k <= n):
        raise InvalidTarget(f"Newton tensor order {k} outside 0..{n}")
    A_mix = np.einsum("...ik,...kj->...ij", m.metric.ginv, A, optimize=True)
    L = np.linalg.cholesky(m.metric.g)
    Linv = np.linalg.inv(L)
    eigs = np.linalg.eigvalsh(symmetrize_pair(Linv @ A @ np.swapaxes(Linv, -1, -2)))
    return _newton_from_operator(A_mix, eigs, "schouten")


def divergence_defect(m: ChartManifold, T_cov: np.ndarray, drift_c: float) -> float:
    """max |div T - c d(tr T)|_g for a symmetric covariant 2-tensor.

    div T is the metric divergence on the first slot; the defect is the
    pointwise norm of the covector difference.
    """
    dom = m.domain
    n = m.dim
    gamma = christoffel(m)
    T_mix = np.einsum("...ik,...kj->...ij", m.metric.ginv, T_cov, optimize=True)
    div = np.zeros(dom.shape + (n,))
    for i in range(n):
        for j in range(n):
            div[..., j] += d_values(dom, T_mix[..., i, j], i, 1)
    gtrace = np.einsum("...iim->...m", gamma)
    div += np.einsum("...m,...mj->...j", gtrace, T_mix, optimize=True)
    div -= np.einsum("...mij,...im->...j", gamma, T_mix, optimize=True)
    trT = np.einsum("...ii->...", T_mix)
    defect = div - drift_c * grad_covector(dom, trT)
    norm2 = np.einsum("...ij,...i,...j->...", m.metric.ginv, defect, defect, optimize=True)
    return float(np.sqrt(np.max(norm2)))


# ----------------------------------------------------- the almost-Schur audit


def _target_tensor(target, m, hypersurface, tensor, drift_c, r):
    """(covariant tensor, trace field, drift constant, report name)."""
    if target == "H":
        if hypersurface is None:
            raise InvalidTarget("target 'H' needs the embedded hypersurface")
        return hypersurface.II, hypersurface.H, 1.0, "almost-schur-mean-curvature"
    if target == "S_r":
        if hypersurface is None:
            raise InvalidTarget("target 'S_r' needs the embedded hypersurface")
        n = m.dim
        if r is None or not (2 <= r <= n):
            raise InvalidTarget(f"target 'S_r' needs 2 <= r <= {n}, got {r}")
        data = newton_transforms(hypersurface)
        P_cov = np.einsum(
            "...ik,...kj->...ij", m.metric.g, data.transforms[r], optimize=True
        )
        trace = (n - r) * data.values[..., r]
        return symmetrize_pair(P_cov), trace, 0.0, f"almost-schur-r-mean-curvature-{r}"
    if target == "R":
        return ricci(m), scalar_curvature(m), 0.5, "almost-schur-scalar-curvature"
    if target == "sigma_k":
        n = m.dim
        if r is None or not (2 <= r <= n):
            raise InvalidTarget(f"target 'sigma_k' needs 2 <= k <= {n}, got {r}")
        data = schouten_and_Tk(m, r)
        T_cov = np.einsum(
            "...ik,...kj->...ij", m.metric.g, data.transforms[r], optimize=True
        )
        trace = (n - r) * data.values[..., r]
        return symmetrize_pair(T_cov), trace, 0.0, f"almost-schur-sigma-{r}"
    if target == "tensor":
        if tensor is None or drift_c is None:
            raise InvalidTarget("target 'tensor' needs tensor values and drift_c")
        T_cov = symmetrize_pair(np.asarray(tensor, dtype=float))
        trace = np.einsum("...ij,...ij->...", m.metric.ginv, T_cov, optimize=True)
        return T_cov, trace, float(drift_c), "almost-schur-tensor"
    raise InvalidTarget(f"unknown almost-Schur target {target!r}")


def audit_almost_schur(target: str, m: ChartManifold, K1: float = 0.0,
                       r: int = None, hypersurface: EmbeddedHypersurface = None,
                       tensor=None, drift_c: float = None,
                       conformally_flat: bool = False):
    """Audit one almost-Schur inequality on a closed weighted manifold.

    target selects the tensor: "H" (second fundamental form of the given
    hypersurface), "S_r" (its r-th Newton transform, order r), "R"
    (intrinsic Ricci), "sigma_k" (intrinsic Newton tensor of the Schouten
    tensor, order r, valid on conformally flat manifolds - asserted by
    the caller, not verified), or "tensor" (caller-supplied values with
    drift constant drift_c).

    The hypothesis V hat_ric(inf) >= -(n-1) K1 g is checked numerically;
    K2 and eta1 are computed from m.  The divergence identity
    div T = c grad(tr T) is measured and reported as a diagnostic.
    """
    if m.has_boundary:
        raise ValueError("almost-Schur audits need a closed manifold")
    if K1 < 0.0:
        raise ValueError("K1 must be nonnegative")
    n = m.dim
    T_cov, trace, c_drift, name = _target_tensor(target, m, hypersurface, tensor, drift_c, r)

    # hypothesis: V hat_ric_{phi,inf} + (n-1) K1 g is PSD
    VT = m.V.values[..., None, None] * hat_ric(m, math.inf).values
    shifted = VT + (n - 1.0) * K1 * m.metric.g
    min_eig = float(np.min(min_generalized_eigenvalue(m, shifted)))
    tr_shift = np.einsum("...ij,...ij->...", m.metric.ginv, shifted, optimize=True)
    scale = float(np.max(np.abs(tr_shift))) / n
    hyp_k1 = _psd_hypothesis("V_hat_ric_K1_lower_bound", min_eig, scale,
                             hessian_noise_floor(m))
    eig_vt = float(np.min(min_generalized_eigenvalue(m, VT)))
    k1_min = max(0.0, -eig_vt / (n - 1.0))

    pa = phi_analysis(m)
    grad_phi2 = np.einsum("...i,...i->...", pa.grad, pa.df, optimize=True)
    K2 = float(np.max(m.V.values * grad_phi2))
    K2 = max(K2, 0.0)  # clip round-off from the constant-phi case
    eta1 = spectral.eigen_closed(m).eigenvalue
    C = schur_constant(n, K1, K2, eta1)

    vol = integrate_weighted_volume(m, m.V.values)
    avg = integrate_weighted_volume(m, m.V.values * trace) / vol
    lhs_factor = (n * c_drift - 1.0) ** 2 / n ** 2
    lhs = lhs_factor * integrate_weighted_volume(m, m.V.values * (trace - avg) ** 2)
    traceless = T_cov - (trace / n)[..., None, None] * m.metric.g
    rhs = C * integrate_weighted_volume(
        m, m.V.values * tensor_norm2(m.metric.ginv, traceless)
    )

    hyps = [hyp_k1]
    if target == "sigma_k":
        hyps.append(Hypothesis("conformally_flat_asserted",
                               bool(conformally_flat), float(bool(conformally_flat))))
    hyps += [
        diagnostic("smallest_admissible_K1", k1_min),
        diagnostic("K2", K2),
        diagnostic("eta1", eta1),
        diagnostic("schur_constant", C),
        diagnostic("divergence_defect", divergence_defect(m, T_cov, c_drift)),
    ]
    return _build_report(name, lhs, rhs, hyps, direction="le")


# ------------------------------------------------------- hypersurface catalog


def _odd(k: int) -> int:
    return k if k % 2 == 1 else k + 1


def _polar_domain(size: int, n_phi: int, names=("theta", "phi")) -> ParamDomain:
    # colatitude stops half a spacing short of both poles
    size = _odd(size)
    h = math.pi / size
    return ParamDomain(
        names=names,
        lower=(0.5 * h, 0.0),
        upper=(math.pi - 0.5 * h, 2.0 * math.pi),
        periodic=(False, True),
        resolution=(size, n_phi),
    )


def sphere2(size: int = 33, rho: float = 1.0, n_phi: int = None) -> EmbeddedHypersurface:
    """Round sphere of radius rho in R^3; kappa = (1/rho, 1/rho)."""
    dom = _polar_domain(size, n_phi or 2 * _odd(size))
    hs = embed_and_curvatures(
        dom,
        lambda t, p: (rho * np.sin(t) * np.cos(p),
                      rho * np.sin(t) * np.sin(p),
                      rho * np.cos(t)),
        c=0, label=f"sphere2(rho={rho})",
    )
    eps = 0.5 * dom.spacing[0]
    return _with_core(hs, 2.0 * 2.0 * math.pi * rho * rho * (1.0 - math.cos(eps)))


def ellipsoid(size: int = 33, a: float = 1.0, b: float = 1.0,
              c_axis: float = 1.2, n_phi: int = None) -> EmbeddedHypersurface:
    """Triaxial ellipsoid in R^3 (default a prolate spheroid)."""
    dom = _polar_domain(size, n_phi or 2 * _odd(size))
    hs = embed_and_curvatures(
        dom,
        lambda t, p: (a * np.sin(t) * np.cos(p),
                      b * np.sin(t) * np.sin(p),
                      c_axis * np.cos(t)),
        c=0, label=f"ellipsoid({a},{b},{c_axis})",
    )
    eps = 0.5 * dom.spacing[0]
    return _with_core(hs, 2.0 * math.pi * a * b * eps * eps)


def torus_revolution(size: int = 33, R: float = 2.0, rho: float = 0.7) -> EmbeddedHypersurface:
    """Torus of revolution in R^3: kappa = (cos u/(R + rho cos u), 1/rho)."""
    if rho <= 0 or R <= rho:
        raise ValueError("need 0 < rho < R for an embedded torus")
    n_u = _odd(size) + 1  # periodic axes: any count >= stencil width
    dom = ParamDomain(
        names=("u", "v"),
        lower=(0.0, 0.0),
        upper=(2.0 * math.pi, 2.0 * math.pi),
        periodic=(True, True),
        resolution=(n_u, n_u),
    )
    return embed_and_curvatures(
        dom,
        lambda u, v: ((R + rho * np.cos(u)) * np.cos(v),
                      (R + rho * np.cos(u)) * np.sin(v),
                      rho * np.sin(u)),
        c=0, label=f"torus({R},{rho})",
    )


def geodesic_sphere_s3(size: int = 33, r0: float = 0.7, n_phi: int = None) -> EmbeddedHypersurface:
    """Geodesic sphere of radius r0 in the unit round 3-sphere; kappa = cot r0."""
    if not (0.0 < r0 < math.pi):
        raise ValueError("geodesic radius must lie in (0, pi)")
    dom = _polar_domain(size, n_phi or 2 * _odd(size))
    sr, cr = math.sin(r0), math.cos(r0)
    hs = embed_and_curvatures(
        dom,
        lambda t, p: (sr * np.sin(t) * np.cos(p),
                      sr * np.sin(t) * np.sin(p),
                      sr * np.cos(t),
                      cr * np.ones_like(t)),
        c=1, label=f"geodesic_sphere_s3(r0={r0})",
    )
    eps = 0.5 * dom.spacing[0]
    return _with_core(hs, 2.0 * 2.0 * math.pi * sr * sr * (1.0 - math.cos(eps)))


def geodesic_sphere_h3(size: int = 33, r0: float = 0.7, n_phi: int = None) -> EmbeddedHypersurface:
    """Geodesic sphere of radius r0 in hyperbolic 3-space; kappa = coth r0."""
    if r0 <= 0.0:
        raise ValueError("geodesic radius must be positive")
    dom = _polar_domain(size, n_phi or 2 * _odd(size))
    sr, cr = math.sinh(r0), math.cosh(r0)
    hs = embed_and_curvatures(
        dom,
        lambda t, p: (cr * np.ones_like(t),
                      sr * np.sin(t) * np.cos(p),
                      sr * np.sin(t) * np.sin(p),
                      sr * np.cos(t)),
        c=-1, label=f"geodesic_sphere_h3(r0={r0})",
    )
    eps = 0.5 * dom.spacing[0]
    return _with_core(hs, 2.0 * 2.0 * math.pi * sr * sr * (1.0 - math.cos(eps)))


def _with_core(hs: EmbeddedHypersurface, core_area: float) -> EmbeddedHypersurface:
    object.__setattr__(hs, "core_area", float(core_area))
    return hs


HYPERSURFACES = {
    "sphere2": (sphere2, "round sphere in R^3"),
    "ellipsoid": (ellipsoid, "triaxial ellipsoid in R^3"),
    "torus": (torus_revolution, "torus of revolution in R^3"),
    "geodesic-sphere-s3": (geodesic_sphere_s3, "geodesic sphere in the round S^3"),
    "geodesic-sphere-h3": (geodesic_sphere_h3, "geodesic sphere in hyperbolic 3-space"),
}


def make_hypersurface(name: str, size: int = None, **params) -> EmbeddedHypersurface:
    if name not in HYPERSURFACES:
        raise InvalidTarget(f"unknown hypersurface {name!r}; have {sorted(HYPERSURFACES)}")
    builder, _ = HYPERSURFACES[name]
    if size is not None:
        params["size"] = size
    return builder(**params)
