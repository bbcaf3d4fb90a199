"""Inequality audits with hypothesis verification and sharpness detection.

Each audit evaluates one geometric inequality on a chart manifold,
checks the inequality's hypotheses numerically, and reports both sides
with a signed relative margin.  Hypothesis failures are reported
in-band: the verdict becomes HYPOTHESIS_UNMET and the numbers are still
shown, so a reader can tell "inequality violated" apart from
"inequality not applicable".
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import spectral
from .boundary import (
    all_boundary_geometry,
    hypothesis_constants,
    mean_curvature_spread,
    min_generalized_eig_face,
    umbilicity_defect,
)
from .calculus import (
    _validate_mdim,
    hat_ric,
    hessian_noise_floor,
    min_generalized_eigenvalue,
)
from .chart import ChartManifold
from .errors import (
    InvalidDimensionParameter,
    NegativeDiscriminant,
    NoBoundary,
    NonpositiveEigenvalue,
)
from .integrate import integrate_boundary, integrate_weighted_volume

# A PASS requires signed slack >= -FAIL_TOL; the slack absorbs round-off
# but not discretization bias, which the catalog geometries keep positive.
FAIL_TOL = 1e-6
SHARP_TOL = 1e-3
# PSD checks tolerate -PSD_RTOL * trace-scale so exact-equality tensors
# (all eigenvalues 0 up to round-off) still count as nonnegative; the
# grid noise floor (see calculus.hessian_noise_floor) enters with a
# safety factor because flat geometries have trace 0 as well.
PSD_RTOL = 1e-8
PSD_NOISE_FACTOR = 50.0
# At an equality case the Wentzell upper-bound discriminant is exactly 0
# and discretization perturbs it either way; sqrt turns an O(h) wobble
# into O(sqrt h), so clamp |disc| to 0 inside this relative window (the
# downward clamp only tightens the bound) and raise only on negatives
# beyond it.
DISC_CLAMP_RTOL = 1e-3


class Hypothesis(NamedTuple):
    name: str
    satisfied: bool
    witness: float

    def as_dict(self):
        return {
            "name": self.name,
            "satisfied": bool(self.satisfied),
            "witness": float(self.witness),
        }

    @property
    def informational(self) -> bool:
        return self.name.startswith("diagnostic:")


def diagnostic(name: str, witness: float) -> Hypothesis:
    """Informational entry riding in the hypothesis list; never gates."""
    return Hypothesis("diagnostic:" + name, True, float(witness))


@dataclass(frozen=True)
class AuditReport:
    """One audited inequality.

    relative_margin = (rhs - lhs) / max(|lhs|, |rhs|) regardless of which
    way the inequality reads; `direction` records whether the statement is
    lhs <= rhs ("le") or lhs >= rhs ("ge") and is not serialized.
    """

    name: str
    lhs: float
    rhs: float
    relative_margin: float
    hypotheses: tuple
    sharp: bool
    verdict: str
    direction: str = "le"

    @property
    def hypotheses_met(self) -> bool:
        return all(h.satisfied for h in self.hypotheses if not h.informational)

    @property
    def slack(self) -> float:
        """Signed distance from violation; negative means violated."""
        if self.direction == "le":
            return self.relative_margin
        return -self.relative_margin

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "relative_margin": self.relative_margin,
            "hypotheses": [h.as_dict() for h in self.hypotheses],
            "sharp": self.sharp,
            "verdict": self.verdict,
        }


def relative_margin(lhs: float, rhs: float) -> float:
    if not (math.isfinite(lhs) and math.isfinite(rhs)):
        return math.nan
    scale = max(abs(lhs), abs(rhs))
    if scale == 0.0:
        return 0.0
    return (rhs - lhs) / scale


def _build_report(name, lhs, rhs, hypotheses, direction="le",
                  sharp_tol=SHARP_TOL, strict=False) -> AuditReport:
    lhs = float(lhs)
    rhs = float(rhs)
    margin = relative_margin(lhs, rhs)
    met = all(h.satisfied for h in hypotheses if not h.informational)
    if not met:
        verdict = "HYPOTHESIS_UNMET"
    else:
        slack = margin if direction == "le" else -margin
        if strict:
            verdict = "PASS" if slack > 0.0 else "FAIL"
        else:
            verdict = "FAIL" if (math.isfinite(slack) and slack < -FAIL_TOL) else "PASS"
    # Sharpness means "equality case detected", which presupposes the
    # theorem applies; strict bounds have no equality case at all.
    sharp = (not strict) and met and math.isfinite(margin) and abs(margin) < sharp_tol
    return AuditReport(name, lhs, rhs, margin, tuple(hypotheses), sharp, verdict, direction)


def _psd_hypothesis(name: str, min_eig: float, trace_scale: float,
                    noise_floor: float = 0.0) -> Hypothesis:
    tol = max(PSD_RTOL * abs(trace_scale), PSD_NOISE_FACTOR * noise_floor) + 1e-30
    return Hypothesis(name, bool(min_eig >= -tol), float(min_eig))


def _hat_ric_hypothesis(m: ChartManifold, mdim: float):
    T = hat_ric(m, mdim).values
    min_eig = float(np.min(min_generalized_eigenvalue(m, T)))
    trace = np.einsum("...ij,...ij->...", m.metric.ginv, T)
    scale = float(np.max(np.abs(trace))) / m.dim
    floor = hessian_noise_floor(m)
    return _psd_hypothesis("hat_ric_psd", min_eig, scale, floor), T


def audit_heintze_karcher(m: ChartManifold, mdim: float) -> AuditReport:
    """Volume vs inverse weighted mean curvature on the boundary:

        integral_M V dmu  <=  ((m-1)/m) integral_dM V / H_phi dsigma_w

    under hat_ric >= 0 and H_phi > 0.  Equality forces m = n and an
    umbilical boundary, so the umbilicity defect rides along as a
    diagnostic for sharp cases.
    """
    mdim = _validate_mdim(mdim, m.dim)
    faces = all_boundary_geometry(m)

    hyp_ric, _ = _hat_ric_hypothesis(m, mdim)
    c2 = min(float(np.min(bg.H_phi)) for bg in faces)
    hyp_h = Hypothesis("H_phi_positive", bool(c2 > 0.0), c2)

    lhs = integrate_weighted_volume(m, m.V.values)
    factor = 1.0 if math.isinf(mdim) else (mdim - 1.0) / mdim
    with np.errstate(divide="ignore", invalid="ignore"):
        rhs = factor * sum(
            integrate_boundary(bg, bg.V / bg.H_phi, weighted=True) for bg in faces
        )

    hyps = [hyp_ric, hyp_h, diagnostic("umbilicity_defect", umbilicity_defect(m))]
    return _build_report("heintze-karcher", lhs, rhs, hyps, direction="le")


def audit_minkowski(m: ChartManifold, mdim: float) -> AuditReport:
    """Weighted boundary area squared vs volume times total curvature:

        (integral_dM V dsigma_w)^2
            >=  (m/(m-1)) integral_M V dmu * integral_dM V H_phi dsigma_w

    under hat_ric >= 0 and II_V >= 0.  Note the direction: this audit
    reads lhs >= rhs, so a comfortable pass has a negative margin.
    """
    mdim = _validate_mdim(mdim, m.dim)
    faces = all_boundary_geometry(m)

    hyp_ric, _ = _hat_ric_hypothesis(m, mdim)
    ii_min = math.inf
    ii_scale = 0.0
    for bg in faces:
        eigs = min_generalized_eig_face(bg, bg.II_V)
        ii_min = min(ii_min, float(np.min(eigs)))
        trace = np.einsum("...ab,...ab->...", bg.gbar_inv, bg.II_V)
        ii_scale = max(ii_scale, float(np.max(np.abs(trace))) / max(m.dim - 1, 1))
    hyp_ii = _psd_hypothesis("II_V_psd", ii_min, ii_scale, hessian_noise_floor(m))

    area = sum(integrate_boundary(bg, bg.V, weighted=True) for bg in faces)
    lhs = area * area
    factor = 1.0 if math.isinf(mdim) else mdim / (mdim - 1.0)
    rhs = factor * integrate_weighted_volume(m, m.V.values) * sum(
        integrate_boundary(bg, bg.V * bg.H_phi, weighted=True) for bg in faces
    )

    hyps = [
        hyp_ric,
        hyp_ii,
        diagnostic("H_constancy_defect", mean_curvature_spread(m)),
        diagnostic("umbilicity_defect", umbilicity_defect(m)),
    ]
    return _build_report("minkowski", lhs, rhs, hyps, direction="ge")


def schur_constant(n: int, K1: float, K2: float, eta1: float) -> float:
    """Constant in the almost-Schur bounds:

        (n-1)/n + [(n-1) K1 + K2 + 2 sqrt((eta1 + (n-1) K1) K2)] / eta1

    K1 bounds the curvature from below, K2 = max V |grad phi|^2, and
    eta1 is the first nonzero weighted boundary eigenvalue.
    """
    if n < 2:
        raise InvalidDimensionParameter(f"need dimension >= 2, got {n}")
    if K1 < 0.0 or K2 < 0.0:
        raise ValueError("K1 and K2 must be nonnegative")
    if eta1 <= 0.0:
        raise NonpositiveEigenvalue(f"eta1 must be positive, got {eta1}")
    return (n - 1.0) / n + ((n - 1.0) * K1 + K2
                            + 2.0 * math.sqrt((eta1 + (n - 1.0) * K1) * K2)) / eta1


def _kterm(mdim: float, K: float) -> float:
    # (m-1) K; at m = inf only K = 0 keeps the bounds meaningful.
    if math.isinf(mdim):
        if K != 0.0:
            raise InvalidDimensionParameter("K > 0 requires a finite dimension parameter")
        return 0.0
    return (mdim - 1.0) * K


def audit_eigen_bounds(m: ChartManifold, bg=None, mdim: float = None,
                       K: float = 0.0, beta: float = 1.0) -> list:
    """Audit all four boundary-eigenvalue bounds in one pass.

    Returns exactly four reports, in order:
      1. boundary-eigenvalue-lower:  c1 c2 <= eta1
      2. wentzell-eigenvalue-upper:  lambda_{1,beta} <= beta eta1
             + ([2 eta1 + (m-1)K] + sqrt(disc)) / (2 c2)
      3. steklov-eigenvalue-lower:   c1 eta1 / (2 eta1 + (m-1)K) < p1 (strict)
      4. wentzell-eigenvalue-lower:  (c1/2)(1 + beta c2
             + sqrt(beta^2 c2^2 + 2 beta c2)) <= lambda_{1,beta}

    c1, c2 are the boundary convexity constants (V II_V >= c1 gbar,
    H_phi >= c2); bounds 1 and 4 additionally need hat_ric >= 0, bounds
    2 and 3 need V hat_ric >= -(m-1) K g, with K supplied by the caller
    and the smallest admissible K reported as a diagnostic.

    bg selects the face hosting the intrinsic eigenvalue eta1 (default:
    first boundary face).  Raises NegativeDiscriminant if the bound-2
    discriminant is negative beyond the equality-case clamp window.
    """
    if mdim is None:
        raise InvalidDimensionParameter("mdim is required")
    mdim = _validate_mdim(mdim, m.dim)
    if K < 0.0:
        raise ValueError("K must be nonnegative")
    if beta < 0.0:
        raise ValueError("beta must be nonnegative")
    faces = all_boundary_geometry(m)
    if bg is None:
        bg = faces[0]
    kterm = _kterm(mdim, K)

    c1, c2 = hypothesis_constants(m)
    hyp_c1 = Hypothesis("c1_positive", bool(c1 > 0.0), c1)
    hyp_c2 = Hypothesis("c2_positive", bool(c2 > 0.0), c2)

    hyp_ric, T = _hat_ric_hypothesis(m, mdim)

    # V hat_ric + (m-1) K g >= 0, plus the smallest K that would do.
    VT = m.V.values[..., None, None] * T
    eig_vt = float(np.min(min_generalized_eigenvalue(m, VT)))
    shifted = VT + kterm * m.metric.g
    eig_shift = float(np.min(min_generalized_eigenvalue(m, shifted)))
    trace = np.einsum("...ij,...ij->...", m.metric.ginv, shifted)
    scale_shift = float(np.max(np.abs(trace))) / m.dim
    hyp_k = _psd_hypothesis("V_hat_ric_K_lower_bound", eig_shift, scale_shift,
                            hessian_noise_floor(m))
    if math.isinf(mdim):
        k_min = 0.0 if eig_vt >= 0.0 else math.inf
    else:
        k_min = max(0.0, -eig_vt / (mdim - 1.0))
    diag_k = diagnostic("smallest_admissible_K", k_min)

    eta1 = spectral.eigen_boundary_weighted(m, bg).eigenvalue
    p1 = spectral.eigen_steklov(m).eigenvalue
    lam = spectral.eigen_wentzell(m, beta).eigenvalue

    reports = [
        _build_report(
            "boundary-eigenvalue-lower", c1 * c2, eta1,
            [hyp_c1, hyp_c2, hyp_ric], direction="le",
        )
    ]

    # Bound 2: the discriminant vanishes identically at the equality
    # case; clamp the near-zero window symmetrically so sqrt(disc) does
    # not amplify discretization error, and raise on genuine negatives.
    a_lin = 2.0 * eta1 + kterm
    disc = a_lin * a_lin - 4.0 * c1 * c2 * eta1
    disc_scale = max(a_lin * a_lin, abs(4.0 * c1 * c2 * eta1), 1e-30)
    if abs(disc) < DISC_CLAMP_RTOL * disc_scale:
        disc = 0.0
    elif disc < 0.0:
        raise NegativeDiscriminant(
            f"discriminant {disc:.6g} < 0 in the Wentzell upper bound"
        )
    if c2 != 0.0:
        upper = beta * eta1 + (a_lin + math.sqrt(disc)) / (2.0 * c2)
    else:
        upper = math.nan
    reports.append(
        _build_report(
            "wentzell-eigenvalue-upper", lam, upper,
            [hyp_c1, hyp_c2, hyp_k, diag_k,
             diagnostic("eta1", eta1), diagnostic("beta", beta)],
            direction="le",
        )
    )

    denom = 2.0 * eta1 + kterm
    steklov_bound = c1 * eta1 / denom if denom != 0.0 else math.nan
    reports.append(
        _build_report(
            "steklov-eigenvalue-lower", steklov_bound, p1,
            [hyp_c1, hyp_c2, hyp_k, diag_k, diagnostic("eta1", eta1)],
            direction="le", strict=True,
        )
    )

    arg = beta * c2 * (beta * c2 + 2.0)
    if arg >= 0.0:
        lower = 0.5 * c1 * (1.0 + beta * c2 + math.sqrt(arg))
    else:
        lower = math.nan
    reports.append(
        _build_report(
            "wentzell-eigenvalue-lower", lower, lam,
            [hyp_c1, hyp_c2, hyp_ric, diagnostic("beta", beta)],
            direction="le",
        )
    )
    return reports
