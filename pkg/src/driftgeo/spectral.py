"""Discrete weighted operator, boundary-value solves and eigenproblems.

Two assemblies coexist.  Boundary-value SOLVES use the strong operator
L f = drift-lap f - (drift-lap V / V) f, built from Kronecker products of
one-dimensional stencil matrices; its zero-order coefficient is taken from
the discrete operator itself, c = (L_raw V) / V, so the static potential V
lies in the kernel of L to round-off.

EIGENPROBLEMS use the weak (Gram) form in the quotient variable y = f/V:
the ground-state identity -int L(Vy) Vz dmu = int V^2 grad y . grad z dmu
turns every stiffness into D^T M D with diagonal M, which is symmetric
positive semidefinite by construction and gives excised chart edges the
natural zero-flux closure (an O(excised measure) perturbation) instead of
a one-sided strong row that no symmetrization can repair.  Boundary
eigenproblems share one face pencil (Gram stiffness + consistent P1 mass,
plus condensed pole-cap elements on excised polar edges), so the Steklov
quotient, the tangential quotient and the Wentzell combination are
simultaneously symmetric over the same mass:

    stiffness_wentzell = stiffness_steklov + beta * stiffness_tangential.

The consistent mass matters near sharp spectral inequalities: it biases
discrete Rayleigh quotients upward, so equality cases are approached from
the provable side instead of being undershot by O(h^2).  Closed-manifold
eigenproblems keep the cheaper lumped diagonal mass.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field as dc_field

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import boundary, calculus, integrate, stencils
from .chart import ChartManifold, ScalarField
from .errors import IncompatibleData, NoBoundary, NotClosed, SolverDivergence

DENSE_EIG_LIMIT = 4200
ZERO_EIG_RTOL = 1e-8
_LOBPCG_SEED = 20240811


# ------------------------------------------------------------------ assembly


def _kron_chain(mats) -> sp.csr_matrix:
    return functools.reduce(lambda a, b: sp.kron(a, b, format="csr"), mats)


def _axis_matrix(m: ChartManifold, axis: int, order: int) -> sp.csr_matrix:
    dom = m.domain
    return stencils.derivative_matrix_sparse(
        dom.resolution[axis], dom.spacing[axis], order, dom.periodic[axis]
    )


def _identity(n: int) -> sp.csr_matrix:
    return sp.identity(n, format="csr")


@dataclass
class DiscreteOperator:
    """Sparse L over flattened grid DOFs plus the boundary bookkeeping."""

    m: ChartManifold
    L: sp.csr_matrix               # full operator rows at every node
    c_vals: np.ndarray             # discrete (drift-lap V)/V, grid shape
    K1: list                       # first-derivative Kronecker factors per axis
    idx_boundary: np.ndarray       # concatenated per declared face
    idx_interior: np.ndarray
    face_slices: list              # (BoundaryGeometry, slice into idx_boundary)
    w_mu: np.ndarray               # weighted volume quadrature per node (flat)
    w_bnd: np.ndarray              # weighted boundary quadrature per boundary DOF
    flux: sp.csr_matrix | None     # rows of V (f/V)_nu over full DOFs
    row_scaling: dict = dc_field(default_factory=dict)

    @property
    def n_dof(self) -> int:
        return self.L.shape[0]

    def boundary_overlap(self) -> bool:
        return np.unique(self.idx_boundary).size != self.idx_boundary.size


def _face_flat_indices(m: ChartManifold, face) -> np.ndarray:
    idx = np.arange(int(np.prod(m.domain.shape))).reshape(m.domain.shape)
    return idx[boundary._face_slicer(m, face)].ravel()


def assemble_operator(m: ChartManifold) -> DiscreteOperator:
    """Build L = drift Laplacian minus the discrete kernel ratio.

    The second-order terms use the dedicated second-derivative stencil on
    the diagonal and products of first-derivative matrices off-diagonal,
    matching the pointwise calculus module so the two agree to round-off.
    """
    cache = m.cache()
    if "discrete_operator" in cache:
        return cache["discrete_operator"]
    dom = m.domain
    n = dom.dim
    N = int(np.prod(dom.shape))
    ginv = m.metric.ginv
    gamma = calculus.christoffel(m)
    dphi = calculus.phi_analysis(m).df

    eyes = [_identity(dom.resolution[a]) for a in range(n)]

    def chain(slot_mats: dict) -> sp.csr_matrix:
        return _kron_chain([slot_mats.get(a, eyes[a]) for a in range(n)])

    K1 = [chain({a: _axis_matrix(m, a, 1)}) for a in range(n)]
    K2 = [chain({a: _axis_matrix(m, a, 2)}) for a in range(n)]

    def diag(vals: np.ndarray) -> sp.csr_matrix:
        return sp.diags(np.asarray(vals, dtype=float).ravel(), format="csr")

    L_raw = sp.csr_matrix((N, N))
    for i in range(n):
        L_raw = L_raw + diag(ginv[..., i, i]) @ K2[i]
    for i in range(n):
        for j in range(i + 1, n):
            cross = chain({i: _axis_matrix(m, i, 1), j: _axis_matrix(m, j, 1)})
            L_raw = L_raw + diag(2.0 * ginv[..., i, j]) @ cross
    # b^k = -g^{ij} Gamma^k_{ij} - g^{kj} phi_j
    contracted = np.einsum("...ij,...kij->...k", ginv, gamma, optimize=True)
    drift = np.einsum("...kj,...j->...k", ginv, dphi, optimize=True)
    for k in range(n):
        L_raw = L_raw + diag(-(contracted[..., k] + drift[..., k])) @ K1[k]

    Vflat = m.V.values.ravel()
    c_flat = (L_raw @ Vflat) / Vflat
    L = (L_raw - diag(c_flat)).tocsr()

    w_mu = (integrate.quadrature_weights(dom) * np.exp(-m.phi.values) * m.metric.sqrt_det).ravel()

    face_slices = []
    idx_parts = []
    w_parts = []
    offset = 0
    if m.has_boundary:
        for bg in boundary.all_boundary_geometry(m):
            ids = _face_flat_indices(m, bg.face)
            nb = ids.size
            face_slices.append((bg, slice(offset, offset + nb)))
            idx_parts.append(ids)
            wq = integrate.quadrature_weights(bg.face_domain) * np.exp(-bg.phi) * bg.area_element
            w_parts.append(wq.ravel())
            offset += nb
    idx_boundary = np.concatenate(idx_parts) if idx_parts else np.array([], dtype=int)
    w_bnd = np.concatenate(w_parts) if w_parts else np.array([], dtype=float)
    mask = np.ones(N, dtype=bool)
    mask[idx_boundary] = False
    idx_interior = np.nonzero(mask)[0]

    flux = None
    if m.has_boundary:
        rows = []
        for (bg, sl), ids in zip(face_slices, idx_parts):
            nd = sp.csr_matrix((sl.stop - sl.start, N))
            for a in range(n):
                nd = nd + sp.diags(bg.nu[..., a].ravel()) @ K1[a][ids, :]
            ratio = (bg.V_nu / bg.V).ravel()
            trace = sp.csr_matrix(
                (np.ones(ids.size), (np.arange(ids.size), ids)), shape=(ids.size, N)
            )
            rows.append(nd - sp.diags(ratio) @ trace)
        flux = sp.vstack(rows, format="csr")

    op = DiscreteOperator(
        m=m,
        L=L,
        c_vals=c_flat.reshape(dom.shape),
        K1=K1,
        idx_boundary=idx_boundary,
        idx_interior=idx_interior,
        face_slices=face_slices,
        w_mu=w_mu,
        w_bnd=w_bnd,
        flux=flux,
        row_scaling={
            "dof_order": "C-order ravel of the grid",
            "mass_volume": "quadrature * exp(-phi) * sqrt(det g)",
            "mass_boundary": "face quadrature * exp(-phi) * area element",
        },
    )
    cache["discrete_operator"] = op
    return op


def apply_operator(m: ChartManifold, values: np.ndarray) -> np.ndarray:
    op = assemble_operator(m)
    return (op.L @ np.asarray(values, dtype=float).ravel()).reshape(m.domain.shape)


def _staggered_diff(n: int, h: float, periodic: bool) -> sp.csr_matrix:
    """Forward difference onto cell midpoints; rows n if periodic, n-1 else.

    Applied to a constant this is exactly zero (the two +-1/h entries of
    each row cancel identically), which keeps constants in the exact
    kernel of every Gram stiffness built from it.
    """
    inv = 1.0 / h
    if periodic:
        D = sp.diags([-inv, inv], [0, 1], shape=(n, n), format="lil")
        D[n - 1, 0] = inv
        return D.tocsr()
    return sp.diags([-inv, inv], [0, 1], shape=(n - 1, n), format="csr")


def _midpoint_average(n: int, periodic: bool) -> sp.csr_matrix:
    if periodic:
        P = sp.diags([0.5, 0.5], [0, 1], shape=(n, n), format="lil")
        P[n - 1, 0] = 0.5
        return P.tocsr()
    return sp.diags([0.5, 0.5], [0, 1], shape=(n - 1, n), format="csr")


def _node_central_diff(n: int, h: float, periodic: bool) -> sp.csr_matrix:
    """Three-point first derivative at nodes (two-point at open edges)."""
    inv = 0.5 / h
    if periodic:
        D = sp.diags([-inv, inv], [-1, 1], shape=(n, n), format="lil")
        D[0, n - 1] = -inv
        D[n - 1, 0] = inv
        return D.tocsr()
    D = sp.diags([-inv, inv], [-1, 1], shape=(n, n), format="lil")
    D[0, 0], D[0, 1] = -1.0 / h, 1.0 / h
    D[0, n - 1] = 0.0
    D[n - 1, n - 2], D[n - 1, n - 1] = -1.0 / h, 1.0 / h
    D[n - 1, 0] = 0.0
    return D.tocsr()


def gram_stiffness(m: ChartManifold) -> sp.csr_matrix:
    """Weak-form stiffness: x^T A y discretizes int V^2 grad x . grad y dmu.

    Diagonal metric terms use the staggered cell form
    sum_cells (cell measure) c_mid (Dx)(Dy), the tensor-grid analogue of
    lumped P1 elements: symmetric PSD, constants exactly in the kernel,
    natural zero-flux closure at open edges with O(h^2) eigenvalue
    consistency.  Off-diagonal metric terms (zero on every orthogonal
    chart) are added with node-centered low-order differences in the
    symmetric pairing; they reduce edge accuracy to first order.
    """
    cache = m.cache()
    if "gram_stiffness" in cache:
        return cache["gram_stiffness"]
    dom = m.domain
    n = dom.dim
    N = int(np.prod(dom.shape))
    ginv = m.metric.ginv
    base = np.exp(-m.phi.values) * m.metric.sqrt_det * m.V.values ** 2
    wq = integrate.quadrature_weights(dom)

    eyes = [_identity(dom.resolution[a]) for a in range(n)]

    def chain(slot: int, mat) -> sp.csr_matrix:
        return _kron_chain([mat if a == slot else eyes[a] for a in range(n)])

    A = sp.csr_matrix((N, N))
    for i in range(n):
        Nd = dom.resolution[i]
        h = dom.spacing[i]
        axw = integrate.axis_weights(dom, i)
        shape_i = [1] * n
        shape_i[i] = Nd
        # node coefficient with axis i's own quadrature weight stripped,
        # then averaged to the cell midpoints and given the full cell h
        c_node = (wq / axw.reshape(shape_i)) * base * ginv[..., i, i]
        mu = chain(i, _midpoint_average(Nd, dom.periodic[i]))
        c_mid = mu @ c_node.ravel()
        D = chain(i, _staggered_diff(Nd, h, dom.periodic[i]))
        A = A + D.T @ sp.diags(h * c_mid) @ D

    for i in range(n):
        for j in range(i + 1, n):
            gij = ginv[..., i, j]
            if float(np.max(np.abs(gij))) <= 1e-15 * float(np.max(np.abs(ginv))):
                continue
            Mij = sp.diags((wq * base * gij).ravel())
            Di = chain(i, _node_central_diff(dom.resolution[i], dom.spacing[i],
                                             dom.periodic[i]))
            Dj = chain(j, _node_central_diff(dom.resolution[j], dom.spacing[j],
                                             dom.periodic[j]))
            term = (Di.T @ Mij @ Dj).tocsr()
            A = A + term + term.T

    A = ((A + A.T) * 0.5).tocsr()
    cache["gram_stiffness"] = A
    return A


_GAUSS_XI = (0.5 * (1.0 - 1.0 / math.sqrt(3.0)), 0.5 * (1.0 + 1.0 / math.sqrt(3.0)))


def _gauss_p1(n: int, periodic: bool) -> sp.csr_matrix:
    """P1 interpolation from nodes to the two Gauss points of every cell."""
    cells = n if periodic else n - 1
    rows, cols, vals = [], [], []
    for k in range(cells):
        for g, xi in enumerate(_GAUSS_XI):
            r = 2 * k + g
            rows += [r, r]
            cols += [k, (k + 1) % n]
            vals += [1.0 - xi, xi]
    return sp.csr_matrix((vals, (rows, cols)), shape=(2 * cells, n))


def _gauss_deriv(n: int, h: float, periodic: bool) -> sp.csr_matrix:
    """P1 derivative (cellwise constant) at the two Gauss points of every cell."""
    cells = n if periodic else n - 1
    rows, cols, vals = [], [], []
    for k in range(cells):
        for g in range(2):
            r = 2 * k + g
            rows += [r, r]
            cols += [k, (k + 1) % n]
            vals += [-1.0 / h, 1.0 / h]
    return sp.csr_matrix((vals, (rows, cols)), shape=(2 * cells, n))


def _gauss_coeff(n: int, periodic: bool) -> sp.csr_matrix:
    """Cubic (4-node) interpolation from nodes to Gauss points, O(h^4).

    Coefficients enter the Gauss-point forms through this operator, so the
    assembled stiffness and mass agree with the exact Galerkin forms to
    O(h^4); the leading eigenvalue error is then the nonnegative Ritz term.
    """
    cells = n if periodic else n - 1
    rows, cols, vals = [], [], []
    for k in range(cells):
        j0 = k - 1 if periodic else min(max(k - 1, 0), n - 4)
        for g, xi in enumerate(_GAUSS_XI):
            t = (k - j0) + xi if not periodic else 1.0 + xi
            r = 2 * k + g
            for mloc in range(4):
                w = 1.0
                for other in range(4):
                    if other != mloc:
                        w *= (t - other) / (mloc - other)
                rows.append(r)
                cols.append((j0 + mloc) % n)
                vals.append(w)
    return sp.csr_matrix((vals, (rows, cols)), shape=(2 * cells, n))


def _face_forms_gauss(fm: ChartManifold):
    """Exact-Galerkin P1 stiffness and mass of a face, by Gauss quadrature.

    Two-point Gauss per cell integrates P1 x P1 x (linear coefficient)
    exactly, so up to the O(h^4) coefficient interpolation these are the
    continuum quadratic forms restricted to the P1 tensor space.  By
    Rayleigh-Ritz the pencil eigenvalues then sit ON OR ABOVE the continuum
    ones at O(h^2), which is what the sharp lower-bound audits need: a
    quadrature with indefinite-sign consistency error could undershoot an
    equality case and report a spurious FAIL.
    """
    dom = fm.domain
    nax = dom.dim
    base = np.exp(-fm.phi.values) * fm.metric.sqrt_det
    stiff_base = base * fm.V.values ** 2
    mass_base = base * fm.V.values

    P1 = [_gauss_p1(dom.resolution[a], dom.periodic[a]) for a in range(nax)]
    Dg = [_gauss_deriv(dom.resolution[a], dom.spacing[a], dom.periodic[a])
          for a in range(nax)]
    Cf = _kron_chain([_gauss_coeff(dom.resolution[a], dom.periodic[a])
                      for a in range(nax)])
    wg = float(np.prod([dom.spacing[a] / 2.0 for a in range(nax)]))

    ginv = fm.metric.ginv
    gmax = float(np.max(np.abs(ginv)))
    A = None
    for i in range(nax):
        Di = _kron_chain([Dg[a] if a == i else P1[a] for a in range(nax)])
        ci = Cf @ (stiff_base * ginv[..., i, i]).ravel()
        term = wg * (Di.T @ sp.diags(ci) @ Di)
        A = term if A is None else A + term
        for j in range(i + 1, nax):
            if float(np.max(np.abs(ginv[..., i, j]))) <= 1e-15 * gmax:
                continue
            Dj = _kron_chain([Dg[a] if a == j else P1[a] for a in range(nax)])
            cij = Cf @ (stiff_base * ginv[..., i, j]).ravel()
            cross = wg * (Di.T @ sp.diags(cij) @ Dj)
            A = A + cross + cross.T
    G = _kron_chain(P1)
    B = wg * (G.T @ sp.diags(Cf @ mass_base.ravel()) @ G)
    return ((A + A.T) * 0.5).tocsr(), ((B + B.T) * 0.5).tocsr()


def _cap_terms(fm: ChartManifold):
    """Condensed pole elements for the excised polar caps of a closed face.

    Each singular edge ring bounds a small geodesic cap of radius s1; a
    linear element from a free pole value (eliminated analytically) to the
    ring restores the cap's Dirichlet energy and mass, cancelling the
    O(s1^2) downward eigenvalue bias the excision would otherwise cause.
    Applies when every other face axis is periodic (the ring is closed).
    """
    dom = fm.domain
    N = int(np.prod(dom.shape))
    A = sp.csr_matrix((N, N))
    B = sp.csr_matrix((N, N))
    for a, side in sorted(fm.singular_edges):
        others = [b for b in range(dom.dim) if b != a]
        if not others or any(not dom.periodic[b] for b in others):
            continue
        row = 0 if side == 0 else dom.resolution[a] - 1
        nxt = 1 if side == 0 else dom.resolution[a] - 2
        sl = tuple(row if b == a else slice(None) for b in range(dom.dim))
        sl_n = tuple(nxt if b == a else slice(None) for b in range(dom.dim))
        E0 = fm.metric.sqrt_det[sl]
        E1 = fm.metric.sqrt_det[sl_n]
        slope = (E1 - E0) / dom.spacing[a]
        if np.any(slope <= 0):
            continue  # area element not collapsing: not a polar edge
        dth = E0 / slope
        s1 = float(np.mean(np.sqrt(fm.metric.g[sl + (a, a)]) * dth))

        gsub = fm.metric.g[sl][..., others, :][..., :, others]
        det_ring = np.linalg.det(gsub) if len(others) > 1 else gsub[..., 0, 0]
        wperp = np.ones_like(E0)
        for b in others:
            shape_b = [1] * len(others)
            shape_b[others.index(b)] = dom.resolution[b]
            wperp = wperp * integrate.axis_weights(dom, b).reshape(shape_b)
        dl = (wperp * np.sqrt(det_ring)).ravel()
        ex = np.exp(-fm.phi.values[sl]).ravel()
        Vr = fm.V.values[sl].ravel()
        cA = Vr ** 2 * ex
        cB = Vr * ex

        idx = np.arange(N).reshape(dom.shape)[sl].ravel()
        nr = idx.size
        q = cA * dl
        blockA = (np.diag(q) - np.outer(q, q) / q.sum()) / (2.0 * s1)
        qB = cB * dl
        blockB = (s1 / 2.0) * np.outer(qB, qB) / qB.sum()

        # tangential cap energy: (s1/2) * sum_cells [cA dl g^{bb}]_mid (Du)^2
        ginv_ring = fm.metric.ginv[sl]
        for b in others:
            coef = (cA * dl * ginv_ring[..., b, b].ravel())
            mu = _kron_chain([
                _midpoint_average(dom.resolution[bb], True) if bb == b
                else _identity(dom.resolution[bb]) for bb in others
            ])
            D = _kron_chain([
                _staggered_diff(dom.resolution[bb], dom.spacing[bb], True) if bb == b
                else _identity(dom.resolution[bb]) for bb in others
            ])
            blockA += (s1 / 2.0) * (D.T @ sp.diags(mu @ coef) @ D).toarray()

        scat = sp.csr_matrix(
            (np.ones(nr), (np.arange(nr), idx)), shape=(nr, N)
        )
        A = A + scat.T @ sp.csr_matrix(blockA) @ scat
        B = B + scat.T @ sp.csr_matrix(blockB) @ scat
    return A.tocsr(), B.tocsr()


# ------------------------------------------------------- linear solves


def _splu(mat: sp.csr_matrix):
    try:
        return spla.splu(mat.tocsc())
    except RuntimeError as exc:
        raise SolverDivergence(f"sparse factorization failed: {exc}") from exc


def _refined_solve(lu, mat, rhs, sweeps: int = 2):
    x = lu.solve(rhs)
    for _ in range(sweeps):
        r = rhs - mat @ x
        x = x + lu.solve(r)
    return x


def solve_dirichlet_unit(m: ChartManifold) -> ScalarField:
    """Solve L f = 1 in M, f = 0 on the boundary."""
    if not m.has_boundary:
        raise NoBoundary("Dirichlet problem needs a boundary")
    op = assemble_operator(m)
    I = op.idx_interior
    A = op.L[I, :][:, I].tocsr()
    b = np.ones(I.size)
    lu = _splu(A)
    x = _refined_solve(lu, A, b)
    rel = np.linalg.norm(A @ x - b) / np.linalg.norm(b)
    if not np.isfinite(rel) or rel > 1e-10:
        raise SolverDivergence(f"Dirichlet residual {rel:.3e} > 1e-10")
    f = np.zeros(op.n_dof)
    f[I] = x
    return ScalarField(m.domain, f.reshape(m.domain.shape))


def neumann_compatibility_defect(m: ChartManifold, rhs_const: float, c_bnd: float):
    """Fredholm pairing: int V * rhs dmu  minus  int V * c dsigma_w."""
    vol = integrate.integrate_weighted_volume(m, m.V.values) * rhs_const
    srf = c_bnd * sum(
        integrate.integrate_boundary(bg, bg.V, weighted=True)
        for bg in boundary.all_boundary_geometry(m)
    )
    return vol - srf, max(abs(vol), abs(srf))


def neumann_constant(m: ChartManifold) -> float:
    """The compatible boundary flux c = int V dmu / int V dsigma_w."""
    vol = integrate.integrate_weighted_volume(m, m.V.values)
    srf = sum(
        integrate.integrate_boundary(bg, bg.V, weighted=True)
        for bg in boundary.all_boundary_geometry(m)
    )
    return vol / srf

def solve_neumann_const(m: ChartManifold, c_bnd: float | None = None) -> ScalarField:
    """Solve L f = 1 with V (f/V)_nu = c on the boundary.

    The singular system (kernel spanned by V) is bordered with the weighted
    mean-zero constraint on f/V; the Fredholm pairing is checked first and
    IncompatibleData raised if the data cannot balance.
    """
    if not m.has_boundary:
        raise NoBoundary("Neumann problem needs a boundary")
    op = assemble_operator(m)
    if op.boundary_overlap():
        raise IncompatibleData("boundary faces share nodes; conormal rows ambiguous")
    if c_bnd is None:
        c_bnd = neumann_constant(m)
    defect, scale = neumann_compatibility_defect(m, 1.0, c_bnd)
    if abs(defect) > 1e-8 * (scale + 1e-300):
        raise IncompatibleData(
            f"Fredholm pairing violated: defect {defect:.3e} vs scale {scale:.3e}"
        )
    N = op.n_dof
    B = op.idx_boundary
    sysm = op.L.tolil()
    sysm[B, :] = op.flux.tolil()
    sysm = sysm.tocsr()
    rhs = np.ones(N)
    rhs[B] = c_bnd
    Vflat = m.V.values.ravel()
    col = (op.w_mu * Vflat)[:, None]          # near cokernel direction
    row = (op.w_mu / Vflat)[None, :]          # weighted mean of f/V
    bordered = sp.bmat(
        [[sysm, sp.csr_matrix(col)], [sp.csr_matrix(row), None]], format="csc"
    )
    full_rhs = np.concatenate([rhs, [0.0]])
    lu = _splu(bordered)
    sol = _refined_solve(lu, bordered, full_rhs)
    rel = np.linalg.norm(bordered @ sol - full_rhs) / np.linalg.norm(full_rhs)
    if not np.isfinite(rel) or rel > 1e-10:
        raise SolverDivergence(f"Neumann bordered residual {rel:.3e} > 1e-10")
    f = sol[:-1]
    return ScalarField(m.domain, f.reshape(m.domain.shape))


# ------------------------------------------------------- eigen machinery


@dataclass(frozen=True)
class EigResult:
    """First nonzero eigenpair of one of the four problems."""

    eigenvalue: float
    eigenfunction: ScalarField
    residual_norm: float
    kind: str
    normalization: dict


def _symmetrize_deflate(A: np.ndarray, bvec: np.ndarray):
    """Symmetrize and restore the exact constant kernel with a rank-2 update.

    Requires A @ 1 = 0 exactly.  Then d = A^T 1 / 2 satisfies d^T 1 = 0 and
    W = (A + A^T)/2 - (b d^T + d b^T)/(1^T b) is symmetric with W @ 1 = 0.
    """
    ones = np.ones(A.shape[0])
    d = (A.T @ ones) / 2.0
    s = float(bvec.sum())
    W = 0.5 * (A + A.T)
    W -= np.outer(bvec, d) / s
    W -= np.outer(d, bvec) / s
    correction = 2.0 * np.linalg.norm(d) * np.linalg.norm(bvec) / abs(s)
    return W, correction


def _smallest_eigs_dense(W: np.ndarray, bvec: np.ndarray):
    rootb = np.sqrt(bvec)
    Ap = W / rootb[:, None] / rootb[None, :]
    lo_hi = (0, min(7, Ap.shape[0] - 1))
    vals, vecs = scipy.linalg.eigh(Ap, subset_by_index=lo_hi)
    Y = vecs / rootb[:, None]
    scale = float(np.max(np.abs(vals))) if vals.size else 0.0
    return vals, Y, scale


def _smallest_eigs_dense_gen(W: np.ndarray, B: np.ndarray):
    try:
        vals, Y = scipy.linalg.eigh(W, B, subset_by_index=(0, min(7, W.shape[0] - 1)))
    except scipy.linalg.LinAlgError as exc:
        raise SolverDivergence(f"mass matrix not positive definite: {exc}") from exc
    scale = float(np.max(np.abs(vals))) if vals.size else 0.0
    return vals, Y, scale


def _first_nonzero(vals: np.ndarray, Y: np.ndarray, scale: float):
    thr = ZERO_EIG_RTOL * (scale if scale > 0 else 1.0)
    for idx in np.argsort(vals):
        if abs(vals[idx]) > thr:
            return float(vals[idx]), Y[:, idx], thr
    raise SolverDivergence("no nonzero eigenvalue above threshold")


def _eigsh_smallest(A: sp.spmatrix, M: sp.spmatrix, kind: str, k: int = 8):
    """Shift-invert Lanczos at sigma = -1 for the smallest pencil eigenvalues.

    A and M are PSD with no common kernel vector, so A + M is SPD and the
    factorization never hits a zero pivot.  The start vector is seeded for
    run-to-run determinism.
    """
    rng = np.random.default_rng(_LOBPCG_SEED)
    v0 = rng.standard_normal(A.shape[0])
    try:
        vals, vecs = spla.eigsh(
            A.tocsc(), k=k, M=M.tocsc(), sigma=-1.0, which="LM", v0=v0
        )
    except (spla.ArpackNoConvergence, RuntimeError) as exc:
        raise SolverDivergence(f"{kind}: shift-invert Lanczos failed: {exc}") from exc
    order = np.argsort(vals)
    return vals[order], vecs[:, order]


def _pencil_first_nonzero(A: np.ndarray | sp.csr_matrix, bvec: np.ndarray, kind: str):
    """Symmetrize, deflate, return the first nonzero eigenpair (lumped mass)."""
    n = A.shape[0]
    if sp.issparse(A) and n > DENSE_EIG_LIMIT:
        Asym = ((A + A.T) * 0.5).tocsr()
        vals, Y = _eigsh_smallest(Asym, sp.diags(bvec), kind, k=8)
        scale = float(np.max(np.abs(vals)))
        lam, y, thr = _first_nonzero(vals, Y, scale)
        correction = 0.0
    else:
        Adense = A.toarray() if sp.issparse(A) else np.asarray(A)
        W, correction = _symmetrize_deflate(Adense, bvec)
        vals, Y, scale = _smallest_eigs_dense(W, bvec)
        lam, y, thr = _first_nonzero(vals, Y, scale)
        Asym = W
    r = Asym @ y - lam * (bvec * y)
    resid = float(np.linalg.norm(r) / np.linalg.norm(y))
    if resid > 1e-8:
        raise SolverDivergence(f"{kind}: eigen residual {resid:.3e} > 1e-8")
    return lam, y, resid, thr, correction


def _apply_mass(mass, y: np.ndarray) -> np.ndarray:
    if sp.issparse(mass) or getattr(mass, "ndim", 1) == 2:
        return mass @ y
    return mass * y


def _finalize(kind, domain, lam, y, Vvals, mass, resid, thr,
              correction, raw_residual, extra=None) -> EigResult:
    # normalization: y^T B y = 1, sign by the largest-magnitude component
    By = _apply_mass(mass, y)
    nrm = math.sqrt(float(y @ By))
    y = y / nrm
    pivot = np.argmax(np.abs(y))
    if y[pivot] < 0:
        y = -y
    f = Vvals * y
    bones = _apply_mass(mass, np.ones_like(y))
    ortho = float(abs(y @ bones)) / np.linalg.norm(y) / np.linalg.norm(bones)
    record = {
        "mass": "sum V (f/V)^2 * weight = 1",
        "V_orthogonality": ortho,
        "zero_threshold": thr,
        "deflation_correction_scale": correction,
        "raw_pencil_residual": raw_residual,
    }
    if extra:
        record.update(extra)
    return EigResult(
        eigenvalue=float(lam),
        eigenfunction=ScalarField(domain, f.reshape(domain.shape)),
        residual_norm=resid,
        kind=kind,
        normalization=record,
    )


def eigen_closed(m: ChartManifold) -> EigResult:
    """First nonzero eta of L f = -eta f/V on a closed manifold."""
    if m.has_boundary:
        raise NotClosed("closed eigenproblem on a manifold with boundary")
    op = assemble_operator(m)
    Vflat = m.V.values.ravel()
    bvec = op.w_mu * Vflat
    A = gram_stiffness(m)
    lam, y, resid, thr, corr = _pencil_first_nonzero(A, bvec, "closed")
    raw_res = float(
        np.linalg.norm(A @ y - lam * (bvec * y)) / np.linalg.norm(y)
    )
    return _finalize("closed", m.domain, lam, y, Vflat, bvec, resid, thr, corr, raw_res)


def _face_pencil(m: ChartManifold, bg) -> tuple:
    """Shared face pencil (A_f, B_f) on one boundary face, in y = f/V DOFs.

    A_f is the tangential stiffness, B_f the P1 mass, both by Gauss-exact
    assembly and augmented by the condensed pole-cap elements when the face
    has excised polar edges.  Every boundary eigenproblem (tangential,
    Steklov and Wentzell) draws its face terms from this one pencil, which
    is what makes lambda(beta) >= p + beta * eta hold at solver precision.
    """
    fm = bg.face_manifold()
    cache = fm.cache()
    if "face_pencil" not in cache:
        Ag, Bg = _face_forms_gauss(fm)
        Ac, Bc = _cap_terms(fm)
        cache["face_pencil"] = ((Ag + Ac).tocsr(), (Bg + Bc).tocsr())
    return cache["face_pencil"]


def eigen_boundary_weighted(m: ChartManifold, bg=None) -> EigResult:
    """First nonzero eta of the tangential problem on a closed boundary face."""
    if not m.has_boundary:
        raise NoBoundary("manifold is closed")
    if bg is None:
        bg = boundary.all_boundary_geometry(m)[0]
    A, B = _face_pencil(m, bg)
    n = A.shape[0]
    if n <= DENSE_EIG_LIMIT:
        W, corr = _symmetrize_deflate(A.toarray(), np.asarray(B @ np.ones(n)))
        vals, Y, scale = _smallest_eigs_dense_gen(W, B.toarray())
        lam, y, thr = _first_nonzero(vals, Y, scale)
        r = W @ y - lam * (B @ y)
    else:
        corr = 0.0
        vals, Y = _eigsh_smallest(A, B, "boundary")
        scale = float(np.max(np.abs(vals)))
        lam, y, thr = _first_nonzero(vals, Y, scale)
        r = A @ y - lam * (B @ y)
    resid = float(np.linalg.norm(r) / np.linalg.norm(y))
    if resid > 1e-8:
        raise SolverDivergence(f"boundary: eigen residual {resid:.3e} > 1e-8")
    Vb = bg.V.ravel()
    return _finalize(
        "boundary", bg.face_domain, lam, y, Vb, B, resid, thr, corr, resid
    )


def _scatter_face(ids: np.ndarray, N: int) -> sp.csr_matrix:
    return sp.csr_matrix(
        (np.ones(ids.size), (np.arange(ids.size), ids)), shape=(ids.size, N)
    )


def _lifted_face_pencils(m: ChartManifold, op: DiscreteOperator):
    """Face stiffness and mass of every face scattered onto bulk DOFs."""
    N = op.n_dof
    A = sp.csr_matrix((N, N))
    B = sp.csr_matrix((N, N))
    for bg, sl in op.face_slices:
        Af, Bf = _face_pencil(m, bg)
        S = _scatter_face(op.idx_boundary[sl], N)
        A = A + S.T @ Af @ S
        B = B + S.T @ Bf @ S
    return A.tocsr(), B.tocsr()


def _boundary_pencil_dense(A: sp.csr_matrix, beta: float,
                           op: DiscreteOperator, m: ChartManifold, kind: str):
    """Schur-complement route: W = A_BB - A_BI A_II^{-1} A_IB, then eigh.

    y^T W y is the minimum bulk Dirichlet energy over interior extensions,
    so (W + beta A_f, B_f) is the discrete Dirichlet-to-Neumann pencil with
    the Wentzell face addend.  A_II is positive definite (constants need
    boundary support), hence a Cholesky solve.  Face terms touch boundary
    DOFs only, so the interior extension is beta-independent.
    """
    I, Bi = op.idx_interior, op.idx_boundary
    Ad = A.toarray()
    A_II = Ad[np.ix_(I, I)]
    A_IB = Ad[np.ix_(I, Bi)]
    try:
        cho = scipy.linalg.cho_factor(A_II)
    except scipy.linalg.LinAlgError as exc:
        raise SolverDivergence(f"{kind}: interior block not SPD: {exc}") from exc
    Yext = -scipy.linalg.cho_solve(cho, A_IB)
    W = Ad[np.ix_(Bi, Bi)] + Ad[np.ix_(Bi, I)] @ Yext

    nb = Bi.size
    Bd = np.zeros((nb, nb))
    for bg, sl in op.face_slices:
        Af, Bf = _face_pencil(m, bg)
        loc = np.arange(nb)[sl]
        if beta != 0.0:
            W[np.ix_(loc, loc)] += beta * Af.toarray()
        Bd[np.ix_(loc, loc)] += Bf.toarray()

    W, correction = _symmetrize_deflate(W, Bd @ np.ones(nb))
    vals, Y, scale = _smallest_eigs_dense_gen(W, Bd)
    lam, y, thr = _first_nonzero(vals, Y, scale)
    r = W @ y - lam * (Bd @ y)
    resid = float(np.linalg.norm(r) / np.linalg.norm(y))
    y_full = np.empty(op.n_dof)
    y_full[Bi] = y
    y_full[I] = Yext @ y
    return lam, y, y_full, resid, thr, correction, Bd


def _boundary_pencil_sparse(A: sp.csr_matrix, beta: float,
                            op: DiscreteOperator, m: ChartManifold, kind: str):
    """Shift-invert Lanczos on the full singular pencil A y = lam B y.

    B carries boundary mass only; interior DOFs have eigenvalue infinity
    and are never produced by shift-invert around sigma < 0, while the
    constant mode comes out at zero and is skipped by threshold.
    """
    Alift, Blift = _lifted_face_pencils(m, op)
    Aw = (A + float(beta) * Alift).tocsr() if beta != 0.0 else A
    vals, vecs = _eigsh_smallest(Aw, Blift, kind)
    scale = float(np.max(np.abs(vals)))
    lam, y_full, thr = _first_nonzero(vals, vecs, scale)
    r = Aw @ y_full - lam * (Blift @ y_full)
    resid = float(np.linalg.norm(r) / np.linalg.norm(y_full))
    y = y_full[op.idx_boundary]
    Bd = Blift[op.idx_boundary][:, op.idx_boundary]
    return lam, y, y_full, resid, thr, 0.0, Bd


def eigen_steklov(m: ChartManifold) -> EigResult:
    """First nonzero p of L f = 0 in M, V(f/V)_nu = p f/V on the boundary."""
    return eigen_wentzell(m, 0.0, _kind="steklov")


def eigen_wentzell(m: ChartManifold, beta: float, _kind: str = "wentzell") -> EigResult:
    """First nonzero eigenvalue of the boundary problem with parameter beta.

    The quadratic form is bulk Dirichlet energy plus beta times the
    tangential face energy, over the shared face mass, so beta = 0 is the
    Steklov problem through the identical code path.
    """
    if not m.has_boundary:
        raise NoBoundary("boundary eigenproblem on a closed manifold")
    if beta < 0:
        raise ValueError("beta < 0 is unsupported; the bound requires beta >= 0")
    op = assemble_operator(m)
    if op.boundary_overlap():
        raise IncompatibleData("boundary faces share nodes; boundary mass ambiguous")
    A = gram_stiffness(m)
    if op.n_dof <= DENSE_EIG_LIMIT:
        lam, y, y_full, resid, thr, corr, Bd = _boundary_pencil_dense(
            A, float(beta), op, m, _kind
        )
    else:
        lam, y, y_full, resid, thr, corr, Bd = _boundary_pencil_sparse(
            A, float(beta), op, m, _kind
        )
    if resid > 1e-8:
        raise SolverDivergence(f"{_kind}: eigen residual {resid:.3e} > 1e-8")
    nrm = math.sqrt(float(y @ _apply_mass(Bd, y)))
    y = y / nrm
    y_full = y_full / nrm
    pivot = np.argmax(np.abs(y))
    if y[pivot] < 0:
        y = -y
        y_full = -y_full
    f_full = m.V.values.ravel() * y_full
    bones = _apply_mass(Bd, np.ones_like(y))
    ortho = float(abs(y @ bones)) / np.linalg.norm(y) / np.linalg.norm(bones)
    record = {
        "mass": "sum_boundary V (f/V)^2 * weight = 1",
        "V_orthogonality": ortho,
        "zero_threshold": thr,
        "deflation_correction_scale": corr,
        "raw_pencil_residual": resid,
        "beta": float(beta),
        "extension": "energy-minimizing interior values of the Gram stiffness",
    }
    return EigResult(
        eigenvalue=float(lam),
        eigenfunction=ScalarField(m.domain, f_full.reshape(m.domain.shape)),
        residual_norm=resid,
        kind=_kind,
        normalization=record,
    )
