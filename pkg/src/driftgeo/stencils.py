"""One-dimensional finite-difference stencils and derivative matrices.

Interior nodes use centered 5-point stencils (order 4 for both first and
second derivatives).  The two nodes nearest a non-periodic edge use shifted
5-point windows (order 4 for first derivatives, order 3 for second).
Periodic axes wrap the centered stencil around.

Every weight table is corrected so constants are annihilated at raw
round-off (sums ~1e-16, not amplified by the Vandermonde solve).  Code
that needs an exact kernel vector (the Gram stiffness, the zeroth-order
trick in the main operator) builds it by construction instead of relying
on these rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

WIDTH = 5  # nodes per stencil row


def fd_weights(x0: float, x: np.ndarray, order: int) -> np.ndarray:
    """Fornberg weights for the `order`-th derivative at x0 from nodes x.

    Solves the small Vandermonde system directly; fine for the fixed
    5-point windows used here.
    """
    x = np.asarray(x, dtype=float)
    k = len(x)
    if order >= k:
        raise ValueError("need more nodes than derivative order")
    A = np.vander(x - x0, k, increasing=True).T  # A[i, j] = (x_j - x0)^i
    b = np.zeros(k)
    fact = 1.0
    for i in range(2, order + 1):
        fact *= i
    b[order] = fact
    w = np.linalg.solve(A, b)
    # pin the self-weight to the negated sum of the others, which keeps the
    # constant-mode leakage at raw round-off instead of solver residual size
    j0 = int(np.argmin(np.abs(x - x0)))
    w[j0] = 0.0
    w[j0] = -w.sum()
    return w


@dataclass(frozen=True)
class DerivativeStencil:
    """Weight table for one derivative order at unit spacing.

    interior: centered weights (offsets -2..2).
    boundary: mapping from node offset (0 or 1 from the edge) to the
    weights on nodes 0..4; the far edge mirrors these with an order-
    dependent sign.
    """

    deriv_order: int
    accuracy_interior: int
    accuracy_boundary: int
    interior: np.ndarray
    boundary: dict = field(default_factory=dict)

    @staticmethod
    def build(deriv_order: int) -> "DerivativeStencil":
        offsets = np.arange(-2.0, 3.0)
        interior = fd_weights(0.0, offsets, deriv_order)
        nodes = np.arange(0.0, 5.0)
        boundary = {pos: fd_weights(float(pos), nodes, deriv_order) for pos in (0, 1)}
        acc_b = 4 if deriv_order == 1 else 3
        return DerivativeStencil(deriv_order, 4, acc_b, interior, boundary)


_STENCILS = {1: DerivativeStencil.build(1), 2: DerivativeStencil.build(2)}


def stencil(deriv_order: int) -> DerivativeStencil:
    return _STENCILS[deriv_order]


def derivative_matrix(n: int, h: float, deriv_order: int, periodic: bool) -> np.ndarray:
    """Dense n x n matrix applying d^k/dx^k on a uniform 1-D grid."""
    from .errors import ResolutionTooLow

    if n < WIDTH:
        raise ResolutionTooLow(f"axis resolution {n} below stencil width {WIDTH}")
    st = _STENCILS[deriv_order]
    scale = h ** (-deriv_order)
    D = np.zeros((n, n))
    if periodic:
        for off, w in zip(range(-2, 3), st.interior):
            for i in range(n):
                D[i, (i + off) % n] += w * scale
        return D
    for i in range(2, n - 2):
        D[i, i - 2 : i + 3] = st.interior * scale
    for pos in (0, 1):
        D[pos, 0:5] = st.boundary[pos] * scale
        # mirrored row at the far edge: reverse and apply parity sign
        sign = (-1.0) ** deriv_order
        D[n - 1 - pos, n - 5 : n] = sign * st.boundary[pos][::-1] * scale
    return D


def derivative_matrix_sparse(n, h, deriv_order, periodic) -> sp.csr_matrix:
    return sp.csr_matrix(derivative_matrix(n, h, deriv_order, periodic))


def apply_along_axis(D: np.ndarray, values: np.ndarray, axis: int) -> np.ndarray:
    """Apply a 1-D operator matrix along one axis of a grid array."""
    out = np.tensordot(D, values, axes=(1, axis))
    return np.moveaxis(out, 0, axis)
