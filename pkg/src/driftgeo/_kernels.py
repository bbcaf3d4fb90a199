"""Hot per-node tensor kernels, in numba and pure-numpy variants.

The numpy variants are einsum formulations; the numba variants are the
same contractions as explicit loops compiled with @njit, which avoids the
large temporaries einsum creates on million-node grids.  Selection:

    DRIFTGEO_KERNELS=numba   force the jitted path (error if unavailable)
    DRIFTGEO_KERNELS=numpy   force the einsum path
    unset / auto             numba when importable, else numpy

Both paths are covered by the same tests and by benchmarks/bench_kernels.py.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit, prange

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAS_NUMBA = False

    def njit(*args, **kwargs):  # type: ignore
        def wrap(fn):
            return fn

        return wrap

    prange = range  # type: ignore


def backend() -> str:
    mode = os.environ.get("DRIFTGEO_KERNELS", "auto").lower()
    if mode == "numba":
        if not HAS_NUMBA:
            raise RuntimeError("DRIFTGEO_KERNELS=numba but numba is not importable")
        return "numba"
    if mode == "numpy":
        return "numpy"
    return "numba" if HAS_NUMBA else "numpy"


def _flat(arr: np.ndarray, rank: int):
    """View (..., n, n, ...) grid tensors as (N, n, ...) for the jit loops."""
    n = arr.shape[-1]
    return arr.reshape((-1,) + arr.shape[arr.ndim - rank :]), n


# ---------------------------------------------------------------- christoffel


def christoffel_numpy(ginv: np.ndarray, dg: np.ndarray) -> np.ndarray:
    """Gamma^k_ij from g^{kl} and dg[..., a, i, j] = d_a g_ij."""
    t = dg + np.swapaxes(dg, -3, -2) - np.moveaxis(dg, -3, -1)
    # t[..., i, j, l] = d_i g_jl + d_j g_il - d_l g_ij
    return 0.5 * np.einsum("...kl,...ijl->...kij", ginv, t, optimize=True)


@njit(cache=True, parallel=True)
def _christoffel_jit(ginv, dg, out):  # pragma: no cover - compiled
    N, n = ginv.shape[0], ginv.shape[1]
    for p in prange(N):
        for k in range(n):
            for i in range(n):
                for j in range(n):
                    acc = 0.0
                    for l in range(n):
                        acc += ginv[p, k, l] * (
                            dg[p, i, j, l] + dg[p, j, i, l] - dg[p, l, i, j]
                        )
                    out[p, k, i, j] = 0.5 * acc


def christoffel(ginv: np.ndarray, dg: np.ndarray) -> np.ndarray:
    if backend() == "numpy":
        return christoffel_numpy(ginv, dg)
    gf, n = _flat(ginv, 2)
    df, _ = _flat(dg, 3)
    out = np.empty_like(df)
    _christoffel_jit(gf, df, out)
    return out.reshape(dg.shape)


# ------------------------------------------------------- Ricci Gamma*Gamma part


def ricci_gamma_terms_numpy(gamma: np.ndarray) -> np.ndarray:
    """Gamma^l_{lm} Gamma^m_{jk} - Gamma^l_{jm} Gamma^m_{lk}."""
    tr = np.einsum("...llm->...m", gamma)
    t1 = np.einsum("...m,...mjk->...jk", tr, gamma, optimize=True)
    t2 = np.einsum("...ljm,...mlk->...jk", gamma, gamma, optimize=True)
    return t1 - t2


@njit(cache=True, parallel=True)
def _ricci_gg_jit(gamma, out):  # pragma: no cover - compiled
    N, n = gamma.shape[0], gamma.shape[1]
    for p in prange(N):
        for j in range(n):
            for k in range(n):
                acc = 0.0
                for m in range(n):
                    trm = 0.0
                    for l in range(n):
                        trm += gamma[p, l, l, m]
                    acc += trm * gamma[p, m, j, k]
                    for l in range(n):
                        acc -= gamma[p, l, j, m] * gamma[p, m, l, k]
                out[p, j, k] = acc


def ricci_gamma_terms(gamma: np.ndarray) -> np.ndarray:
    if backend() == "numpy":
        return ricci_gamma_terms_numpy(gamma)
    gf, n = _flat(gamma, 3)
    out = np.empty(gf.shape[:1] + (n, n))
    _ricci_gg_jit(gf, out)
    return out.reshape(gamma.shape[:-3] + (n, n))


# ------------------------------------------------------------ bilinear helpers


def tensor_norm2_numpy(ginv: np.ndarray, T: np.ndarray) -> np.ndarray:
    """|T|^2 = g^{ik} g^{jl} T_ij T_kl pointwise."""
    raised = np.einsum("...ik,...jl,...kl->...ij", ginv, ginv, T, optimize=True)
    return np.einsum("...ij,...ij->...", raised, T, optimize=True)


@njit(cache=True, parallel=True)
def _tensor_norm2_jit(ginv, T, out):  # pragma: no cover - compiled
    N, n = ginv.shape[0], ginv.shape[1]
    for p in prange(N):
        acc = 0.0
        for i in range(n):
            for j in range(n):
                up = 0.0
                for k in range(n):
                    for l in range(n):
                        up += ginv[p, i, k] * ginv[p, j, l] * T[p, k, l]
                acc += up * T[p, i, j]
        out[p] = acc


def tensor_norm2(ginv: np.ndarray, T: np.ndarray) -> np.ndarray:
    if backend() == "numpy":
        return tensor_norm2_numpy(ginv, T)
    gf, n = _flat(ginv, 2)
    Tf, _ = _flat(T, 2)
    out = np.empty(gf.shape[0])
    _tensor_norm2_jit(gf, Tf, out)
    return out.reshape(T.shape[:-2])


def quad_form_numpy(T: np.ndarray, W: np.ndarray) -> np.ndarray:
    """T_ij W^i W^j pointwise for a vector field W."""
    return np.einsum("...ij,...i,...j->...", T, W, W, optimize=True)


@njit(cache=True, parallel=True)
def _quad_form_jit(T, W, out):  # pragma: no cover - compiled
    N, n = T.shape[0], T.shape[1]
    for p in prange(N):
        acc = 0.0
        for i in range(n):
            for j in range(n):
                acc += T[p, i, j] * W[p, i] * W[p, j]
        out[p] = acc


def quad_form(T: np.ndarray, W: np.ndarray) -> np.ndarray:
    if backend() == "numpy":
        return quad_form_numpy(T, W)
    Tf, n = _flat(T, 2)
    Wf = W.reshape(-1, n)
    out = np.empty(Tf.shape[0])
    _quad_form_jit(Tf, Wf, out)
    return out.reshape(T.shape[:-2])
