"""Compensated series summation kernels.

Every field evaluation reduces to sums of the form
``sum_m w_m(t) * trig(kappa_m * x)`` over a few hundred modes at many
(x, t) points.  These loops are the hot path, so they exist twice: as
numba ``@njit`` kernels and as numpy fallbacks that accumulate in the
same mode order with the same Kahan compensation.  Backend selection:

* env ``MIRRORHEAT_BACKEND=numpy``  force the numpy fallback
* env ``MIRRORHEAT_BACKEND=numba``  require numba (raise if missing)
* unset/auto                        numba when importable, else numpy

``benchmarks/series_eval_bench.py`` times the two paths head to head.
"""
from __future__ import annotations

import math
import os

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised via env flag tests
    njit = None
    HAS_NUMBA = False

__all__ = [
    "HAS_NUMBA", "backend", "warmup",
    "u_series", "f_series", "ut_series", "uxx_series",
    "NUMPY_IMPLS", "NUMBA_IMPLS",
]


# ---------------------------------------------------------------------------
# numpy fallbacks: vectorised over points, Kahan-compensated over modes

def _u_series_np(x, t, kappa, lam, c, is_sin):
    # sum_m c_m * expm1(-lam_m t) * trig(kappa_m x)
    acc = np.zeros_like(x)
    comp = np.zeros_like(x)
    for m in range(kappa.size):
        trig = np.sin(kappa[m] * x) if is_sin[m] else np.cos(kappa[m] * x)
        term = c[m] * np.expm1(-lam[m] * t) * trig
        y = term - comp
        tot = acc + y
        comp = (tot - acc) - y
        acc = tot
    return acc


def _f_series_np(x, kappa, lam, c, is_sin):
    # sum_m -lam_m * c_m * trig(kappa_m x)
    acc = np.zeros_like(x)
    comp = np.zeros_like(x)
    for m in range(kappa.size):
        trig = np.sin(kappa[m] * x) if is_sin[m] else np.cos(kappa[m] * x)
        term = -lam[m] * c[m] * trig
        y = term - comp
        tot = acc + y
        comp = (tot - acc) - y
        acc = tot
    return acc


def _ut_series_np(x, t, kappa, lam, c, is_sin):
    # sum_m -c_m * lam_m * exp(-lam_m t) * trig(kappa_m x)
    acc = np.zeros_like(x)
    comp = np.zeros_like(x)
    for m in range(kappa.size):
        trig = np.sin(kappa[m] * x) if is_sin[m] else np.cos(kappa[m] * x)
        term = -c[m] * lam[m] * np.exp(-lam[m] * t) * trig
        y = term - comp
        tot = acc + y
        comp = (tot - acc) - y
        acc = tot
    return acc


def _uxx_series_np(x, t, kappa, lam, c, is_sin, mirror):
    # sum_m c_m * expm1(-lam_m t) * (-kappa_m^2) * trig(kappa_m x),
    # with the kernel parity applied when evaluating at the mirrored argument
    acc = np.zeros_like(x)
    comp = np.zeros_like(x)
    for m in range(kappa.size):
        if is_sin[m]:
            trig = np.sin(kappa[m] * x)
            parity = -1.0
        else:
            trig = np.cos(kappa[m] * x)
            parity = 1.0
        scale = -kappa[m] * kappa[m]
        if mirror:
            scale *= parity
        term = c[m] * np.expm1(-lam[m] * t) * scale * trig
        y = term - comp
        tot = acc + y
        comp = (tot - acc) - y
        acc = tot
    return acc


NUMPY_IMPLS = {
    "u_series": _u_series_np,
    "f_series": _f_series_np,
    "ut_series": _ut_series_np,
    "uxx_series": _uxx_series_np,
}


# ---------------------------------------------------------------------------
# numba kernels: same summation order per point

if HAS_NUMBA:

    @njit(cache=True)
    def _u_series_nb(x, t, kappa, lam, c, is_sin):
        out = np.empty(x.size)
        for i in range(x.size):
            acc = 0.0
            comp = 0.0
            for m in range(kappa.size):
                if is_sin[m]:
                    trig = math.sin(kappa[m] * x[i])
                else:
                    trig = math.cos(kappa[m] * x[i])
                term = c[m] * math.expm1(-lam[m] * t[i]) * trig
                y = term - comp
                tot = acc + y
                comp = (tot - acc) - y
                acc = tot
            out[i] = acc
        return out

    @njit(cache=True)
    def _f_series_nb(x, kappa, lam, c, is_sin):
        out = np.empty(x.size)
        for i in range(x.size):
            acc = 0.0
            comp = 0.0
            for m in range(kappa.size):
                if is_sin[m]:
                    trig = math.sin(kappa[m] * x[i])
                else:
                    trig = math.cos(kappa[m] * x[i])
                term = -lam[m] * c[m] * trig
                y = term - comp
                tot = acc + y
                comp = (tot - acc) - y
                acc = tot
            out[i] = acc
        return out

    @njit(cache=True)
    def _ut_series_nb(x, t, kappa, lam, c, is_sin):
        out = np.empty(x.size)
        for i in range(x.size):
            acc = 0.0
            comp = 0.0
            for m in range(kappa.size):
                if is_sin[m]:
                    trig = math.sin(kappa[m] * x[i])
                else:
                    trig = math.cos(kappa[m] * x[i])
                term = -c[m] * lam[m] * math.exp(-lam[m] * t[i]) * trig
                y = term - comp
                tot = acc + y
                comp = (tot - acc) - y
                acc = tot
            out[i] = acc
        return out

    @njit(cache=True)
    def _uxx_series_nb(x, t, kappa, lam, c, is_sin, mirror):
        out = np.empty(x.size)
        for i in range(x.size):
            acc = 0.0
            comp = 0.0
            for m in range(kappa.size):
                if is_sin[m]:
                    trig = math.sin(kappa[m] * x[i])
                    parity = -1.0
                else:
                    trig = math.cos(kappa[m] * x[i])
                    parity = 1.0
                scale = -kappa[m] * kappa[m]
                if mirror:
                    scale *= parity
                term = c[m] * math.expm1(-lam[m] * t[i]) * scale * trig
                y = term - comp
                tot = acc + y
                comp = (tot - acc) - y
                acc = tot
            out[i] = acc
        return out

    NUMBA_IMPLS = {
        "u_series": _u_series_nb,
        "f_series": _f_series_nb,
        "ut_series": _ut_series_nb,
        "uxx_series": _uxx_series_nb,
    }
else:  # pragma: no cover
    NUMBA_IMPLS = {}


def _select_backend() -> str:
    choice = os.environ.get("MIRRORHEAT_BACKEND", "auto").strip().lower()
    if choice in ("", "auto"):
        return "numba" if HAS_NUMBA else "numpy"
    if choice == "numpy":
        return "numpy"
    if choice == "numba":
        if not HAS_NUMBA:
            raise RuntimeError(
                "MIRRORHEAT_BACKEND=numba but numba is not importable")
        return "numba"
    raise RuntimeError(
        f"MIRRORHEAT_BACKEND must be 'numba', 'numpy' or 'auto', got {choice!r}")


_BACKEND = _select_backend()
_IMPLS = NUMBA_IMPLS if _BACKEND == "numba" else NUMPY_IMPLS


def backend() -> str:
    """Name of the active summation backend ('numba' or 'numpy')."""
    return _BACKEND


def _as_arrays(*arrays):
    return tuple(np.ascontiguousarray(a, dtype=float) for a in arrays)


def u_series(x, t, kappa, lam, c, is_sin):
    x, t, kappa, lam, c = _as_arrays(x, t, kappa, lam, c)
    return _IMPLS["u_series"](x, t, kappa, lam, c, is_sin)


def f_series(x, kappa, lam, c, is_sin):
    x, kappa, lam, c = _as_arrays(x, kappa, lam, c)
    return _IMPLS["f_series"](x, kappa, lam, c, is_sin)


def ut_series(x, t, kappa, lam, c, is_sin):
    x, t, kappa, lam, c = _as_arrays(x, t, kappa, lam, c)
    return _IMPLS["ut_series"](x, t, kappa, lam, c, is_sin)


def uxx_series(x, t, kappa, lam, c, is_sin, mirror=False):
    x, t, kappa, lam, c = _as_arrays(x, t, kappa, lam, c)
    return _IMPLS["uxx_series"](x, t, kappa, lam, c, is_sin, bool(mirror))


def warmup() -> None:
    """Trigger jit compilation of the active kernels on tiny inputs."""
    x = np.array([0.5])
    t = np.array([0.25])
    kappa = np.array([1.0])
    lam = np.array([1.0])
    c = np.array([1.0])
    is_sin = np.array([True])
    u_series(x, t, kappa, lam, c, is_sin)
    f_series(x, kappa, lam, c, is_sin)
    ut_series(x, t, kappa, lam, c, is_sin)
    uxx_series(x, t, kappa, lam, c, is_sin, True)
    uxx_series(x, t, kappa, lam, c, is_sin, False)
