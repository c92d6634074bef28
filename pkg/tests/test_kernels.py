"""Backend parity and selection for the series summation kernels."""

import math
import os
import subprocess
import sys

import numpy as np
import pytest

from mirrorheat import kernels
from mirrorheat.kernels import (
    HAS_NUMBA,
    NUMBA_IMPLS,
    NUMPY_IMPLS,
    backend,
    f_series,
    u_series,
    ut_series,
    uxx_series,
)


def _random_problem(n_points=64, n_modes=200, seed=3):
    rng = np.random.default_rng(seed)
    x = rng.uniform(-math.pi, math.pi, n_points)
    t = np.full(n_points, 0.37)
    kappa = np.concatenate([np.arange(1, n_modes // 2 + 1.0), np.arange(n_modes // 2) + 0.5])
    lam = 1.3 * kappa**2
    c = rng.normal(0, 1, kappa.size) / (1.0 + kappa**3)
    is_sin = rng.random(kappa.size) < 0.5
    return x, t, kappa, lam, c, is_sin


@pytest.mark.skipif(not HAS_NUMBA, reason="numba not importable")
def test_numba_and_numpy_paths_agree():
    x, t, kappa, lam, c, is_sin = _random_problem()
    for name in ("u_series", "ut_series"):
        a = NUMPY_IMPLS[name](x, t, kappa, lam, c, is_sin)
        b = NUMBA_IMPLS[name](x, t, kappa, lam, c, is_sin)
        assert np.max(np.abs(a - b)) < 1e-13, name
    a = NUMPY_IMPLS["f_series"](x, kappa, lam, c, is_sin)
    b = NUMBA_IMPLS["f_series"](x, kappa, lam, c, is_sin)
    assert np.max(np.abs(a - b)) < 1e-11
    for mirror in (False, True):
        a = NUMPY_IMPLS["uxx_series"](x, t, kappa, lam, c, is_sin, mirror)
        b = NUMBA_IMPLS["uxx_series"](x, t, kappa, lam, c, is_sin, mirror)
        assert np.max(np.abs(a - b)) < 1e-11


def test_sum_matches_extended_precision_reference():
    """The compensated loop should track a long-double reference closely."""
    x, t, kappa, lam, c, is_sin = _random_problem(n_points=16, n_modes=400)
    got = u_series(x, t, kappa, lam, c, is_sin)
    ref = np.zeros(x.size, dtype=np.longdouble)
    for m in range(kappa.size):
        trig = np.where(is_sin[m], np.sin(kappa[m] * x), np.cos(kappa[m] * x))
        ref += np.longdouble(c[m]) * np.longdouble(np.expm1(-lam[m] * t)) * trig.astype(
            np.longdouble
        )
    assert np.max(np.abs(got - ref.astype(float))) < 1e-14


def test_single_mode_closed_forms():
    x = np.linspace(-math.pi, math.pi, 11)
    t = np.full_like(x, 0.5)
    kappa = np.array([2.0])
    lam = np.array([3.0])
    c = np.array([1.25])
    is_sin = np.array([True])
    assert np.allclose(u_series(x, t, kappa, lam, c, is_sin), 1.25 * np.expm1(-1.5) * np.sin(2 * x))
    assert np.allclose(f_series(x, kappa, lam, c, is_sin), -3.75 * np.sin(2 * x))
    assert np.allclose(
        ut_series(x, t, kappa, lam, c, is_sin), -1.25 * 3.0 * np.exp(-1.5) * np.sin(2 * x)
    )


def test_uxx_mirror_applies_kernel_parity():
    x = np.linspace(-math.pi, math.pi, 11)
    t = np.full_like(x, 0.3)
    kappa = np.array([1.5])
    lam = np.array([2.0])
    c = np.array([0.7])
    sin_mode = np.array([True])
    cos_mode = np.array([False])
    plain = uxx_series(x, t, kappa, lam, c, sin_mode, mirror=False)
    mirrored = uxx_series(x, t, kappa, lam, c, sin_mode, mirror=True)
    assert np.allclose(mirrored, -plain)
    plain = uxx_series(x, t, kappa, lam, c, cos_mode, mirror=False)
    mirrored = uxx_series(x, t, kappa, lam, c, cos_mode, mirror=True)
    assert np.allclose(mirrored, plain)


def test_active_backend_is_reported():
    assert backend() in ("numba", "numpy")
    if HAS_NUMBA and os.environ.get("MIRRORHEAT_BACKEND", "auto") in ("", "auto"):
        assert backend() == "numba"


def _run_probe(env_value):
    env = dict(os.environ)
    if env_value is None:
        env.pop("MIRRORHEAT_BACKEND", None)
    else:
        env["MIRRORHEAT_BACKEND"] = env_value
    code = (
        "from mirrorheat.kernels import backend, warmup\n"
        "warmup()\n"
        "print(backend())\n"
    )
    return subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True
    )


def test_env_flag_selects_numpy_backend():
    proc = _run_probe("numpy")
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.strip() == "numpy"


@pytest.mark.skipif(not HAS_NUMBA, reason="numba not importable")
def test_env_flag_selects_numba_backend():
    proc = _run_probe("numba")
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.strip() == "numba"


def test_env_flag_rejects_unknown_backend():
    proc = _run_probe("cuda")
    assert proc.returncode != 0
    assert "MIRRORHEAT_BACKEND" in proc.stderr


def test_warmup_is_idempotent():
    kernels.warmup()
    kernels.warmup()
