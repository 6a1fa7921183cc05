"""The numba kernels and their numpy twins must agree to rounding."""

import numpy as np
import pytest

from rktlab import _kernels

needs_numba = pytest.mark.skipif(
    _kernels.NUMBA_IMPLS is None, reason="numba backend unavailable"
)

rng = np.random.default_rng(99)


def _pair(name):
    return _kernels.NUMPY_IMPLS[name], _kernels.NUMBA_IMPLS[name]


@needs_numba
def test_kernel_pow_circle_sum():
    f_np, f_nb = _pair("kernel_pow_circle_sum")
    thetas = rng.uniform(0, 2 * np.pi, 4096)
    weights = rng.uniform(0.1, 1.0, 4096)
    for r, phi, p in [(0.5, 0.3, 2.0), (1.0 - 2.0**-18, 2.0, 1.5), (0.99, -1.0, 4.0)]:
        a = f_np(thetas, weights, r, phi, p)
        b = f_nb(thetas, weights, r, phi, p)
        assert b == pytest.approx(a, rel=1e-12)


@needs_numba
def test_kernel_pow_disk_sum():
    f_np, f_nb = _pair("kernel_pow_disk_sum")
    rhos = rng.uniform(0.0, 1.0, 2048)
    thetas = rng.uniform(0, 2 * np.pi, 2048)
    weights = rng.uniform(0.1, 1.0, 2048)
    a = f_np(rhos, thetas, weights, 0.9, 1.2, 3.0)
    b = f_nb(rhos, thetas, weights, 0.9, 1.2, 3.0)
    assert b == pytest.approx(a, rel=1e-12)


@needs_numba
def test_phi_h_window_sum():
    f_np, f_nb = _pair("phi_h_window_sum")
    ts = rng.uniform(1e-6, 0.1, 160)
    wts = rng.uniform(0.1, 1.0, 160)
    angs = rng.uniform(-0.3, 0.3, 400)
    wangs = rng.uniform(0.1, 1.0, 400)
    for rho, psi, p in [(1.0, 0.0, 2.0), (0.7, 3.0, 1.5), (0.999, 0.1, 4.0)]:
        a = f_np(ts, wts, angs, wangs, rho, psi, p)
        b = f_nb(ts, wts, angs, wangs, rho, psi, p)
        assert b == pytest.approx(a, rel=1e-11)


@needs_numba
def test_pw_rkt_partial_and_grid():
    f_np, f_nb = _pair("pw_rkt_partial")
    pts = np.sort(rng.uniform(-100, 100, 512))
    for a_, b_ in [(0.3, 0.0), (1.7, 1.2), (0.0, -2.0)]:
        assert f_nb(pts, a_, b_) == pytest.approx(f_np(pts, a_, b_), rel=1e-12)
    g_np, g_nb = _pair("pw_rkt_grid")
    res = np.linspace(0, 4, 32)
    ims = np.linspace(-2, 2, 32)
    a = g_np(pts, res, ims)
    b = g_nb(pts, res, ims)
    assert np.allclose(a, b, rtol=1e-12)


@needs_numba
def test_jacobi_eigh():
    f_np, f_nb = _pair("jacobi_eigh")
    b = rng.standard_normal((12, 12)) + 1j * rng.standard_normal((12, 12))
    m = 0.5 * (b + b.conj().T)
    wa, va = f_np(m)
    wb, vb = f_nb(m)
    assert np.allclose(wa, wb, atol=1e-12)
    scale = np.linalg.norm(m)
    for k in range(12):
        assert np.linalg.norm(m @ vb[:, k] - wb[k] * vb[:, k]) <= 1e-10 * scale


def test_backend_env_override(tmp_path):
    import subprocess
    import sys

    env = {"RKTLAB_BACKEND": "numpy", "PATH": "/usr/bin:/bin:/usr/local/bin"}
    out = subprocess.run(
        [sys.executable, "-c", "import rktlab; print(rktlab.ACTIVE_BACKEND)"],
        capture_output=True,
        text=True,
        env=env,
    )
    assert out.stdout.strip() == "numpy"


def test_active_backend_reported():
    assert _kernels.ACTIVE_BACKEND in ("numba", "numpy")
