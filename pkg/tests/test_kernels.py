import os
import subprocess
import sys

import mpmath
import numpy as np
import pytest

from filmcasimir import _kernels as K
from filmcasimir._jit import JIT_ENABLED
from filmcasimir.lifshitz import compute

from conftest import make_system

needs_numba = pytest.mark.skipif(not JIT_ENABLED, reason="numba not available")


def _block():
    l = np.arange(1, 60)
    xi = l * 0.1624
    e1 = 1 + 8.6 ** 2 / (xi * (xi + 0.0325))
    e2 = 1 + 9.66 ** 2 / (xi * (xi + 0.0315))
    q2 = (xi / 197.3269804) ** 2
    a = 40.0
    ymin = 2 * a * np.sqrt(e2 * q2)
    regime = np.full(l.size, K.MATSUBARA)
    return a, regime, e1, e2, q2, ymin


@needs_numba
@pytest.mark.parametrize("kind", [K.FREE_ENERGY, K.PRESSURE])
def test_backends_agree_on_block(kind):
    a, regime, e1, e2, q2, ymin = _block()
    jn, pn, okn = K.integrate_block(a, kind, regime, e1, e2, q2, ymin, backend="numba")
    jp, pp, okp = K.integrate_block(a, kind, regime, e1, e2, q2, ymin, backend="numpy")
    assert okn.all() and okp.all()
    np.testing.assert_allclose(jn, jp, rtol=1e-13)
    np.testing.assert_array_equal(pn, pp)


@needs_numba
@pytest.mark.parametrize("variant", ["simple-drude", "simple-plasma"])
def test_backends_agree_end_to_end(variant):
    s = make_system("Au", "Al", a=35.0, variant=variant)
    rn = compute(s, backend="numba")
    rp = compute(s, backend="numpy")
    assert rn.free_energy == pytest.approx(rp.free_energy, rel=1e-12)
    assert rn.pressure == pytest.approx(rp.pressure, rel=1e-12)
    assert rn.l_max == rp.l_max


def test_known_integral():
    # int_0^inf y ln(1 + r e^-y) dy = -Li3(-r); r = 0.5
    J, _, ok = K.integrate_block(10.0, K.FREE_ENERGY, np.array([K.DRUDE_STATIC]), np.array([0.5]),
                                 np.zeros(1), np.zeros(1), np.zeros(1), backend="numpy")
    assert ok[0]
    assert J[0] == pytest.approx(float(-mpmath.polylog(3, -0.5)), rel=1e-12)


def test_far_terms_skipped():
    J, panels, ok = K.integrate_block(10.0, K.FREE_ENERGY, np.array([K.MATSUBARA]), np.array([2.0]),
                                      np.array([2.0]), np.array([1.0]), np.array([K.YMIN_SKIP + 1]),
                                      backend="numpy")
    assert J[0] == 0.0 and panels[0] == 0 and ok[0]


def test_breakpoints_cover_span():
    b = K.breakpoints(K.MATSUBARA, 3.0)
    assert b[0] == 3.0 and b[-1] == 3.0 + K.SPAN
    u = K.breakpoints(K.PLASMA_STATIC, 3.0)
    # u^2 + ymin^2 = y^2 maps the same offsets
    np.testing.assert_allclose(np.sqrt(u ** 2 + 9.0), b)


def test_env_flag_selects_numpy():
    env = dict(os.environ, FILMCASIMIR_DISABLE_JIT="1")
    code = ("from filmcasimir._jit import JIT_ENABLED; from filmcasimir._kernels import default_backend;"
            "print(JIT_ENABLED, default_backend())")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["False", "numpy"]


def test_numba_backend_refused_when_disabled(monkeypatch):
    monkeypatch.setattr(K, "JIT_ENABLED", False)
    with pytest.raises(RuntimeError):
        K.integrate_block(10.0, 0, np.array([2]), np.array([0.1]), np.zeros(1), np.zeros(1), np.zeros(1),
                          backend="numba")
