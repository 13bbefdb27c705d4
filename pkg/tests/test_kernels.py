import importlib

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import eval_genlaguerre, gammaln

from iontomo import _kernels_py, fock, kernels

try:
    from iontomo import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS = [_kernels_py] + ([_compiled] if _compiled is not None else [])
IDS = ["python"] + (["compiled"] if _compiled is not None else [])


def laguerre_element(m, n, lam):
    """<m|D(lam)|n> for m >= n from the associated Laguerre closed form."""
    d = m - n
    x = abs(lam) ** 2
    logpref = 0.5 * (gammaln(n + 1) - gammaln(m + 1))
    return np.exp(logpref - x / 2) * lam**d * eval_genlaguerre(n, d, x)


def laguerre_matrix(lam, n):
    out = np.empty((n, n), complex)
    for i in range(n):
        for j in range(i + 1):
            out[i, j] = laguerre_element(i, j, lam)
            # <j|D(lam)|i> = <i|D(-lam)|j>^*
            out[j, i] = np.conj(laguerre_element(i, j, -lam))
    return out


@pytest.mark.parametrize("mod", BACKENDS, ids=IDS)
@pytest.mark.parametrize("lam", [0.0, 0.3 + 0.1j, -1.2j, 2.5 - 1.0j, 5.0 + 3.0j])
def test_matches_laguerre_closed_form(mod, lam):
    n = 24
    assert np.allclose(mod.displacement_matrix(lam, n), laguerre_matrix(lam, n), atol=1e-12)


@pytest.mark.parametrize("mod", BACKENDS, ids=IDS)
def test_truncated_exponential_agrees_in_bulk(mod):
    # exponentiating on a large space and cropping approximates the exact elements
    lam, n = 1.1 - 0.7j, 16
    big = fock.displacement(120, lam).matrix[:n, :n]
    assert np.allclose(mod.displacement_matrix(lam, n), big, atol=1e-9)


@given(
    re=st.floats(-6.0, 6.0),
    im=st.floats(-6.0, 6.0),
)
@settings(max_examples=40, deadline=None)
def test_backends_agree(re, im):
    lam = complex(re, im)
    ref = _kernels_py.displacement_matrix(lam, 20)
    for mod in BACKENDS:
        assert np.allclose(mod.displacement_matrix(lam, 20), ref, atol=1e-12)
    # matrix elements of a unitary are bounded by one
    assert np.abs(ref).max() <= 1.0 + 1e-12


@pytest.mark.parametrize("mod", BACKENDS, ids=IDS)
def test_displacement_sum_is_weighted_sum(mod, rng):
    lams = rng.normal(size=9) + 1j * rng.normal(size=9)
    coeffs = rng.normal(size=9) + 1j * rng.normal(size=9)
    expect = sum(c * mod.displacement_matrix(l, 12) for l, c in zip(lams, coeffs))
    assert np.allclose(mod.displacement_sum(lams, coeffs, 12), expect, atol=1e-12)


def test_pure_python_env_selects_fallback(monkeypatch):
    monkeypatch.setenv("IONTOMO_PURE_PYTHON", "1")
    mod = importlib.reload(kernels)
    try:
        assert mod.BACKEND == "python"
    finally:
        monkeypatch.delenv("IONTOMO_PURE_PYTHON")
        importlib.reload(kernels)


@pytest.mark.skipif(_compiled is None, reason="extension not built")
def test_compiled_backend_selected_by_default():
    assert kernels.BACKEND == "compiled"
