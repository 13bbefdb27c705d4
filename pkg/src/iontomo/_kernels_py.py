"""Pure-NumPy fallback for the compiled displacement kernels.

Same diagonal Laguerre recurrence as ``_kernels.pyx``, vectorized over all
displacement amplitudes at once.
"""

import numpy as np


def _stack(lams: np.ndarray, n: int) -> np.ndarray:
    """``D(lam_p)`` for every amplitude, shape ``(len(lams), n, n)``."""
    x = np.abs(lams) ** 2
    out = np.empty((len(lams), n, n), complex)
    base = np.exp(-0.5 * x).astype(complex)
    for d in range(n):
        if d > 0:
            base = base * lams / np.sqrt(d)
        sign = -1.0 if d % 2 else 1.0
        lag_prev = np.zeros_like(x)
        lag = np.ones_like(x)
        q = 1.0
        for k in range(n - d):
            v = base * (q * lag)
            out[:, k + d, k] = v
            if d > 0:
                out[:, k, k + d] = sign * v.conj()
            lag, lag_prev = ((2 * k + 1 + d - x) * lag - (k + d) * lag_prev) / (k + 1), lag
            q *= np.sqrt((k + 1.0) / (k + 1.0 + d))
    return out


def displacement_matrix(lam, n):
    """Exact ``<m|D(lam)|k>`` for ``m, k < n``."""
    return _stack(np.array([lam], complex), n)[0]


def displacement_sum(lams, coeffs, n, chunk=512):
    """``sum_p coeffs[p] * D(lams[p])`` cropped to ``n`` levels."""
    lams = np.ascontiguousarray(lams, dtype=complex)
    coeffs = np.ascontiguousarray(coeffs, dtype=complex)
    if lams.shape != coeffs.shape:
        raise ValueError("lams and coeffs must have the same length")
    acc = np.zeros((n, n), complex)
    for start in range(0, len(lams), chunk):
        sl = slice(start, start + chunk)
        acc += np.tensordot(coeffs[sl], _stack(lams[sl], n), axes=1)
    return acc
