"""Independent reference computations used by several test modules."""

import numpy as np
from scipy.optimize import linear_sum_assignment


def faddeev_leverrier(a):
    """Characteristic polynomial coefficients of ``a`` (highest power first)."""
    n = a.shape[0]
    coeffs = [1.0 + 0j]
    m = np.zeros_like(a)
    for k in range(1, n + 1):
        m = a @ m + coeffs[-1] * np.eye(n)
        coeffs.append(-np.trace(a @ m) / k)
    return np.array(coeffs)


def tridiagonal_charpoly(diag, off):
    """Coefficients of det(lambda I - T) for symmetric tridiagonal T via the three-term recurrence."""
    p_prev = np.array([1.0 + 0j])
    p = np.array([1.0, -diag[0]], dtype=complex)
    for j in range(1, len(diag)):
        nxt = np.convolve(p, [1.0, -diag[j]])
        nxt[2:] -= off[j - 1] ** 2 * p_prev
        p_prev, p = p, nxt
    return p


def match_error(a, b):
    """Largest distance between two multisets of complex numbers after optimal pairing."""
    a, b = np.asarray(a), np.asarray(b)
    cost = np.abs(a[:, None] - b[None, :])
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].max())
