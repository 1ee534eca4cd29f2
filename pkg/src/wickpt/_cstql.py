"""Implicit QL iteration for complex symmetric tridiagonal matrices.

The transformations are complex orthogonal (c**2 + s**2 = 1), not unitary, so
they preserve the complex-symmetric tridiagonal form at O(n) cost per sweep.
A vanishing rotation norm is a breakdown, reported through the status code so
the caller can fall back to a dense unitary QR.
"""

import cmath

import numba
import numpy as np

EPS = 2.220446049250313e-16


@numba.njit(cache=True, nogil=True)
def cs_tql(diag, offdiag, maxit):
    """Eigenvalues of the symmetric tridiagonal matrix (diag, offdiag).

    Returns (eigenvalues, status); status 0 on success, -(l+1) when eigenvalue l
    did not converge within ``maxit`` sweeps, and -(n+1) on rotation breakdown.
    """
    n = diag.shape[0]
    d = diag.copy()
    e = np.zeros(n, np.complex128)
    e[: n - 1] = offdiag
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                if abs(e[m]) <= EPS * (abs(d[m]) + abs(d[m + 1])):
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > maxit:
                return d, -1 - l
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = cmath.sqrt(g * g + 1.0)
            if abs(g + r) >= abs(g - r):
                g = d[m] - d[l] + e[l] / (g + r)
            else:
                g = d[m] - d[l] + e[l] / (g - r)
            s = 1.0 + 0j
            c = 1.0 + 0j
            p = 0j
            i = m - 1
            deflated = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = cmath.sqrt(f * f + g * g)
                e[i + 1] = r
                if r == 0:
                    d[i + 1] -= p
                    e[m] = 0
                    deflated = True
                    break
                if abs(r) <= 1e-5 * (abs(f) + abs(g)):
                    return d, -(n + 1)
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0
    return d, 0
