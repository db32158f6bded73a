"""Dense symmetric eigensolver.

Householder reduction to tridiagonal form followed by the implicit-shift QL
iteration (the classic tred2/tql2 pair), compiled with numba. Used for every
finite-truncation spectrum in the package.
"""

import math

import numpy as np
from numba import njit

from .errors import NumericalError

__all__ = ["EigenConvergenceError", "eigh", "eigvalsh"]

_MAX_QL_SWEEPS = 60


class EigenConvergenceError(NumericalError):
    """QL iteration did not converge within the sweep cap."""


@njit(cache=True)
def _tred2(V, d, e):
    n = V.shape[0]
    for j in range(n):
        d[j] = V[n - 1, j]
    for i in range(n - 1, 0, -1):
        scale = 0.0
        h = 0.0
        for k in range(i):
            scale += abs(d[k])
        if scale == 0.0:
            e[i] = d[i - 1]
            for j in range(i):
                d[j] = V[i - 1, j]
                V[i, j] = 0.0
                V[j, i] = 0.0
        else:
            for k in range(i):
                d[k] /= scale
                h += d[k] * d[k]
            f = d[i - 1]
            g = math.sqrt(h)
            if f > 0:
                g = -g
            e[i] = scale * g
            h = h - f * g
            d[i - 1] = f - g
            for j in range(i):
                e[j] = 0.0
            for j in range(i):
                f = d[j]
                V[j, i] = f
                g = e[j] + V[j, j] * f
                for k in range(j + 1, i):
                    g += V[k, j] * d[k]
                    e[k] += V[k, j] * f
                e[j] = g
            f = 0.0
            for j in range(i):
                e[j] /= h
                f += e[j] * d[j]
            hh = f / (h + h)
            for j in range(i):
                e[j] -= hh * d[j]
            for j in range(i):
                f = d[j]
                g = e[j]
                for k in range(j, i):
                    V[k, j] -= f * e[k] + g * d[k]
                d[j] = V[i - 1, j]
                V[i, j] = 0.0
        d[i] = h

    # accumulate the Householder reflections
    for i in range(n - 1):
        V[n - 1, i] = V[i, i]
        V[i, i] = 1.0
        h = d[i + 1]
        if h != 0.0:
            for k in range(i + 1):
                d[k] = V[k, i + 1] / h
            for j in range(i + 1):
                g = 0.0
                for k in range(i + 1):
                    g += V[k, i + 1] * V[k, j]
                for k in range(i + 1):
                    V[k, j] -= g * d[k]
        for k in range(i + 1):
            V[k, i + 1] = 0.0
    for j in range(n):
        d[j] = V[n - 1, j]
        V[n - 1, j] = 0.0
    V[n - 1, n - 1] = 1.0
    e[0] = 0.0


@njit(cache=True)
def _tql2(V, d, e, max_sweeps):
    """Implicit QL on (d, e); rotations are accumulated into V.

    Returns 0 on success, otherwise the index of the eigenvalue that failed.
    """
    n = V.shape[0]
    for i in range(1, n):
        e[i - 1] = e[i]
    e[n - 1] = 0.0
    f = 0.0
    tst1 = 0.0
    eps = 2.0 ** -52
    for l in range(n):
        tst1 = max(tst1, abs(d[l]) + abs(e[l]))
        m = l
        while m < n:
            if abs(e[m]) <= eps * tst1:
                break
            m += 1
        if m > l:
            sweeps = 0
            while True:
                sweeps += 1
                if sweeps > max_sweeps:
                    return l + 1
                g = d[l]
                p = (d[l + 1] - g) / (2.0 * e[l])
                r = math.hypot(p, 1.0)
                if p < 0:
                    r = -r
                d[l] = e[l] / (p + r)
                d[l + 1] = e[l] * (p + r)
                dl1 = d[l + 1]
                h = g - d[l]
                for i in range(l + 2, n):
                    d[i] -= h
                f += h

                p = d[m]
                c = 1.0
                c2 = c
                c3 = c
                el1 = e[l + 1]
                s = 0.0
                s2 = 0.0
                for i in range(m - 1, l - 1, -1):
                    c3 = c2
                    c2 = c
                    s2 = s
                    g = c * e[i]
                    h = c * p
                    r = math.hypot(p, e[i])
                    e[i + 1] = s * r
                    s = e[i] / r
                    c = p / r
                    p = c * d[i] - s * g
                    d[i + 1] = h + s * (c * g + s * d[i])
                    for k in range(n):
                        h = V[k, i + 1]
                        V[k, i + 1] = s * V[k, i] + c * h
                        V[k, i] = c * V[k, i] - s * h
                p = -s * s2 * c3 * el1 * e[l] / dl1
                e[l] = s * p
                d[l] = c * p
                if abs(e[l]) <= eps * tst1:
                    break
        d[l] = d[l] + f
        e[l] = 0.0
    return 0


def _check_symmetric(a):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    scale = max(np.abs(a).max(initial=0.0), 1.0)
    asym = np.abs(a - a.T).max(initial=0.0)
    if asym > 1e-12 * scale:
        raise ValueError(f"matrix is not symmetric (max |A - A^T| = {asym:.3e})")
    return a


def eigh(a):
    """All eigenpairs of a real symmetric matrix.

    Parameters
    ----------
    a : (n, n) array_like
        Real symmetric matrix.

    Returns
    -------
    w : (n,) ndarray
        Eigenvalues in ascending order.
    v : (n, n) ndarray
        Orthonormal eigenvectors, ``v[:, i]`` belongs to ``w[i]``.
    """
    a = _check_symmetric(a)
    n = a.shape[0]
    if n == 0:
        return np.zeros(0), np.zeros((0, 0))
    if n == 1:
        return a[0].copy(), np.ones((1, 1))
    V = np.asfortranarray(0.5 * (a + a.T))
    d = np.zeros(n)
    e = np.zeros(n)
    _tred2(V, d, e)
    status = _tql2(V, d, e, _MAX_QL_SWEEPS)
    if status:
        norm = np.abs(a).sum(axis=1).max()
        raise EigenConvergenceError(
            f"QL iteration stalled at eigenvalue {status - 1} of {n} after "
            f"{_MAX_QL_SWEEPS} sweeps (||A||_inf = {norm:.3e}, "
            f"max |diag| = {np.abs(np.diag(a)).max():.3e})"
        )
    order = np.argsort(d, kind="stable")
    return d[order], np.ascontiguousarray(V[:, order])


def eigvalsh(a):
    """Eigenvalues only, ascending."""
    return eigh(a)[0]
