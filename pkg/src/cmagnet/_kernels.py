"""RK4 stepping of the Lorentz flow (gamma, T)' = (T, -q phi T).

Two interchangeable implementations live here: a scalar-loop kernel compiled
with numba, and a pure-numpy one.  ``CMAGNET_NUMBA=0`` in the environment (or
a missing numba) selects the numpy path; both produce the same arrays up to
floating-point reassociation.
"""
from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("CMAGNET_NUMBA", "1").strip().lower() not in (
    "0", "false", "no", "off")


def _lorentz_accel(n, q, T):
    out = np.zeros_like(T)
    out[:n] = -q * T[n:2 * n]
    out[n:2 * n] = q * T[:n]
    return out


def rk4_lorentz_numpy(p0, T0, q, n, h, nsteps, h_last):
    """Numpy reference path.

    Takes ``nsteps`` steps of size ``h`` followed by one step of ``h_last``
    when ``h_last > 0``.  Returns positions and tangents, one row per sample.
    """
    total = nsteps + 1 + (1 if h_last > 0.0 else 0)
    P = np.empty((total, p0.shape[0]))
    V = np.empty((total, p0.shape[0]))
    P[0] = p0
    V[0] = T0
    p = p0.copy()
    v = T0.copy()
    for k in range(1, total):
        dt = h if k <= nsteps else h_last
        a1 = _lorentz_accel(n, q, v)
        v2 = v + 0.5 * dt * a1
        a2 = _lorentz_accel(n, q, v2)
        v3 = v + 0.5 * dt * a2
        a3 = _lorentz_accel(n, q, v3)
        v4 = v + dt * a3
        a4 = _lorentz_accel(n, q, v4)
        p = p + dt / 6.0 * (v + 2.0 * v2 + 2.0 * v3 + v4)
        v = v + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        P[k] = p
        V[k] = v
    return P, V


def _rk4_lorentz_loops(p0, T0, q, n, h, nsteps, h_last):
    dim = p0.shape[0]
    total = nsteps + 1 + (1 if h_last > 0.0 else 0)
    P = np.empty((total, dim))
    V = np.empty((total, dim))
    a1 = np.empty(dim)
    a2 = np.empty(dim)
    a3 = np.empty(dim)
    a4 = np.empty(dim)
    v2 = np.empty(dim)
    v3 = np.empty(dim)
    v4 = np.empty(dim)
    for j in range(dim):
        P[0, j] = p0[j]
        V[0, j] = T0[j]
    for k in range(1, total):
        dt = h if k <= nsteps else h_last
        v = V[k - 1]
        # a = -q phi v: x-block gets -q*y, y-block gets q*x, z-block is zero
        for j in range(dim):
            a1[j] = 0.0
            a2[j] = 0.0
            a3[j] = 0.0
            a4[j] = 0.0
        for i in range(n):
            a1[i] = -q * v[n + i]
            a1[n + i] = q * v[i]
        for j in range(dim):
            v2[j] = v[j] + 0.5 * dt * a1[j]
        for i in range(n):
            a2[i] = -q * v2[n + i]
            a2[n + i] = q * v2[i]
        for j in range(dim):
            v3[j] = v[j] + 0.5 * dt * a2[j]
        for i in range(n):
            a3[i] = -q * v3[n + i]
            a3[n + i] = q * v3[i]
        for j in range(dim):
            v4[j] = v[j] + dt * a3[j]
        for i in range(n):
            a4[i] = -q * v4[n + i]
            a4[n + i] = q * v4[i]
        for j in range(dim):
            P[k, j] = P[k - 1, j] + dt / 6.0 * (v[j] + 2.0 * v2[j] + 2.0 * v3[j] + v4[j])
            V[k, j] = v[j] + dt / 6.0 * (a1[j] + 2.0 * a2[j] + 2.0 * a3[j] + a4[j])
    return P, V


if HAVE_NUMBA:
    rk4_lorentz_numba = njit(cache=True)(_rk4_lorentz_loops)
else:  # pragma: no cover
    rk4_lorentz_numba = None


def rk4_lorentz(p0, T0, q, n, h, nsteps, h_last):
    """Dispatch to the compiled kernel when enabled, else the numpy path."""
    p0 = np.ascontiguousarray(p0, dtype=np.float64)
    T0 = np.ascontiguousarray(T0, dtype=np.float64)
    if USE_NUMBA:
        return rk4_lorentz_numba(p0, T0, float(q), int(n), float(h), int(nsteps),
                                 float(h_last))
    return rk4_lorentz_numpy(p0, T0, float(q), int(n), float(h), int(nsteps),
                             float(h_last))
