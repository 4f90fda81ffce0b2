"""Framed phi-structure on the flat model R^(2n+s).

Coordinates are stored as ``(x_1..x_n, y_1..y_n, z_1..z_s)``.  The
characteristic fields ``xi_alpha`` are the z-axes, ``eta^alpha = dz_alpha``
and ``phi`` rotates each (x_i, y_i) plane while killing the z-block:

    phi X_i = -Y_i,   phi Y_i = X_i,   phi xi_alpha = 0.

Every function accepts a single vector or a stack of vectors (the last axis
is the coordinate axis), and none of them takes a base point: the structure
tensors are constant, so d(Omega) = 0 and d(eta^alpha) = 0 hold identically.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

DEFAULT_TOL = 1e-12


@dataclass(frozen=True)
class StructureDims:
    """Number of rotated plane pairs ``n`` and characteristic directions ``s``."""

    n: int
    s: int

    def __post_init__(self):
        for name in ("n", "s"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
            object.__setattr__(self, name, int(value))

    @property
    def dim(self) -> int:
        return 2 * self.n + self.s

    @property
    def x_slice(self) -> slice:
        return slice(0, self.n)

    @property
    def y_slice(self) -> slice:
        return slice(self.n, 2 * self.n)

    @property
    def z_slice(self) -> slice:
        return slice(2 * self.n, 2 * self.n + self.s)

    def coord_names(self) -> list[str]:
        return ([f"x{i}" for i in range(1, self.n + 1)]
                + [f"y{i}" for i in range(1, self.n + 1)]
                + [f"z{a}" for a in range(1, self.s + 1)])


def as_vec(dims: StructureDims, v) -> np.ndarray:
    """Convert to a float array whose last axis has length ``2n+s``."""
    arr = np.asarray(v, dtype=float)
    if arr.ndim == 0 or arr.shape[-1] != dims.dim:
        raise ValueError(
            f"expected vectors of length {dims.dim} for (n={dims.n}, s={dims.s}), "
            f"got shape {arr.shape}")
    return arr


def basis_x(dims: StructureDims, i: int) -> np.ndarray:
    """Coordinate field X_i (1-based)."""
    if not 1 <= i <= dims.n:
        raise ValueError(f"i must be in 1..{dims.n}, got {i}")
    v = np.zeros(dims.dim)
    v[i - 1] = 1.0
    return v


def basis_y(dims: StructureDims, i: int) -> np.ndarray:
    """Coordinate field Y_i (1-based)."""
    if not 1 <= i <= dims.n:
        raise ValueError(f"i must be in 1..{dims.n}, got {i}")
    v = np.zeros(dims.dim)
    v[dims.n + i - 1] = 1.0
    return v


def xi(dims: StructureDims, alpha: int) -> np.ndarray:
    """Characteristic field xi_alpha (1-based)."""
    if not 1 <= alpha <= dims.s:
        raise ValueError(f"alpha must be in 1..{dims.s}, got {alpha}")
    v = np.zeros(dims.dim)
    v[2 * dims.n + alpha - 1] = 1.0
    return v


def phi_apply(dims: StructureDims, v) -> np.ndarray:
    v = as_vec(dims, v)
    out = np.zeros_like(v)
    out[..., dims.x_slice] = v[..., dims.y_slice]
    out[..., dims.y_slice] = -v[..., dims.x_slice]
    return out


def phi_matrix(dims: StructureDims) -> np.ndarray:
    """Matrix of phi acting on column vectors."""
    return phi_apply(dims, np.eye(dims.dim)).T


def eta(dims: StructureDims, alpha: int, v):
    """eta^alpha(v) = g(v, xi_alpha), i.e. the z_alpha coordinate."""
    if not 1 <= alpha <= dims.s:
        raise ValueError(f"alpha must be in 1..{dims.s}, got {alpha}")
    v = as_vec(dims, v)
    return v[..., 2 * dims.n + alpha - 1]


def eta_all(dims: StructureDims, v) -> np.ndarray:
    """All eta^alpha(v) at once, shape ``(..., s)``."""
    return as_vec(dims, v)[..., dims.z_slice]


def metric(u, v):
    """Euclidean metric; broadcasts over leading axes."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape[-1:] != v.shape[-1:]:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    return np.sum(u * v, axis=-1)


def fundamental_two_form(dims: StructureDims, u, v):
    """Omega(u, v) = g(u, phi v)."""
    u = as_vec(dims, u)
    return metric(u, phi_apply(dims, v))


def sum_eta_xi(dims: StructureDims, v) -> np.ndarray:
    """Projection onto the characteristic block: sum_alpha eta^alpha(v) xi_alpha."""
    v = as_vec(dims, v)
    out = np.zeros_like(v)
    out[..., dims.z_slice] = v[..., dims.z_slice]
    return out


@dataclass(frozen=True)
class IdentityReport:
    max_residual_phi_sq: float
    max_residual_metric: float
    max_residual_eta_phi: float
    samples: int
    tol: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "max_residual_phi_sq": self.max_residual_phi_sq,
            "max_residual_metric": self.max_residual_metric,
            "max_residual_eta_phi": self.max_residual_eta_phi,
            "samples": self.samples,
            "tol": self.tol,
            "pass": self.passed,
        }


def verify_structure(dims: StructureDims, samples: int = 1000, tol: float = DEFAULT_TOL,
                     seed: int = 0,
                     phi: Callable[[StructureDims, np.ndarray], np.ndarray] = phi_apply,
                     ) -> IdentityReport:
    """Check the framed phi-structure identities on seeded random vector pairs.

    Residuals are max-norm violations of

    * phi^2 X = -X + sum_alpha eta^alpha(X) xi_alpha,
    * g(phi X, phi Y) = g(X, Y) - sum_alpha eta^alpha(X) eta^alpha(Y),
    * eta^alpha(phi X) = 0.

    ``phi`` can be swapped out to exercise the checker against a broken
    operator.
    """
    if int(samples) != samples or samples < 1:
        raise ValueError(f"samples must be a positive integer, got {samples!r}")
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((int(samples), dims.dim))
    Y = rng.standard_normal((int(samples), dims.dim))

    phiX = phi(dims, X)
    phiY = phi(dims, Y)
    r_sq = phi(dims, phiX) + X - sum_eta_xi(dims, X)
    eta_dot = np.sum(eta_all(dims, X) * eta_all(dims, Y), axis=-1)
    r_metric = metric(phiX, phiY) - metric(X, Y) + eta_dot
    r_eta = eta_all(dims, phiX)

    res = (float(np.max(np.abs(r_sq))), float(np.max(np.abs(r_metric))),
           float(np.max(np.abs(r_eta))))
    return IdentityReport(*res, samples=int(samples), tol=float(tol),
                          passed=all(r <= tol for r in res))
