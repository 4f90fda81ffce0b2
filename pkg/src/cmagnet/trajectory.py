"""Normal magnetic curves for the contact magnetic field F_q = q Omega.

The Lorentz force of F_q is -q phi, so a normal magnetic curve solves
``gamma'' = -q phi gamma'`` with ``|gamma'| = 1``.  Curves are produced either
by fixed-step RK4 (:func:`integrate`) or by evaluating the closed form
(:func:`closed_form`)

    gamma_i      =  (c_i / q) sin(q t + d_i) + b_i
    gamma_{n+i}  = -(c_i / q) cos(q t + d_i) + b_{n+i}
    gamma_{2n+a} =  cos(theta_a) t + h_a
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .manifold_core import StructureDims, as_vec, phi_apply

UNIT_TOL = 1e-9
# |T|^2 for |T| within UNIT_TOL of 1
SPEED_SQ_TOL = 3e-9
# slack on sum cos^2 <= 1 so estimated profiles of geodesics stay constructible
SLANT_SLACK = 1e-9


@dataclass(frozen=True)
class SlantProfile:
    """Contact angles of a slant curve, stored as cos(theta_alpha)."""

    cos_theta: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.cos_theta, dtype=float)).copy()
        if c.ndim != 1 or c.size == 0 or not np.all(np.isfinite(c)):
            raise ValueError(f"cos_theta must be a nonempty finite 1-d array, got {c!r}")
        if np.any(np.abs(c) > 1.0 + SLANT_SLACK):
            raise ValueError(f"|cos theta| must be <= 1, got {c}")
        if np.sum(c * c) > 1.0 + SLANT_SLACK:
            raise ValueError(f"slant inequality violated: sum cos^2 = {np.sum(c * c)!r} > 1")
        c.flags.writeable = False
        object.__setattr__(self, "cos_theta", c)

    @property
    def s(self) -> int:
        return self.cos_theta.size

    @property
    def norm_sq(self) -> float:
        """sum_alpha cos^2 theta_alpha."""
        return float(np.sum(self.cos_theta ** 2))

    @property
    def is_legendre(self) -> bool:
        return bool(np.all(self.cos_theta == 0.0))


@dataclass(frozen=True)
class MagneticCurveParams:
    q: float
    c: np.ndarray
    d: np.ndarray
    b: np.ndarray
    h: np.ndarray
    slant: SlantProfile

    def __post_init__(self):
        q = float(self.q)
        if q == 0.0 or not math.isfinite(q):
            raise ValueError(f"charge q must be finite and nonzero, got {self.q!r}")
        object.__setattr__(self, "q", q)
        for name in ("c", "d", "b", "h"):
            arr = np.atleast_1d(np.asarray(getattr(self, name), dtype=float)).copy()
            if arr.ndim != 1 or not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} must be a finite 1-d array")
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if not isinstance(self.slant, SlantProfile):
            object.__setattr__(self, "slant", SlantProfile(self.slant))
        n = self.c.size
        if n < 1 or self.d.size != n or self.b.size != 2 * n:
            raise ValueError(f"need len(c) = len(d) = n >= 1 and len(b) = 2n; got "
                             f"{self.c.size}, {self.d.size}, {self.b.size}")
        if self.h.size != self.slant.s:
            raise ValueError(f"len(h) = {self.h.size} does not match s = {self.slant.s}")
        if np.any(self.c < 0):
            raise ValueError(f"amplitudes c must be nonnegative, got {self.c}")
        speed_sq = float(np.sum(self.c ** 2)) + self.slant.norm_sq
        if abs(speed_sq - 1.0) > SPEED_SQ_TOL:
            raise ValueError(f"unit speed requires sum c^2 + sum cos^2 theta = 1, got {speed_sq!r}")

    @property
    def dims(self) -> StructureDims:
        return StructureDims(self.c.size, self.slant.s)

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "c": self.c.tolist(),
            "d": self.d.tolist(),
            "b": self.b.tolist(),
            "h": self.h.tolist(),
            "cos_theta": self.slant.cos_theta.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MagneticCurveParams":
        return cls(q=data["q"], c=data["c"], d=data["d"], b=data["b"], h=data["h"],
                   slant=SlantProfile(data["cos_theta"]))


@dataclass(frozen=True)
class SampledCurve:
    """Samples (t_k, gamma(t_k)), optionally with exact derivatives.

    ``derivs`` holds gamma'; ``higher`` optionally holds exact (gamma'', gamma''')
    when the curve came from a closed form.
    """

    dims: StructureDims
    t: np.ndarray
    points: np.ndarray
    derivs: np.ndarray | None = None
    higher: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        pts = as_vec(self.dims, self.points)
        if t.ndim != 1 or t.size == 0:
            raise ValueError("t must be a nonempty 1-d array")
        if pts.shape != (t.size, self.dims.dim):
            raise ValueError(f"points shape {pts.shape} does not match ({t.size}, {self.dims.dim})")
        if np.any(np.diff(t) <= 0):
            raise ValueError("t must be strictly increasing")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(pts))):
            raise ValueError("samples must be finite")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "points", pts)
        if self.derivs is not None:
            d = as_vec(self.dims, self.derivs)
            if d.shape != pts.shape:
                raise ValueError("derivs must have the same shape as points")
            object.__setattr__(self, "derivs", d)
        if self.higher is not None:
            hi = tuple(as_vec(self.dims, a) for a in self.higher)
            if self.derivs is None or any(a.shape != pts.shape for a in hi):
                raise ValueError("higher derivatives need derivs and matching shapes")
            object.__setattr__(self, "higher", hi)

    def __len__(self) -> int:
        return self.t.size

    def without_derivatives(self) -> "SampledCurve":
        return SampledCurve(self.dims, self.t, self.points)


def lorentz_rhs(dims: StructureDims, q: float, tangent) -> np.ndarray:
    """Lorentz force -q phi T; zero for q = 0."""
    return -float(q) * phi_apply(dims, tangent)


def time_grid(t_end: float, dt: float) -> np.ndarray:
    """0, dt, 2dt, ..., ending exactly at t_end (last gap may be shorter)."""
    nsteps, h_last = _step_plan(t_end, dt)
    t = np.arange(nsteps + 1) * float(dt)
    if h_last > 0:
        t = np.append(t, float(t_end))
    else:
        t[-1] = float(t_end)
    return t


def _step_plan(t_end: float, dt: float) -> tuple[int, float]:
    t_end = float(t_end)
    dt = float(dt)
    if not (math.isfinite(t_end) and t_end > 0):
        raise ValueError(f"t_end must be positive, got {t_end!r}")
    if not (math.isfinite(dt) and dt > 0):
        raise ValueError(f"dt must be positive, got {dt!r}")
    if dt > t_end:
        raise ValueError(f"dt = {dt} exceeds t_end = {t_end}")
    ratio = t_end / dt
    nsteps = int(math.floor(ratio + 1e-9))
    rem = t_end - nsteps * dt
    if rem <= 1e-12 * max(1.0, t_end):
        return nsteps, 0.0
    return nsteps, rem


def _check_unit(dims: StructureDims, T0) -> np.ndarray:
    T0 = as_vec(dims, T0)
    if T0.ndim != 1:
        raise ValueError("initial tangent must be a single vector")
    norm = float(np.linalg.norm(T0))
    if abs(norm - 1.0) > UNIT_TOL:
        raise ValueError(f"initial tangent must be unit length (tol {UNIT_TOL}), |T0| = {norm!r}")
    return T0


def _check_charge(q) -> float:
    q = float(q)
    if q == 0.0 or not math.isfinite(q):
        raise ValueError(f"charge q must be finite and nonzero, got {q!r}")
    return q


def integrate(dims: StructureDims, q: float, p0, T0, t_end: float, dt: float) -> SampledCurve:
    """Fixed-step RK4 on (gamma, T)' = (T, -q phi T); tangents are stored as derivs."""
    q = _check_charge(q)
    p0 = as_vec(dims, p0)
    if p0.ndim != 1:
        raise ValueError("initial point must be a single vector")
    T0 = _check_unit(dims, T0)
    nsteps, h_last = _step_plan(t_end, dt)
    P, V = _kernels.rk4_lorentz(p0, T0, q, dims.n, float(dt), nsteps, h_last)
    return SampledCurve(dims, time_grid(t_end, dt), P, derivs=V)


def closed_form(dims: StructureDims, params: MagneticCurveParams, t_grid) -> SampledCurve:
    if params.dims != dims:
        raise ValueError(f"params are for {params.dims}, not {dims}")
    t = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if t.size == 0:
        raise ValueError("t_grid must be nonempty")
    q, n = params.q, dims.n
    c, d = params.c, params.d
    phase = q * t[:, None] + d[None, :]
    sin, cos = np.sin(phase), np.cos(phase)
    cos_theta = params.slant.cos_theta

    pts = np.empty((t.size, dims.dim))
    pts[:, :n] = c / q * sin + params.b[:n]
    pts[:, n:2 * n] = -c / q * cos + params.b[n:]
    pts[:, 2 * n:] = t[:, None] * cos_theta + params.h

    d1 = np.empty_like(pts)
    d1[:, :n] = c * cos
    d1[:, n:2 * n] = c * sin
    d1[:, 2 * n:] = cos_theta

    d2 = np.zeros_like(pts)
    d2[:, :n] = -c * q * sin
    d2[:, n:2 * n] = c * q * cos

    d3 = np.zeros_like(pts)
    d3[:, :n] = -c * q * q * cos
    d3[:, n:2 * n] = -c * q * q * sin
    return SampledCurve(dims, t, pts, derivs=d1, higher=(d2, d3))


def params_from_initial_conditions(dims: StructureDims, q: float, p0, T0) -> MagneticCurveParams:
    """Closed-form constants of the magnetic curve through p0 with tangent T0."""
    q = _check_charge(q)
    p0 = as_vec(dims, p0)
    T0 = _check_unit(dims, T0)
    n = dims.n
    tx, ty = T0[:n], T0[n:2 * n]
    c = np.hypot(tx, ty)
    d = np.where(c > 0, np.arctan2(ty, tx), 0.0)
    cos_theta = T0[2 * n:]
    b = np.concatenate([p0[:n] - c / q * np.sin(d), p0[n:2 * n] + c / q * np.cos(d)])
    return MagneticCurveParams(q=q, c=c, d=d, b=b, h=p0[2 * n:].copy(),
                               slant=SlantProfile(cos_theta))
