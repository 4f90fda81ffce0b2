"""Frenet apparatus of sampled curves and classification of magnetic curves.

For a normal magnetic curve of F_q with contact profile cos(theta_alpha)
(``S = sum cos^2 theta_alpha``) exactly one of the following holds:

* ``S = 1``: a geodesic, integral curve of +-sum cos(theta_alpha) xi_alpha;
* ``S = 0``: a Legendre circle, kappa1 = |q|, frame {T, -sgn(q) phi T};
* ``0 < S < 1``: a slant helix with kappa1 = |q| sqrt(1 - S),
  kappa2 = |q| sqrt(S), and

      v2 = -sgn(q) phi T / sqrt(1 - S)
      v3 = (sum cos(theta_alpha) xi_alpha - S T) / (sqrt(S) sqrt(1 - S))

Everything here works on the flat model, where covariant derivatives along
the curve are plain coordinate derivatives.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, fields

import numpy as np

from .manifold_core import StructureDims, phi_apply, sum_eta_xi
from .trajectory import SLANT_SLACK, SampledCurve, SlantProfile

MIN_SAMPLES = 7


@dataclass(frozen=True)
class Tolerances:
    """Thresholds used by the apparatus and the classifier."""

    unit_speed: float = 1e-6   # |T| - 1 allowed per sample
    geodesic: float = 1e-7     # kappa1 below this truncates the frame to r = 1
    torsion: float = 1e-6      # kappa2 below this truncates the frame to r = 2
    zero: float = 1e-4         # "vanishes" for curvatures and contact cosines
    constant: float = 1e-4     # relative spread allowed for a "constant" curvature
    slant: float = 1e-6        # spread of eta^alpha(T) allowed for a slant curve
    residual: float = 1e-4     # frame identities, Lorentz equation, integral-curve fit

    @classmethod
    def names(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in self.names()}


class CurveCase(str, enum.Enum):
    GEODESIC_INTEGRAL_CURVE = "geodesic_integral_curve"
    LEGENDRE_CIRCLE = "legendre_circle"
    SLANT_HELIX = "slant_helix"
    NOT_NORMAL_MAGNETIC = "not_normal_magnetic"


# ---------------------------------------------------------------------------
# finite differences

def _uniform_step(t: np.ndarray) -> float:
    if t.size < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, got {t.size}")
    gaps = np.diff(t)
    h = float(np.mean(gaps))
    if np.max(np.abs(gaps - h)) > 1e-9 * max(1.0, float(np.max(np.abs(t)))):
        raise ValueError("finite differences need a uniform t grid")
    return h


def finite_difference(f: np.ndarray, h: float, order: int) -> np.ndarray:
    """Second-order accurate derivative of ``order`` 1..3 along axis 0.

    Central stencils in the interior, one-sided second-order stencils where
    the central one does not fit.
    """
    f = np.asarray(f, dtype=float)
    m = f.shape[0]
    out = np.empty_like(f)
    if order == 1:
        out[1:-1] = (f[2:] - f[:-2]) / (2 * h)
        out[0] = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h)
        out[-1] = (3 * f[-1] - 4 * f[-2] + f[-3]) / (2 * h)
    elif order == 2:
        out[1:-1] = (f[2:] - 2 * f[1:-1] + f[:-2]) / h ** 2
        out[0] = (2 * f[0] - 5 * f[1] + 4 * f[2] - f[3]) / h ** 2
        out[-1] = (2 * f[-1] - 5 * f[-2] + 4 * f[-3] - f[-4]) / h ** 2
    elif order == 3:
        out[2:-2] = (f[4:] - 2 * f[3:-1] + 2 * f[1:-3] - f[:-4]) / (2 * h ** 3)
        for k in (0, 1):
            w = f[k:k + 5]
            out[k] = (-5 * w[0] + 18 * w[1] - 24 * w[2] + 14 * w[3] - 3 * w[4]) / (2 * h ** 3)
        for k in (m - 1, m - 2):
            w = f[k - 4:k + 1][::-1]
            out[k] = -(-5 * w[0] + 18 * w[1] - 24 * w[2] + 14 * w[3] - 3 * w[4]) / (2 * h ** 3)
    else:
        raise ValueError(f"order must be 1, 2 or 3, got {order}")
    return out


def derivatives_numeric(curve: SampledCurve, max_order: int = 3) -> list[np.ndarray]:
    """[gamma', gamma'', ...] up to ``max_order`` at every sample.

    Stored exact derivatives are used where present; the rest are finite
    differences of the highest-order stored quantity.
    """
    if not 1 <= max_order <= 3:
        raise ValueError(f"max_order must be 1, 2 or 3, got {max_order}")
    h = _uniform_step(curve.t)
    known = [curve.points]
    if curve.derivs is not None:
        known.append(curve.derivs)
        if curve.higher is not None:
            known.extend(curve.higher)
    base_order = len(known) - 1
    out = []
    for k in range(1, max_order + 1):
        if k <= base_order:
            out.append(known[k])
        else:
            out.append(finite_difference(known[base_order], h, k - base_order))
    return out


# ---------------------------------------------------------------------------
# Frenet apparatus

@dataclass(frozen=True)
class FrenetApparatus:
    """Frenet frames and curvatures, one entry per sample.

    Undefined entries (v2 on a geodesic sample, v3 and kappa2 where the
    order drops to 2) are NaN.
    """

    order_r: int
    orders: np.ndarray
    T: np.ndarray
    v2: np.ndarray
    v3: np.ndarray
    kappa1: np.ndarray
    kappa2: np.ndarray
    kappa3: np.ndarray
    max_frame_jump: float

    def frames(self) -> list[np.ndarray]:
        return [self.T, self.v2, self.v3][:self.order_r]


def _unit_rows(w: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    norm = np.linalg.norm(w, axis=-1)
    ok = norm > tol
    unit = np.full_like(w, np.nan)
    unit[ok] = w[ok] / norm[ok, None]
    return norm, unit


def _dot(a, b):
    return np.sum(a * b, axis=-1)


def _check_unit_speed(T: np.ndarray, tol: float) -> None:
    dev = float(np.max(np.abs(np.linalg.norm(T, axis=-1) - 1.0)))
    if dev > tol:
        raise ValueError(f"curve is not unit speed: max ||gamma'| - 1| = {dev:.3e} > {tol:g}")


def speed_slack(curve: SampledCurve, derivatives) -> float:
    """Error bound of a finite-difference gamma' recovered from positions.

    Zero when gamma' is stored.  Otherwise h^2/3 |gamma'''| (the one-sided
    stencil's truncation term) plus the rounding term eps |gamma| / h.
    """
    if curve.derivs is not None:
        return 0.0
    h = _uniform_step(curve.t)
    d3 = derivatives[2] if len(derivatives) > 2 else finite_difference(curve.points, h, 3)
    trunc = h * h / 3.0 * float(np.max(np.linalg.norm(d3, axis=-1)))
    rounding = 4 * np.finfo(float).eps * float(np.max(np.abs(curve.points))) / h
    return trunc + rounding


def frenet_apparatus(curve: SampledCurve, derivatives=None,
                     tol: Tolerances = Tolerances()) -> FrenetApparatus:
    """Frenet frame T, v2, v3 and curvatures kappa1..kappa3 per sample.

    The unit-speed precondition is checked at ``tol.unit_speed``, widened by
    the finite-difference error bound when gamma' comes from positions only.
    """
    if derivatives is None:
        derivatives = derivatives_numeric(curve, 3)
    if len(derivatives) < 3:
        raise ValueError("frenet_apparatus needs first, second and third derivatives")
    d1, d2, d3 = (np.asarray(a, dtype=float) for a in derivatives[:3])
    _check_unit_speed(d1, tol.unit_speed + speed_slack(curve, derivatives))
    T = d1 / np.linalg.norm(d1, axis=-1)[:, None]

    # Gram-Schmidt: gamma'' against T
    w2 = d2 - _dot(d2, T)[:, None] * T
    kappa1, v2 = _unit_rows(w2, tol.geodesic)
    has2 = kappa1 > tol.geodesic
    kappa1 = np.where(has2, kappa1, np.linalg.norm(d2, axis=-1))

    # v2' = (gamma''' - <gamma''', v2> v2) / kappa1 ;  v2' + kappa1 T = kappa2 v3
    dv2 = np.full_like(d3, np.nan)
    dv2[has2] = (d3[has2] - _dot(d3[has2], v2[has2])[:, None] * v2[has2]) / kappa1[has2, None]
    w3 = dv2 + kappa1[:, None] * T
    w3 = w3 - _dot(w3, T)[:, None] * T
    w3 = w3 - _dot(w3, v2)[:, None] * v2
    kappa2, v3 = _unit_rows(np.where(has2[:, None], w3, 0.0), tol.torsion)
    has3 = has2 & (kappa2 > tol.torsion)
    kappa2 = np.where(has2, kappa2, np.nan)

    orders = np.where(has3, 3, np.where(has2, 2, 1))

    kappa3 = np.full(T.shape[0], np.nan)
    if np.any(has3):
        h = _uniform_step(curve.t)
        filled = np.where(has3[:, None], v3, 0.0)
        dv3 = finite_difference(filled, h, 1)
        # keep only samples whose stencil sits on order-3 samples
        nbr = has3.copy()
        nbr[1:-1] &= has3[2:] & has3[:-2]
        nbr[0] &= has3[1] & has3[2]
        nbr[-1] &= has3[-2] & has3[-3]
        w4 = dv3 + kappa2[:, None] * v2
        w4 = w4 - _dot(w4, T)[:, None] * T - _dot(w4, v2)[:, None] * v2 \
            - _dot(w4, filled)[:, None] * filled
        kappa3 = np.where(nbr, np.linalg.norm(w4, axis=-1), np.nan)

    if np.all(orders == 3):
        order_r = 3
    elif np.all(orders >= 2):
        order_r = 2
    else:
        order_r = int(np.min(orders))

    jumps = [0.0]
    for vec, mask in ((v2, has2), (v3, has3)):
        both = mask[1:] & mask[:-1]
        if np.any(both):
            jumps.append(float(np.max(np.linalg.norm(vec[1:][both] - vec[:-1][both], axis=-1))))

    return FrenetApparatus(order_r=order_r, orders=orders, T=T, v2=v2, v3=v3,
                           kappa1=kappa1, kappa2=kappa2, kappa3=kappa3,
                           max_frame_jump=max(jumps))


# ---------------------------------------------------------------------------
# slant profile and predicted curvatures

def slant_profile_estimate(curve: SampledCurve, derivatives=None) -> tuple[SlantProfile, float]:
    """Mean of eta^alpha(gamma') per alpha, and the largest deviation from it."""
    T = curve.derivs if derivatives is None else derivatives[0]
    if T is None:
        T = derivatives_numeric(curve, 1)[0]
    z = np.asarray(T)[:, curve.dims.z_slice]
    mean = np.where(np.ptp(z, axis=0) == 0, z[0], z.mean(axis=0))
    drift = float(np.max(np.abs(z - mean)))
    norm_sq = float(np.sum(mean ** 2))
    # rounding on a geodesic can nudge the estimate just past the boundary
    if 1.0 + SLANT_SLACK < norm_sq <= 1.0 + 1e-6:
        mean = mean / math.sqrt(norm_sq)
    return SlantProfile(mean), drift


def predicted_curvatures(q: float, slant: SlantProfile) -> tuple[float, float]:
    """(kappa1, kappa2) = (|q| sqrt(1 - S), |q| sqrt(S)) for S = sum cos^2 theta."""
    q = float(q)
    if q == 0.0:
        raise ValueError("charge q must be nonzero")
    if not isinstance(slant, SlantProfile):
        slant = SlantProfile(slant)
    S = min(max(slant.norm_sq, 0.0), 1.0)
    return abs(q) * math.sqrt(1.0 - S), abs(q) * math.sqrt(S)


def charge_candidates_for_helix(kappa1: float, kappa2: float) -> tuple[tuple[float, float], float]:
    """Charges +-sqrt(k1^2 + k2^2) a phi-helix can be magnetic for, with the
    contact norm k2^2 / (k1^2 + k2^2) it must then have."""
    kappa1, kappa2 = float(kappa1), float(kappa2)
    if not kappa1 > 0:
        raise ValueError("kappa1 must be positive; kappa1 = 0 is the geodesic case")
    if kappa2 < 0:
        raise ValueError("kappa2 must be nonnegative")
    q = math.hypot(kappa1, kappa2)
    return (q, -q), kappa2 ** 2 / q ** 2


# ---------------------------------------------------------------------------
# frame identities

@dataclass(frozen=True)
class FrameResidualReport:
    v2_residual: float
    v3_residual: float | None
    kappa3_max: float | None

    def to_dict(self) -> dict:
        return {"v2": self.v2_residual, "v3": self.v3_residual, "kappa3": self.kappa3_max}


def _nanmax(a) -> float | None:
    a = np.asarray(a, dtype=float)
    a = a[np.isfinite(a)]
    return float(np.max(a)) if a.size else None


def verify_frame_identities(curve: SampledCurve, q: float, apparatus: FrenetApparatus,
                            slant: SlantProfile | None = None,
                            check_v3: bool | None = None) -> FrameResidualReport:
    """Max deviation of the computed v2 (and v3) from their closed expressions.

    ``check_v3=None`` checks v3 only when the apparatus has order 3.
    """
    q = float(q)
    if q == 0.0:
        raise ValueError("charge q must be nonzero")
    dims = curve.dims
    if slant is None:
        slant, _ = slant_profile_estimate(curve)
    S = slant.norm_sq
    if check_v3 is None:
        check_v3 = apparatus.order_r >= 3
    if check_v3 and (apparatus.order_r < 3 or S <= 0.0):
        raise ValueError("v3 is undefined for a Legendre curve (kappa2 = 0)")
    if S >= 1.0:
        raise ValueError("frame identities do not apply to the geodesic case")

    T = apparatus.T
    phiT = phi_apply(dims, T)
    expected_v2 = -math.copysign(1.0, q) * phiT / math.sqrt(1.0 - S)
    v2_res = float(np.nanmax(np.linalg.norm(apparatus.v2 - expected_v2, axis=-1)))

    v3_res = None
    if check_v3:
        xi_sum = np.zeros(dims.dim)
        xi_sum[dims.z_slice] = slant.cos_theta
        expected_v3 = (xi_sum - S * T) / (math.sqrt(S) * math.sqrt(1.0 - S))
        v3_res = float(np.nanmax(np.linalg.norm(apparatus.v3 - expected_v3, axis=-1)))
    return FrameResidualReport(v2_res, v3_res, _nanmax(apparatus.kappa3))


# ---------------------------------------------------------------------------
# classification

@dataclass(frozen=True)
class Classification:
    case: CurveCase
    slant: SlantProfile
    kappa1_est: float
    kappa2_est: float
    q_inferred: float | None
    residuals: dict = field(default_factory=dict)
    order_r: int = 1

    def to_dict(self) -> dict:
        return {
            "case": self.case.value,
            "cos_theta": self.slant.cos_theta.tolist(),
            "slant_norm_sq": self.slant.norm_sq,
            "order_r": self.order_r,
            "kappa1": self.kappa1_est,
            "kappa2": self.kappa2_est,
            "q_inferred": self.q_inferred,
            "residuals": dict(self.residuals),
        }


def _spread(a: np.ndarray) -> tuple[float, float]:
    """Mean and relative spread (max - min) / mean of the finite entries."""
    a = np.asarray(a, dtype=float)
    a = a[np.isfinite(a)]
    if a.size == 0:
        return 0.0, 0.0
    mean = float(np.mean(a))
    width = float(np.max(a) - np.min(a))
    return mean, (width / mean if mean > 0 else math.inf if width > 0 else 0.0)


def _charge_sign(dims: StructureDims, apparatus: FrenetApparatus) -> float:
    # v2 = -sgn(q) phi T / |phi T|
    g = _dot(apparatus.v2, phi_apply(dims, apparatus.T))
    g = g[np.isfinite(g)]
    return -1.0 if np.mean(g) > 0 else 1.0


def _lorentz_residual(dims, q, T, d2) -> float:
    return float(np.max(np.linalg.norm(d2 + q * phi_apply(dims, T), axis=-1)))


def classify(curve: SampledCurve, q: float | None = None,
             tol: Tolerances = Tolerances()) -> Classification:
    """Place a unit-speed curve in the geodesic / Legendre circle / slant helix
    trichotomy for normal magnetic curves of F_q, or reject it.

    A positive case needs constant curvatures *and* the frame identities and
    the Lorentz equation with the inferred charge.  kappa3 is always reported
    but only gates the decision when the curve carries stored tangents.
    With ``q`` given, ``gamma'' + q phi gamma'`` must also vanish.
    """
    if q is not None:
        q = float(q)
        if q == 0.0:
            raise ValueError("charge q must be nonzero")
    dims = curve.dims
    derivs = derivatives_numeric(curve, 3)
    app = frenet_apparatus(curve, derivs, tol)
    slant, slant_drift = slant_profile_estimate(curve, derivs)
    S = slant.norm_sq
    T, d2 = app.T, derivs[1]

    k1_mean, k1_spread = _spread(app.kappa1)
    k2_mean, k2_spread = _spread(app.kappa2)
    k1_max = float(np.max(app.kappa1))
    k2_max = _nanmax(app.kappa2) or 0.0
    residuals = {
        "speed": float(np.max(np.abs(np.linalg.norm(derivs[0], axis=-1) - 1.0))),
        "slant_drift": slant_drift,
        "kappa1_spread": k1_spread,
    }

    def result(case, q_inf=None):
        if q is not None and case is not CurveCase.NOT_NORMAL_MAGNETIC:
            residuals["lorentz_given_q"] = _lorentz_residual(dims, q, T, d2)
            if residuals["lorentz_given_q"] > tol.residual:
                case, q_inf = CurveCase.NOT_NORMAL_MAGNETIC, None
        return Classification(case, slant, k1_mean, k2_mean if math.isfinite(k2_mean) else 0.0,
                              q_inf, residuals, app.order_r)

    if slant_drift > tol.slant:
        return result(CurveCase.NOT_NORMAL_MAGNETIC)

    # (i) geodesic along +-sum cos(theta_alpha) xi_alpha
    if k1_max <= tol.zero:
        fit = float(np.max(np.linalg.norm(T - sum_eta_xi(dims, T), axis=-1)))
        residuals["integral_curve"] = fit
        if abs(S - 1.0) <= tol.residual and fit <= tol.residual:
            return result(CurveCase.GEODESIC_INTEGRAL_CURVE)
        return result(CurveCase.NOT_NORMAL_MAGNETIC)

    if app.order_r < 2 or k1_spread > tol.constant:
        return result(CurveCase.NOT_NORMAL_MAGNETIC)
    sign = _charge_sign(dims, app)

    # (ii) Legendre circle
    if float(np.max(np.abs(slant.cos_theta))) <= tol.zero:
        residuals["kappa2_max"] = k2_max
        if k2_max > tol.zero:
            return result(CurveCase.NOT_NORMAL_MAGNETIC)
        q_inf = sign * k1_mean
        frames = verify_frame_identities(curve, q_inf, app, slant, check_v3=False)
        residuals["v2_frame"] = frames.v2_residual
        residuals["lorentz"] = _lorentz_residual(dims, q_inf, T, d2)
        if max(frames.v2_residual, residuals["lorentz"]) > tol.residual:
            return result(CurveCase.NOT_NORMAL_MAGNETIC)
        return result(CurveCase.LEGENDRE_CIRCLE, q_inf)

    # (iii) non-Legendre slant helix
    residuals["kappa2_spread"] = k2_spread
    if app.order_r < 3 or not 0.0 < S < 1.0 or k2_spread > tol.constant:
        return result(CurveCase.NOT_NORMAL_MAGNETIC)
    (q_abs, _), _ = charge_candidates_for_helix(k1_mean, k2_mean)
    q_inf = sign * q_abs
    frames = verify_frame_identities(curve, q_inf, app, slant, check_v3=True)
    pred1, pred2 = predicted_curvatures(q_inf, slant)
    residuals.update({
        "v2_frame": frames.v2_residual,
        "v3_frame": frames.v3_residual,
        "kappa3": frames.kappa3_max if frames.kappa3_max is not None else 0.0,
        "kappa1_vs_predicted": abs(k1_mean - pred1),
        "kappa2_vs_predicted": abs(k2_mean - pred2),
        "lorentz": _lorentz_residual(dims, q_inf, T, d2),
    })
    checks = ["v2_frame", "v3_frame", "kappa1_vs_predicted", "kappa2_vs_predicted", "lorentz"]
    # from positions alone kappa3 sits on a fourth-difference rounding floor
    if curve.derivs is not None:
        checks.append("kappa3")
    if any(residuals[k] > tol.residual for k in checks):
        return result(CurveCase.NOT_NORMAL_MAGNETIC)
    return result(CurveCase.SLANT_HELIX, q_inf)
