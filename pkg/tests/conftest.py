import numpy as np
import pytest

from cmagnet.manifold_core import StructureDims
from cmagnet.trajectory import SampledCurve


def unit_tangent(dims, cos_theta, direction=None, rng=None):
    """Unit vector with the given z-block and a horizontal part along ``direction``."""
    cos_theta = np.asarray(cos_theta, dtype=float)
    if direction is None:
        direction = (rng or np.random.default_rng(0)).standard_normal(2 * dims.n)
    direction = np.asarray(direction, dtype=float)
    horiz = np.sqrt(max(0.0, 1.0 - np.sum(cos_theta ** 2)))
    norm = np.linalg.norm(direction)
    head = direction / norm * horiz if norm > 0 else direction
    return np.concatenate([head, cos_theta])


def parabola_curve(t_end=4.0, dt=1e-3, a=1.0):
    """Arc-length parametrized (u, 0, a u^2 / 2) in R^3 (n = s = 1).

    Unit speed but with a varying contact angle, so it is not slant and
    cannot be magnetic.  Stored tangents are exact.
    """
    s_grid = np.arange(0.0, t_end + dt / 2, dt)

    def arclength(u):
        au = a * u
        return 0.5 * (u * np.sqrt(1 + au * au) + np.arcsinh(au) / a)

    u = s_grid.copy()
    for _ in range(60):
        step = (arclength(u) - s_grid) / np.sqrt(1 + (a * u) ** 2)
        u -= step
        if np.max(np.abs(step)) < 1e-15:
            break
    pts = np.column_stack([u, np.zeros_like(u), a * u * u / 2])
    speed = np.sqrt(1 + (a * u) ** 2)
    T = np.column_stack([1 / speed, np.zeros_like(u), a * u / speed])
    return SampledCurve(StructureDims(1, 1), s_grid, pts, derivs=T)


_ACCEPTANCE = []


@pytest.fixture
def record():
    def _record(criterion, passed, detail):
        _ACCEPTANCE.append((criterion, bool(passed), detail))
        return passed
    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(
            f"{'PASS' if passed else 'FAIL'}  criterion {criterion:>2}: {detail}")
