"""Certification of rapid (exponential) convergence of sampled families."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict, Optional, Sequence

import numpy as np
import pandas as pd
from scipy.stats import linregress

from sphkit.charts import IDENTITY, SL2Chart, torus_element
from sphkit.cones import toric_limit
from sphkit.config import settings
from sphkit.errors import LimitMismatch

LOG = logging.getLogger(__name__)


@dataclass(frozen=True)
class DecayFamily:
    s: np.ndarray
    points: np.ndarray
    limit: np.ndarray

    @classmethod
    def build(cls, s: Sequence[float], points, limit) -> "DecayFamily":
        s = np.asarray(s, dtype=float)
        points = np.asarray(points, dtype=float).reshape(len(s), -1)
        limit = np.asarray(limit, dtype=float).reshape(-1)
        if np.any(np.diff(s) <= 0):
            raise ValueError("grid must be strictly increasing")
        if not np.all(np.isfinite(points)):
            raise ValueError("family has non-finite points")
        if points.shape[1] != limit.size:
            raise ValueError("limit and points have different dimensions")
        return cls(s, points, limit)

    def distances(self) -> np.ndarray:
        return np.linalg.norm(self.points - self.limit, axis=1)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.points, columns=[f"x{k}" for k in range(self.points.shape[1])])
        frame.insert(0, "s", self.s)
        return frame

    @classmethod
    def from_frame(cls, frame: pd.DataFrame, limit) -> "DecayFamily":
        return cls.build(frame["s"].to_numpy(), frame.drop(columns="s").to_numpy(), limit)


@dataclass(frozen=True)
class RateReport:
    epsilon: float
    constant: float
    r_squared: float
    slopes_agree: bool
    bound_holds: bool

    @property
    def is_rapid(self) -> bool:
        return (
            self.epsilon > 0
            and self.r_squared >= settings.r_squared_min
            and self.slopes_agree
            and self.bound_holds
        )


def fit_rate(family: DecayFamily, window: float = 0.5, floor: float = 1e-14) -> RateReport:
    """Fit ‖x_s - l‖ ≈ C e^{-εs} on the tail of the grid."""
    if family.s.size < 8:
        raise ValueError("at least 8 grid points are needed")
    start = int(family.s.size * (1.0 - window))
    s = family.s[start:]
    d = family.distances()[start:]
    level = floor * (1.0 + float(np.linalg.norm(family.limit)))
    keep = d > level
    if np.count_nonzero(keep) < 4:
        return RateReport(math.inf, 0.0, 1.0, True, True)
    s, d = s[keep], d[keep]
    if np.any(np.diff(d) > 1e-9 * d[:-1] + level):
        raise LimitMismatch("distance to the limit is not decreasing on the tail", {"last": float(d[-1])})
    log_d = np.log(d)
    fit = linregress(s, log_d)
    epsilon = -float(fit.slope)
    constant = math.exp(float(fit.intercept))
    half = s.size // 2
    first = -linregress(s[:half], log_d[:half]).slope if half >= 2 else epsilon
    second = -linregress(s[half:], log_d[half:]).slope if s.size - half >= 2 else epsilon
    slopes_agree = abs(first - second) <= 0.1 * max(abs(first), abs(second), 1e-300)
    bound_holds = bool(np.all(d <= 1.05 * constant * np.exp(-0.95 * epsilon * s)))
    return RateReport(epsilon, constant, float(fit.rvalue**2), bool(slopes_agree), bound_holds)


def toric_family(x: Sequence, psi: Sequence[Sequence], grid: Sequence[float]) -> DecayFamily:
    """Chart coordinates e^{s dψ_j(X)} of exp(sX)·z₀ and their limit."""
    limit = toric_limit(x, psi)
    if not limit.exists:
        raise LimitMismatch("the toric chart has no limit along X")
    values = np.array([float(v) for v in limit.values])
    grid = np.asarray(grid, dtype=float)
    points = np.exp(np.outer(grid, values))
    target = np.where(values == 0, 1.0, 0.0)
    return DecayFamily.build(grid, points, target)


@dataclass(frozen=True)
class OrbitReport:
    families: Dict[str, RateReport]
    limits: Dict[str, float]

    @property
    def passed(self) -> bool:
        return all(r.is_rapid for r in self.families.values())


def orbit_asymptotics(chart: SL2Chart, w_I: np.ndarray, x: float, grid: Sequence[float]) -> OrbitReport:
    """Factor exp(sX)·w_I = u_s m_s a_s w h_s and certify the three families.

    a_s b_s^{-1} is compared with the A-component of w_I, u_s with 1 and m_s
    with its eventual sign.
    """
    if x >= 0:
        raise ValueError("X must lie in the negative chamber")
    grid = np.asarray(grid, dtype=float)
    factors = [chart.factor(torus_element(s * x) @ np.asarray(w_I, dtype=float)) for s in grid]
    a_ratio = np.array([f.a * math.exp(-s * x) for f, s in zip(factors, grid)])
    a_limit = chart.factor(np.asarray(w_I, dtype=float)).a
    u_points = np.array([f.u.ravel() for f in factors])
    m_points = np.array([float(f.m) for f in factors])
    families = {
        "a_s b_s^-1": fit_rate(DecayFamily.build(grid, a_ratio / a_limit, [1.0])),
        "u_s": fit_rate(DecayFamily.build(grid, u_points, IDENTITY.ravel())),
        "m_s": fit_rate(DecayFamily.build(grid, m_points, [m_points[-1]])),
    }
    report = OrbitReport(families, {"a": float(a_limit), "m": float(m_points[-1])})
    LOG.info(
        "orbit asymptotics",
        extra={"subgroup": chart.subgroup, "rapid": report.passed, "u_rate": families["u_s"].epsilon},
    )
    return report


def synthetic_family(grid: Sequence[float], rate: float, direction: Optional[Sequence[float]] = None, kind: str = "exp") -> DecayFamily:
    """l + e^{-rate·s}v or l + s^{-1}v around l = 0."""
    grid = np.asarray(grid, dtype=float)
    v = np.asarray(direction if direction is not None else [1.0], dtype=float)
    profile = np.exp(-rate * grid) if kind == "exp" else 1.0 / grid
    return DecayFamily.build(grid, np.outer(profile, v), np.zeros_like(v))
