"""Open-orbit charts of SL(2,R)/H for H = SO(2) and H = SO(1,1)₀.

A point g·z₀ of an open P-orbit factors as g = u·m·a·w·h with u ∈ N,
m ∈ {±1}, a ∈ A, h ∈ H and w a fixed orbit representative. The bottom row
of g determines (m, a, h); u is what is left over.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from sphkit.errors import FactorizationFailure

IDENTITY = np.eye(2)
WEYL = np.array([[0.0, 1.0], [-1.0, 0.0]])


def torus_element(x: float) -> np.ndarray:
    """exp(xH)."""
    return np.diag([math.exp(x), math.exp(-x)])


def unipotent(t: float) -> np.ndarray:
    """exp(tE)."""
    return np.array([[1.0, t], [0.0, 1.0]])


def lower_unipotent(t: float) -> np.ndarray:
    """exp(tF)."""
    return np.array([[1.0, 0.0], [t, 1.0]])


@dataclass(frozen=True)
class Factorization:
    u: np.ndarray
    m: int
    a: float
    w: np.ndarray
    h: np.ndarray

    def product(self) -> np.ndarray:
        return self.u @ (self.m * np.diag([self.a, 1.0 / self.a])) @ self.w @ self.h


class SL2Chart:
    """Factorization routine for one of the two symmetric subgroups of SL(2,R)."""

    SUBGROUPS = ("so2", "so11")

    def __init__(self, subgroup: str, margin: float = 1e-12):
        if subgroup not in self.SUBGROUPS:
            raise ValueError(f"unknown subgroup {subgroup!r}")
        self.subgroup = subgroup
        self.margin = margin

    def h_element(self, t: float) -> np.ndarray:
        if self.subgroup == "so2":
            return np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]])
        return np.array([[math.cosh(t), math.sinh(t)], [math.sinh(t), math.cosh(t)]])

    def factor(self, g: np.ndarray) -> Factorization:
        g = np.asarray(g, dtype=float)
        c, d = g[1]
        scale = math.hypot(c, d)
        if self.subgroup == "so2":
            t = math.atan2(c, d)
            m, inv_a, w = 1, scale, IDENTITY
        elif abs(abs(d) - abs(c)) <= self.margin * scale:
            raise FactorizationFailure("point left the open orbits", {"bottom_row": [c, d]})
        elif abs(d) > abs(c):
            t = math.atanh(c / d)
            m, inv_a, w = (1 if d > 0 else -1), math.sqrt(d * d - c * c), IDENTITY
        else:
            t = math.atanh(d / c)
            m, inv_a, w = (-1 if c > 0 else 1), math.sqrt(c * c - d * d), WEYL
        a = 1.0 / inv_a
        h = self.h_element(t)
        rest = g @ np.linalg.inv(w @ h) @ np.diag([1.0 / a, a]) * m
        if abs(rest[1, 0]) > 1e-9 * max(1.0, np.abs(rest).max()) or abs(rest[1, 1] - 1.0) > 1e-9:
            raise FactorizationFailure("factorization residual is not unipotent", {"residual": rest.tolist()})
        return Factorization(unipotent(rest[0, 1]), m, a, w, h)
