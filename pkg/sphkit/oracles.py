"""Reference values for the spherical functions of the hyperbolic plane.

φ_λ(r) = P_{-1/2+iλ}(cosh r) solves φ'' + coth(r)φ' + (λ² + 1/4)φ = 0 with
φ(0) = 1. Values come from the Laplace integral by algebraic-weight
quadrature; the series and the λ = 0 asymptotic serve as independent checks.
"""
from __future__ import annotations

import math
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.integrate import quad
from scipy.special import exprel, gamma

from sphkit.errors import QuadratureFailure

_SMALL_R = 1e-2


def _legendre_integral(nu: complex, r: float) -> complex:
    """P_ν(cosh r) = (1/π)∫_{-r}^{r} e^{(ν+1)w} dw / √((e^r - e^w)(e^w - e^{-r})).

    The endpoint singularities are split off as (w+r)^{-1/2}(r-w)^{-1/2} and
    handed to QAWS; the remaining factor is smooth.
    """
    shift = nu + 0.5

    def smooth(w: float) -> complex:
        return np.exp(shift * w) / math.sqrt(exprel(r - w) * exprel(r + w))

    parts = []
    for part in (lambda w: smooth(w).real, lambda w: smooth(w).imag):
        value, error = quad(part, -r, r, weight="alg", wvar=(-0.5, -0.5), epsabs=1e-15, epsrel=1e-13, limit=200)
        if error > 1e-11:
            raise QuadratureFailure("Legendre integral did not converge", {"nu": str(nu), "r": r, "error": error})
        parts.append(value)
    return math.exp(r / 2) / math.pi * complex(parts[0], parts[1])


@lru_cache(maxsize=65536)
def _phi(lam: float, r: float) -> float:
    if r < 1e-12:
        return 1.0
    return _legendre_integral(complex(-0.5, lam), r).real


@lru_cache(maxsize=65536)
def _dphi(lam: float, r: float) -> float:
    s = lam * lam + 0.25
    if r < _SMALL_R:
        return -s * r / 2 + (s * s / 16 + s / 24) * r**3
    nu = complex(-0.5, lam)
    lower = _legendre_integral(nu - 1, r)
    return (nu * (math.cosh(r) * _phi(lam, r) - lower)).real / math.sinh(r)


def spherical_function_oracle(lam: float, t_grid: Sequence[float], derivative: int = 0) -> np.ndarray:
    """φ_λ or dφ_λ/dr on a grid of r ≥ 0."""
    if derivative not in (0, 1):
        raise ValueError("derivative must be 0 or 1")
    lam = abs(float(lam))
    fn = _phi if derivative == 0 else _dphi
    grid = np.asarray(t_grid, dtype=float)
    if np.any(grid < 0):
        raise ValueError("radial grid must be nonnegative")
    return np.array([fn(lam, float(r)) for r in grid.ravel()]).reshape(grid.shape)


def c_function(lam: float) -> complex:
    if lam == 0:
        raise ValueError("c(λ) has a pole at λ = 0")
    return complex(gamma(1j * lam) / (math.sqrt(math.pi) * gamma(0.5 + 1j * lam)))


def hc_series(lam: float, r: float, terms: int = 80) -> float:
    """φ_λ(r) = c(λ)Φ_λ(r) + c(-λ)Φ_{-λ}(r), Φ_λ(r) = e^{(iλ-1/2)r} Σ a_k e^{-2kr}."""
    if r <= 0:
        raise ValueError("the expansion converges for r > 0 only")
    q = math.exp(-2 * r)
    a = 1.0 + 0.0j
    power = 1.0
    series = a
    for k in range(1, terms):
        a = a * (2 * k - 1) * (2 * k - 1 - 2j * lam) / (4 * k * (k - 1j * lam))
        power *= q
        series += a * power
    total = c_function(lam) * np.exp((1j * lam - 0.5) * r) * series
    return 2.0 * total.real


def leading_term(lam: float, r) -> np.ndarray:
    """The unitary part of φ_λ: c(λ)e^{(iλ-1/2)r} + c.c., and (2/π)(r + 2 ln 2)e^{-r/2} at λ = 0."""
    r = np.asarray(r, dtype=float)
    if lam == 0:
        return zero_parameter_asymptotic(r)
    return 2.0 * np.real(c_function(lam) * np.exp((1j * lam - 0.5) * r))


def zero_parameter_asymptotic(r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    return (2.0 / math.pi) * np.exp(-r / 2) * (r + 2.0 * math.log(2.0))


def eigen_residual(lam: float, r: float, h: float = 1e-3) -> float:
    """|φ'' + coth(r)φ' + (λ²+1/4)φ| with φ'' from a five-point stencil of φ'."""
    if r <= 2 * h + _SMALL_R:
        raise ValueError("residual needs r away from the origin")
    d = spherical_function_oracle(lam, [r - 2 * h, r - h, r, r + h, r + 2 * h], derivative=1)
    second = (-d[4] + 8 * d[3] - 8 * d[1] + d[0]) / (12 * h)
    value = spherical_function_oracle(lam, [r])[0]
    return abs(second + d[2] / math.tanh(r) + (lam * lam + 0.25) * value)
