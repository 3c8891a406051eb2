"""The rank-one transport system of the hyperbolic plane SL(2,R)/SO(2).

U = C[H]/(μ_∅(Ω) - χ) is two-dimensional with basis (1, H). With a = exp(pH)
and r = -2p the geodesic distance, Φ_f = (f, R_H f) = (φ, -2φ') and the
radial part of the Casimir leaves a remainder Ψ that decays like e^{-2r}
relative to φ.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np
import sympy as sp

from sphkit.cterm import Envelope, TransportSystem
from sphkit.envalg import b_order, casimir_image, mu_I, radial_part
from sphkit.liecore import sl2
from sphkit.oracles import spherical_function_oracle
from sphkit.sphstruct import ParabolicDatum, SphericalDatum, analyze

LOG = logging.getLogger(__name__)


def hyperbolic_datum() -> SphericalDatum:
    g = sl2()
    parabolic = ParabolicDatum.from_labels(g, m=[], a=[{"H": 1}], n=[{"E": 1}])
    return analyze(g, g.span_labels({"E": 1, "F": -1}), parabolic)


@dataclass(frozen=True)
class RadialCasimir:
    """μ_∅(Ω) restricted to a_Z, as a2·H² + a1·H + a0, together with ρ_Q(H) and the spherical root on H."""

    a2: float
    a1: float
    a0: float
    rho: float
    root: float

    def companion(self, chi: float) -> np.ndarray:
        """ᵗρ(H) on the basis (1, H) of C[H]/(μ_∅(Ω) - χ)."""
        return np.array([[0.0, 1.0], [(chi - self.a0) / self.a2, -self.a1 / self.a2]])


@lru_cache(maxsize=4)
def radial_casimir(cap: int = 4) -> RadialCasimir:
    datum = hyperbolic_datum()
    order = b_order(datum, cap)
    image = casimir_image(datum, order, datum.h)
    limit = mu_I(image, order, (), [-1])
    expr = radial_part(limit.element, order)
    symbol = sp.Symbol(order.algebra.labels[order.blocks["a_Z"][0]])
    poly = sp.Poly(expr, symbol)
    coeffs = [poly.coeff_monomial(symbol**k) for k in range(3)]
    if poly.degree() != 2:
        raise ValueError("radial Casimir is not quadratic")
    rho = datum.rho.rho(datum.lift([1]))
    root = datum.spherical_roots[0](datum.lift([1]))
    LOG.debug("radial Casimir %s", expr)
    return RadialCasimir(float(coeffs[2]), float(coeffs[1]), float(coeffs[0]), float(rho), float(root))


def casimir_eigenvalue(lam: float) -> float:
    """Ω acts on φ_λ by 2Δ, and Δφ_λ = -(λ² + 1/4)φ_λ."""
    return -2.0 * (lam * lam + 0.25)


def radius(point: np.ndarray) -> float:
    return -2.0 * float(point[0])


def hyperbolic_transport(lam: float, r0: float = 1.0, direction: float = -0.5, cap: int = 4) -> Tuple[TransportSystem, np.ndarray]:
    """The system for φ_λ and the base point at distance r0."""
    if r0 <= 0:
        raise ValueError("base point must lie off the origin")
    radial = radial_casimir(cap)
    chi = casimir_eigenvalue(lam)
    gamma_h = radial.companion(chi)
    s = lam * lam + 0.25

    def values(r: float) -> Tuple[float, float]:
        return (
            float(spherical_function_oracle(lam, [r])[0]),
            float(spherical_function_oracle(lam, [r], derivative=1)[0]),
        )

    def phi(point: np.ndarray) -> np.ndarray:
        f, df = values(radius(point))
        return np.array([f, -2.0 * df], dtype=complex)

    def psi(point: np.ndarray, x: np.ndarray) -> np.ndarray:
        r = radius(point)
        f, df = values(r)
        actual = 4.0 * (-df / math.tanh(r) - s * f)
        predicted = gamma_h[1] @ np.array([f, -2.0 * df])
        return float(x[0]) * np.array([0.0, actual - predicted], dtype=complex)

    def envelope(point: np.ndarray, x: np.ndarray) -> Envelope:
        r = radius(point)
        step = abs(float(x[0]))
        constant = 8.0 * step * (1.0 + abs(lam)) * (1.0 + r) * max(1.0, 2.0 * step) * math.exp(-2.5 * r)
        return Envelope(constant / (1.0 - math.exp(-2.0 * r)), 1.0, -5.0 * step)

    system = TransportSystem.rank_one(
        gamma_h,
        radial.rho,
        phi,
        psi=psi,
        envelope=envelope,
        direction=direction,
        beta=lambda x: radial.root * float(x[0]),
        provenance="casimir",
    )
    return system, np.array([-r0 / 2.0])
