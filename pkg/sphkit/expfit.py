"""Exponential polynomials and their recovery from uniform samples."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from numpy.polynomial import Polynomial
from scipy.cluster.hierarchy import fclusterdata
from scipy.stats import linregress

from sphkit.errors import IllConditioned, NoDecay, OrderOverflow

LOG = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExpTerm:
    exponent: complex
    coefficients: Tuple[complex, ...]

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1


@dataclass(frozen=True)
class ExpPolynomial:
    """Σ_j p_j(t) e^{s_j t}, exponents distinct and ordered by (Re, Im)."""

    terms: Tuple[ExpTerm, ...] = ()

    @classmethod
    def from_terms(cls, terms: Sequence[Tuple[complex, Sequence[complex]]], merge_tol: float = 1e-9) -> "ExpPolynomial":
        merged: List[Tuple[complex, np.ndarray]] = []
        for exponent, coeffs in terms:
            coeffs = np.trim_zeros(np.asarray(coeffs, dtype=complex), "b")
            if coeffs.size == 0:
                continue
            for k, (e, c) in enumerate(merged):
                if abs(e - exponent) <= merge_tol * (1 + abs(e)):
                    size = max(c.size, coeffs.size)
                    total = np.zeros(size, dtype=complex)
                    total[: c.size] += c
                    total[: coeffs.size] += coeffs
                    merged[k] = (e, total)
                    break
            else:
                merged.append((complex(exponent), coeffs))
        merged.sort(key=lambda item: (round(item[0].real, 12), round(item[0].imag, 12)))
        return cls(tuple(ExpTerm(e, tuple(complex(x) for x in c)) for e, c in merged if np.any(c != 0)))

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=complex)
        for term in self.terms:
            out += np.polynomial.polynomial.polyval(t, term.coefficients) * np.exp(term.exponent * t)
        return out

    @property
    def exponents(self) -> Tuple[complex, ...]:
        return tuple(term.exponent for term in self.terms)

    @property
    def order(self) -> int:
        return sum(term.degree + 1 for term in self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def shifted(self, t0: float) -> "ExpPolynomial":
        """The same function written in the variable t for a model fitted in τ = t - t0."""
        out = []
        for term in self.terms:
            p = Polynomial(term.coefficients)(Polynomial([-t0, 1.0]))
            out.append((term.exponent, np.asarray(p.coef, dtype=complex) * np.exp(-term.exponent * t0)))
        return ExpPolynomial.from_terms(out)

    def to_document(self) -> List[dict]:
        return [
            {
                "exponent": [term.exponent.real, term.exponent.imag],
                "coefficients": [[c.real, c.imag] for c in term.coefficients],
            }
            for term in self.terms
        ]


def _uniform_step(t: np.ndarray) -> float:
    steps = np.diff(t)
    if steps.size == 0 or np.any(steps <= 0):
        raise IllConditioned("sample grid must be strictly increasing")
    h = float(steps.mean())
    if np.max(np.abs(steps - h)) > 1e-9 * max(1.0, abs(h)):
        raise IllConditioned("sample grid is not uniform")
    return h


def _group_poles(exponents: np.ndarray, tol: float) -> List[Tuple[complex, int]]:
    if exponents.size == 1:
        return [(complex(exponents[0]), 1)]
    points = np.column_stack([exponents.real, exponents.imag])
    labels = fclusterdata(points, t=tol, criterion="distance", method="single")
    groups = []
    for label in np.unique(labels):
        members = exponents[labels == label]
        groups.append((complex(members.mean()), int(members.size)))
    return groups


@dataclass(frozen=True)
class FitResult:
    model: ExpPolynomial
    residual: float
    singular_values: Tuple[float, ...] = field(compare=False)


def expfit(
    t: Sequence[float],
    values: Sequence[complex],
    model_order_max: int = 12,
    svd_tol: float = 1e-8,
    residual_tol: float = 1e-6,
    merge_tol: float = 1e-4,
) -> FitResult:
    """Matrix-pencil recovery of the minimal exponential polynomial through the samples."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(values, dtype=complex)
    h = _uniform_step(t)
    n = y.size
    pencil = n // 2
    hankel = scipy.linalg.hankel(y[: n - pencil], y[n - pencil - 1:])
    _, sv, vh = scipy.linalg.svd(hankel)
    threshold = svd_tol * max(1.0, float(sv[0])) if sv.size else svd_tol
    order = int(np.count_nonzero(sv > threshold))
    if order == 0:
        return FitResult(ExpPolynomial(), float(np.linalg.norm(y)), tuple(sv))
    if order > model_order_max or n < 4 * order:
        raise OrderOverflow("model order exceeds the limit", {"order": order, "limit": model_order_max, "samples": n})
    v = vh[:order].T
    shift = np.linalg.pinv(v[:-1]) @ v[1:]
    poles = scipy.linalg.eigvals(shift)
    if np.any(np.abs(poles) < 1e-300):
        raise IllConditioned("vanishing pencil eigenvalue")
    exponents = np.log(poles) / h
    groups = _group_poles(exponents, merge_tol)
    tau = t - t[0]
    columns = []
    layout = []
    for exponent, multiplicity in groups:
        for k in range(multiplicity):
            columns.append(tau**k * np.exp(exponent * tau))
            layout.append((exponent, k))
    design = np.column_stack(columns)
    if np.linalg.cond(design) > 1e14:
        raise IllConditioned("exponential design matrix is singular", {"order": order})
    coeffs, *_ = scipy.linalg.lstsq(design, y)
    residual = float(np.linalg.norm(design @ coeffs - y) / max(np.linalg.norm(y), 1e-300))
    if residual > residual_tol:
        raise IllConditioned("exponential model does not reproduce the samples", {"residual": residual})
    terms = []
    for exponent, multiplicity in groups:
        poly = [coeffs[i] for i, (e, k) in enumerate(layout) if e == exponent]
        terms.append((exponent, poly))
    model = ExpPolynomial.from_terms(terms).shifted(float(t[0]))
    LOG.debug("expfit order %d residual %.2e", order, residual)
    return FitResult(model, residual, tuple(float(s) for s in sv))


@dataclass(frozen=True)
class RateFit:
    epsilon: float
    constant: float
    n_fit: float
    r_squared: float
    method: str
    predicted: Optional[float] = None

    @property
    def matches_prediction(self) -> Optional[bool]:
        if self.predicted is None or math.isinf(self.epsilon):
            return None
        return abs(self.epsilon - self.predicted) <= 0.1 * abs(self.predicted)


def approximation_rate(
    t: Sequence[float],
    f_values: Sequence[complex],
    f_I: ExpPolynomial,
    rho: float,
    predicted: Optional[float] = None,
    method: str = "auto",
    floor: float = 1e-14,
    r_squared_min: float = 0.99,
) -> RateFit:
    """Fit |e^{-tρ}(f - f_I)| ≈ C e^{-εt}(1+t)^N on the tail half of the grid."""
    t = np.asarray(t, dtype=float)
    f_values = np.asarray(f_values, dtype=complex)
    difference = np.exp(-rho * t) * (f_values - f_I(t))
    start = t.size // 2
    tail_t, tail = t[start:], difference[start:]
    scale = floor * (1.0 + float(np.max(np.abs(np.exp(-rho * t) * f_values))))
    if np.all(np.abs(tail) <= scale):
        return RateFit(math.inf, 0.0, 0.0, 1.0, "exact", predicted)
    if method in ("auto", "envelope"):
        try:
            fit = expfit(tail_t, tail, residual_tol=1e-3)
            if fit.model.terms:
                lead = max(fit.model.terms, key=lambda term: term.exponent.real)
                epsilon = -lead.exponent.real
                if epsilon <= 0:
                    raise NoDecay("remainder does not decay", {"epsilon": epsilon})
                constant = float(sum(abs(c) for term in fit.model.terms for c in term.coefficients))
                LOG.info("approximation rate from envelope", extra={"epsilon": epsilon})
                return RateFit(epsilon, constant, float(lead.degree), 1.0 - fit.residual, "envelope", predicted)
        except (IllConditioned, OrderOverflow):
            if method == "envelope":
                raise
    magnitude = np.abs(tail)
    keep = magnitude > scale
    if np.count_nonzero(keep) < 3:
        raise NoDecay("too few resolvable remainder samples")
    log_m = np.log(magnitude[keep])
    regression = linregress(tail_t[keep], log_m)
    epsilon = -float(regression.slope)
    if epsilon <= 0:
        raise NoDecay("remainder does not decay", {"epsilon": epsilon})
    design = np.column_stack([np.ones(keep.sum()), -tail_t[keep], np.log1p(tail_t[keep])])
    (log_c, _, n_fit), *_ = np.linalg.lstsq(design, log_m, rcond=None)
    return RateFit(epsilon, float(np.exp(regression.intercept)), float(n_fit), float(regression.rvalue**2), "direct", predicted)
