"""Constant terms of eigenfunctions through their first-order transport system.

A ``TransportSystem`` packages R_X Φ = Γ(X)Φ + Ψ_X along a face 𝔞_I of the
compression cone. The engine splits U into joint generalized eigenspaces of
the commuting family Γ, classifies the exponents against ρ_Q and assembles
the constant term from the unitary (Q⁰) channels.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from scipy.cluster.hierarchy import fclusterdata
from scipy.integrate import quad_vec
from scipy.special import gamma as gamma_fn
from scipy.special import gammaincc

from sphkit.config import settings
from sphkit.errors import (
    ClusterAmbiguity,
    DirectionDependence,
    GapViolated,
    NonUnitaryCharacter,
    QuadratureFailure,
    TailBoundUnreachable,
)
from sphkit.expfit import ExpPolynomial

LOG = logging.getLogger(__name__)

PLUS = "plus"
ZERO = "zero"
MINUS = "minus"


@dataclass(frozen=True)
class Envelope:
    """‖Ψ_X(a exp(sX))‖ ≤ constant · (1+s)^power · e^{rate·s} for s ≥ 0."""

    constant: float
    power: float
    rate: float

    def __call__(self, s: float) -> float:
        return self.constant * (1.0 + s) ** self.power * math.exp(self.rate * s)


PhiCallable = Callable[[np.ndarray], np.ndarray]
PsiCallable = Callable[[np.ndarray, np.ndarray], np.ndarray]
EnvelopeCallable = Callable[[np.ndarray, np.ndarray], Envelope]


@dataclass(frozen=True)
class TransportSystem:
    """Γ on a basis of 𝔞_I, together with Φ, Ψ and the cone data of 𝔞_I^-.

    Points of A_Z are log coordinates on 𝔞_Z; directions are coordinates on
    𝔞_I and enter 𝔞_Z through ``embed``.
    """

    dim_u: int
    gammas: Tuple[np.ndarray, ...]
    rho: np.ndarray
    cone_generators: Tuple[np.ndarray, ...]
    samples: Tuple[np.ndarray, ...]
    phi: PhiCallable
    embed: np.ndarray
    psi: Optional[PsiCallable] = None
    envelope: Optional[EnvelopeCallable] = None
    beta: Optional[Callable[[np.ndarray], float]] = None
    pairing: Optional[np.ndarray] = None
    provenance: str = "callable"

    @classmethod
    def rank_one(
        cls,
        gamma_unit: np.ndarray,
        rho: float,
        phi: PhiCallable,
        psi: Optional[PsiCallable] = None,
        envelope: Optional[EnvelopeCallable] = None,
        direction: float = -1.0,
        beta: Optional[Callable[[np.ndarray], float]] = None,
        provenance: str = "callable",
    ) -> "TransportSystem":
        """A system on a one-dimensional 𝔞_I = 𝔞_Z whose negative ray is spanned by ``direction`` < 0."""
        if direction >= 0:
            raise ValueError("the sampled direction must point into the negative ray")
        gamma_unit = np.asarray(gamma_unit)
        return cls(
            dim_u=gamma_unit.shape[0],
            gammas=(gamma_unit,),
            rho=np.array([float(rho)]),
            cone_generators=(np.array([-1.0]),),
            samples=(np.array([direction]), np.array([2.0 * direction])),
            phi=phi,
            embed=np.eye(1),
            psi=psi,
            envelope=envelope,
            beta=beta,
            provenance=provenance,
        )

    @property
    def rank(self) -> int:
        return len(self.gammas)

    @property
    def pairing_vector(self) -> np.ndarray:
        if self.pairing is not None:
            return np.asarray(self.pairing)
        e = np.zeros(self.dim_u)
        e[0] = 1.0
        return e

    def gamma(self, x: Sequence[float]) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros((self.dim_u, self.dim_u), dtype=complex)
        for c, g in zip(x, self.gammas):
            out = out + c * g
        return out

    def point(self, base: np.ndarray, x: np.ndarray, s: float) -> np.ndarray:
        return np.asarray(base, dtype=float) + s * (self.embed @ np.asarray(x, dtype=float))

    def forcing(self, base: np.ndarray, x: np.ndarray, s: float) -> np.ndarray:
        if self.psi is None:
            return np.zeros(self.dim_u, dtype=complex)
        return np.asarray(self.psi(self.point(base, x, s), np.asarray(x, dtype=float)), dtype=complex)

    def commutator_defect(self) -> float:
        worst = 0.0
        for i, a in enumerate(self.gammas):
            for b in self.gammas[i + 1:]:
                scale = max(np.linalg.norm(a, 2) * np.linalg.norm(b, 2), 1e-300)
                worst = max(worst, float(np.linalg.norm(a @ b - b @ a, 2) / scale))
        return worst

    def to_document(self) -> dict:
        def matrix(m: np.ndarray) -> List[List[str]]:
            return [[repr(complex(v)) if np.iscomplexobj(m) else repr(float(v)) for v in row] for row in m]

        return {
            "dim_u": self.dim_u,
            "gammas": [matrix(g) for g in self.gammas],
            "rho": [float(v) for v in self.rho],
            "cone_generators": [[float(v) for v in g] for g in self.cone_generators],
            "provenance": self.provenance,
        }


def _stacked(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.concatenate([v.real, v.imag])


def _unstacked(v: np.ndarray) -> np.ndarray:
    half = v.size // 2
    return v[:half] + 1j * v[half:]


def _clusters(values: np.ndarray, tol: float) -> List[np.ndarray]:
    if values.size == 1:
        return [values]
    labels = fclusterdata(np.column_stack([values.real, values.imag]), t=tol, criterion="distance", method="single")
    return [values[labels == label] for label in np.unique(labels)]


def spectral_projector(a: np.ndarray, select: Callable[[complex], bool], expected: Optional[int] = None) -> np.ndarray:
    """Projector onto the invariant subspace of the selected eigenvalues, along the complementary one."""
    n = a.shape[0]
    t, z, sdim = scipy.linalg.schur(np.asarray(a, dtype=complex), output="complex", sort=select)
    if expected is not None and sdim != expected:
        raise ClusterAmbiguity("eigenvalue cluster could not be separated", {"expected": expected, "found": int(sdim)})
    if sdim == 0:
        return np.zeros((n, n), dtype=complex)
    if sdim == n:
        return np.eye(n, dtype=complex)
    y = scipy.linalg.solve_sylvester(t[:sdim, :sdim], -t[sdim:, sdim:], -t[:sdim, sdim:])
    block = np.zeros((n, n), dtype=complex)
    block[:sdim, :sdim] = np.eye(sdim)
    block[:sdim, sdim:] = -y
    return z @ block @ z.conj().T


def _single_matrix_projectors(a: np.ndarray, cluster_tol: float) -> List[Tuple[complex, np.ndarray]]:
    eigenvalues = scipy.linalg.eigvals(a)
    scale = max(1.0, float(np.max(np.abs(eigenvalues))))
    out = []
    for members in _clusters(eigenvalues, cluster_tol * scale):
        center = complex(members.mean())
        radius = float(np.max(np.abs(members - center))) + 0.5 * cluster_tol * scale
        projector = spectral_projector(a, lambda w, c=center, r=radius: abs(w - c) <= r, expected=members.size)
        out.append((center, projector))
    return out


@dataclass(frozen=True)
class SpectralDatum:
    exponents: Tuple[np.ndarray, ...]
    classes: Tuple[str, ...]
    projectors: Tuple[np.ndarray, ...]
    delta: Optional[float]
    checks: Dict[str, float] = field(compare=False, default_factory=dict)

    def of_class(self, cls: str) -> List[int]:
        return [k for k, c in enumerate(self.classes) if c == cls]

    @property
    def invariants_hold(self) -> bool:
        return all(v <= 1e-9 for k, v in self.checks.items() if k.endswith("_defect"))


def _projector_defects(system: TransportSystem, projectors: Sequence[np.ndarray]) -> Dict[str, float]:
    n = system.dim_u
    scale = max([1.0] + [float(np.linalg.norm(e, 2)) for e in projectors]) ** 2
    total = sum(projectors, np.zeros((n, n), dtype=complex))
    orthogonal = 0.0
    for i, e in enumerate(projectors):
        for j, f in enumerate(projectors):
            target = e if i == j else 0.0
            orthogonal = max(orthogonal, float(np.linalg.norm(e @ f - target, 2)))
    commuting = 0.0
    for e in projectors:
        for g in system.gammas:
            commuting = max(commuting, float(np.linalg.norm(e @ g - g @ e, 2) / max(1.0, np.linalg.norm(g, 2))))
    return {
        "partition_defect": float(np.linalg.norm(total - np.eye(n), 2)) / scale,
        "orthogonality_defect": orthogonal / scale,
        "commutation_defect": commuting / scale,
    }


def _classify(system: TransportSystem, lam: np.ndarray, tol: float) -> Tuple[str, float]:
    """Class of an exponent and the largest |Re λ - ρ_Q| seen on the cone generators."""
    gaps = [float(np.real(lam @ x) - system.rho @ x) for x in system.cone_generators]
    worst = max((abs(d) for d in gaps), default=0.0)
    if worst <= tol * (1.0 + max(abs(float(system.rho @ x)) for x in system.cone_generators)):
        return ZERO, worst
    positive = any(
        float(np.real(lam @ x) - system.rho @ x) > tol * (1.0 + abs(float(system.rho @ x)))
        for x in system.cone_generators + system.samples
    )
    return (PLUS if positive else MINUS), worst


def _delta(system: TransportSystem, exponents: Sequence[np.ndarray], classes: Sequence[str]) -> Optional[float]:
    minus = [lam for lam, c in zip(exponents, classes) if c == MINUS]
    if system.beta is None:
        return None
    points = [x for x in system.samples]
    for k in range(1, 31):
        delta = 2.0**-k
        if all(
            float(np.real(lam @ x)) <= float(system.rho @ x) + delta * system.beta(x) + 1e-12 for lam in minus for x in points
        ):
            return delta
    return None


def joint_spectrum(system: TransportSystem, cluster_tol: Optional[float] = None, tol: Optional[float] = None) -> SpectralDatum:
    """Joint generalized eigenspaces of the commuting family Γ and their Q⁺/Q⁰/Q⁻ classes.

    A rank-zero family has no Q⁻ exponents, so every δ in (0, ½] works and the
    largest one, ½, is reported.
    """
    cluster_tol = settings.cluster_tol if cluster_tol is None else cluster_tol
    tol = settings.tol if tol is None else tol
    n = system.dim_u
    if system.rank == 0:
        return SpectralDatum((np.zeros(0, dtype=complex),), (ZERO,), (np.eye(n, dtype=complex),), 0.5)
    joint: List[np.ndarray] = [np.eye(n, dtype=complex)]
    for g in system.gammas:
        refined = []
        for e in joint:
            for _, p in _single_matrix_projectors(g, cluster_tol):
                product = e @ p
                if round(float(np.trace(product).real)) >= 1:
                    refined.append(product)
        joint = refined
    exponents = []
    for e in joint:
        trace = np.trace(e)
        exponents.append(np.array([np.trace(g @ e) / trace for g in system.gammas], dtype=complex))
    order = sorted(range(len(joint)), key=lambda k: tuple(np.round(np.r_[exponents[k].real, exponents[k].imag], 10)))
    exponents = [exponents[k] for k in order]
    joint = [joint[k] for k in order]
    classes = []
    for lam in exponents:
        cls, worst = _classify(system, lam, tol)
        scale = 1.0 + float(np.max(np.abs(lam))) if lam.size else 1.0
        if cls != ZERO and worst <= cluster_tol * scale:
            raise ClusterAmbiguity(
                "exponent lies within clustering resolution of the unitary line",
                {"exponent": [complex(v) for v in lam], "distance": worst},
            )
        classes.append(cls)
    for i in range(len(exponents)):
        for j in range(i + 1, len(exponents)):
            if classes[i] != classes[j]:
                gap = float(np.max(np.abs(exponents[i] - exponents[j])))
                if gap <= cluster_tol * (1.0 + float(np.max(np.abs(exponents[i])))):
                    raise ClusterAmbiguity(
                        "exponents within clustering tolerance are classified differently",
                        {"pair": [[complex(v) for v in exponents[i]], [complex(v) for v in exponents[j]]]},
                    )
    checks = _projector_defects(system, joint)
    checks["commuting_family_defect"] = system.commutator_defect()
    datum = SpectralDatum(tuple(exponents), tuple(classes), tuple(joint), _delta(system, exponents, classes), checks)
    LOG.info(
        "joint spectrum computed",
        extra={"exponents": len(exponents), "zero": len(datum.of_class(ZERO)), "delta": datum.delta},
    )
    return datum


def calibrated_constant(nu: float, n: int) -> float:
    return (8.0 * n / (math.pi * nu)) * (4.0 / nu) ** (n - 1)


@dataclass(frozen=True)
class ProjectorBound:
    norm: float
    bound: float
    gap: float

    @property
    def passed(self) -> bool:
        return self.norm <= self.bound


def projector_bound_check(a: np.ndarray, k: Optional[int] = None, min_gap: Optional[float] = None) -> ProjectorBound:
    """‖P_k‖ ≤ C(1+‖A‖)^N for the projector onto the k lowest real-part levels.

    Without ``k`` every level is checked and the worst ratio is returned.
    """
    min_gap = settings.projector_gap if min_gap is None else min_gap
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    levels = sorted(float(np.mean(c.real)) for c in _clusters(scipy.linalg.eigvals(a).real.astype(complex), 1e-6))
    gap = min(np.diff(levels)) if len(levels) > 1 else math.inf
    if gap < min_gap - 1e-9:
        raise GapViolated("real parts of the spectrum are not separated", {"gap": gap, "required": min_gap})
    bound = calibrated_constant(min_gap, n) * (1.0 + np.linalg.norm(a, 2)) ** n
    ks = [k] if k is not None else list(range(1, len(levels)))
    if not ks:
        return ProjectorBound(1.0, bound, gap)
    worst = 0.0
    for level in ks:
        cut = levels[level - 1] + 0.5 * (gap if math.isfinite(gap) else 1.0)
        p = spectral_projector(a, lambda w, c=cut: w.real <= c)
        worst = max(worst, float(np.linalg.norm(p, 2)))
    return ProjectorBound(worst, float(bound), gap)


def solve_transport(
    system: TransportSystem,
    base: Sequence[float],
    x: Sequence[float],
    t: float,
    phi0: Optional[np.ndarray] = None,
    check: bool = True,
    epsrel: float = 1e-12,
) -> np.ndarray:
    """Φ(base·exp(tX)) by variation of constants."""
    base = np.asarray(base, dtype=float)
    x = np.asarray(x, dtype=float)
    g = system.gamma(x)
    phi0 = np.asarray(system.phi(base) if phi0 is None else phi0, dtype=complex)
    value = scipy.linalg.expm(t * g) @ phi0
    if system.psi is not None and t != 0:
        integrand = lambda s: _stacked(scipy.linalg.expm((t - s) * g) @ system.forcing(base, x, s))
        integral, error = quad_vec(integrand, 0.0, t, epsabs=1e-14, epsrel=epsrel, limit=2000)
        if error > 1e-8 * (1.0 + float(np.linalg.norm(integral))):
            raise QuadratureFailure("transport integral did not converge", {"error": float(error), "t": t})
        value = value + _unstacked(integral)
    if check:
        _residual_check(system, base, x, t, phi0, g)
    return value


def _residual_check(
    system: TransportSystem, base: np.ndarray, x: np.ndarray, t: float, phi0: np.ndarray, g: np.ndarray
) -> None:
    h = 1e-2 / (1.0 + float(np.linalg.norm(g, 2)))
    tc = max(t, 2 * h)
    at = {k: solve_transport(system, base, x, tc + k * h, phi0, check=False) for k in (-2, -1, 0, 1, 2)}
    derivative = (-at[2] + 8 * at[1] - 8 * at[-1] + at[-2]) / (12 * h)
    forcing = system.forcing(base, x, tc)
    expected = g @ at[0] + forcing
    scale = (
        float(np.linalg.norm(g, 2)) * float(np.linalg.norm(at[0]))
        + float(np.linalg.norm(forcing))
        + 1e-6 * float(np.linalg.norm(at[0]))
        + 1e-300
    )
    residual = float(np.linalg.norm(derivative - expected)) / scale
    if residual > 1e-6:
        raise QuadratureFailure("transport solution fails the differential equation", {"residual": residual, "t": tc})


def _nilpotent(system: TransportSystem, e: np.ndarray, lam: np.ndarray, x: np.ndarray) -> Tuple[complex, np.ndarray]:
    lx = complex(lam @ x)
    return lx, (system.gamma(x) - lx * np.eye(system.dim_u)) @ e


def _propagate(e: np.ndarray, nil: np.ndarray, s: float) -> np.ndarray:
    """E·e^{sN} for N nilpotent on the range of E, as a finite sum."""
    out = e.copy()
    term = e.copy()
    for k in range(1, e.shape[0]):
        term = term @ nil * (s / k)
        out = out + term
    return out


def _tail(coefficient: float, power: float, rate: float, t: float) -> float:
    a = power + 1.0
    return coefficient * math.exp(rate) * rate ** (-a) * gamma_fn(a) * float(gammaincc(a, rate * (1.0 + t)))


def _tail_cutoff(coefficient: float, power: float, rate: float, tolerance: float, t_max: float) -> float:
    hi = 1.0
    while _tail(coefficient, power, rate, hi) > tolerance:
        hi *= 2.0
        if hi > t_max:
            raise TailBoundUnreachable("tail bound not reached within the cutoff cap", {"cap": t_max, "rate": rate})
    lo = 0.0
    for _ in range(50):
        mid = 0.5 * (lo + hi)
        if _tail(coefficient, power, rate, mid) > tolerance:
            lo = mid
        else:
            hi = mid
    return hi


def _limit_along(
    system: TransportSystem, spectral: SpectralDatum, index: int, base: np.ndarray, x: np.ndarray, tolerance: float, t_max: float
) -> np.ndarray:
    e = spectral.projectors[index]
    lx, nil = _nilpotent(system, e, spectral.exponents[index], x)
    start = e @ np.asarray(system.phi(base), dtype=complex)
    if system.psi is None:
        return start
    if system.envelope is None:
        raise TailBoundUnreachable("no decay envelope declared for the inhomogeneity")
    env = system.envelope(base, x)
    rate = lx.real - env.rate
    if rate <= 0:
        raise TailBoundUnreachable("envelope does not dominate the exponent", {"rate": rate})
    weight = sum(float(np.linalg.norm(e @ np.linalg.matrix_power(nil, k), 2)) / math.factorial(k) for k in range(system.dim_u))
    cutoff = _tail_cutoff(weight * env.constant, system.dim_u - 1 + env.power, rate, tolerance, t_max)
    integrand = lambda s: _stacked(np.exp(-s * lx) * (_propagate(e, nil, -s) @ system.forcing(base, x, s)))
    integral, error = quad_vec(integrand, 0.0, cutoff, epsabs=0.1 * tolerance, epsrel=1e-12, limit=4000)
    if error > max(tolerance, 1e-8 * (1.0 + float(np.linalg.norm(integral)))):
        raise QuadratureFailure("truncated limit integral did not converge", {"error": float(error)})
    LOG.debug("limit channel %d cut at T=%.2f", index, cutoff)
    return start + _unstacked(integral)


def phi_lambda_infty(
    system: TransportSystem,
    spectral: SpectralDatum,
    index: int,
    base: Sequence[float],
    direction: Optional[Sequence[float]] = None,
    second: Optional[Sequence[float]] = None,
    tail_tolerance: Optional[float] = None,
    t_max: float = 1e4,
) -> np.ndarray:
    """lim e^{-tΓ(X)} Φ_λ(base·exp(tX)) for X interior to 𝔞_I^-, checked against a second direction."""
    base = np.asarray(base, dtype=float)
    tolerance = settings.tail_tolerance if tail_tolerance is None else tail_tolerance
    cls = spectral.classes[index]
    if system.rank == 0:
        return spectral.projectors[index] @ np.asarray(system.phi(base), dtype=complex)
    if cls == PLUS:
        return np.zeros(system.dim_u, dtype=complex)
    if cls == MINUS:
        raise ValueError("the limit is only taken on unitary channels")
    x1 = np.asarray(system.samples[0] if direction is None else direction, dtype=float)
    if second is not None:
        x2 = np.asarray(second, dtype=float)
    elif direction is None and len(system.samples) > 1:
        x2 = np.asarray(system.samples[1], dtype=float)
    else:
        x2 = 2.0 * x1
    v1 = _limit_along(system, spectral, index, base, x1, tolerance, t_max)
    v2 = _limit_along(system, spectral, index, base, x2, tolerance, t_max)
    gap = float(np.linalg.norm(v1 - v2))
    if gap > 1e-6 * (1.0 + float(np.linalg.norm(v1))):
        raise DirectionDependence("limit depends on the interior direction", {"difference": gap})
    return v1


def constant_term(system: TransportSystem, spectral: SpectralDatum, base: Sequence[float]) -> complex:
    """f_I at a point of A_Z, from the unitary channels only."""
    pairing = system.pairing_vector
    total = 0.0 + 0.0j
    for index in spectral.of_class(ZERO):
        total += complex(pairing @ phi_lambda_infty(system, spectral, index, base))
    return total


def constant_term_ray(
    system: TransportSystem, spectral: SpectralDatum, base: Sequence[float], x: Sequence[float], tol: Optional[float] = None
) -> ExpPolynomial:
    """t ↦ f_I(base·exp(tX)) as an exact exponential polynomial."""
    tol = settings.tol if tol is None else tol
    x = np.asarray(x, dtype=float)
    pairing = system.pairing_vector
    rho_x = float(system.rho @ x) if system.rank else 0.0
    terms = []
    for index in spectral.of_class(ZERO):
        v = phi_lambda_infty(system, spectral, index, base)
        if system.rank == 0:
            terms.append((0.0, [complex(pairing @ v)]))
            continue
        lx, nil = _nilpotent(system, spectral.projectors[index], spectral.exponents[index], x)
        if abs(lx.real - rho_x) > tol * (1.0 + abs(rho_x)):
            raise NonUnitaryCharacter("unitary channel has an off-line exponent", {"exponent": lx, "rho": rho_x})
        coeffs = []
        w = v
        for k in range(system.dim_u):
            coeffs.append(complex(pairing @ w) / math.factorial(k))
            w = nil @ w
        terms.append((lx, coeffs))
    return ExpPolynomial.from_terms(terms)


@dataclass(frozen=True)
class TransitivityReport:
    max_error: float
    scale: float
    source_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        bound = self.tolerance * max(self.scale, 1e-300)
        return self.max_error <= bound and self.source_error <= bound


def transitivity_check(
    outer: TransportSystem,
    inner: TransportSystem,
    direct: TransportSystem,
    bases: Sequence[Sequence[float]],
    tolerance: float = 1e-6,
) -> TransitivityReport:
    """(f_J)_I against f_I: ``outer`` yields f_J, ``inner`` takes f_J to face I, ``direct`` takes f to face I."""
    spec_outer, spec_inner, spec_direct = joint_spectrum(outer), joint_spectrum(inner), joint_spectrum(direct)
    worst = source = scale = 0.0
    for base in bases:
        f_J = constant_term(outer, spec_outer, base)
        carried = complex(inner.pairing_vector @ np.asarray(inner.phi(np.asarray(base, dtype=float)), dtype=complex))
        once = constant_term(direct, spec_direct, base)
        twice = constant_term(inner, spec_inner, base)
        source = max(source, abs(f_J - carried))
        worst = max(worst, abs(once - twice))
        scale = max(scale, abs(once), abs(f_J))
    report = TransitivityReport(worst, scale, source, tolerance)
    LOG.info("transitivity check", extra={"max_error": worst, "passed": report.passed})
    return report


@dataclass(frozen=True)
class DiscreteSeriesReport:
    sup_norms: Dict[Tuple[int, ...], float]
    scale: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return all(v <= self.tolerance * self.scale for v in self.sup_norms.values())


def discrete_series_test(
    systems: Mapping[Tuple[int, ...], TransportSystem], bases: Sequence[Sequence[float]], tolerance: float = 1e-6
) -> DiscreteSeriesReport:
    """Whether every proper constant term vanishes on the test points."""
    norms: Dict[Tuple[int, ...], float] = {}
    scale = 0.0
    for index, system in systems.items():
        spectral = joint_spectrum(system)
        values = []
        for base in bases:
            point = np.asarray(base, dtype=float)
            scale = max(scale, abs(complex(system.pairing_vector @ np.asarray(system.phi(point), dtype=complex))))
            values.append(abs(constant_term(system, spectral, point)))
        norms[tuple(index)] = max(values, default=0.0)
    return DiscreteSeriesReport(norms, scale, tolerance)


@dataclass(frozen=True)
class IntegralityReport:
    distances: Tuple[float, ...]
    tolerance: float = 1e-6

    @property
    def passed(self) -> bool:
        return all(d <= self.tolerance for d in self.distances)


def integrality_check(spectral: SpectralDatum, rho: Sequence[float], lattice: np.ndarray) -> IntegralityReport:
    """Distance of each Re λ - ρ_Q to the lattice spanned by the rows of ``lattice``."""
    lattice = np.atleast_2d(np.asarray(lattice, dtype=float))
    rho = np.asarray(rho, dtype=float)
    distances = []
    for lam in spectral.exponents:
        v = lam.real - rho
        coords, *_ = np.linalg.lstsq(lattice.T, v, rcond=None)
        distances.append(float(np.linalg.norm(np.round(coords) @ lattice - v)))
    return IntegralityReport(tuple(distances))


@dataclass(frozen=True)
class GrowthReport:
    constants: Tuple[float, ...]
    max_ratio: float

    @property
    def passed(self) -> bool:
        return self.max_ratio <= 1.0 + 1e-9


def projector_growth_check(
    system: TransportSystem,
    spectral: SpectralDatum,
    directions: Sequence[Sequence[float]],
    radii: Sequence[float],
) -> GrowthReport:
    """‖E_λ e^{N_λ(X)}‖ ≤ c(1+‖X‖)^{dim U} with c fixed by the nilpotent data on unit directions."""
    units = [np.asarray(d, dtype=float) / np.linalg.norm(d) for d in directions]
    constants = []
    worst = 0.0
    for index, e in enumerate(spectral.projectors):
        lam = spectral.exponents[index]
        nils = [_nilpotent(system, e, lam, u)[1] for u in units]
        c = max(
            sum(float(np.linalg.norm(e @ np.linalg.matrix_power(nil, k), 2)) / math.factorial(k) for k in range(system.dim_u))
            for nil in nils
        )
        constants.append(c)
        for nil in nils:
            for r in radii:
                value = float(np.linalg.norm(_propagate(e, nil, r), 2))
                worst = max(worst, value / (c * (1.0 + abs(r)) ** system.dim_u))
    return GrowthReport(tuple(constants), worst)


@dataclass(frozen=True)
class StagedComponent:
    amplitude: complex
    exponent: np.ndarray
    forced: complex = 0.0
    forced_exponent: Optional[np.ndarray] = None


class StagedExample:
    """Two spherical roots e_1^*, e_2^* on 𝔞_Z = ℝ² with exponents staged across the faces.

    Each component contributes A e^{μ(p)} + B e^{ν(p)}; the B part enters
    through Ψ and dies along every interior direction of its face.
    """

    def __init__(self, rho: Sequence[float] = (1.0, 0.5), components: Optional[Sequence[StagedComponent]] = None):
        self.rho = np.asarray(rho, dtype=float)
        r = self.rho
        self.components = list(components) if components is not None else [
            StagedComponent(1.0 + 0.5j, r + np.array([0.7j, 0.3j]), 0.6, r + np.array([0.7j, 0.3j]) + np.array([1.0, 2.0])),
            StagedComponent(0.7, r + np.array([0.2j, 1.0])),
            StagedComponent(-0.4, r + np.array([1.0, 0.0]), -0.3, r + np.array([3.0, 1.0])),
            StagedComponent(0.25, r + np.array([1.0, 1.0])),
        ]

    @property
    def roots(self) -> Tuple[int, int]:
        return (0, 1)

    def face_basis(self, index: Sequence[int]) -> List[int]:
        return [j for j in self.roots if j not in set(index)]

    def unitary(self, index: Optional[Sequence[int]]) -> List[int]:
        if index is None:
            return list(range(len(self.components)))
        free = self.face_basis(index)
        return [k for k, c in enumerate(self.components) if all(abs(c.exponent[j].real - self.rho[j]) < 1e-12 for j in free)]

    def ground_truth(self, index: Optional[Sequence[int]], point: Sequence[float]) -> complex:
        """f_I at a point, and f itself for ``None`` or the full root set."""
        p = np.asarray(point, dtype=float)
        full = index is None or set(index) == set(self.roots)
        total = 0.0 + 0.0j
        for k in self.unitary(None if full else index):
            c = self.components[k]
            total += c.amplitude * np.exp(c.exponent @ p)
            if full and c.forced_exponent is not None:
                total += c.forced * np.exp(c.forced_exponent @ p)
        return complex(total)

    def system(self, index: Sequence[int], source: Optional[Sequence[int]] = None) -> TransportSystem:
        """Transport system on face ``index`` for f (``source`` None or full) or for f_source."""
        free = self.face_basis(index)
        rank = len(free)
        full_source = source is None or set(source) == set(self.roots)
        kept = set(self.unitary(None if full_source else source))
        comps = self.components
        n = len(comps)
        embed = np.zeros((2, rank))
        for col, j in enumerate(free):
            embed[j, col] = 1.0
        gammas = tuple(np.diag([c.exponent[j] for c in comps]).astype(complex) for j in free)

        def phi(p: np.ndarray) -> np.ndarray:
            out = np.zeros(n, dtype=complex)
            for k in kept:
                c = comps[k]
                out[k] = c.amplitude * np.exp(c.exponent @ p)
                if full_source and c.forced_exponent is not None:
                    out[k] += c.forced * np.exp(c.forced_exponent @ p)
            return out

        forced = [k for k in kept if full_source and comps[k].forced_exponent is not None]
        psi = envelope = None
        if forced:

            def psi(p: np.ndarray, x: np.ndarray) -> np.ndarray:
                xz = embed @ x
                out = np.zeros(n, dtype=complex)
                for k in forced:
                    c = comps[k]
                    out[k] = (c.forced_exponent - c.exponent) @ xz * c.forced * np.exp(c.forced_exponent @ p)
                return out

            def envelope(p: np.ndarray, x: np.ndarray) -> Envelope:
                xz = embed @ x
                constant = sum(
                    abs((comps[k].forced_exponent - comps[k].exponent) @ xz * comps[k].forced)
                    * math.exp(float(comps[k].forced_exponent.real @ p))
                    for k in forced
                )
                rate = max(float(comps[k].forced_exponent.real @ xz) for k in forced)
                return Envelope(constant, 0.0, rate)

        generators = tuple(-np.eye(rank)[i] for i in range(rank))
        samples = (-np.ones(rank), -np.arange(1.0, rank + 1.0)) if rank else ()
        return TransportSystem(
            dim_u=n,
            gammas=gammas,
            rho=self.rho[free],
            cone_generators=generators,
            samples=samples,
            phi=phi,
            embed=embed,
            psi=psi,
            envelope=envelope,
            beta=(lambda x: float(np.max(x))) if rank else None,
            pairing=np.ones(n),
            provenance="staged",
        )


def synthetic_staged_system(index: Sequence[int], source: Optional[Sequence[int]] = None) -> TransportSystem:
    """Transport system of the default two-root staged example on face ``index``."""
    return StagedExample().system(index, source)


def random_spectral_matrix(rng: np.random.Generator, max_dim: int = 8) -> np.ndarray:
    """Diagonalizable matrix with integer real parts of its spectrum."""
    n = int(rng.integers(1, max_dim + 1))
    spectrum = rng.integers(-3, 4, size=n) + 1j * rng.normal(size=n)
    basis = rng.normal(size=(n, n)) + n * np.eye(n)
    return basis @ np.diag(spectrum) @ np.linalg.inv(basis)


@dataclass(frozen=True)
class SyntheticTransport:
    """Rank-one system with Ψ(p, x) = x·e^{μp} w, solvable in closed form."""

    system: TransportSystem
    mu: complex
    w: np.ndarray

    def closed_form(self, base: Sequence[float], x: Sequence[float], t: float) -> np.ndarray:
        """e^{tG}Φ(b) + e^{μb}(μx - G)^{-1}(e^{μxt} - e^{tG}) x w with G = Γ(x)."""
        b = float(np.asarray(base, dtype=float)[0])
        xs = float(np.asarray(x, dtype=float)[0])
        g = self.system.gamma([xs])
        flow = scipy.linalg.expm(t * g)
        eye = np.eye(self.system.dim_u)
        rhs = (np.exp(self.mu * xs * t) * eye - flow) @ (xs * self.w)
        forced = np.exp(self.mu * b) * np.linalg.solve(self.mu * xs * eye - g, rhs)
        return flow @ np.asarray(self.system.phi(np.array([b])), dtype=complex) + forced


def random_transport_system(rng: np.random.Generator, max_dim: int = 6) -> SyntheticTransport:
    """Γ = S D S⁻¹ with integer-gapped real spectrum, μ kept half an integer away from it."""
    n = int(rng.integers(1, max_dim + 1))
    spectrum = rng.integers(-2, 2, size=n) + 1j * rng.uniform(-1.0, 1.0, size=n)
    q, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    upper = np.triu(rng.normal(size=(n, n)), 1)
    basis = q @ (np.eye(n) + 0.5 * upper / max(1.0, float(np.linalg.norm(upper, 2))))
    gamma_unit = basis @ np.diag(spectrum) @ np.linalg.inv(basis)
    mu = complex(int(rng.integers(-2, 2)) + 0.5, float(rng.uniform(-1.0, 1.0)))
    start = rng.normal(size=n) + 1j * rng.normal(size=n)
    w = rng.normal(size=n) + 1j * rng.normal(size=n)
    system = TransportSystem.rank_one(
        gamma_unit,
        rho=0.0,
        phi=lambda p: start * np.exp(float(p[0])),
        psi=lambda p, x: float(x[0]) * np.exp(mu * float(p[0])) * w,
        provenance="random",
    )
    return SyntheticTransport(system, mu, w)
