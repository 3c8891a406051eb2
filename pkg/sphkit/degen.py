"""Boundary degenerations h_I of a spherical subalgebra."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import mpmath
import numpy as np
import sympy as sp
from scipy.linalg import subspace_angles

from sphkit.cones import Fan, RationalCone
from sphkit.errors import EmptyIndexSet, NotInInteriorCone
from sphkit.liecore import (
    LinearFunctional,
    RationalSubspace,
    Scalar,
    StructuredLieAlgebra,
    Vector,
    add,
    dot,
    is_zero,
    vec,
)
from sphkit.sphstruct import SphericalDatum, analyze, in_monoid

LOG = logging.getLogger(__name__)

Grading = List[Tuple[sp.Rational, RationalSubspace]]


@dataclass(frozen=True)
class DegenerationDatum:
    index: Tuple[int, ...]
    h_I: RationalSubspace
    h_I_hat: RationalSubspace
    a_I_lift: RationalSubspace
    kept: Tuple[Tuple[int, str], ...] = field(compare=False)
    checks: Dict[str, bool] = field(compare=False, default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def _span_of_index(datum: SphericalDatum, index: Iterable[int]) -> List[LinearFunctional]:
    roots = datum.spherical_roots
    return [roots[k] for k in index]


def in_index_span(weight: LinearFunctional, datum: SphericalDatum, index: Sequence[int]) -> bool:
    """Whether a monoid weight lies in the N0-span of the spherical roots indexed by ``index``."""
    point = datum.compression_cone.interior_point()
    return in_monoid(weight, _span_of_index(datum, index), point, min_parts=0)


def h_I_explicit(datum: SphericalDatum, index: Iterable[int]) -> DegenerationDatum:
    """h_I = (l∩h) + span{X_{-α} + T_I(X_{-α})}, keeping X_{α,β} only when α+β ∈ ⟨I⟩."""
    index = tuple(sorted(set(index)))
    g = datum.g
    vectors: List[Vector] = list(datum.lh.rows)
    kept: List[Tuple[int, str]] = []
    for row, entry in enumerate(datum.t_table):
        v = entry.x_minus
        for beta, component in entry.components.items():
            weight = (entry.alpha + beta).restrict(datum.a_Z)
            if in_index_span(weight, datum, index):
                v = add(v, component)
                kept.append((row, "beta:" + ",".join(beta.to_strings())))
        if not is_zero(entry.zero_component):
            weight = entry.alpha.restrict(datum.a_Z)
            if in_index_span(weight, datum, index):
                v = add(v, entry.zero_component)
                kept.append((row, "zero"))
        vectors.append(v)
    h_I = g.span(vectors)
    face = datum.face(index)
    a_I_lift = g.span([datum.lift(r) for r in face.a_I.rows])
    h_I_hat = h_I + a_I_lift
    checks = {
        "subalgebra": g.is_subalgebra(h_I),
        "dimension": h_I.dim == datum.h.dim,
        "normalized_by_a_I": h_I.contains_subspace(g.bracket_spaces(a_I_lift, h_I)),
        "contains_lh": h_I.contains_subspace(datum.lh),
    }
    LOG.debug("h_I for I=%s has checks %s", index, checks)
    return DegenerationDatum(index, h_I, h_I_hat, a_I_lift, tuple(kept), checks)


def grading_by(datum: SphericalDatum, x: Sequence[Scalar]) -> Grading:
    """Weight pieces of g under ad(X), X ∈ a, merged by grade α(X)."""
    pieces: Dict[sp.Rational, RationalSubspace] = {}
    for alpha, space in datum.decomposition.spaces.items():
        grade = alpha(vec(x))
        pieces[grade] = pieces[grade] + space if grade in pieces else space
    return sorted(pieces.items(), key=lambda item: item[0], reverse=True)


def initial_subspace(v: RationalSubspace, grading: Grading) -> RationalSubspace:
    """lim_{t→∞} e^{tD} V for the grading D: span of the leading components of an adapted echelon basis."""
    if v.dim == 0:
        return v
    basis: List[Vector] = []
    grades: List[sp.Rational] = []
    for grade, piece in grading:
        for row in piece.rows:
            basis.append(row)
            grades.append(grade)
    change = sp.Matrix([list(b) for b in basis]).T
    if change.rows != change.cols or change.det() == 0:
        raise ValueError("grading pieces do not decompose the ambient space")
    inverse = change.inv()
    coords = sp.Matrix([list(inverse * sp.Matrix(list(r))) for r in v.rows])
    reduced, pivots = coords.rref()
    leading: List[Vector] = []
    for i, p in enumerate(pivots):
        top = grades[p]
        component = [sp.Integer(0)] * v.ambient_dim
        for k, g in enumerate(grades):
            if g == top and reduced[i, k] != 0:
                component = [a + reduced[i, k] * b for a, b in zip(component, basis[k])]
        leading.append(tuple(component))
    return RationalSubspace.span(leading, v.ambient_dim)


@dataclass(frozen=True)
class ConsistencyReport:
    index: Tuple[int, ...]
    samples: Tuple[Vector, ...]
    mismatches: Tuple[Vector, ...]

    @property
    def passed(self) -> bool:
        return not self.mismatches


def degeneration_consistency(
    datum: SphericalDatum, index: Iterable[int], samples: Sequence[Sequence[Scalar]]
) -> ConsistencyReport:
    """Compare h_I with the limit of h along every sampled X ∈ a_I^{--} (a_Z coordinates)."""
    index = tuple(sorted(set(index)))
    face = datum.face(index)
    expected = h_I_explicit(datum, index).h_I
    mismatches: List[Vector] = []
    points: List[Vector] = []
    for sample in samples:
        c = vec(sample)
        if not face.is_interior(c):
            raise NotInInteriorCone("sample is not in a_I^{--}", {"sample": [str(a) for a in c], "index": list(index)})
        points.append(c)
        limit = initial_subspace(datum.h, grading_by(datum, datum.lift(c)))
        if limit != expected:
            mismatches.append(c)
    if mismatches:
        LOG.warning("degeneration mismatch for I=%s at %d samples", index, len(mismatches))
    return ConsistencyReport(index, tuple(points), tuple(mismatches))


def verify_degenerate_space(datum: SphericalDatum, index: Iterable[int]) -> Dict[str, bool]:
    """Rerun the local structure analysis on (g, h_I) with the same generic element."""
    index = tuple(sorted(set(index)))
    degenerate = h_I_explicit(datum, index)
    child = analyze(datum.g, degenerate.h_I, datum.parabolic, element=datum.adapted.element)
    face = datum.face(index)
    chosen = set(_span_of_index(datum, index))
    return {
        "open_orbit": (datum.parabolic.p + degenerate.h_I).dim == datum.g.dim,
        "adapted": child.l == datum.l and child.u == datum.u,
        "same_a_Z": child.a_Z == datum.a_Z,
        "roots_are_I": set(child.spherical_roots) == chosen,
        "compression_cone": child.compression_cone
        == RationalCone.from_halfspaces([tuple(-a for a in r.coords) for r in chosen], datum.a_Z.dim),
        "edge_is_a_I": child.edge == face.a_I,
    }


@dataclass(frozen=True)
class BetaFunctionals:
    """β̃_I(X) = max over S∖I, β_I(X) = max over F ∪ S∖I."""

    outer: Tuple[LinearFunctional, ...]
    weights: Tuple[LinearFunctional, ...]
    complete: bool

    def beta_tilde(self, x: Sequence[Scalar]) -> sp.Rational:
        c = vec(x)
        return max(dot(a.coords, c) for a in self.outer)

    def beta(self, x: Sequence[Scalar]) -> sp.Rational:
        c = vec(x)
        return max(dot(a.coords, c) for a in self.outer + self.weights)


def beta_functionals(
    datum: SphericalDatum, index: Iterable[int], weights: Optional[Sequence[LinearFunctional]] = None
) -> BetaFunctionals:
    index = set(index)
    outer = tuple(r for k, r in enumerate(datum.spherical_roots) if k not in index)
    if not outer:
        raise EmptyIndexSet("β̃_I needs S∖I to be nonempty", {"index": sorted(index)})
    return BetaFunctionals(outer, tuple(weights or ()), weights is not None)


@dataclass(frozen=True)
class LimitStabilizer:
    index: Tuple[int, ...]
    h_X: RationalSubspace
    between: bool
    equals_hat: bool


def limit_stabilizer(datum: SphericalDatum, x: Sequence[Scalar], fan: Fan) -> LimitStabilizer:
    """Stabilizer of lim exp(sX)·z in the toric compactification: h_I plus the lift of the smallest fan face."""
    c = vec(x)
    index = tuple(k for k, r in enumerate(datum.spherical_roots) if dot(r.coords, c) == 0)
    degenerate = h_I_explicit(datum, index)
    face = fan.smallest_face(c)
    face_lift = datum.g.span([datum.lift(r) for r in face.linear_span.rows])
    h_x = degenerate.h_I + face_lift
    between = h_x.contains_subspace(degenerate.h_I) and degenerate.h_I_hat.contains_subspace(h_x)
    return LimitStabilizer(index, h_x, between, h_x == degenerate.h_I_hat)


def _mp(value: sp.Rational) -> mpmath.mpf:
    value = sp.Rational(value)
    return mpmath.mpf(int(value.p)) / int(value.q)


def numeric_limit_check(
    g: StructuredLieAlgebra,
    v: RationalSubspace,
    grading: Grading,
    limit: RationalSubspace,
    t: float = 1e3,
) -> float:
    """Largest principal angle between e^{tD}V and the claimed limit.

    The flow is applied in high precision, since e^{tD} spreads the
    coordinates over many orders of magnitude; only the orthonormalized
    bases are handed to scipy.
    """
    if v.dim == 0:
        return 0.0
    spread = float(grading[0][0] - grading[-1][0])
    basis: List[Vector] = []
    grades: List[sp.Rational] = []
    for grade, piece in grading:
        for row in piece.rows:
            basis.append(row)
            grades.append(grade)
    coords = sp.Matrix([list(b) for b in basis]).T.inv() * v.matrix.T
    with mpmath.workdps(int(t * spread / math.log(10)) + 30):
        flowed = mpmath.matrix(g.dim, v.dim)
        for k, row in enumerate(basis):
            weight = mpmath.exp(mpmath.mpf(t) * _mp(grades[k]))
            for j in range(v.dim):
                if coords[k, j] == 0:
                    continue
                c = weight * _mp(coords[k, j])
                for i, entry in enumerate(row):
                    if entry != 0:
                        flowed[i, j] += c * _mp(entry)
        q, _ = mpmath.qr(flowed)
        orthonormal = np.array([[float(q[i, j]) for j in range(v.dim)] for i in range(g.dim)])
    target = np.array(limit.matrix.T.evalf(), dtype=float)
    angles = subspace_angles(orthonormal, target)
    return float(np.max(angles)) if angles.size else 0.0



def degenerate_further(datum: SphericalDatum, outer: Iterable[int], inner: Iterable[int]) -> Dict[str, bool]:
    """(h_J)_I computed on Z_J equals h_I computed on Z for I ⊆ J."""
    outer = tuple(sorted(set(outer)))
    inner = tuple(sorted(set(inner)))
    if not set(inner) <= set(outer):
        raise ValueError("inner index set must be contained in the outer one")
    h_J = h_I_explicit(datum, outer).h_I
    child = analyze(datum.g, h_J, datum.parabolic, element=datum.adapted.element)
    wanted = [datum.spherical_roots[k] for k in inner]
    try:
        child_index = child.index_of(wanted)
    except ValueError:
        return {"roots_of_Z_J_contain_I": False, "transitive": False}
    twice = h_I_explicit(child, child_index).h_I
    once = h_I_explicit(datum, inner).h_I
    return {"roots_of_Z_J_contain_I": True, "transitive": twice == once}
