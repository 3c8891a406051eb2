"""Exact polyhedral cones and simplicial fans over the rationals."""
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations, product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import sympy as sp
from pydantic import BaseModel

from sphkit.errors import ChartMismatch, DimensionMismatch
from sphkit.liecore import (
    RationalSubspace,
    Scalar,
    Vector,
    dot,
    is_zero,
    nullspace_rows,
    primitive,
    vec,
)

LOG = logging.getLogger(__name__)

IntVector = Tuple[int, ...]


class Containment(str, Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


def _as_vectors(vectors: Iterable[Sequence[Scalar]], d: int) -> List[Vector]:
    out = []
    for v in vectors:
        v = vec(v)
        if len(v) != d:
            raise DimensionMismatch("vector length differs from cone dimension", {"expected": d, "got": len(v)})
        out.append(v)
    return out


def _orthogonal_projection(v: Vector, basis: RationalSubspace) -> Vector:
    """v minus its standard-orthogonal projection onto the span of basis."""
    if basis.dim == 0:
        return v
    b = basis.matrix
    coeffs = (b * b.T).inv() * (b * sp.Matrix(list(v)))
    return tuple(sp.Matrix(list(v)) - b.T * coeffs)


@dataclass(frozen=True)
class RationalCone:
    """Cone kept in both descriptions: rays plus lineality, and facet inequalities f.x >= 0."""

    ambient_dim: int
    rays: Tuple[IntVector, ...]
    lineality: RationalSubspace
    facets: Tuple[IntVector, ...]
    linear_span: RationalSubspace

    # -- constructors -----------------------------------------------------------

    @classmethod
    def from_generators(cls, generators: Iterable[Sequence[Scalar]], ambient_dim: int) -> "RationalCone":
        gens = [g for g in _as_vectors(generators, ambient_dim) if not is_zero(g)]
        span = RationalSubspace.span(gens, ambient_dim)
        equations = span.annihilator().rows
        k = span.dim
        facets: set = set()
        if k > 0:
            for subset in combinations(range(len(gens)), k - 1):
                rows = [gens[i] for i in subset] + list(equations)
                normals = nullspace_rows(rows, ambient_dim)
                if len(normals) != 1:
                    continue
                f = normals[0]
                values = [dot(f, g) for g in gens]
                if all(v >= 0 for v in values) and any(v > 0 for v in values):
                    facets.add(primitive(f))
                elif all(v <= 0 for v in values) and any(v < 0 for v in values):
                    facets.add(primitive(tuple(-a for a in f)))
        facet_rows = sorted(facets)
        lineality = RationalSubspace.span(
            nullspace_rows(list(equations) + [vec(f) for f in facet_rows], ambient_dim), ambient_dim
        )
        pointed_dim = k - lineality.dim
        rays: set = set()
        for g in gens:
            p = _orthogonal_projection(g, lineality)
            if is_zero(p):
                continue
            tight = [vec(f) for f in facet_rows if dot(vec(f), p) == 0]
            rank = RationalSubspace.span(tight, ambient_dim).dim if tight else 0
            if rank == pointed_dim - 1:
                rays.add(primitive(p))
        return cls(ambient_dim, tuple(sorted(rays)), lineality, tuple(facet_rows), span)

    @classmethod
    def from_halfspaces(
        cls,
        inequalities: Iterable[Sequence[Scalar]],
        ambient_dim: int,
        equations: Iterable[Sequence[Scalar]] = (),
    ) -> "RationalCone":
        """{x : f.x >= 0 for every inequality, e.x = 0 for every equation}."""
        ineqs = _as_vectors(inequalities, ambient_dim)
        eqs = _as_vectors(equations, ambient_dim)
        lineality = RationalSubspace.span(nullspace_rows(eqs + ineqs, ambient_dim), ambient_dim)
        pointed = RationalSubspace.span(nullspace_rows(eqs + list(lineality.rows), ambient_dim), ambient_dim)
        m = pointed.dim
        rays: set = set()

        def admissible(r: Vector) -> bool:
            return all(dot(f, r) >= 0 for f in ineqs)

        if m == 1:
            w = pointed.rows[0]
            for cand in (w, tuple(-a for a in w)):
                if admissible(cand):
                    rays.add(primitive(cand))
        elif m >= 2:
            for subset in combinations(range(len(ineqs)), m - 1):
                rows = [ineqs[i] for i in subset] + eqs + list(lineality.rows)
                normals = nullspace_rows(rows, ambient_dim)
                if len(normals) != 1:
                    continue
                r = normals[0]
                for cand in (r, tuple(-a for a in r)):
                    if admissible(cand):
                        rays.add(primitive(cand))
        generators: List[Sequence] = [list(r) for r in sorted(rays)]
        for b in lineality.rows:
            generators.append(list(b))
            generators.append([-a for a in b])
        return cls.from_generators(generators, ambient_dim)

    @classmethod
    def full_space(cls, n: int) -> "RationalCone":
        return cls.from_halfspaces([], n)

    # -- properties -------------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.linear_span.dim

    @property
    def is_pointed(self) -> bool:
        return self.lineality.dim == 0

    @property
    def is_simplicial(self) -> bool:
        return self.is_pointed and len(self.rays) == self.dim

    @property
    def equations(self) -> Tuple[IntVector, ...]:
        return tuple(primitive(r) for r in self.linear_span.annihilator().rows)

    @property
    def lineality_basis(self) -> Tuple[IntVector, ...]:
        return tuple(primitive(r) for r in self.lineality.rows)

    @property
    def generators(self) -> Tuple[IntVector, ...]:
        lin = self.lineality_basis
        return self.rays + lin + tuple(tuple(-a for a in b) for b in lin)

    # -- queries --------------------------------------------------------------

    def contains(self, x: Sequence[Scalar]) -> Containment:
        x = vec(x)
        if len(x) != self.ambient_dim:
            raise DimensionMismatch("point has wrong dimension")
        if not self.linear_span.contains(x):
            return Containment.OUTSIDE
        values = [dot(vec(f), x) for f in self.facets]
        if any(v < 0 for v in values):
            return Containment.OUTSIDE
        if all(v > 0 for v in values):
            return Containment.INTERIOR
        return Containment.BOUNDARY

    def __contains__(self, x: Sequence[Scalar]) -> bool:
        return self.contains(x) is not Containment.OUTSIDE

    def dual(self) -> "RationalCone":
        eqs = self.equations
        gens = list(self.facets) + list(eqs) + [tuple(-a for a in e) for e in eqs]
        return RationalCone.from_generators(gens, self.ambient_dim)

    def face(self, functional: Sequence[Scalar]) -> "RationalCone":
        """Face cut out by a supporting functional (nonnegative on the cone)."""
        f = vec(functional)
        return RationalCone.from_generators([g for g in self.generators if dot(f, g) == 0], self.ambient_dim)

    def intersect(self, other: "RationalCone") -> "RationalCone":
        return RationalCone.from_halfspaces(
            list(self.facets) + list(other.facets),
            self.ambient_dim,
            equations=list(self.equations) + list(other.equations),
        )

    def facet_cones(self) -> List[Tuple[IntVector, "RationalCone"]]:
        return [(f, self.face(f)) for f in self.facets]

    def interior_point(self) -> Vector:
        """A point of the relative interior: the sum of the extreme rays."""
        total = [sp.Integer(0)] * self.ambient_dim
        for r in self.rays:
            for k, a in enumerate(r):
                total[k] += a
        return tuple(total)

    def is_smooth(self) -> bool:
        """Whether the rays extend to a basis of the integer lattice."""
        if not self.is_simplicial:
            return False
        k = len(self.rays)
        if k == 0:
            return True
        m = sp.Matrix([list(r) for r in self.rays])
        g = 0
        for cols in combinations(range(self.ambient_dim), k):
            g = sp.igcd(g, int(m[:, list(cols)].det()))
        return g == 1

    def to_document(self) -> "ConeDocument":
        return ConeDocument(
            ambient_dim=self.ambient_dim,
            generators=[list(g) for g in self.generators],
            halfspaces=[list(f) for f in self.facets],
            equations=[list(e) for e in self.equations],
        )


class ConeDocument(BaseModel):
    ambient_dim: int
    generators: List[List[int]]
    halfspaces: List[List[int]]
    equations: List[List[int]]


class FanDocument(BaseModel):
    ambient_dim: int
    rays: List[List[int]]
    cones: List[List[int]]
    smooth: List[bool]


@dataclass(frozen=True)
class ToricLimit:
    exists: bool
    pattern: Tuple[int, ...]
    rate: Optional[float]
    values: Tuple[sp.Rational, ...] = field(default=(), compare=False)


def toric_limit(x: Sequence[Scalar], psi: Sequence[Sequence[Scalar]]) -> ToricLimit:
    """Limit of the chart coordinates e^{s dψ_j(X)} as s → ∞.

    The limit exists iff every dψ_j(X) ≤ 0; the coordinates with dψ_j(X) < 0
    tend to zero and the slowest of them sets the rate.
    """
    x = vec(x)
    values = tuple(dot(vec(p), x) for p in psi)
    exists = all(v <= 0 for v in values)
    pattern = tuple(j for j, v in enumerate(values) if v < 0)
    rate = min((float(-values[j]) for j in pattern), default=None)
    return ToricLimit(exists, pattern, rate if exists else None, values)


@dataclass(frozen=True)
class FanCertificate:
    simplicial: bool
    faces_ok: bool
    facets_ok: bool
    outside_samples: int
    violations: Tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return self.simplicial and self.faces_ok and self.facets_ok and self.outside_samples == 0


@dataclass(frozen=True)
class Fan:
    cones: Tuple[RationalCone, ...]
    support: RationalCone

    @property
    def rays(self) -> Tuple[IntVector, ...]:
        return tuple(sorted({r for c in self.cones for r in c.rays}))

    @property
    def smooth_flags(self) -> Tuple[bool, ...]:
        return tuple(c.is_smooth() for c in self.cones)

    @property
    def closed_orbit_count(self) -> int:
        """Number of maximal cones, which index the closed orbits of the compactification."""
        return sum(1 for c in self.cones if c.dim == self.support.dim)

    def cone_containing(self, x: Sequence[Scalar]) -> Optional[RationalCone]:
        for c in self.cones:
            if x in c:
                return c
        return None

    def _coefficients(self, cone: RationalCone, x: Vector) -> List[sp.Rational]:
        if not cone.rays:
            return []
        g = sp.Matrix([list(r) for r in cone.rays])
        return list((g * g.T).inv() * (g * sp.Matrix(list(x))))

    def smallest_face(self, x: Sequence[Scalar]) -> RationalCone:
        x = vec(x)
        cone = self.cone_containing(x)
        if cone is None:
            raise ChartMismatch("point lies outside every cone of the fan", {"x": [str(a) for a in x]})
        coeffs = self._coefficients(cone, x)
        return RationalCone.from_generators(
            [r for r, c in zip(cone.rays, coeffs) if c > 0], self.support.ambient_dim
        )

    def chart(self, cone: RationalCone) -> List[Vector]:
        """Chart functionals ψ_j = -(dual basis of the rays) on the span of a simplicial cone."""
        if not cone.rays:
            return []
        g = sp.Matrix([list(r) for r in cone.rays])
        dual = (g * g.T).inv() * g
        return [tuple(-a for a in dual.row(i)) for i in range(dual.rows)]

    def toric_limit(self, x: Sequence[Scalar]) -> ToricLimit:
        x = vec(x)
        cone = self.cone_containing(x)
        if cone is None:
            raise ChartMismatch("point lies outside every cone of the fan", {"x": [str(a) for a in x]})
        return toric_limit(x, self.chart(cone))

    def certify(self, samples: int = 0, rng: Optional[np.random.Generator] = None) -> FanCertificate:
        violations: List[str] = []
        d = self.support.dim
        simplicial = all(c.is_simplicial and c.dim == d for c in self.cones)
        if not simplicial:
            violations.append("non-simplicial or lower-dimensional cone")
        faces_ok = True
        for (i, ci), (j, cj) in combinations(enumerate(self.cones), 2):
            inter = ci.intersect(cj)
            if not inter.is_pointed or not set(inter.rays) <= set(ci.rays) & set(cj.rays):
                faces_ok = False
                violations.append(f"cones {i} and {j} do not meet in a common face")
        counts: Counter = Counter()
        for c in self.cones:
            for facet in combinations(c.rays, len(c.rays) - 1):
                counts[frozenset(facet)] += 1
        facets_ok = True
        for facet, count in counts.items():
            on_boundary = any(all(dot(vec(f), vec(r)) == 0 for r in facet) for f in self.support.facets)
            expected = 1 if on_boundary else 2
            if count != expected:
                facets_ok = False
                violations.append(f"facet {sorted(facet)} shared by {count} cones, expected {expected}")
        outside = self.sample_outside(samples, rng) if samples else 0
        if outside:
            violations.append(f"{outside} sampled support points outside every cone")
        certificate = FanCertificate(simplicial, faces_ok, facets_ok, outside, tuple(violations))
        LOG.info(
            "fan certification",
            extra={"cones": len(self.cones), "passed": certificate.passed, "violations": len(violations)},
        )
        return certificate

    def sample_outside(self, samples: int, rng: Optional[np.random.Generator] = None, tol: float = 1e-9) -> int:
        """Count random support points that no cone contains (floating-point check)."""
        rng = rng if rng is not None else np.random.default_rng(0)
        gens = np.array([[float(a) for a in g] for g in self.support.generators], dtype=float)
        if gens.size == 0:
            return 0
        points = rng.random((samples, gens.shape[0])) @ gens
        covered = np.zeros(samples, dtype=bool)
        for cone in self.cones:
            if not cone.rays:
                covered |= np.all(np.abs(points) <= tol, axis=1)
                continue
            rays = np.array(cone.rays, dtype=float)
            coeffs, *_ = np.linalg.lstsq(rays.T, points.T, rcond=None)
            residual = np.linalg.norm(rays.T @ coeffs - points.T, axis=0)
            scale = 1.0 + np.linalg.norm(points, axis=1)
            inside = (residual <= tol * scale) & np.all(coeffs >= -tol * scale, axis=0)
            covered |= inside
        return int(np.count_nonzero(~covered))

    def to_document(self) -> FanDocument:
        table = self.rays
        index = {r: k for k, r in enumerate(table)}
        return FanDocument(
            ambient_dim=self.support.ambient_dim,
            rays=[list(r) for r in table],
            cones=[[index[r] for r in c.rays] for c in self.cones],
            smooth=list(self.smooth_flags),
        )


def _pulling(cone: RationalCone) -> List[RationalCone]:
    if cone.is_simplicial:
        return [cone]
    apex = cone.rays[0]
    pieces: List[RationalCone] = []
    for f, facet in cone.facet_cones():
        if dot(vec(f), vec(apex)) == 0:
            continue
        for simplex in _pulling(facet):
            pieces.append(RationalCone.from_generators([apex, *simplex.rays], cone.ambient_dim))
    return pieces


def simplicial_subdivision(support: RationalCone) -> Fan:
    """Pulling triangulation at the rays in lexicographic order, after splitting the lineality into orthants."""
    if support.is_simplicial:
        return Fan((support,), support)
    lineality = support.lineality_basis
    pieces: List[RationalCone] = []
    for signs in product((1, -1), repeat=len(lineality)):
        gens = list(support.rays) + [tuple(s * a for a in b) for s, b in zip(signs, lineality)]
        pieces.extend(_pulling(RationalCone.from_generators(gens, support.ambient_dim)))
    cones = tuple(sorted(pieces, key=lambda c: c.rays))
    LOG.debug("subdivided support of dimension %d into %d cones", support.dim, len(cones))
    return Fan(cones, support)


def orthant_fan(n: int) -> Fan:
    return simplicial_subdivision(RationalCone.full_space(n))


def projective_fan(n: int) -> Fan:
    """Complete fan with rays e_1..e_n and -(e_1+...+e_n); every n of them span a cone."""
    rays = [tuple(int(i == j) for j in range(n)) for i in range(n)] + [tuple([-1] * n)]
    cones = tuple(
        sorted(
            (RationalCone.from_generators(list(subset), n) for subset in combinations(rays, n)),
            key=lambda c: c.rays,
        )
    )
    return Fan(cones, RationalCone.full_space(n))


@dataclass(frozen=True)
class CompressionFace:
    """The face data a_I, its cone a_I ∩ a_Z^- and the edge a_{Z,E} for I ⊆ S."""

    roots: Tuple[Vector, ...]
    index: Tuple[int, ...]
    a_I: RationalSubspace
    cone: RationalCone
    edge: RationalSubspace

    def is_interior(self, x: Sequence[Scalar]) -> bool:
        """Membership in a_I^{--}: α(X) = 0 for α ∈ I and α(X) < 0 for α ∈ S∖I."""
        x = vec(x)
        if not self.a_I.contains(x):
            return False
        return all(dot(alpha, x) < 0 for k, alpha in enumerate(self.roots) if k not in self.index)

    def interior_samples(self, count: int, rng: np.random.Generator) -> List[Vector]:
        """Positive integer combinations of the cone generators, all in a_I^{--}."""
        out: List[Vector] = []
        d = self.cone.ambient_dim
        for _ in range(count):
            total = [sp.Integer(0)] * d
            for r in self.cone.rays:
                c = int(rng.integers(1, 6))
                total = [t + c * a for t, a in zip(total, r)]
            for b in self.cone.lineality_basis:
                c = int(rng.integers(-3, 4))
                total = [t + c * a for t, a in zip(total, b)]
            out.append(tuple(total))
        return out


def compression_subcones(roots: Sequence[Sequence[Scalar]], index: Iterable[int], ambient_dim: int) -> CompressionFace:
    """a_I = {α = 0, α ∈ I}, with cone {α ≤ 0, α ∈ S∖I} inside it and the edge {α = 0, α ∈ S}."""
    roots_v = tuple(vec(r) for r in roots)
    chosen = tuple(sorted(set(index)))
    equal = [roots_v[k] for k in chosen]
    a_I = RationalSubspace.span(nullspace_rows(equal, ambient_dim), ambient_dim)
    cone = RationalCone.from_halfspaces(
        [tuple(-a for a in roots_v[k]) for k in range(len(roots_v)) if k not in chosen],
        ambient_dim,
        equations=equal,
    )
    edge = RationalSubspace.span(nullspace_rows(list(roots_v), ambient_dim), ambient_dim)
    return CompressionFace(roots_v, chosen, a_I, cone, edge)


def is_wonderful(roots: Sequence[Sequence[Scalar]], edge: RationalSubspace, lattice: Sequence[Sequence[Scalar]]) -> bool:
    """Edge zero and S a basis of the lattice spanned by ``lattice`` (which must contain S)."""
    if edge.dim:
        return False
    if not roots:
        return not any(not is_zero(vec(v)) for v in lattice)
    s = sp.Matrix([list(vec(r)) for r in roots])
    if s.rank() != s.rows:
        return False
    projector = s.T * (s * s.T).inv()
    for v in lattice:
        target = sp.Matrix([list(vec(v))])
        solution = target * projector
        if solution * s != target or any(not c.is_integer for c in solution):
            return False
    return True
