"""Local structure of a real spherical pair (g, h).

Given a minimal parabolic p = m + a + n with p + h = g, this module finds the
adapted parabolic q = l + u, the T-map of the decomposition
g = h + (l∩h)^⊥ + u, the weight monoid, the spherical roots and the
compression cone. Everything is exact.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple, Union

import sympy as sp
from pydantic import BaseModel

from sphkit.cones import CompressionFace, RationalCone, compression_subcones, is_wonderful
from sphkit.errors import (
    AdaptedParabolicUnverified,
    DecompositionFailure,
    InvalidStructure,
    MonoidElementNotOnAH,
    NoGenericElement,
)
from sphkit.liecore import (
    LieAlgebraDocument,
    LinearFunctional,
    RationalSubspace,
    RootDecomposition,
    Scalar,
    StructuredLieAlgebra,
    Vector,
    dot,
    form_perp,
    is_zero,
    root_decomposition,
    scale,
    vec,
)

LOG = logging.getLogger(__name__)


@dataclass(frozen=True)
class ParabolicDatum:
    """p = m ⊕ a ⊕ n with the root decomposition of g under a."""

    g: StructuredLieAlgebra = field(compare=False)
    m: RationalSubspace
    a: RationalSubspace
    n: RationalSubspace

    @classmethod
    def from_labels(cls, g: StructuredLieAlgebra, m: Sequence[dict], a: Sequence[dict], n: Sequence[dict]) -> "ParabolicDatum":
        datum = cls(g, g.span_labels(*m), g.span_labels(*a), g.span_labels(*n))
        datum.validate()
        return datum

    @property
    def p(self) -> RationalSubspace:
        return self.m + self.a + self.n

    @property
    def roots(self) -> RootDecomposition:
        return root_decomposition(self.g, self.a)

    @property
    def positive_roots(self) -> List[LinearFunctional]:
        decomposition = self.roots
        return [r for r in decomposition.roots if self.n.contains_subspace(decomposition.space(r))]

    def validate(self) -> None:
        g = self.g
        if self.m.dim + self.a.dim + self.n.dim != self.p.dim:
            raise InvalidStructure("m, a and n are not independent")
        if not g.is_abelian(self.a):
            raise InvalidStructure("a is not abelian")
        if not g.is_subalgebra(self.p):
            raise InvalidStructure("p is not a subalgebra")
        decomposition = self.roots
        if decomposition.sum_of(self.positive_roots) != self.n:
            raise InvalidStructure("n is not a sum of root spaces")
        if not self.n.contains_subspace(g.bracket_spaces(self.p, self.n)):
            raise InvalidStructure("n is not an ideal of p")


def check_open_orbit(g: StructuredLieAlgebra, h: RationalSubspace, parabolic: ParabolicDatum) -> bool:
    """Infinitesimal openness of P·H: p + h = g."""
    return (parabolic.p + h).dim == g.dim


@dataclass(frozen=True)
class AdaptedParabolic:
    element: Vector
    l: RationalSubspace
    u: RationalSubspace
    u_roots: Tuple[LinearFunctional, ...]
    conditions: Dict[str, bool] = field(compare=False)


def _verify_element(
    g: StructuredLieAlgebra,
    h: RationalSubspace,
    parabolic: ParabolicDatum,
    decomposition: RootDecomposition,
    x: Vector,
) -> Tuple[Dict[str, bool], RationalSubspace, RationalSubspace, Tuple[LinearFunctional, ...]]:
    conditions: Dict[str, bool] = {}
    conditions["nonnegative_on_n"] = all(alpha(x) >= 0 for alpha in parabolic.positive_roots)
    l = g.centralizer(g.span([x]))
    u_roots = tuple(r for r in decomposition.roots if r(x) > 0)
    u = decomposition.sum_of(u_roots)
    q = l + u
    lh = l.intersection(h)
    conditions["u_in_n"] = parabolic.n.contains_subspace(u)
    conditions["l_contains_ma"] = l.contains_subspace(parabolic.m + parabolic.a)
    conditions["q_plus_h"] = (q + h).dim == g.dim
    conditions["q_cap_h"] = q.intersection(h) == lh
    levi_roots = [r for r in decomposition.roots if r(x) == 0]
    l_n = g.ideal_generated(decomposition.sum_of(levi_roots), l)
    conditions["l_n_in_h"] = h.contains_subspace(l_n)
    return conditions, l, u, u_roots


def generic_candidates(g: StructuredLieAlgebra, h: RationalSubspace, parabolic: ParabolicDatum) -> RationalSubspace:
    """a ∩ (h + n)^⊥ with respect to the invariant form."""
    return form_perp(h + parabolic.n, parabolic.a, g.form)


def _lattice_points(space: RationalSubspace, cap: int):
    k = space.dim
    for s in range(cap + 1):
        if k == 0 and s > 0:
            return
        for coeffs in product(range(-s, s + 1), repeat=k):
            if k and max(abs(c) for c in coeffs) != s:
                continue
            yield space.vector(coeffs)


def construct_adapted_parabolic(
    g: StructuredLieAlgebra,
    h: RationalSubspace,
    parabolic: ParabolicDatum,
    element: Optional[Sequence[Scalar]] = None,
    search_cap: int = 32,
    skip: int = 0,
) -> AdaptedParabolic:
    """l = centralizer of a generic X ∈ a ∩ (h+n)^⊥, u = sum of root spaces with α(X) > 0.

    Without ``element`` the candidates are enumerated by increasing sup-norm of
    their coordinates and the first verifying X is taken; ``skip`` passes over
    that many verifying elements first.
    """
    decomposition = parabolic.roots
    if element is not None:
        x = vec(element)
        conditions, l, u, u_roots = _verify_element(g, h, parabolic, decomposition, x)
        if not all(conditions.values()):
            failed = [name for name, ok in conditions.items() if not ok]
            raise AdaptedParabolicUnverified("element does not define an adapted parabolic", {"failed": failed})
        return AdaptedParabolic(x, l, u, u_roots, conditions)
    positive = parabolic.positive_roots
    candidates = generic_candidates(g, h, parabolic)
    seen = 0
    for x in _lattice_points(candidates, search_cap):
        if any(alpha(x) < 0 for alpha in positive):
            continue
        conditions, l, u, u_roots = _verify_element(g, h, parabolic, decomposition, x)
        if all(conditions.values()):
            if seen == skip:
                LOG.debug("adapted parabolic from X=%s", [str(c) for c in x])
                return AdaptedParabolic(x, l, u, u_roots, conditions)
            seen += 1
    raise NoGenericElement(
        "no verifying element in the candidate lattice",
        {"candidates_dim": candidates.dim, "search_cap": search_cap, "skipped": skip},
    )


@dataclass(frozen=True)
class TEntry:
    """One row of the T-map: X_{-α} + Σ_β X_{α,β} + X_{α,0} ∈ h."""

    alpha: LinearFunctional
    x_minus: Vector
    components: Dict[LinearFunctional, Vector]
    zero_component: Vector

    def reconstruct(self) -> Vector:
        total = list(self.x_minus)
        for v in list(self.components.values()) + [self.zero_component]:
            total = [a + b for a, b in zip(total, v)]
        return tuple(total)


def t_map(
    g: StructuredLieAlgebra,
    h: RationalSubspace,
    decomposition: RootDecomposition,
    lh_perp: RationalSubspace,
    u_roots: Sequence[LinearFunctional],
) -> List[TEntry]:
    """Minus the projection of u^- onto lh_perp ⊕ u along h, split by root."""
    blocks: List[Tuple[Optional[LinearFunctional], Vector]] = []
    for row in h.rows:
        blocks.append((None, row))
    lh_marker = decomposition.zero
    for row in lh_perp.rows:
        blocks.append((lh_marker, row))
    for beta in u_roots:
        for row in decomposition.space(beta).rows:
            blocks.append((beta, row))
    if len(blocks) != g.dim:
        raise DecompositionFailure(
            "h, (l∩h)^⊥ and u do not have complementary dimensions",
            {"h": h.dim, "lh_perp": lh_perp.dim, "u": len(blocks) - h.dim - lh_perp.dim, "g": g.dim},
        )
    change = sp.Matrix([list(v) for _, v in blocks]).T
    if change.det() == 0:
        raise DecompositionFailure("h + (l∩h)^⊥ + u is not a direct sum")
    inverse = change.inv()
    entries: List[TEntry] = []
    n = g.dim
    for alpha in u_roots:
        for x_minus in decomposition.space(-alpha).rows:
            coeffs = inverse * sp.Matrix(list(x_minus))
            components: Dict[LinearFunctional, Vector] = {}
            zero_component = (sp.Integer(0),) * n
            for c, (owner, v) in zip(coeffs, blocks):
                if owner is None or c == 0:
                    continue
                piece = scale(-c, v)
                if owner is lh_marker:
                    zero_component = tuple(a + b for a, b in zip(zero_component, piece))
                else:
                    previous = components.get(owner, (sp.Integer(0),) * n)
                    components[owner] = tuple(a + b for a, b in zip(previous, piece))
            components = {b: v for b, v in components.items() if not is_zero(v)}
            entry = TEntry(alpha, x_minus, components, zero_component)
            if not h.contains(entry.reconstruct()):
                raise DecompositionFailure("T-map reconstruction left h", {"alpha": alpha.to_strings()})
            entries.append(entry)
    return entries


def height_function(point: Sequence[Scalar]):
    x0 = vec(point)
    return lambda functional: -dot(functional.coords, x0)


def in_monoid(
    target: LinearFunctional,
    generators: Sequence[LinearFunctional],
    point: Sequence[Scalar],
    min_parts: int = 1,
) -> bool:
    """Whether target is an N0-combination of generators with at least ``min_parts`` summands.

    ``point`` lies in the interior of the compression cone, so every generator
    has positive height and coefficients are bounded by the height ratio.
    """
    height = height_function(point)
    total = height(target)
    if target.is_zero:
        return min_parts == 0
    if total <= 0:
        return False
    gens = [g for g in generators if not g.is_zero]
    bounds = [int(sp.floor(total / height(g))) for g in gens]

    def search(i: int, remainder: LinearFunctional, parts: int) -> bool:
        if remainder.is_zero:
            return parts >= min_parts
        if i == len(gens):
            return False
        for c in range(bounds[i], -1, -1):
            rest = remainder - gens[i].scaled(c)
            if height(rest) < 0:
                continue
            if search(i + 1, rest, parts + c):
                return True
        return False

    return search(0, target, 0)


def monoid_cone(generators: Sequence[LinearFunctional], dim: int) -> RationalCone:
    return RationalCone.from_generators([g.coords for g in generators], dim)


@dataclass(frozen=True)
class SphericalRoots:
    monoid_gens: Tuple[LinearFunctional, ...]
    roots: Tuple[LinearFunctional, ...]
    compression_cone: RationalCone
    cone_from_monoid: RationalCone

    @property
    def cones_agree(self) -> bool:
        return self.compression_cone == self.cone_from_monoid


def spherical_roots(entries: Sequence[TEntry], a_H: RationalSubspace, a_Z: RationalSubspace) -> SphericalRoots:
    """Monoid generators α+β, the minimal irreducible element on each extreme ray, and 𝔞_Z^-."""
    gens: Dict[LinearFunctional, None] = {}
    for entry in entries:
        weights = [entry.alpha + beta for beta in entry.components]
        if not is_zero(entry.zero_component):
            weights.append(entry.alpha)
        for weight in weights:
            if not weight.vanishes_on(a_H):
                raise MonoidElementNotOnAH(
                    "monoid generator does not vanish on a_H", {"weight": weight.to_strings()}
                )
            gens[weight.restrict(a_Z)] = None
    monoid_gens = tuple(sorted(gens, key=lambda f: tuple(f.coords)))
    k = a_Z.dim
    cone = monoid_cone(monoid_gens, k)
    if not cone.is_pointed:
        raise InvalidStructure("weight monoid is not pointed", {"lineality": cone.lineality.to_strings()})
    roots: List[LinearFunctional] = []
    for ray in cone.rays:
        on_ray = [g for g in monoid_gens if sp.Matrix([list(ray), list(g.coords)]).rank() == 1]
        ray_v = vec(ray)
        on_ray.sort(key=lambda g: dot(g.coords, ray_v))
        roots.append(on_ray[0])
    roots.sort(key=lambda f: tuple(f.coords))
    compression = RationalCone.from_halfspaces([scale(-1, r.coords) for r in roots], k)
    from_monoid = RationalCone.from_halfspaces([scale(-1, g.coords) for g in monoid_gens], k)
    point = compression.interior_point()
    for r in roots:
        if in_monoid(r, monoid_gens, point, min_parts=2):
            raise InvalidStructure("spherical root decomposes in the monoid", {"root": r.to_strings()})
    return SphericalRoots(monoid_gens, tuple(roots), compression, from_monoid)


@dataclass(frozen=True)
class RhoReport:
    rho_a: LinearFunctional
    rho: LinearFunctional
    vanishes_on_aH: bool
    trace_defect: Tuple[sp.Rational, ...]
    positive_element_exists: bool

    @property
    def unimodular(self) -> bool:
        return self.vanishes_on_aH and all(t == 0 for t in self.trace_defect)


def unimodularity_defect(g: StructuredLieAlgebra, h: RationalSubspace) -> Tuple[sp.Rational, ...]:
    """tr ad_g(Y) - tr ad_h(Y) for Y in the echelon basis of h: the trace of Y on g/h."""
    out = []
    for y in h.rows:
        full = g.ad_matrix(y).trace()
        restricted = sum((h.coordinates(g.bracket(y, b))[k] for k, b in enumerate(h.rows)), sp.Integer(0))
        out.append(full - restricted)
    return tuple(out)


def rho_q_and_unimodularity(
    g: StructuredLieAlgebra,
    h: RationalSubspace,
    decomposition: RootDecomposition,
    u_roots: Sequence[LinearFunctional],
    a_H: RationalSubspace,
    a_Z: RationalSubspace,
    element: Vector,
) -> RhoReport:
    rho_a = decomposition.zero
    for alpha in u_roots:
        rho_a = rho_a + alpha.scaled(decomposition.space(alpha).dim)
    rho_a = rho_a.scaled(sp.Rational(1, 2))
    positive = a_Z.contains(element) and all(alpha(element) > 0 for alpha in u_roots)
    return RhoReport(
        rho_a,
        rho_a.restrict(a_Z),
        rho_a.vanishes_on(a_H),
        unimodularity_defect(g, h),
        positive,
    )


@dataclass(frozen=True)
class LatticeReport:
    independent: bool
    basis_of_lattice: bool
    wonderful: bool


def lattice_check(roots: SphericalRoots, edge: RationalSubspace) -> LatticeReport:
    """Whether S is a basis of the lattice generated by the monoid generators."""
    coords = [r.coords for r in roots.roots]
    gens = [m.coords for m in roots.monoid_gens]
    independent = not coords or sp.Matrix([list(c) for c in coords]).rank() == len(coords)
    basis = is_wonderful(coords, RationalSubspace.zero(edge.ambient_dim), gens)
    return LatticeReport(independent, basis, is_wonderful(coords, edge, gens))


@dataclass(frozen=True)
class SphericalDatum:
    """The local structure package of (g, h) relative to P."""

    g: StructuredLieAlgebra = field(compare=False)
    h: RationalSubspace
    parabolic: ParabolicDatum
    decomposition: RootDecomposition = field(compare=False)
    adapted: AdaptedParabolic
    lh: RationalSubspace
    lh_perp: RationalSubspace
    a_H: RationalSubspace
    a_Z: RationalSubspace
    t_table: Tuple[TEntry, ...] = field(compare=False)
    roots: SphericalRoots
    rho: RhoReport = field(compare=False)

    @property
    def l(self) -> RationalSubspace:
        return self.adapted.l

    @property
    def u(self) -> RationalSubspace:
        return self.adapted.u

    @property
    def u_roots(self) -> Tuple[LinearFunctional, ...]:
        return self.adapted.u_roots

    @property
    def u_minus(self) -> RationalSubspace:
        return self.decomposition.sum_of(-r for r in self.u_roots)

    @property
    def spherical_roots(self) -> Tuple[LinearFunctional, ...]:
        return self.roots.roots

    @property
    def compression_cone(self) -> RationalCone:
        return self.roots.compression_cone

    @property
    def edge(self) -> RationalSubspace:
        return self.face(range(len(self.spherical_roots))).edge

    def face(self, index) -> CompressionFace:
        return compression_subcones([r.coords for r in self.spherical_roots], index, self.a_Z.dim)

    def lift(self, coords: Sequence[Scalar]) -> Vector:
        """Element of a ⊆ g with the given coordinates in the echelon basis of a_Z."""
        if self.a_Z.dim == 0:
            return (sp.Integer(0),) * self.g.dim
        return self.a_Z.vector(coords)

    def index_of(self, roots: Sequence[LinearFunctional]) -> Tuple[int, ...]:
        return tuple(sorted(self.spherical_roots.index(r) for r in roots))

    def check_decomposition(self) -> Dict[str, bool]:
        """g = h ⊕ (l∩h)^⊥ ⊕ u and every T-row lands in h."""
        total = self.h + self.lh_perp + self.u
        return {
            "dimension": self.h.dim + self.lh_perp.dim + self.u.dim == self.g.dim,
            "spans": total.dim == self.g.dim,
            "h_cap_lh_perp": self.h.intersection(self.lh_perp).dim == 0,
            "h_cap_u": self.h.intersection(self.u).dim == 0,
            "lh_perp_cap_u": self.lh_perp.intersection(self.u).dim == 0,
            "t_rows_in_h": all(self.h.contains(e.reconstruct()) for e in self.t_table),
            "cones_agree": self.roots.cones_agree,
        }

    def to_document(self) -> "SphericalDatumDocument":
        return SphericalDatumDocument(
            algebra=self.g.name,
            h=self.h.to_strings(),
            element=[str(c) for c in self.adapted.element],
            l=self.l.to_strings(),
            u=self.u.to_strings(),
            lh=self.lh.to_strings(),
            lh_perp=self.lh_perp.to_strings(),
            a_H=self.a_H.to_strings(),
            a_Z=self.a_Z.to_strings(),
            t_table=[
                TRowDocument(
                    alpha=e.alpha.to_strings(),
                    x_minus=[str(c) for c in e.x_minus],
                    components=[[str(c) for c in v] for v in e.components.values()],
                    zero_component=[str(c) for c in e.zero_component],
                )
                for e in self.t_table
            ],
            monoid_gens=[g.to_strings() for g in self.roots.monoid_gens],
            spherical_roots=[r.to_strings() for r in self.spherical_roots],
            compression_cone=self.compression_cone.to_document().model_dump(),
            rho_q=self.rho.rho.to_strings(),
            unimodular=self.rho.unimodular,
        )


class TRowDocument(BaseModel):
    alpha: List[str]
    x_minus: List[str]
    components: List[List[str]]
    zero_component: List[str]


class SphericalDatumDocument(BaseModel):
    algebra: str
    h: List[List[str]]
    element: List[str]
    l: List[List[str]]
    u: List[List[str]]
    lh: List[List[str]]
    lh_perp: List[List[str]]
    a_H: List[List[str]]
    a_Z: List[List[str]]
    t_table: List[TRowDocument]
    monoid_gens: List[List[str]]
    spherical_roots: List[List[str]]
    compression_cone: dict
    rho_q: List[str]
    unimodular: bool


Entry = Union[int, str]


class PairDocument(BaseModel):
    """JSON input for a spherical pair: algebra, h and the parabolic m + a + n as coordinate rows."""

    algebra: LieAlgebraDocument
    h: List[List[Entry]]
    m: List[List[Entry]] = []
    a: List[List[Entry]]
    n: List[List[Entry]]

    def build(self) -> Tuple[StructuredLieAlgebra, RationalSubspace, ParabolicDatum]:
        g = StructuredLieAlgebra.from_document(self.algebra)
        parabolic = ParabolicDatum(g, g.span(self.m), g.span(self.a), g.span(self.n))
        parabolic.validate()
        return g, g.span(self.h), parabolic


def analyze(
    g: StructuredLieAlgebra,
    h: RationalSubspace,
    parabolic: ParabolicDatum,
    element: Optional[Sequence[Scalar]] = None,
    search_cap: int = 32,
    skip: int = 0,
) -> SphericalDatum:
    if not g.is_subalgebra(h):
        raise InvalidStructure("h is not a subalgebra")
    if not check_open_orbit(g, h, parabolic):
        raise InvalidStructure("P·H is not open: p + h != g", {"dim": (parabolic.p + h).dim, "g": g.dim})
    decomposition = parabolic.roots
    adapted = construct_adapted_parabolic(g, h, parabolic, element=element, search_cap=search_cap, skip=skip)
    lh = adapted.l.intersection(h)
    lh_perp = form_perp(lh, adapted.l, g.form)
    a_H = parabolic.a.intersection(h)
    a_Z = form_perp(a_H, parabolic.a, g.form)
    entries = t_map(g, h, decomposition, lh_perp, adapted.u_roots)
    roots = spherical_roots(entries, a_H, a_Z)
    rho = rho_q_and_unimodularity(g, h, decomposition, adapted.u_roots, a_H, a_Z, adapted.element)
    datum = SphericalDatum(g, h, parabolic, decomposition, adapted, lh, lh_perp, a_H, a_Z, tuple(entries), roots, rho)
    LOG.info(
        "spherical datum computed",
        extra={
            "algebra": g.name,
            "rank": a_Z.dim,
            "spherical_roots": len(roots.roots),
            "unimodular": rho.unimodular,
        },
    )
    return datum


def roots_invariance(
    g: StructuredLieAlgebra,
    h: RationalSubspace,
    parabolic: ParabolicDatum,
    datum: SphericalDatum,
    search_cap: int = 32,
) -> Optional[bool]:
    """Recompute S from the next verifying generic element; None if there is none within the cap."""
    try:
        other = analyze(g, h, parabolic, search_cap=search_cap, skip=1)
    except NoGenericElement:
        return None
    return other.spherical_roots == datum.spherical_roots
