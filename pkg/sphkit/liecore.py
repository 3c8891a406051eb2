"""Exact-arithmetic Lie algebra kernel.

Vectors are tuples of sympy rationals in the coordinates of the algebra's
basis. Subspaces are kept in reduced row-echelon form, so two subspaces are
equal exactly when their stored rows are equal.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import sympy as sp
from pydantic import BaseModel, Field

from sphkit.errors import (
    DimensionMismatch,
    InvalidStructure,
    NonSemisimpleAction,
    NotInSubspace,
)

LOG = logging.getLogger(__name__)

Scalar = Union[int, str, Fraction, sp.Rational]
Vector = Tuple[sp.Rational, ...]


def to_rational(value: Scalar) -> sp.Rational:
    """Convert ints, "p/q" strings, fractions and sympy numbers to a sympy Rational."""
    if isinstance(value, float):
        raise TypeError("floating point values are not accepted in exact arithmetic")
    if isinstance(value, Fraction):
        return sp.Rational(value.numerator, value.denominator)
    result = sp.Rational(value)
    return result


def vec(values: Iterable[Scalar]) -> Vector:
    return tuple(to_rational(v) for v in values)


def zero_vector(n: int) -> Vector:
    return (sp.Integer(0),) * n


def add(x: Vector, y: Vector) -> Vector:
    return tuple(a + b for a, b in zip(x, y))


def scale(c: Scalar, x: Vector) -> Vector:
    c = to_rational(c)
    return tuple(c * a for a in x)


def combine(coeffs: Sequence[Scalar], vectors: Sequence[Vector], n: int) -> Vector:
    """Linear combination sum(c_i v_i) in dimension n."""
    out = [sp.Integer(0)] * n
    for c, v in zip(coeffs, vectors):
        c = to_rational(c)
        if c == 0:
            continue
        for k, entry in enumerate(v):
            if entry != 0:
                out[k] += c * entry
    return tuple(out)


def dot(x: Sequence, y: Sequence) -> sp.Rational:
    return sum((a * b for a, b in zip(x, y)), sp.Integer(0))


def is_zero(x: Vector) -> bool:
    return all(a == 0 for a in x)


def primitive(x: Vector) -> Tuple[int, ...]:
    """Primitive integer vector on the ray through x (gcd of entries is 1)."""
    if is_zero(x):
        raise ValueError("zero vector has no primitive representative")
    denominators = [sp.Rational(a).q for a in x]
    lcm = sp.ilcm(*denominators) if len(denominators) > 1 else denominators[0]
    ints = [int(a * lcm) for a in x]
    g = 0
    for v in ints:
        g = sp.igcd(g, v)
    return tuple(v // g for v in ints)


def _matrix(rows: Sequence[Vector], n: int) -> sp.Matrix:
    if not rows:
        return sp.zeros(0, n)
    return sp.Matrix([list(r) for r in rows])


def nullspace_rows(rows: Sequence[Vector], n: int) -> List[Vector]:
    """Basis of {x : r.x = 0 for every row r}."""
    if not rows:
        return [tuple(sp.Integer(int(i == j)) for j in range(n)) for i in range(n)]
    basis = _matrix(rows, n).nullspace()
    return [tuple(b) for b in basis]


@dataclass(frozen=True)
class RationalSubspace:
    """Subspace of Q^n with its unique reduced row-echelon basis."""

    ambient_dim: int
    rows: Tuple[Vector, ...] = ()

    @classmethod
    def span(cls, vectors: Iterable[Iterable[Scalar]], ambient_dim: Optional[int] = None) -> "RationalSubspace":
        vs = [vec(v) for v in vectors]
        if ambient_dim is None:
            if not vs:
                raise DimensionMismatch("ambient dimension needed to span no vectors")
            ambient_dim = len(vs[0])
        for v in vs:
            if len(v) != ambient_dim:
                raise DimensionMismatch(
                    "vector length differs from ambient dimension",
                    {"expected": ambient_dim, "got": len(v)},
                )
        vs = [v for v in vs if not is_zero(v)]
        if not vs:
            return cls(ambient_dim, ())
        reduced, pivots = _matrix(vs, ambient_dim).rref()
        rows = tuple(tuple(reduced.row(i)) for i in range(len(pivots)))
        return cls(ambient_dim, rows)

    @classmethod
    def zero(cls, n: int) -> "RationalSubspace":
        return cls(n, ())

    @classmethod
    def full(cls, n: int) -> "RationalSubspace":
        return cls.span([[int(i == j) for j in range(n)] for i in range(n)], n)

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def pivots(self) -> Tuple[int, ...]:
        return tuple(next(k for k, a in enumerate(r) if a != 0) for r in self.rows)

    @property
    def matrix(self) -> sp.Matrix:
        return _matrix(self.rows, self.ambient_dim)

    def _check(self, other: "RationalSubspace") -> None:
        if other.ambient_dim != self.ambient_dim:
            raise DimensionMismatch(
                "subspaces live in different ambient spaces",
                {"left": self.ambient_dim, "right": other.ambient_dim},
            )

    def reduce(self, v: Sequence[Scalar]) -> Vector:
        """Remainder of v after eliminating the pivot columns."""
        out = list(vec(v))
        if len(out) != self.ambient_dim:
            raise DimensionMismatch("vector length differs from ambient dimension")
        for row, p in zip(self.rows, self.pivots):
            c = out[p]
            if c != 0:
                for k, entry in enumerate(row):
                    if entry != 0:
                        out[k] -= c * entry
        return tuple(out)

    def contains(self, v: Sequence[Scalar]) -> bool:
        return is_zero(self.reduce(v))

    def contains_subspace(self, other: "RationalSubspace") -> bool:
        self._check(other)
        return all(self.contains(r) for r in other.rows)

    def coordinates(self, v: Sequence[Scalar]) -> Vector:
        """Coefficients of v in the echelon basis; raises if v is not in the subspace."""
        v = vec(v)
        coords = tuple(v[p] for p in self.pivots)
        if combine(coords, self.rows, self.ambient_dim) != v:
            raise NotInSubspace("vector is not in the subspace", {"vector": [str(a) for a in v]})
        return coords

    def vector(self, coords: Sequence[Scalar]) -> Vector:
        return combine(coords, self.rows, self.ambient_dim)

    def sum(self, other: "RationalSubspace") -> "RationalSubspace":
        self._check(other)
        return RationalSubspace.span(self.rows + other.rows, self.ambient_dim)

    __add__ = sum

    def intersection(self, other: "RationalSubspace") -> "RationalSubspace":
        self._check(other)
        if self.dim == 0 or other.dim == 0:
            return RationalSubspace.zero(self.ambient_dim)
        k = self.dim
        # Solve a.V = b.W via the nullspace of [V^T | -W^T].
        columns = list(self.rows) + [scale(-1, r) for r in other.rows]
        stacked = sp.Matrix([list(c) for c in columns]).T
        solutions = stacked.nullspace()
        vectors = [combine(list(s)[:k], self.rows, self.ambient_dim) for s in solutions]
        return RationalSubspace.span(vectors, self.ambient_dim)

    def extend_to(self, other: "RationalSubspace") -> "RationalSubspace":
        """A complement C of self inside other, spanned by rows of other."""
        self._check(other)
        if not other.contains_subspace(self):
            raise NotInSubspace("cannot complement a subspace that is not contained in the target")
        current = self
        chosen: List[Vector] = []
        for row in other.rows:
            if not current.contains(row):
                chosen.append(row)
                current = current.sum(RationalSubspace.span([row], self.ambient_dim))
        return RationalSubspace.span(chosen, self.ambient_dim)

    def annihilator(self) -> "RationalSubspace":
        """Standard-dot annihilator {y : y.v = 0 for v in self}."""
        return RationalSubspace.span(nullspace_rows(self.rows, self.ambient_dim), self.ambient_dim)

    def to_strings(self) -> List[List[str]]:
        return [[str(a) for a in r] for r in self.rows]


def orth_complement(v: RationalSubspace, w: RationalSubspace, form: sp.Matrix) -> RationalSubspace:
    """{x in W : form(x, u) = 0 for all u in V ∩ W}."""
    return form_perp(v.intersection(w), w, form)


def form_perp(v: RationalSubspace, within: RationalSubspace, form: sp.Matrix) -> RationalSubspace:
    """{x in within : form(x, y) = 0 for all y in V}."""
    if v.dim == 0 or within.dim == 0:
        return within
    pairing = v.matrix * form * within.matrix.T
    coefficient_rows = [tuple(pairing.row(i)) for i in range(pairing.rows)]
    solutions = nullspace_rows(coefficient_rows, within.dim)
    return RationalSubspace.span([within.vector(s) for s in solutions], within.ambient_dim)


@dataclass(frozen=True)
class LinearFunctional:
    """A rational linear form on a subspace, stored by its values on the echelon basis."""

    domain: RationalSubspace
    coords: Vector

    @classmethod
    def zero(cls, domain: RationalSubspace) -> "LinearFunctional":
        return cls(domain, zero_vector(domain.dim))

    def __call__(self, x: Sequence[Scalar]) -> sp.Rational:
        return dot(self.coords, self.domain.coordinates(x))

    def _check(self, other: "LinearFunctional") -> None:
        if other.domain != self.domain:
            raise DimensionMismatch("functionals live on different subspaces")

    def __add__(self, other: "LinearFunctional") -> "LinearFunctional":
        self._check(other)
        return LinearFunctional(self.domain, add(self.coords, other.coords))

    def __neg__(self) -> "LinearFunctional":
        return LinearFunctional(self.domain, scale(-1, self.coords))

    def __sub__(self, other: "LinearFunctional") -> "LinearFunctional":
        return self + (-other)

    def scaled(self, c: Scalar) -> "LinearFunctional":
        return LinearFunctional(self.domain, scale(c, self.coords))

    @property
    def is_zero(self) -> bool:
        return is_zero(self.coords)

    def restrict(self, sub: RationalSubspace) -> "LinearFunctional":
        return LinearFunctional(sub, tuple(self(r) for r in sub.rows))

    def vanishes_on(self, sub: RationalSubspace) -> bool:
        return all(self(r) == 0 for r in sub.rows)

    def to_strings(self) -> List[str]:
        return [str(a) for a in self.coords]


class StructuredLieAlgebra:
    """Finite-dimensional Lie algebra over Q given by structure constants.

    ``brackets`` maps index pairs (i, j) to the coordinate vector of [e_i, e_j].
    Missing pairs default to zero, and a pair given in one order only is
    completed by antisymmetry. All axioms are checked at construction.
    """

    def __init__(
        self,
        labels: Sequence[str],
        brackets: Mapping[Tuple[int, int], Sequence[Scalar]],
        form: Sequence[Sequence[Scalar]],
        theta: Optional[Sequence[Sequence[Scalar]]] = None,
        name: str = "",
    ):
        self.labels: Tuple[str, ...] = tuple(labels)
        self.dim = len(self.labels)
        self.name = name or f"lie{self.dim}"
        n = self.dim
        table: List[List[Optional[Vector]]] = [[None] * n for _ in range(n)]
        for (i, j), value in brackets.items():
            if not (0 <= i < n and 0 <= j < n):
                raise DimensionMismatch("bracket index out of range", {"pair": [i, j]})
            v = vec(value)
            if len(v) != n:
                raise DimensionMismatch("bracket vector has wrong length", {"pair": [i, j]})
            table[i][j] = v
        for i in range(n):
            for j in range(n):
                if table[i][j] is None:
                    table[i][j] = scale(-1, table[j][i]) if table[j][i] is not None else zero_vector(n)
        self._table: Tuple[Tuple[Vector, ...], ...] = tuple(tuple(r) for r in table)  # type: ignore[arg-type]
        self.form = sp.ImmutableMatrix([[to_rational(a) for a in row] for row in form])
        self.theta = (
            sp.ImmutableMatrix([[to_rational(a) for a in row] for row in theta]) if theta is not None else None
        )
        self.validate()

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_matrices(
        cls, labels: Sequence[str], matrices: Sequence[sp.Matrix], name: str = "", with_theta: bool = True
    ) -> "StructuredLieAlgebra":
        """Structure constants, trace form and theta(x) = -x^T from a matrix basis."""
        mats = [sp.Matrix(m) for m in matrices]
        basis = sp.Matrix.hstack(*[m.reshape(m.rows * m.cols, 1) for m in mats])
        gram_inv = (basis.T * basis).inv()

        def coordinates(m: sp.Matrix) -> Vector:
            flat = m.reshape(m.rows * m.cols, 1)
            coeffs = gram_inv * (basis.T * flat)
            if basis * coeffs != flat:
                raise InvalidStructure("matrix span is not closed under the operation", {"name": name})
            return tuple(coeffs)

        n = len(mats)
        brackets = {}
        for i, j in combinations(range(n), 2):
            brackets[(i, j)] = coordinates(mats[i] * mats[j] - mats[j] * mats[i])
        form = [[(mats[i] * mats[j]).trace() for j in range(n)] for i in range(n)]
        theta = None
        if with_theta:
            columns = [coordinates(-m.T) for m in mats]
            theta = [[columns[j][i] for j in range(n)] for i in range(n)]
        return cls(labels, brackets, form, theta, name=name)

    @classmethod
    def from_document(cls, document: "LieAlgebraDocument") -> "StructuredLieAlgebra":
        n = document.dim
        brackets: Dict[Tuple[int, int], Vector] = {}
        for i, j, terms in document.brackets:
            v = [sp.Integer(0)] * n
            for k, coefficient in terms:
                v[k] += to_rational(coefficient)
            brackets[(i, j)] = tuple(v)
        if len(document.labels) != n:
            raise DimensionMismatch("label count differs from dim", {"dim": n, "labels": len(document.labels)})
        return cls(document.labels, brackets, document.form, document.theta, name=document.name or "")

    def to_document(self) -> "LieAlgebraDocument":
        brackets = []
        for i, j in combinations(range(self.dim), 2):
            v = self._table[i][j]
            terms = [(k, str(a)) for k, a in enumerate(v) if a != 0]
            if terms:
                brackets.append((i, j, terms))
        return LieAlgebraDocument(
            name=self.name,
            dim=self.dim,
            labels=list(self.labels),
            brackets=brackets,
            form=[[str(a) for a in self.form.row(i)] for i in range(self.dim)],
            theta=None if self.theta is None else [[str(a) for a in self.theta.row(i)] for i in range(self.dim)],
        )

    # -- validation -------------------------------------------------------------

    def validate(self) -> None:
        n = self.dim
        if self.form.shape != (n, n):
            raise DimensionMismatch("form has wrong shape", {"shape": list(self.form.shape)})
        for i in range(n):
            if not is_zero(self._table[i][i]):
                raise InvalidStructure("[e_i, e_i] must vanish", {"i": i})
            for j in range(i + 1, n):
                if self._table[i][j] != scale(-1, self._table[j][i]):
                    raise InvalidStructure("structure constants are not antisymmetric", {"pair": [i, j]})
        for i, j, k in combinations(range(n), 3):
            e_i, e_j, e_k = self.basis_vector(i), self.basis_vector(j), self.basis_vector(k)
            total = add(
                add(self.bracket(e_i, self.bracket(e_j, e_k)), self.bracket(e_j, self.bracket(e_k, e_i))),
                self.bracket(e_k, self.bracket(e_i, e_j)),
            )
            if not is_zero(total):
                raise InvalidStructure("Jacobi identity fails", {"triple": [i, j, k]})
        if self.form != self.form.T:
            raise InvalidStructure("invariant form is not symmetric")
        for i in range(n):
            ad = self.ad_matrix(self.basis_vector(i))
            if not (ad.T * self.form + self.form * ad).is_zero_matrix:
                raise InvalidStructure("form is not ad-invariant", {"i": i})
        if self.theta is not None:
            if self.theta.shape != (n, n):
                raise DimensionMismatch("involution has wrong shape")
            if self.theta * self.theta != sp.eye(n):
                raise InvalidStructure("theta is not an involution")
            if self.theta.T * self.form * self.theta != self.form:
                raise InvalidStructure("form is not theta-invariant")
        LOG.debug("validated Lie algebra %s of dimension %d", self.name, n)

    # -- elementary operations ---------------------------------------------------

    def basis_vector(self, i: int) -> Vector:
        return tuple(sp.Integer(int(k == i)) for k in range(self.dim))

    def element(self, **coefficients: Scalar) -> Vector:
        """Vector from label coefficients, e.g. ``g.element(E=1, F=-1)``."""
        out = [sp.Integer(0)] * self.dim
        for label, c in coefficients.items():
            try:
                out[self.labels.index(label)] += to_rational(c)
            except ValueError as exc:
                raise DimensionMismatch(f"unknown basis label {label!r}") from exc
        return tuple(out)

    def _check_vector(self, x: Sequence) -> Vector:
        v = vec(x)
        if len(v) != self.dim:
            raise DimensionMismatch("vector length differs from algebra dimension", {"dim": self.dim, "got": len(v)})
        return v

    def bracket(self, x: Sequence[Scalar], y: Sequence[Scalar]) -> Vector:
        x = self._check_vector(x)
        y = self._check_vector(y)
        out = [sp.Integer(0)] * self.dim
        for i, a in enumerate(x):
            if a == 0:
                continue
            for j, b in enumerate(y):
                if b == 0 or i == j:
                    continue
                for k, c in enumerate(self._table[i][j]):
                    if c != 0:
                        out[k] += a * b * c
        return tuple(out)

    def ad_matrix(self, x: Sequence[Scalar]) -> sp.Matrix:
        columns = [self.bracket(x, self.basis_vector(j)) for j in range(self.dim)]
        return sp.Matrix([[columns[j][i] for j in range(self.dim)] for i in range(self.dim)])

    def kappa(self, x: Sequence[Scalar], y: Sequence[Scalar]) -> sp.Rational:
        x = self._check_vector(x)
        y = self._check_vector(y)
        return (sp.Matrix([list(x)]) * self.form * sp.Matrix(list(y)))[0, 0]

    def apply_theta(self, x: Sequence[Scalar]) -> Vector:
        if self.theta is None:
            raise InvalidStructure("algebra carries no involution")
        return tuple(self.theta * sp.Matrix(list(self._check_vector(x))))

    def killing_form(self) -> sp.Matrix:
        ads = [self.ad_matrix(self.basis_vector(i)) for i in range(self.dim)]
        return sp.Matrix(self.dim, self.dim, lambda i, j: (ads[i] * ads[j]).trace())

    @property
    def structure_constants(self) -> Tuple[Tuple[Vector, ...], ...]:
        return self._table

    # -- subspace operations ---------------------------------------------------

    def full(self) -> RationalSubspace:
        return RationalSubspace.full(self.dim)

    def span(self, vectors: Iterable[Sequence[Scalar]]) -> RationalSubspace:
        return RationalSubspace.span(vectors, self.dim)

    def span_labels(self, *combos: Mapping[str, Scalar]) -> RationalSubspace:
        return self.span([self.element(**c) for c in combos])

    def bracket_spaces(self, v: RationalSubspace, w: RationalSubspace) -> RationalSubspace:
        return self.span([self.bracket(x, y) for x in v.rows for y in w.rows])

    def is_subalgebra(self, v: RationalSubspace) -> bool:
        return v.contains_subspace(self.bracket_spaces(v, v))

    def is_abelian(self, v: RationalSubspace) -> bool:
        return self.bracket_spaces(v, v).dim == 0

    def centralizer(self, v: RationalSubspace) -> RationalSubspace:
        rows: List[Vector] = []
        for x in v.rows:
            ad = self.ad_matrix(x)
            rows.extend(tuple(ad.row(i)) for i in range(ad.rows))
        return self.span(nullspace_rows(rows, self.dim))

    def normalizer(self, v: RationalSubspace) -> RationalSubspace:
        """{x : [x, V] ⊆ V}."""
        ann = v.annihilator()
        rows: List[Vector] = []
        for y in v.rows:
            condition = ann.matrix * self.ad_matrix(y)
            rows.extend(tuple(condition.row(i)) for i in range(condition.rows))
        return self.span(nullspace_rows(rows, self.dim))

    def ideal_generated(self, generators: RationalSubspace, within: RationalSubspace) -> RationalSubspace:
        """Smallest J with generators ⊆ J ⊆ within and [within, J] ⊆ J."""
        current = generators
        while True:
            grown = current.sum(self.bracket_spaces(within, current))
            if grown == current:
                return current
            current = grown

    def __repr__(self) -> str:
        return f"StructuredLieAlgebra(name={self.name!r}, dim={self.dim})"


@dataclass(frozen=True)
class RootDecomposition:
    """g = ⊕ g^α for a split abelian subalgebra a; roots are keyed by functionals on a."""

    algebra: StructuredLieAlgebra = field(compare=False)
    a: RationalSubspace
    spaces: Dict[LinearFunctional, RationalSubspace] = field(compare=False)

    @property
    def zero(self) -> LinearFunctional:
        return LinearFunctional.zero(self.a)

    @property
    def roots(self) -> List[LinearFunctional]:
        return sorted((r for r in self.spaces if not r.is_zero), key=lambda r: tuple(r.coords))

    def space(self, alpha: LinearFunctional) -> RationalSubspace:
        return self.spaces.get(alpha, RationalSubspace.zero(self.algebra.dim))

    def root_of(self, x: Sequence[Scalar]) -> Optional[LinearFunctional]:
        for alpha, space in self.spaces.items():
            if space.contains(x):
                return alpha
        return None

    def sum_of(self, roots: Iterable[LinearFunctional]) -> RationalSubspace:
        total = RationalSubspace.zero(self.algebra.dim)
        for r in roots:
            total = total.sum(self.space(r))
        return total

    def components(self, x: Sequence[Scalar]) -> Dict[LinearFunctional, Vector]:
        """Split x into root-space components (nonzero ones only)."""
        keys = list(self.spaces)
        basis: List[Vector] = []
        owners: List[LinearFunctional] = []
        for key in keys:
            for row in self.spaces[key].rows:
                basis.append(row)
                owners.append(key)
        change = sp.Matrix([list(b) for b in basis]).T
        coeffs = change.solve(sp.Matrix(list(vec(x))))
        out: Dict[LinearFunctional, Vector] = {}
        n = self.algebra.dim
        for c, b, owner in zip(coeffs, basis, owners):
            if c != 0:
                out[owner] = add(out.get(owner, zero_vector(n)), scale(c, b))
        return out


def root_decomposition(g: StructuredLieAlgebra, a: RationalSubspace) -> RootDecomposition:
    """Simultaneous eigenspace decomposition of ad(a) with rational eigenvalues."""
    if not g.is_abelian(a):
        raise InvalidStructure("torus is not abelian", {"a": a.to_strings()})
    pieces: List[Tuple[Tuple[sp.Rational, ...], RationalSubspace]] = [((), g.full())]
    for x in a.rows:
        ad = g.ad_matrix(x)
        eigen: List[Tuple[sp.Rational, RationalSubspace]] = []
        total = 0
        for value in ad.eigenvals():
            if not (value.is_rational and value.is_real):
                raise NonSemisimpleAction("ad(a) has a non-rational eigenvalue", {"eigenvalue": str(value)})
            space = g.span(tuple(b) for b in (ad - value * sp.eye(g.dim)).nullspace())
            eigen.append((sp.Rational(value), space))
            total += space.dim
        if total != g.dim:
            raise NonSemisimpleAction("ad(a) is not diagonalizable", {"element": [str(c) for c in x]})
        refined = []
        for weight, space in pieces:
            for value, eig in eigen:
                part = space.intersection(eig)
                if part.dim:
                    refined.append((weight + (value,), part))
        pieces = refined
    spaces = {LinearFunctional(a, weight): space for weight, space in pieces}
    decomposition = RootDecomposition(g, a, spaces)
    for alpha, v in spaces.items():
        for beta, w in spaces.items():
            target = decomposition.space(alpha + beta)
            if not target.contains_subspace(g.bracket_spaces(v, w)):
                raise InvalidStructure("root spaces do not bracket additively")
    LOG.debug("root decomposition of %s: %d weights", g.name, len(spaces))
    return decomposition


# -- built-in algebras --------------------------------------------------------


def _unit(n: int, i: int, j: int) -> sp.Matrix:
    m = sp.zeros(n, n)
    m[i, j] = 1
    return m


def sl2() -> StructuredLieAlgebra:
    """sl(2,R) with basis (H, E, F)."""
    h = sp.Matrix([[1, 0], [0, -1]])
    return StructuredLieAlgebra.from_matrices(("H", "E", "F"), [h, _unit(2, 0, 1), _unit(2, 1, 0)], name="sl2")


def sl2_sum() -> StructuredLieAlgebra:
    """sl(2,R) ⊕ sl(2,R) with basis (H1, E1, F1, H2, E2, F2)."""
    blocks = [sp.Matrix([[1, 0], [0, -1]]), _unit(2, 0, 1), _unit(2, 1, 0)]
    mats = [sp.diag(b, sp.zeros(2, 2)) for b in blocks] + [sp.diag(sp.zeros(2, 2), b) for b in blocks]
    return StructuredLieAlgebra.from_matrices(("H1", "E1", "F1", "H2", "E2", "F2"), mats, name="sl2+sl2")


def sl_n(n: int) -> StructuredLieAlgebra:
    """sl(n,R) with basis H_i = E_ii - E_(i+1)(i+1), then E_ij (i<j), then F_ij = E_ji."""
    if not 2 <= n <= 4:
        raise DimensionMismatch("built-in sl(n) supports 2 <= n <= 4", {"n": n})
    labels: List[str] = []
    mats: List[sp.Matrix] = []
    for i in range(n - 1):
        labels.append(f"H{i + 1}")
        mats.append(_unit(n, i, i) - _unit(n, i + 1, i + 1))
    pairs = list(combinations(range(n), 2))
    for i, j in pairs:
        labels.append(f"E{i + 1}{j + 1}")
        mats.append(_unit(n, i, j))
    for i, j in pairs:
        labels.append(f"F{i + 1}{j + 1}")
        mats.append(_unit(n, j, i))
    return StructuredLieAlgebra.from_matrices(labels, mats, name=f"sl{n}")


def torus(n: int = 2) -> StructuredLieAlgebra:
    """Abelian algebra R^n with the identity form."""
    labels = [f"A{i + 1}" for i in range(n)]
    form = [[int(i == j) for j in range(n)] for i in range(n)]
    return StructuredLieAlgebra(labels, {}, form, name=f"torus{n}")


class LieAlgebraDocument(BaseModel):
    """JSON interface for Lie algebras. Indices are 0-based, rationals are "p/q" strings or ints."""

    name: Optional[str] = None
    dim: int = Field(..., ge=1)
    labels: List[str]
    brackets: List[Tuple[int, int, List[Tuple[int, Union[int, str]]]]] = Field(default_factory=list)
    form: List[List[Union[int, str]]]
    theta: Optional[List[List[Union[int, str]]]] = None
