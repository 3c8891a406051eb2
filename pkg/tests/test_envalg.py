"""Tests for PBW arithmetic, the Casimir element and the degeneration morphism."""
import pytest
import sympy as sp
from hypothesis import given, settings as hyp_settings
from hypothesis import strategies as st

from sphkit.degen import h_I_explicit
from sphkit.envalg import (
    PBWAlgebra,
    aS_centrality_check,
    b_order,
    casimir,
    casimir_image,
    hc_order,
    hc_projection_gamma0,
    in_zero_weight_part,
    invariant_subspace_basis,
    is_central,
    membership_U_I,
    mu_I,
    mu_multiplicative,
    radial_part,
    square_casimir,
    standard_algebra,
)
from sphkit.errors import CapExceeded, InvalidStructure, NotInInteriorCone
from sphkit.liecore import sl2

coefficients = st.lists(st.integers(-3, 3), min_size=3, max_size=3)


class TestPBWAlgebra:
    """Normal ordering in U(sl2) with basis (H, E, F)."""

    def test_commutators(self, g_sl2):
        U = standard_algebra(g_sl2)
        H, E, F = U.gen(0), U.gen(1), U.gen(2)
        assert H * E - E * H == E * 2
        assert E * F - F * E == H
        assert H * F - F * H == F * -2

    def test_normal_form(self, g_sl2):
        """F·E rewrites to E·F - H."""
        U = standard_algebra(g_sl2)
        assert (U.gen(2) * U.gen(1)).terms == {(1, 2): 1, (0,): -1}

    def test_cap(self, g_sl2):
        U = standard_algebra(g_sl2, cap=2)
        with pytest.raises(CapExceeded):
            U.gen(0) * U.gen(1) * U.gen(2)

    def test_dependent_basis(self, g_sl2):
        with pytest.raises(InvalidStructure):
            PBWAlgebra(g_sl2, [g_sl2.element(H=1), g_sl2.element(H=2)])

    def test_trailing_letters_vanish(self, g_sl2):
        """In U(g)/U(g)F every word ending in F is zero."""
        U = PBWAlgebra(g_sl2, [g_sl2.element(E=1), g_sl2.element(H=1), g_sl2.element(F=1)], trailing=1)
        assert (U.gen(0) * U.gen(2)).is_zero
        assert (U.gen(2) * U.gen(0)) == U.gen(1) * -1

    @hyp_settings(max_examples=25, deadline=None)
    @given(coefficients, coefficients, coefficients)
    def test_associative(self, a, b, c):
        U = standard_algebra(sl2())
        x, y, z = (U.letter(v) for v in (a, b, c))
        assert (x * y) * z == x * (y * z)


class TestCasimir:
    """Tests for the Casimir element and its Harish-Chandra projection."""

    def test_central(self, g_sl2, g_sum):
        assert is_central(casimir(g_sl2))
        assert is_central(casimir(g_sum))

    def test_gamma0(self, g_sl2, sl2_parabolic):
        """Ω = ½H² + EF + FE projects to ½H² - H along U(g)F."""
        gamma = hc_projection_gamma0(casimir(g_sl2), sl2_parabolic)
        h = gamma.algebra.labels.index("H")
        assert gamma.terms == {(h, h): sp.Rational(1, 2), (h,): -1}
        assert in_zero_weight_part(gamma, hc_order(sl2_parabolic))

    def test_quotient_not_central(self, g_sl2, sl2_parabolic):
        with pytest.raises(InvalidStructure):
            is_central(hc_order(sl2_parabolic).algebra.one())


class TestBOrder:
    """Tests on the hyperbolic plane, where b = span(E, H) and b_H = 0."""

    def test_letters(self, hyperbolic):
        order = b_order(hyperbolic)
        assert order.algebra.labels == ("E", "H")
        assert order.algebra.trailing == 0
        assert [w.to_strings() for w in order.weights] == [["2"], ["0"]]

    def test_casimir_image(self, hyperbolic):
        """Modulo U(g)(E - F) the Casimir is ½H² + 2E² - H."""
        order = b_order(hyperbolic)
        image = casimir_image(hyperbolic, order, hyperbolic.h)
        assert image.terms == {(1, 1): sp.Rational(1, 2), (0, 0): 2, (1,): -1}
        assert membership_U_I(image, order, hyperbolic.h)

    def test_invariants_contain_casimir(self, hyperbolic):
        order = b_order(hyperbolic)
        basis = invariant_subspace_basis(order, hyperbolic.h, degree=2)
        assert len(basis) == 2
        image = casimir_image(hyperbolic, order, hyperbolic.h)
        assert all(membership_U_I(u, order, hyperbolic.h) for u in basis)
        assert not membership_U_I(order.algebra.gen(0), order, hyperbolic.h)
        assert image.degree == 2

    def test_mu_drops_negative_weights(self, hyperbolic):
        order = b_order(hyperbolic)
        image = casimir_image(hyperbolic, order, hyperbolic.h)
        result = mu_I(image, order, (), (-1,))
        assert result.passed
        assert radial_part(result.element, order) == sp.Symbol("H") ** 2 / 2 - sp.Symbol("H")

    def test_mu_direction_outside_face(self, hyperbolic):
        order = b_order(hyperbolic)
        with pytest.raises(NotInInteriorCone):
            mu_I(order.algebra.one(), order, (), (1,))

    @pytest.mark.parametrize("index,x", [((), (-1,)), ((0,), (0,))])
    def test_square_casimir(self, hyperbolic, index, x):
        order = b_order(hyperbolic)
        h_I = h_I_explicit(hyperbolic, index).h_I
        assert square_casimir(order, index, x, h_I)

    def test_mu_multiplicative(self, hyperbolic):
        order = b_order(hyperbolic)
        basis = invariant_subspace_basis(order, hyperbolic.h, degree=2)
        assert mu_multiplicative(order, (), (-1,), basis) == {"multiplicative": True, "injective": True}

    def test_aS_centrality(self, hyperbolic, torus_datum):
        assert aS_centrality_check(b_order(hyperbolic))["vacuous"]
        report = aS_centrality_check(b_order(torus_datum), degree=2)
        assert report["passed"]
        assert report["checked"] > 0
