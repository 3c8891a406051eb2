"""Tests for the local structure analysis."""
import pytest

from sphkit.errors import AdaptedParabolicUnverified, InvalidStructure
from sphkit.sphstruct import (
    SphericalDatumDocument,
    analyze,
    construct_adapted_parabolic,
    in_monoid,
    lattice_check,
    roots_invariance,
    unimodularity_defect,
)


def root_strings(datum):
    return sorted(tuple(str(c) for c in r.coords) for r in datum.spherical_roots)


def rho_strings(datum):
    return tuple(str(datum.rho.rho(r)) for r in datum.a_Z.rows)


class TestAdaptedParabolic:
    """Tests for construct_adapted_parabolic."""

    def test_hyperbolic(self, g_sl2, sl2_parabolic):
        h = g_sl2.span_labels({"E": 1, "F": -1})
        adapted = construct_adapted_parabolic(g_sl2, h, sl2_parabolic)
        assert adapted.l == g_sl2.span_labels({"H": 1})
        assert adapted.u == g_sl2.span_labels({"E": 1})
        assert all(adapted.conditions.values())

    def test_rejects_bad_element(self, g_sl2, sl2_parabolic):
        """X = 0 centralizes all of g, so l = g and l_n is not inside h."""
        h = g_sl2.span_labels({"E": 1, "F": -1})
        with pytest.raises(AdaptedParabolicUnverified):
            construct_adapted_parabolic(g_sl2, h, sl2_parabolic, element=(0, 0, 0))

    def test_not_open(self, g_sl2, sl2_parabolic):
        """span(E) lies inside p, so P·H is not open."""
        with pytest.raises(InvalidStructure, match="not open"):
            analyze(g_sl2, g_sl2.span_labels({"E": 1}), sl2_parabolic)


class TestSphericalRoots:
    """Spherical roots and rho against hand-derived values."""

    def test_hyperbolic(self, hyperbolic):
        assert root_strings(hyperbolic) == [("4",)]
        assert rho_strings(hyperbolic) == ("1",)
        assert hyperbolic.edge.dim == 0

    def test_de_sitter(self, de_sitter):
        assert root_strings(de_sitter) == [("4",)]
        assert rho_strings(de_sitter) == ("1",)

    def test_group_case(self, group_case):
        assert root_strings(group_case) == [("4",)]
        assert rho_strings(group_case) == ("2",)
        assert group_case.a_Z.dim == 1
        assert group_case.a_H.dim == 1

    def test_torus(self, torus_datum):
        assert root_strings(torus_datum) == []
        assert rho_strings(torus_datum) == ("0", "0")
        assert torus_datum.compression_cone.lineality.dim == 2

    def test_compression_cone(self, hyperbolic):
        assert hyperbolic.compression_cone.rays == ((-1,),)

    def test_t_map(self, hyperbolic, g_sl2):
        """The single T-row is F - E, which lies in h."""
        (entry,) = hyperbolic.t_table
        assert entry.x_minus == g_sl2.element(F=1)
        assert entry.reconstruct() == g_sl2.element(F=1, E=-1)

    def test_decomposition(self, group_case):
        assert all(group_case.check_decomposition().values())

    def test_invariance(self, g_sl2, sl2_parabolic, hyperbolic):
        h = g_sl2.span_labels({"E": 1, "F": -1})
        assert roots_invariance(g_sl2, h, sl2_parabolic, hyperbolic) is not False

    def test_monoid_membership(self, hyperbolic):
        (root,) = hyperbolic.spherical_roots
        point = hyperbolic.compression_cone.interior_point()
        assert in_monoid(root.scaled(2), [root], point)
        assert not in_monoid(root.scaled(-1), [root], point)

    def test_lattice(self, hyperbolic, torus_datum):
        report = lattice_check(hyperbolic.roots, hyperbolic.edge)
        assert report.independent
        assert report.wonderful
        assert not lattice_check(torus_datum.roots, torus_datum.edge).wonderful

    def test_document(self, hyperbolic):
        document = SphericalDatumDocument.model_validate(hyperbolic.to_document().model_dump())
        assert document.spherical_roots == [["4"]]
        assert document.unimodular


class TestUnimodularity:
    """Tests for unimodularity_defect."""

    def test_symmetric_subgroup(self, g_sl2):
        assert unimodularity_defect(g_sl2, g_sl2.span_labels({"E": 1, "F": -1})) == (0,)

    def test_borel_type(self, g_sl2):
        """span(H, F) acts on g/h with trace 2."""
        assert unimodularity_defect(g_sl2, g_sl2.span_labels({"H": 1}, {"F": 1})) == (2, 0)

    def test_rho_vanishes_on_a_H(self, group_case):
        assert group_case.rho.vanishes_on_aH
        assert group_case.rho.unimodular
