"""Tests for polyhedral cones and fans."""
import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings
from hypothesis import strategies as st

from sphkit.cones import (
    Containment,
    RationalCone,
    compression_subcones,
    is_wonderful,
    orthant_fan,
    projective_fan,
    simplicial_subdivision,
    toric_limit,
)
from sphkit.errors import ChartMismatch
from sphkit.liecore import RationalSubspace


class TestRationalCone:
    """Tests for the two cone descriptions."""

    def test_quadrant(self):
        cone = RationalCone.from_generators([(1, 0), (0, 1), (1, 1)], 2)
        assert cone.rays == ((0, 1), (1, 0))
        assert set(cone.facets) == {(1, 0), (0, 1)}
        assert cone.is_simplicial
        assert cone.contains((1, 1)) is Containment.INTERIOR
        assert cone.contains((0, 1)) is Containment.BOUNDARY
        assert cone.contains((-1, 1)) is Containment.OUTSIDE

    def test_halfspaces_match_generators(self):
        """Both constructions describe the same cone."""
        from_h = RationalCone.from_halfspaces([(1, 0), (0, 1)], 2)
        from_g = RationalCone.from_generators([(1, 0), (0, 1)], 2)
        assert from_h == from_g

    def test_full_space(self):
        cone = RationalCone.full_space(2)
        assert cone.rays == ()
        assert cone.lineality.dim == 2
        assert not cone.is_pointed

    def test_dual_of_quadrant(self):
        cone = RationalCone.from_generators([(1, 0), (1, 2)], 2)
        dual = cone.dual()
        assert all(sum(a * b for a, b in zip(f, g)) >= 0 for f in dual.rays for g in cone.rays)
        assert dual.dual() == cone

    def test_smoothness(self):
        assert RationalCone.from_generators([(1, 0), (0, 1)], 2).is_smooth()
        assert not RationalCone.from_generators([(1, 0), (1, 2)], 2).is_smooth()

    @hyp_settings(max_examples=50, deadline=None)
    @given(st.integers(-5, 5), st.integers(-5, 5))
    def test_containment_matches_inequalities(self, x, y):
        """Membership in cone{(1,0),(1,2)} is 2a - b >= 0 and b >= 0."""
        cone = RationalCone.from_generators([(1, 0), (1, 2)], 2)
        assert ((x, y) in cone) == (2 * x - y >= 0 and y >= 0)


class TestFans:
    """Tests for subdivision and certification."""

    def test_subdivide_square_cone(self, rng):
        """A non-simplicial cone over a square splits into two simplices."""
        support = RationalCone.from_generators([(1, 0, 1), (0, 1, 1), (-1, 0, 1), (0, -1, 1)], 3)
        fan = simplicial_subdivision(support)
        assert len(fan.cones) == 2
        assert fan.certify(samples=2000, rng=rng).passed

    @pytest.mark.parametrize("n", [2, 3])
    def test_complete_fans(self, n, rng):
        orthants = orthant_fan(n)
        projective = projective_fan(n)
        assert orthants.closed_orbit_count == 2**n
        assert projective.closed_orbit_count == n + 1
        assert orthants.certify(samples=5000, rng=rng).passed
        assert projective.certify(samples=5000, rng=rng).passed

    def test_one_cone_fan(self):
        """A ray is its own subdivision."""
        ray = RationalCone.from_generators([(-1,)], 1)
        fan = simplicial_subdivision(ray)
        assert len(fan.cones) == 1
        assert fan.certify().passed

    def test_broken_fan_detected(self):
        """Overlapping cones fail the common-face test."""
        from sphkit.cones import Fan

        support = RationalCone.full_space(2)
        a = RationalCone.from_generators([(1, 0), (0, 1)], 2)
        b = RationalCone.from_generators([(1, 1), (-1, 0)], 2)
        certificate = Fan((a, b), support).certify()
        assert not certificate.passed
        assert certificate.violations

    def test_toric_limit_in_fan(self):
        fan = orthant_fan(2)
        limit = fan.toric_limit((-1, -3))
        assert limit.exists
        assert limit.rate == pytest.approx(1.0)
        assert fan.smallest_face((0, -2)).rays == ((0, -1),)

    def test_outside_fan(self):
        fan = simplicial_subdivision(RationalCone.from_generators([(1, 0), (0, 1)], 2))
        with pytest.raises(ChartMismatch):
            fan.toric_limit((-1, -1))


class TestToricLimit:
    """Tests for toric_limit on explicit charts."""

    def test_limit_exists(self):
        limit = toric_limit((-1, -2), [(1, 0), (0, 1)])
        assert limit.exists
        assert limit.pattern == (0, 1)
        assert limit.rate == pytest.approx(1.0)

    def test_no_limit(self):
        limit = toric_limit((1, -2), [(1, 0), (0, 1)])
        assert not limit.exists
        assert limit.rate is None

    def test_partial_pattern(self):
        limit = toric_limit((0, -2), [(1, 0), (0, 1)])
        assert limit.pattern == (1,)


class TestCompressionFaces:
    """Tests for the face data a_I of a compression cone."""

    def test_rank_one(self, rng):
        face = compression_subcones([(4,)], (), 1)
        assert face.cone.rays == ((-1,),)
        assert face.edge.dim == 0
        assert all(face.is_interior(x) for x in face.interior_samples(5, rng))

    def test_full_index(self):
        face = compression_subcones([(4,)], (0,), 1)
        assert face.a_I.dim == 0
        assert face.is_interior((0,))

    def test_wonderful(self):
        zero = RationalSubspace.zero(1)
        assert is_wonderful([(4,)], zero, [(4,)])
        assert not is_wonderful([(4,)], zero, [(2,)])
        assert not is_wonderful([(1, 0)], RationalSubspace.span([(0, 1)], 2), [(1, 0)])
