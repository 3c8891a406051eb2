"""Tests for boundary degenerations h_I."""
import pytest

from sphkit.cones import simplicial_subdivision
from sphkit.degen import (
    beta_functionals,
    degenerate_further,
    degeneration_consistency,
    grading_by,
    h_I_explicit,
    in_index_span,
    initial_subspace,
    limit_stabilizer,
    numeric_limit_check,
    verify_degenerate_space,
)
from sphkit.errors import EmptyIndexSet, NotInInteriorCone


class TestExplicitDegeneration:
    """h_I from the T-table."""

    def test_hyperbolic_empty_index(self, hyperbolic, g_sl2):
        """Dropping every component leaves the horospherical algebra span(F)."""
        degenerate = h_I_explicit(hyperbolic, ())
        assert degenerate.h_I == g_sl2.span_labels({"F": 1})
        assert degenerate.passed
        assert degenerate.kept == ()

    def test_full_index_is_h(self, hyperbolic):
        degenerate = h_I_explicit(hyperbolic, (0,))
        assert degenerate.h_I == hyperbolic.h
        assert degenerate.a_I_lift.dim == 0

    def test_group_case(self, group_case, g_sum):
        degenerate = h_I_explicit(group_case, ())
        assert degenerate.h_I == g_sum.span_labels({"H1": 1, "H2": 1}, {"F1": 1}, {"E2": 1})
        assert degenerate.passed

    def test_hat_adds_a_I(self, hyperbolic, g_sl2):
        degenerate = h_I_explicit(hyperbolic, ())
        assert degenerate.h_I_hat == g_sl2.span_labels({"H": 1}, {"F": 1})

    def test_index_span(self, hyperbolic):
        (root,) = hyperbolic.spherical_roots
        assert in_index_span(root, hyperbolic, (0,))
        assert not in_index_span(root, hyperbolic, ())


class TestLimits:
    """The algebraic limit of h along a_I^{--} matches h_I."""

    def test_initial_subspace(self, hyperbolic, g_sl2):
        limit = initial_subspace(hyperbolic.h, grading_by(hyperbolic, hyperbolic.lift((-1,))))
        assert limit == g_sl2.span_labels({"F": 1})

    def test_zero_grading_is_identity(self, hyperbolic):
        assert initial_subspace(hyperbolic.h, grading_by(hyperbolic, hyperbolic.lift((0,)))) == hyperbolic.h

    @pytest.mark.parametrize("index,samples", [((), [(-1,), (-3,)]), ((0,), [(0,)])])
    def test_consistency(self, hyperbolic, index, samples):
        assert degeneration_consistency(hyperbolic, index, samples).passed

    def test_sample_outside_face(self, hyperbolic):
        """X = 1 has α(X) > 0, so it is not in a_Z^{--}."""
        with pytest.raises(NotInInteriorCone):
            degeneration_consistency(hyperbolic, (), [(1,)])

    def test_numeric_limit(self, hyperbolic, g_sl2):
        grading = grading_by(hyperbolic, hyperbolic.lift((-1,)))
        angle = numeric_limit_check(g_sl2, hyperbolic.h, grading, g_sl2.span_labels({"F": 1}), t=50)
        assert angle <= 1e-6

    def test_numeric_limit_detects_wrong_target(self, hyperbolic, g_sl2):
        grading = grading_by(hyperbolic, hyperbolic.lift((-1,)))
        angle = numeric_limit_check(g_sl2, hyperbolic.h, grading, g_sl2.span_labels({"E": 1}), t=50)
        assert angle > 1.0


class TestDegenerateSpaces:
    """Z_I is again spherical with spherical roots I."""

    @pytest.mark.parametrize("index", [(), (0,)])
    def test_verify(self, hyperbolic, index):
        assert all(verify_degenerate_space(hyperbolic, index).values())

    def test_group_case(self, group_case):
        assert all(verify_degenerate_space(group_case, ()).values())

    def test_transitive(self, hyperbolic):
        report = degenerate_further(hyperbolic, (0,), ())
        assert report == {"roots_of_Z_J_contain_I": True, "transitive": True}

    def test_inner_must_be_contained(self, hyperbolic):
        with pytest.raises(ValueError):
            degenerate_further(hyperbolic, (), (0,))

    def test_limit_stabilizer(self, hyperbolic):
        fan = simplicial_subdivision(hyperbolic.compression_cone)
        limit = limit_stabilizer(hyperbolic, (-1,), fan)
        assert limit.index == ()
        assert limit.between
        assert limit.equals_hat


class TestBetaFunctionals:
    """Tests for beta_functionals."""

    def test_beta_tilde(self, hyperbolic):
        betas = beta_functionals(hyperbolic, ())
        assert betas.beta_tilde((-1,)) == -4
        assert not betas.complete

    def test_empty_outer_set(self, hyperbolic):
        with pytest.raises(EmptyIndexSet):
            beta_functionals(hyperbolic, (0,))
