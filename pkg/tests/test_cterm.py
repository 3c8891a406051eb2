"""Tests for transport systems and the constant-term engine."""
import numpy as np
import pytest
import scipy.linalg

from sphkit.cterm import (
    MINUS,
    ZERO,
    StagedComponent,
    StagedExample,
    TransportSystem,
    constant_term,
    discrete_series_test,
    integrality_check,
    joint_spectrum,
    projector_bound_check,
    projector_growth_check,
    random_spectral_matrix,
    random_transport_system,
    solve_transport,
    spectral_projector,
    synthetic_staged_system,
    transitivity_check,
)
from sphkit.errors import ClusterAmbiguity, GapViolated

BASES = [np.array([-1.0, -1.0]), np.array([-0.5, -2.0])]


@pytest.fixture
def staged():
    return StagedExample()


class TestSpectralProjector:
    """Tests for Riesz projectors."""

    def test_non_normal_matrix(self):
        a = np.array([[1.0, 1.0], [0.0, 2.0]])
        p = spectral_projector(a, lambda w: w.real < 1.5, expected=1)
        assert np.allclose(p @ p, p)
        assert np.allclose(p @ a, a @ p)
        assert np.trace(p).real == pytest.approx(1.0)

    def test_wrong_cluster_size(self):
        with pytest.raises(ClusterAmbiguity):
            spectral_projector(np.diag([1.0, 2.0]), lambda w: w.real < 3.0, expected=1)

    def test_bound(self):
        report = projector_bound_check(np.array([[0.0, 5.0, 0.0], [0.0, 1.0, 5.0], [0.0, 0.0, 2.0]]))
        assert report.passed
        assert report.gap == pytest.approx(1.0)

    def test_gap_violated(self):
        with pytest.raises(GapViolated):
            projector_bound_check(np.diag([0.0, 0.5]))


class TestJointSpectrum:
    """Classification on the staged two-root example."""

    def test_classes_on_open_face(self, staged):
        spectral = joint_spectrum(staged.system(()))
        assert len(spectral.of_class(ZERO)) == 1
        assert len(spectral.of_class(MINUS)) == 3
        assert spectral.invariants_hold
        assert spectral.delta is not None

    def test_classes_on_boundary_face(self, staged):
        spectral = joint_spectrum(staged.system((0,)))
        assert len(spectral.of_class(ZERO)) == 2

    def test_ambiguous_exponent(self):
        """An exponent 1e-7 off the unitary line is below the clustering resolution."""
        system = TransportSystem.rank_one(np.array([[1.0 + 1e-7]]), 1.0, lambda p: np.ones(1, dtype=complex))
        with pytest.raises(ClusterAmbiguity):
            joint_spectrum(system, cluster_tol=1e-6, tol=1e-8)

    def test_rank_zero_delta(self, staged):
        """On the full face there are no Q⁻ exponents, so δ takes its largest value ½."""
        spectral = joint_spectrum(staged.system((0, 1)))
        assert spectral.classes == (ZERO,)
        assert spectral.delta == 0.5

    def test_no_delta_without_beta(self):
        system = TransportSystem.rank_one(np.array([[1.0]]), 1.0, lambda p: np.ones(1, dtype=complex))
        assert joint_spectrum(system).delta is None

    def test_integrality(self, staged):
        spectral = joint_spectrum(staged.system(()))
        assert integrality_check(spectral, staged.rho, np.eye(2)).passed
        assert not integrality_check(spectral, staged.rho, 2.0 * np.eye(2)).passed

    def test_projector_growth(self, staged):
        system = staged.system(())
        growth = projector_growth_check(system, joint_spectrum(system), [(-1.0, -1.0), (-1.0, -3.0)], [0.0, 1.0, 5.0])
        assert growth.passed


@pytest.mark.slow
class TestConstantTerms:
    """Constant terms against the closed-form ground truth."""

    @pytest.mark.parametrize("s", [0.5, 2.0])
    def test_transport_closed_form(self, staged, s):
        system = staged.system(())
        direction = np.array([-1.0, -0.5])
        for base in BASES:
            value = solve_transport(system, base, direction, s)
            assert np.allclose(value, system.phi(system.point(base, direction, s)), atol=1e-8)

    @pytest.mark.parametrize("index", [(), (0,), (1,)])
    def test_staged_constant_term(self, staged, index):
        system = staged.system(index)
        spectral = joint_spectrum(system)
        for base in BASES:
            assert constant_term(system, spectral, base) == pytest.approx(staged.ground_truth(index, base), abs=1e-8)

    def test_full_index_is_identity(self, staged):
        assert staged.ground_truth((0, 1), BASES[0]) == staged.ground_truth(None, BASES[0])

    def test_transitivity(self, staged):
        report = transitivity_check(staged.system((0,)), staged.system((), source=(0,)), staged.system(()), BASES, 1e-8)
        assert report.passed

    def test_decaying_is_discrete(self, staged):
        rho = staged.rho
        decaying = StagedExample(
            components=[
                StagedComponent(1.0, rho + np.array([1.0 + 0.4j, 1.0])),
                StagedComponent(0.5, rho + np.array([2.0, 1.0 + 0.2j])),
            ]
        )
        systems = {index: decaying.system(index) for index in ((), (0,), (1,))}
        assert discrete_series_test(systems, BASES).passed

    def test_tempered_is_not_discrete(self, staged):
        assert not discrete_series_test({(): staged.system(())}, BASES).passed

    def test_staged_entry_point(self, staged):
        system = synthetic_staged_system((0,))
        assert system.rank == 1
        assert np.allclose(system.phi(BASES[0]), staged.system((0,)).phi(BASES[0]))


class TestProjectorBound:
    """The projector bound on closed-form and random matrices."""

    @pytest.mark.parametrize("m", [1.0, 10.0, 100.0, 1000.0])
    def test_jordan_like(self, m):
        """P onto the eigenvalue 0 of [[0, M], [0, 1]] is [[1, -M], [0, 0]]."""
        report = projector_bound_check(np.array([[0.0, m], [0.0, 1.0]]))
        assert report.passed
        assert report.norm == pytest.approx(np.hypot(1.0, m), rel=1e-6)
        assert report.bound >= (1.0 + m) ** 2

    @pytest.mark.slow
    def test_random_ensemble(self):
        rng = np.random.default_rng(11)
        for _ in range(1000):
            a = random_spectral_matrix(rng, max_dim=8)
            assert a.shape[0] <= 8
            assert projector_bound_check(a, min_gap=1.0).passed


class TestJointSpectrumRecovery:
    """Exponents of a commuting pair built from one matrix."""

    def test_polynomial_pair(self):
        a_spec = np.array([1.0, -1.0, 2.0 + 0.5j])
        basis = np.array([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0], [1.0, 0.0, 1.0]])
        a = basis @ np.diag(a_spec) @ np.linalg.inv(basis)
        p_a = a @ a
        q_a = 2.0 * a + np.eye(3)
        system = TransportSystem(
            dim_u=3,
            gammas=(p_a, q_a),
            rho=np.zeros(2),
            cone_generators=(np.array([-1.0, 0.0]), np.array([0.0, -1.0])),
            samples=(np.array([-1.0, -1.0]),),
            phi=lambda p: np.ones(3, dtype=complex),
            embed=np.eye(2),
        )

        spectral = joint_spectrum(system)

        key = lambda v: (round(v[0].real, 6), round(v[0].imag, 6), round(v[1].real, 6))
        found = sorted((tuple(lam) for lam in spectral.exponents), key=key)
        expected = sorted(((s * s, 2.0 * s + 1.0) for s in a_spec), key=key)
        assert len(found) == 3
        for got, want in zip(found, expected):
            assert np.allclose(got, want, atol=1e-8)
        assert spectral.invariants_hold


class TestSolveTransport:
    """Closed-form transport solutions."""

    def test_homogeneous(self):
        g = np.array([[-1.0, 2.0], [0.0, -0.5]])
        start = np.array([1.0, 1j])
        system = TransportSystem.rank_one(g, 0.0, lambda p: start)
        value = solve_transport(system, [0.0], [-1.0], 1.5)
        assert np.allclose(value, scipy.linalg.expm(-1.5 * g) @ start, atol=1e-12)

    def test_constant_forcing(self):
        start = np.array([1.0, -2.0])
        c = np.array([0.5, 0.25j])
        system = TransportSystem.rank_one(np.zeros((2, 2)), 0.0, lambda p: start, psi=lambda p, x: c)
        value = solve_transport(system, [0.0], [-1.0], 2.0)
        assert np.allclose(value, start + 2.0 * c, atol=1e-10)

    @pytest.mark.slow
    def test_random_systems(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            drawn = random_transport_system(rng, max_dim=6)
            assert drawn.system.dim_u <= 6
            x = np.array([-rng.uniform(0.25, 1.5)])
            base = np.array([rng.uniform(-1.0, 1.0)])
            t = rng.uniform(0.5, 2.0)
            exact = drawn.closed_form(base, x, t)
            value = solve_transport(drawn.system, base, x, t, check=False)
            assert np.linalg.norm(value - exact) <= 1e-8 * max(1.0, np.linalg.norm(exact))
