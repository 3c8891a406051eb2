"""Tests for open-orbit charts and rapid-convergence fits."""
import math

import numpy as np
import pandas as pd
import pytest

from sphkit.charts import IDENTITY, WEYL, SL2Chart, lower_unipotent, torus_element, unipotent
from sphkit.errors import FactorizationFailure, LimitMismatch
from sphkit.rapidfit import DecayFamily, fit_rate, orbit_asymptotics, synthetic_family, toric_family

GRID = np.linspace(1.0, 20.0, 77)


class TestSL2Chart:
    """Tests for the u·m·a·w·h factorization."""

    @pytest.mark.parametrize("subgroup", ["so2", "so11"])
    def test_product_reproduces_point(self, subgroup):
        chart = SL2Chart(subgroup)
        g = unipotent(0.3) @ torus_element(0.7) @ chart.h_element(0.2)
        factors = chart.factor(g)
        assert np.allclose(factors.product(), g)
        assert factors.a == pytest.approx(math.exp(0.7))
        assert np.allclose(factors.u, unipotent(0.3))

    def test_second_open_orbit(self):
        chart = SL2Chart("so11")
        g = WEYL @ chart.h_element(0.4)
        factors = chart.factor(g)
        assert np.allclose(factors.w, WEYL)
        assert np.allclose(factors.product(), g)

    def test_identity(self):
        factors = SL2Chart("so2").factor(IDENTITY)
        assert factors.m == 1
        assert factors.a == pytest.approx(1.0)
        assert np.allclose(factors.h, IDENTITY)

    def test_boundary_of_open_orbits(self):
        with pytest.raises(FactorizationFailure):
            SL2Chart("so11").factor(lower_unipotent(1.0))

    def test_unknown_subgroup(self):
        with pytest.raises(ValueError):
            SL2Chart("so3")


class TestFitRate:
    """Tests for fit_rate."""

    def test_exponential(self):
        report = fit_rate(synthetic_family(GRID, 0.5))
        assert report.epsilon == pytest.approx(0.5, rel=1e-6)
        assert report.is_rapid

    def test_polynomial_rejected(self):
        report = fit_rate(synthetic_family(GRID, 0.5, kind="poly"))
        assert not report.slopes_agree
        assert not report.is_rapid

    def test_constant_family(self):
        family = DecayFamily.build(GRID, np.ones((GRID.size, 2)), [1.0, 1.0])
        report = fit_rate(family)
        assert math.isinf(report.epsilon)
        assert report.is_rapid

    def test_growing_family(self):
        family = DecayFamily.build(GRID, np.exp(0.1 * GRID), [0.0])
        with pytest.raises(LimitMismatch):
            fit_rate(family)

    def test_short_grid(self):
        with pytest.raises(ValueError):
            fit_rate(synthetic_family(np.arange(1.0, 5.0), 1.0))

    def test_frame_round_trip(self):
        family = synthetic_family(GRID, 0.5, direction=[1.0, 2.0])
        frame = family.to_frame()
        assert isinstance(frame, pd.DataFrame)
        assert list(frame.columns) == ["s", "x0", "x1"]
        assert np.allclose(DecayFamily.from_frame(frame, family.limit).distances(), family.distances())


class TestFamilies:
    """Tests for the toric and orbit families."""

    def test_toric_rate(self):
        family = toric_family((-1, -2), [(1, 0), (0, 1)], np.linspace(0.0, 20.0, 81))
        assert fit_rate(family).epsilon == pytest.approx(1.0, rel=0.01)

    def test_toric_without_limit(self):
        with pytest.raises(LimitMismatch):
            toric_family((1, -2), [(1, 0), (0, 1)], GRID)

    def test_orbit_asymptotics(self):
        """For w = exp(E), u_s approaches 1 at rate 2|x|; a and m are constant."""
        report = orbit_asymptotics(SL2Chart("so2"), unipotent(1.0), -0.5, GRID)
        assert report.passed
        assert report.families["u_s"].epsilon == pytest.approx(1.0, rel=1e-3)
        assert math.isinf(report.families["m_s"].epsilon)
        assert report.limits["m"] == 1.0

    def test_positive_direction(self):
        with pytest.raises(ValueError):
            orbit_asymptotics(SL2Chart("so2"), IDENTITY, 0.5, GRID)
