"""Pytest configuration and shared fixtures."""
import numpy as np
import pytest

from sphkit.catalog import ExampleRegistry
from sphkit.config import ToolkitSettings
from sphkit.liecore import sl2, sl2_sum, torus
from sphkit.sphstruct import ParabolicDatum, analyze


@pytest.fixture
def g_sl2():
    """sl2 with basis (H, E, F)."""
    return sl2()


@pytest.fixture
def g_sum():
    """sl2 + sl2 with basis (H1, E1, F1, H2, E2, F2)."""
    return sl2_sum()


@pytest.fixture
def g_torus():
    return torus(2)


@pytest.fixture
def sl2_parabolic(g_sl2):
    return ParabolicDatum.from_labels(g_sl2, m=[], a=[{"H": 1}], n=[{"E": 1}])


@pytest.fixture
def registry():
    return ExampleRegistry()


@pytest.fixture
def hyperbolic(g_sl2, sl2_parabolic):
    """Spherical datum of SL(2,R)/SO(2)."""
    return analyze(g_sl2, g_sl2.span_labels({"E": 1, "F": -1}), sl2_parabolic)


@pytest.fixture
def de_sitter(g_sl2, sl2_parabolic):
    """Spherical datum of SL(2,R)/SO(1,1)."""
    return analyze(g_sl2, g_sl2.span_labels({"E": 1, "F": 1}), sl2_parabolic)


@pytest.fixture
def group_case(registry):
    g, h, parabolic = registry.get_by_name("sl2xsl2_diag").build()
    return analyze(g, h, parabolic)


@pytest.fixture
def torus_datum(registry):
    g, h, parabolic = registry.get_by_name("torus").build()
    return analyze(g, h, parabolic)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def fast_settings(tmp_path):
    """Settings writing into a temporary directory."""
    return ToolkitSettings(out_dir=str(tmp_path / "out"), seed=7)
