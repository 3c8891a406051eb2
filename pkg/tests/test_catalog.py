"""Tests for the example registry."""
import json

import pytest

from sphkit.catalog import ExampleEntry, ExampleRegistry
from sphkit.degen import h_I_explicit
from sphkit.errors import UnknownExample
from sphkit.liecore import sl2
from sphkit.sphstruct import analyze


def write_pair(path, h_rows):
    document = {
        "algebra": sl2().to_document().model_dump(mode="json"),
        "h": h_rows,
        "a": [[1, 0, 0]],
        "n": [[0, 1, 0]],
    }
    path.write_text(json.dumps(document), encoding="utf-8")
    return path


class TestExampleRegistry:
    """Tests for ExampleRegistry."""

    def test_builtins(self, registry):
        assert registry.count() == 4
        names = [e.name for e in registry.get_all()]
        assert names == ["sl2_so2", "sl2_so11", "sl2xsl2_diag", "torus"]

    def test_unknown(self, registry):
        with pytest.raises(UnknownExample, match="Unknown example"):
            registry.get_by_name("sl3_so3")

    def test_add_duplicate(self, registry):
        entry = registry.get_by_name("torus")
        with pytest.raises(ValueError, match="already registered"):
            registry.add(entry)

    def test_add(self, registry):
        base = registry.get_by_name("sl2_so2")
        registry.add(ExampleEntry(name="copy", description="copy", build=base.build))
        assert registry.count() == 5
        assert registry.get_by_name("copy").spherical_roots is None

    @pytest.mark.parametrize("name", ["sl2_so2", "sl2_so11", "sl2xsl2_diag", "torus"])
    def test_reference_data(self, registry, name):
        """Each built-in pair reproduces its recorded roots, rho and h_∅."""
        entry = registry.get_by_name(name)
        g, h, parabolic = entry.build()
        datum = analyze(g, h, parabolic)
        found = sorted(tuple(str(c) for c in r.coords) for r in datum.spherical_roots)
        assert found == sorted(entry.spherical_roots)
        assert tuple(str(datum.rho.rho(r)) for r in datum.a_Z.rows) == entry.rho
        if entry.h_empty is not None:
            assert h_I_explicit(datum, ()).h_I == g.span_labels(*entry.h_empty)


class TestFromFile:
    """Tests for loading pair documents."""

    def test_load(self, tmp_path):
        entry = ExampleRegistry.from_file(write_pair(tmp_path / "hyperbolic.json", [[0, 1, -1]]))
        assert entry.name == "hyperbolic"
        g, h, parabolic = entry.build()
        assert [tuple(str(c) for c in r.coords) for r in analyze(g, h, parabolic).spherical_roots] == [("4",)]

    def test_fraction_entries(self, tmp_path):
        entry = ExampleRegistry.from_file(write_pair(tmp_path / "scaled.json", [[0, "1/2", "-1/2"]]))
        _, h, _ = entry.build()
        assert h == sl2().span_labels({"E": 1, "F": -1})

    def test_invalid_document(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text(json.dumps({"h": []}), encoding="utf-8")
        with pytest.raises(ValueError):
            ExampleRegistry.from_file(path)
