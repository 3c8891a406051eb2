"""Built-in spherical pairs with their hand-derived reference data."""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from sphkit.charts import IDENTITY, lower_unipotent
from sphkit.errors import UnknownExample
from sphkit.liecore import RationalSubspace, StructuredLieAlgebra, sl2, sl2_sum, torus
from sphkit.sphstruct import PairDocument, ParabolicDatum

LOG = logging.getLogger(__name__)

Pair = Tuple[StructuredLieAlgebra, RationalSubspace, ParabolicDatum]


@dataclass(frozen=True)
class ExampleEntry:
    """A spherical pair plus whatever the pipeline can check it against.

    ``spherical_roots`` are coordinates on the echelon basis of a_Z and
    ``h_empty`` spans h_∅, both as label dictionaries or coordinate strings.
    """

    name: str
    description: str
    build: Callable[[], Pair] = field(compare=False)
    spherical_roots: Optional[Tuple[Tuple[str, ...], ...]] = None
    rho: Optional[Tuple[str, ...]] = None
    h_empty: Optional[Tuple[Dict[str, int], ...]] = None
    chart: Optional[str] = None
    orbit_point: Optional[np.ndarray] = field(default=None, compare=False)
    eigenfunction: bool = False
    parameters: Tuple[float, ...] = ()


def _sl2_parabolic(g: StructuredLieAlgebra) -> ParabolicDatum:
    return ParabolicDatum.from_labels(g, m=[], a=[{"H": 1}], n=[{"E": 1}])


def _sl2_so2() -> Pair:
    g = sl2()
    return g, g.span_labels({"E": 1, "F": -1}), _sl2_parabolic(g)


def _sl2_so11() -> Pair:
    g = sl2()
    return g, g.span_labels({"E": 1, "F": 1}), _sl2_parabolic(g)


def _diagonal() -> Pair:
    g = sl2_sum()
    h = g.span_labels({"H1": 1, "H2": 1}, {"E1": 1, "E2": 1}, {"F1": 1, "F2": 1})
    parabolic = ParabolicDatum.from_labels(g, m=[], a=[{"H1": 1}, {"H2": 1}], n=[{"E1": 1}, {"F2": 1}])
    return g, h, parabolic


def _torus() -> Pair:
    g = torus(2)
    parabolic = ParabolicDatum.from_labels(g, m=[], a=[{"A1": 1}, {"A2": 1}], n=[])
    return g, RationalSubspace.zero(g.dim), parabolic


BUILTIN: Tuple[ExampleEntry, ...] = (
    ExampleEntry(
        name="sl2_so2",
        description="hyperbolic plane SL(2,R)/SO(2)",
        build=_sl2_so2,
        spherical_roots=(("4",),),
        rho=("1",),
        h_empty=({"F": 1},),
        chart="so2",
        orbit_point=IDENTITY,
        eigenfunction=True,
        parameters=(0.5, 1.0, 2.0),
    ),
    ExampleEntry(
        name="sl2_so11",
        description="de Sitter type space SL(2,R)/SO(1,1)",
        build=_sl2_so11,
        spherical_roots=(("4",),),
        rho=("1",),
        h_empty=({"F": 1},),
        chart="so11",
        orbit_point=lower_unipotent(0.5),
    ),
    ExampleEntry(
        name="sl2xsl2_diag",
        description="group case (SL2 x SL2)/diag",
        build=_diagonal,
        spherical_roots=(("4",),),
        rho=("2",),
        h_empty=({"H1": 1, "H2": 1}, {"F1": 1}, {"E2": 1}),
    ),
    ExampleEntry(
        name="torus",
        description="Z = A for a two-dimensional split torus",
        build=_torus,
        spherical_roots=(),
        rho=("0", "0"),
    ),
)


class ExampleRegistry:
    """Lookup of built-in examples, plus pairs loaded from JSON documents."""

    def __init__(self, entries: Sequence[ExampleEntry] = BUILTIN):
        self._entries: Dict[str, ExampleEntry] = {e.name: e for e in entries}

    def get_by_name(self, name: str) -> ExampleEntry:
        try:
            return self._entries[name]
        except KeyError:
            raise UnknownExample(f"Unknown example: {name}", {"known": sorted(self._entries)}) from None

    def get_all(self) -> List[ExampleEntry]:
        return list(self._entries.values())

    def count(self) -> int:
        return len(self._entries)

    def add(self, entry: ExampleEntry) -> ExampleEntry:
        if entry.name in self._entries:
            raise ValueError(f"Example already registered: {entry.name}")
        self._entries[entry.name] = entry
        return entry

    @staticmethod
    def from_file(path: Union[str, Path]) -> ExampleEntry:
        path = Path(path)
        with open(path, "r", encoding="utf-8") as f:
            document = PairDocument.model_validate(json.load(f))
        LOG.info("loaded pair document", extra={"path": str(path)})
        return ExampleEntry(name=path.stem, description=f"pair loaded from {path.name}", build=document.build)
