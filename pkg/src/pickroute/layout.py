"""Warehouse grid geometry, vertex/edge identities and pick instances.

A layout has ``num_aisles`` vertical aisles (left to right) and ``num_blocks``
rows of subaisles separated by ``num_blocks + 1`` cross-aisles (top to
bottom).  Each subaisle holds ``cells_per_subaisle`` storage cells, so an
aisle column is a path of ``B * (C + 1)`` vertical unit edges.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Union

from .exceptions import InstanceFormatError

Number = Union[int, Fraction]


@dataclass(frozen=True, slots=True)
class Intersection:
    aisle: int
    cross: int


@dataclass(frozen=True, slots=True)
class Cell:
    aisle: int
    subaisle: int
    cell: int


Vertex = Union[Intersection, Cell]


@dataclass(frozen=True, slots=True)
class VerticalUnit:
    """Unit edge inside a subaisle; slot 0 touches the upper intersection."""

    aisle: int
    subaisle: int
    slot: int


@dataclass(frozen=True, slots=True)
class HorizontalUnit:
    """Cross-aisle edge between ``left_aisle`` and ``left_aisle + 1``."""

    cross: int
    left_aisle: int


EdgeId = Union[VerticalUnit, HorizontalUnit]


def as_length(value) -> Fraction:
    if isinstance(value, bool):
        raise ValueError(f"not a length: {value!r}")
    if isinstance(value, float):
        frac = Fraction(value).limit_denominator(10**6)
    else:
        frac = Fraction(value)
    if frac <= 0:
        raise ValueError(f"length must be positive, got {value!r}")
    return frac


def format_length(value: Fraction) -> Union[int, str]:
    """JSON-friendly form of an exact length: int when integral, else 'p/q'."""
    value = Fraction(value)
    if value.denominator == 1:
        return value.numerator
    return str(value)


@dataclass(frozen=True, eq=False)
class WarehouseLayout:
    num_aisles: int
    num_blocks: int
    cells_per_subaisle: int
    cell_step: Fraction = Fraction(1)
    aisle_gaps: tuple = ()

    def __post_init__(self):
        for name in ("num_aisles", "num_blocks", "cells_per_subaisle"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        object.__setattr__(self, "cell_step", as_length(self.cell_step))
        gaps = tuple(self.aisle_gaps) or (1,) * (self.num_aisles - 1)
        if len(gaps) != self.num_aisles - 1:
            raise ValueError(
                f"aisle_gaps needs {self.num_aisles - 1} entries, got {len(gaps)}")
        object.__setattr__(self, "aisle_gaps", tuple(as_length(g) for g in gaps))

    # equality/hash on the defining fields only (cached properties live in __dict__)
    def _key(self):
        return (self.num_aisles, self.num_blocks, self.cells_per_subaisle,
                self.cell_step, self.aisle_gaps)

    def __eq__(self, other):
        if not isinstance(other, WarehouseLayout):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return ("WarehouseLayout(A={}, B={}, C={}, cell_step={}, aisle_gaps={})"
                .format(self.num_aisles, self.num_blocks, self.cells_per_subaisle,
                        self.cell_step, [str(g) for g in self.aisle_gaps]))

    # -- index helpers -------------------------------------------------------
    @property
    def positions_per_aisle(self) -> int:
        """Number of vertical positions (vertices) in one aisle column."""
        return self.num_blocks * (self.cells_per_subaisle + 1) + 1

    @property
    def num_vertical(self) -> int:
        return self.num_aisles * self.num_blocks * (self.cells_per_subaisle + 1)

    @property
    def num_horizontal(self) -> int:
        return (self.num_blocks + 1) * (self.num_aisles - 1)

    @property
    def num_edges(self) -> int:
        return self.num_vertical + self.num_horizontal

    @property
    def num_vertices(self) -> int:
        return self.num_aisles * self.positions_per_aisle

    def vertex_index(self, v: Vertex) -> int:
        self.check_vertex(v)
        step = self.cells_per_subaisle + 1
        if isinstance(v, Intersection):
            pos = v.cross * step
        else:
            pos = v.subaisle * step + v.cell
        return v.aisle * self.positions_per_aisle + pos

    def vertex_at(self, index: int) -> Vertex:
        aisle, pos = divmod(index, self.positions_per_aisle)
        sub, rem = divmod(pos, self.cells_per_subaisle + 1)
        if rem == 0:
            return Intersection(aisle, sub)
        return Cell(aisle, sub, rem)

    def check_vertex(self, v: Vertex) -> None:
        A, B, C = self.num_aisles, self.num_blocks, self.cells_per_subaisle
        if isinstance(v, Intersection):
            ok = 0 <= v.aisle < A and 0 <= v.cross <= B
        elif isinstance(v, Cell):
            ok = 0 <= v.aisle < A and 0 <= v.subaisle < B and 1 <= v.cell <= C
        else:
            raise TypeError(f"not a vertex: {v!r}")
        if not ok:
            raise IndexError(f"{v!r} out of bounds for {self!r}")

    def edge_index(self, e: EdgeId) -> int:
        A, B, C = self.num_aisles, self.num_blocks, self.cells_per_subaisle
        if isinstance(e, VerticalUnit):
            if not (0 <= e.aisle < A and 0 <= e.subaisle < B and 0 <= e.slot <= C):
                raise IndexError(f"{e!r} out of bounds")
            return (e.aisle * B + e.subaisle) * (C + 1) + e.slot
        if isinstance(e, HorizontalUnit):
            if not (0 <= e.cross <= B and 0 <= e.left_aisle < A - 1):
                raise IndexError(f"{e!r} out of bounds")
            return self.num_vertical + e.cross * (A - 1) + e.left_aisle
        raise TypeError(f"not an edge: {e!r}")

    def vertical_index(self, aisle: int, subaisle: int, slot: int) -> int:
        return (aisle * self.num_blocks + subaisle) * (self.cells_per_subaisle + 1) + slot

    def horizontal_index(self, cross: int, left_aisle: int) -> int:
        return self.num_vertical + cross * (self.num_aisles - 1) + left_aisle

    def intersection_index(self, aisle: int, cross: int) -> int:
        return aisle * self.positions_per_aisle + cross * (self.cells_per_subaisle + 1)

    # -- cached edge tables --------------------------------------------------
    @cached_property
    def edges(self) -> tuple:
        return tuple(enumerate_edges(self))

    @cached_property
    def endpoints(self) -> tuple:
        """Vertex-index endpoints ``(u, v)`` of every edge, in edge order."""
        out = []
        for e in self.edges:
            if isinstance(e, VerticalUnit):
                base = e.aisle * self.positions_per_aisle
                u = base + e.subaisle * (self.cells_per_subaisle + 1) + e.slot
                out.append((u, u + 1))
            else:
                out.append((self.intersection_index(e.left_aisle, e.cross),
                            self.intersection_index(e.left_aisle + 1, e.cross)))
        return tuple(out)

    @cached_property
    def length_scale(self) -> int:
        """Common denominator turning every edge length into an integer."""
        dens = [self.cell_step.denominator] + [g.denominator for g in self.aisle_gaps]
        return math.lcm(*dens)

    @cached_property
    def scaled_lengths(self) -> tuple:
        s = self.length_scale
        vert = int(self.cell_step * s)
        out = [vert] * self.num_vertical
        A = self.num_aisles
        for j in range(self.num_blocks + 1):
            for i in range(A - 1):
                out.append(int(self.aisle_gaps[i] * s))
        return tuple(out)

    @cached_property
    def incident(self) -> tuple:
        """Edge indices incident to each vertex index."""
        inc = [[] for _ in range(self.num_vertices)]
        for k, (u, v) in enumerate(self.endpoints):
            inc[u].append(k)
            inc[v].append(k)
        return tuple(tuple(x) for x in inc)


def is_outer_subaisle(layout: WarehouseLayout, subaisle: int) -> bool:
    if not 0 <= subaisle < layout.num_blocks:
        raise IndexError(f"subaisle {subaisle} out of range 0..{layout.num_blocks - 1}")
    return subaisle == 0 or subaisle == layout.num_blocks - 1


def edge_length(layout: WarehouseLayout, edge: EdgeId) -> Fraction:
    layout.edge_index(edge)  # bounds check
    if isinstance(edge, VerticalUnit):
        return layout.cell_step
    return layout.aisle_gaps[edge.left_aisle]


def enumerate_edges(layout: WarehouseLayout) -> list:
    """All unit edges: verticals by (aisle, subaisle, slot), then horizontals
    by (cross, left_aisle)."""
    A, B, C = layout.num_aisles, layout.num_blocks, layout.cells_per_subaisle
    edges: list = [VerticalUnit(i, k, s)
                   for i in range(A) for k in range(B) for s in range(C + 1)]
    edges += [HorizontalUnit(j, i) for j in range(B + 1) for i in range(A - 1)]
    return edges


@dataclass(frozen=True, eq=False)
class PickInstance:
    layout: WarehouseLayout
    depot: Intersection
    picks: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if not isinstance(self.depot, Intersection):
            raise ValueError("depot must be an intersection vertex")
        self.layout.check_vertex(self.depot)
        picks = frozenset(self.picks)
        if not picks:
            raise ValueError("pick set must be nonempty")
        for p in picks:
            if not isinstance(p, Cell):
                raise ValueError(f"pick {p!r} is not a storage cell")
            self.layout.check_vertex(p)
        object.__setattr__(self, "picks", picks)

    def _key(self):
        return (self.layout, self.depot, self.picks)

    def __eq__(self, other):
        if not isinstance(other, PickInstance):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        picks = sorted((p.aisle, p.subaisle, p.cell) for p in self.picks)
        return f"PickInstance({self.layout!r}, depot={self.depot!r}, picks={picks})"

    @cached_property
    def sorted_picks(self) -> tuple:
        return tuple(sorted(self.picks, key=lambda p: (p.aisle, p.subaisle, p.cell)))

    def picks_in(self, aisle: int, subaisle: int) -> tuple:
        """Sorted cell positions of the picks in one subaisle."""
        return self._picks_by_subaisle.get((aisle, subaisle), ())

    @cached_property
    def _picks_by_subaisle(self) -> dict:
        out: dict = {}
        for p in self.sorted_picks:
            out.setdefault((p.aisle, p.subaisle), []).append(p.cell)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def required_indices(self) -> frozenset:
        """Vertex indices that a tour must touch: depot and all picks."""
        lay = self.layout
        return frozenset([lay.vertex_index(self.depot)]
                         + [lay.vertex_index(p) for p in self.picks])

    def with_layout(self, layout: WarehouseLayout) -> "PickInstance":
        return PickInstance(layout, self.depot, self.picks)

    def to_dict(self) -> dict:
        lay = self.layout
        return {
            "aisles": lay.num_aisles,
            "blocks": lay.num_blocks,
            "cells": lay.cells_per_subaisle,
            "cell_step": format_length(lay.cell_step),
            "aisle_gaps": [format_length(g) for g in lay.aisle_gaps],
            "depot": {"aisle": self.depot.aisle, "cross": self.depot.cross},
            "picks": [{"aisle": p.aisle, "subaisle": p.subaisle, "cell": p.cell}
                      for p in self.sorted_picks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @cached_property
    def digest(self) -> str:
        """Stable short hash of the canonical instance encoding."""
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]


def non_empty_aisles(instance: PickInstance) -> set:
    return {p.aisle for p in instance.picks}


# -- instance file format -----------------------------------------------------

_TOP_FIELDS = {"aisles", "blocks", "cells", "cell_step", "aisle_gaps", "depot", "picks"}
_REQUIRED = ("aisles", "blocks", "cells", "depot", "picks")


def _check_keys(obj, allowed, where):
    if not isinstance(obj, dict):
        raise InstanceFormatError(where, "expected an object")
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        raise InstanceFormatError(f"{where}.{unknown[0]}" if where else unknown[0],
                                  "unknown field")
    for key in allowed:
        if key not in obj:
            raise InstanceFormatError(f"{where}.{key}" if where else key, "missing field")


def _int_field(obj, key, where):
    value = obj[key]
    if not isinstance(value, int) or isinstance(value, bool):
        raise InstanceFormatError(where, f"expected an integer, got {value!r}")
    return value


def _length_field(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise InstanceFormatError(where, f"expected a positive length, got {value!r}")
    try:
        return as_length(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise InstanceFormatError(where, str(exc)) from None


def instance_from_dict(data) -> PickInstance:
    if not isinstance(data, dict):
        raise InstanceFormatError("", "instance must be a JSON object")
    unknown = sorted(set(data) - _TOP_FIELDS)
    if unknown:
        raise InstanceFormatError(unknown[0], "unknown field")
    for key in _REQUIRED:
        if key not in data:
            raise InstanceFormatError(key, "missing field")
    A = _int_field(data, "aisles", "aisles")
    B = _int_field(data, "blocks", "blocks")
    C = _int_field(data, "cells", "cells")
    step = _length_field(data["cell_step"], "cell_step") if "cell_step" in data else 1
    gaps = ()
    if "aisle_gaps" in data:
        raw = data["aisle_gaps"]
        if not isinstance(raw, list):
            raise InstanceFormatError("aisle_gaps", "expected a list")
        gaps = tuple(_length_field(g, f"aisle_gaps[{n}]") for n, g in enumerate(raw))
    try:
        layout = WarehouseLayout(A, B, C, step, gaps)
    except ValueError as exc:
        raise InstanceFormatError("aisles/blocks/cells/aisle_gaps", str(exc)) from None

    _check_keys(data["depot"], ("aisle", "cross"), "depot")
    depot = Intersection(_int_field(data["depot"], "aisle", "depot.aisle"),
                         _int_field(data["depot"], "cross", "depot.cross"))
    try:
        layout.check_vertex(depot)
    except IndexError as exc:
        raise InstanceFormatError("depot", str(exc)) from None

    if not isinstance(data["picks"], list) or not data["picks"]:
        raise InstanceFormatError("picks", "expected a nonempty list")
    picks = []
    for n, raw in enumerate(data["picks"]):
        where = f"picks[{n}]"
        _check_keys(raw, ("aisle", "subaisle", "cell"), where)
        p = Cell(_int_field(raw, "aisle", where + ".aisle"),
                 _int_field(raw, "subaisle", where + ".subaisle"),
                 _int_field(raw, "cell", where + ".cell"))
        try:
            layout.check_vertex(p)
        except IndexError as exc:
            raise InstanceFormatError(where, str(exc)) from None
        if p in picks:
            raise InstanceFormatError(where, "duplicate pick")
        picks.append(p)
    return PickInstance(layout, depot, frozenset(picks))


def load_instance(path) -> PickInstance:
    with open(path) as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"line {exc.lineno}", exc.msg) from None
    return instance_from_dict(data)


def make_instance(aisles: int, blocks: int, cells: int, depot: tuple,
                  picks: Iterable[tuple], cell_step=1, aisle_gaps=()) -> PickInstance:
    """Shorthand constructor: ``depot=(aisle, cross)``, picks as
    ``(aisle, subaisle, cell)`` triples."""
    layout = WarehouseLayout(aisles, blocks, cells, cell_step, tuple(aisle_gaps))
    return PickInstance(layout, Intersection(*depot),
                        frozenset(Cell(*p) for p in picks))
