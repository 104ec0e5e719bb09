"""Tour subgraphs: edge multiplicities over the warehouse multigraph."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import networkx as nx

from .exceptions import ContractViolation, InstanceFormatError
from .layout import (
    HorizontalUnit,
    Intersection,
    PickInstance,
    VerticalUnit,
    format_length,
    is_outer_subaisle,
)

MAX_MULT = 2


class TourSubgraph:
    """Multiplicity in {0, 1, 2} for every unit edge of an instance's layout.

    ``mult`` is a tuple indexed like ``layout.edges``.  Instances are treated
    as immutable; rewrites build new objects.
    """

    __slots__ = ("instance", "mult", "_hash")

    def __init__(self, instance: PickInstance, mult):
        mult = tuple(int(m) for m in mult)
        if len(mult) != instance.layout.num_edges:
            raise ValueError(
                f"expected {instance.layout.num_edges} multiplicities, got {len(mult)}")
        if any(m < 0 or m > MAX_MULT for m in mult):
            raise ValueError("multiplicities must lie in {0, 1, 2}")
        self.instance = instance
        self.mult = mult
        self._hash = None

    @classmethod
    def empty(cls, instance: PickInstance) -> "TourSubgraph":
        return cls(instance, (0,) * instance.layout.num_edges)

    @classmethod
    def from_mapping(cls, instance: PickInstance, mapping: Mapping) -> "TourSubgraph":
        lay = instance.layout
        mult = [0] * lay.num_edges
        for edge, m in mapping.items():
            mult[lay.edge_index(edge)] = m
        return cls(instance, mult)

    def __getitem__(self, edge) -> int:
        return self.mult[self.instance.layout.edge_index(edge)]

    def __eq__(self, other):
        if not isinstance(other, TourSubgraph):
            return NotImplemented
        return self.instance == other.instance and self.mult == other.mult

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.mult)
        return self._hash

    def __repr__(self):
        nz = sum(1 for m in self.mult if m)
        return f"<TourSubgraph {nz} edges, length {tour_length(self)}>"

    def items(self):
        """Nonzero ``(edge, multiplicity)`` pairs in edge order."""
        edges = self.instance.layout.edges
        return [(edges[k], m) for k, m in enumerate(self.mult) if m]

    # horizontal multiplicity helpers used throughout classification/rewrites
    def left_horizontal(self, aisle: int, cross: int) -> int:
        if aisle == 0:
            return 0
        return self.mult[self.instance.layout.horizontal_index(cross, aisle - 1)]

    def right_horizontal(self, aisle: int, cross: int) -> int:
        if aisle == self.instance.layout.num_aisles - 1:
            return 0
        return self.mult[self.instance.layout.horizontal_index(cross, aisle)]

    def horizontal_degree(self, aisle: int, cross: int) -> int:
        return self.left_horizontal(aisle, cross) + self.right_horizontal(aisle, cross)


def degree(t: TourSubgraph, v) -> int:
    lay = t.instance.layout
    idx = lay.vertex_index(v)
    return sum(t.mult[k] for k in lay.incident[idx])


def _degrees(t: TourSubgraph) -> list:
    lay = t.instance.layout
    deg = [0] * lay.num_vertices
    for (u, v), m in zip(lay.endpoints, t.mult):
        if m:
            deg[u] += m
            deg[v] += m
    return deg


def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def is_feasible(t: TourSubgraph) -> bool:
    """Even degrees, a single connected component, depot and picks touched."""
    lay = t.instance.layout
    deg = [0] * lay.num_vertices
    parent = list(range(lay.num_vertices))
    for (u, v), m in zip(lay.endpoints, t.mult):
        if m:
            deg[u] += m
            deg[v] += m
            ru, rv = _find(parent, u), _find(parent, v)
            if ru != rv:
                parent[ru] = rv
    if any(d & 1 for d in deg):
        return False
    if any(deg[r] == 0 for r in t.instance.required_indices):
        return False
    roots = {_find(parent, x) for x, d in enumerate(deg) if d}
    return len(roots) == 1


def tour_length(t: TourSubgraph) -> Fraction:
    lay = t.instance.layout
    total = sum(m * w for m, w in zip(t.mult, lay.scaled_lengths))
    return Fraction(total, lay.length_scale)


def scaled_length(t: TourSubgraph) -> int:
    return sum(m * w for m, w in zip(t.mult, t.instance.layout.scaled_lengths))


def extract_closed_walk(t: TourSubgraph) -> list:
    """Closed walk from the depot using each edge exactly ``mult`` times.

    Returns the vertex sequence, first and last entries being the depot.
    """
    if not is_feasible(t):
        raise ContractViolation("closed walk requested for an infeasible tour subgraph")
    lay = t.instance.layout
    g = nx.MultiGraph()
    for (u, v), m in zip(lay.endpoints, t.mult):
        for _ in range(m):
            g.add_edge(u, v)
    start = lay.vertex_index(t.instance.depot)
    walk = [start]
    for _, v in nx.eulerian_circuit(g, source=start):
        walk.append(v)
    return [lay.vertex_at(x) for x in walk]


@dataclass(frozen=True)
class EdgeRun:
    """Maximal vertical run of uniform multiplicity between two intersections."""

    aisle: int
    top: Intersection
    bottom: Intersection
    multiplicity: int

    @property
    def subaisles(self) -> range:
        return range(self.top.cross, self.bottom.cross)

    def __str__(self):
        return (f"aisle {self.aisle} cross {self.top.cross}-{self.bottom.cross} "
                f"x{self.multiplicity}")


def subaisle_uniform(t: TourSubgraph, aisle: int, subaisle: int):
    """Common multiplicity of a subaisle's unit edges, or None if mixed."""
    lay = t.instance.layout
    start = lay.vertical_index(aisle, subaisle, 0)
    seg = t.mult[start:start + lay.cells_per_subaisle + 1]
    first = seg[0]
    return first if all(m == first for m in seg) else None


def find_edge_runs(t: TourSubgraph) -> list:
    lay = t.instance.layout
    runs = []
    for i in range(lay.num_aisles):
        k = 0
        while k < lay.num_blocks:
            m = subaisle_uniform(t, i, k)
            if not m:
                k += 1
                continue
            end = k + 1
            while (end < lay.num_blocks
                   and t.horizontal_degree(i, end) == 0
                   and subaisle_uniform(t, i, end) == m):
                end += 1
            runs.append(EdgeRun(i, Intersection(i, k), Intersection(i, end), m))
            k = end
    return runs


def double_runs(t: TourSubgraph) -> list:
    return [r for r in find_edge_runs(t) if r.multiplicity == 2]


def run_is_outer(t: TourSubgraph, run: EdgeRun) -> bool:
    lay = t.instance.layout
    return any(is_outer_subaisle(lay, k) for k in run.subaisles)


def has_outer_double(t: TourSubgraph) -> bool:
    return any(run_is_outer(t, r) for r in double_runs(t))


def has_double(t: TourSubgraph) -> bool:
    return bool(double_runs(t))


# -- dump format ------------------------------------------------------------

def _edge_to_json(e):
    if isinstance(e, VerticalUnit):
        return ["V", e.aisle, e.subaisle, e.slot]
    return ["H", e.cross, e.left_aisle]


def _edge_from_json(raw):
    if isinstance(raw, list) and raw:
        if raw[0] == "V" and len(raw) == 4:
            return VerticalUnit(*raw[1:])
        if raw[0] == "H" and len(raw) == 3:
            return HorizontalUnit(*raw[1:])
    raise InstanceFormatError("edges", f"bad edge id {raw!r}")


def tour_to_dict(t: TourSubgraph) -> dict:
    """Nonzero edges in edge order plus the exact total length."""
    return {
        "instance": t.instance.digest,
        "length": format_length(tour_length(t)),
        "edges": [{"edge": _edge_to_json(e), "mult": m} for e, m in t.items()],
    }


def dump_tour(t: TourSubgraph) -> str:
    return json.dumps(tour_to_dict(t), indent=1, sort_keys=True) + "\n"


def tour_from_dict(instance: PickInstance, data) -> TourSubgraph:
    if not isinstance(data, dict) or "edges" not in data:
        raise InstanceFormatError("edges", "missing field")
    if data.get("instance") not in (None, instance.digest):
        raise InstanceFormatError("instance", "tour dump belongs to a different instance")
    mapping = {}
    for n, item in enumerate(data["edges"]):
        if not isinstance(item, dict) or set(item) != {"edge", "mult"}:
            raise InstanceFormatError(f"edges[{n}]", "expected {edge, mult}")
        edge = _edge_from_json(item["edge"])
        try:
            instance.layout.edge_index(edge)
        except IndexError as exc:
            raise InstanceFormatError(f"edges[{n}]", str(exc)) from None
        if item["mult"] not in (1, 2):
            raise InstanceFormatError(f"edges[{n}].mult", "multiplicity must be 1 or 2")
        mapping[edge] = item["mult"]
    return TourSubgraph.from_mapping(instance, mapping)


def load_tour(instance: PickInstance, path) -> TourSubgraph:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InstanceFormatError(f"line {exc.lineno}", exc.msg) from None
    return tour_from_dict(instance, data)
