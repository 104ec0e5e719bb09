"""Shared fixtures and an independent reference oracle.

The reference builds its own coordinate grid with networkx and computes the
shortest closed walk from the depot through all picks by trying every visiting
order.  It shares no code with the package beyond reading instance fields, so
agreement with the solvers is a genuine cross-check.
"""
import itertools
from fractions import Fraction

import networkx as nx
import pytest

from pickroute.layout import make_instance


def reference_graph(instance):
    lay = instance.layout
    A, B, C = lay.num_aisles, lay.num_blocks, lay.cells_per_subaisle
    g = nx.Graph()
    height = B * (C + 1)
    for a in range(A):
        for y in range(height):
            g.add_edge((a, y), (a, y + 1), weight=Fraction(lay.cell_step))
    for j in range(B + 1):
        for a in range(A - 1):
            g.add_edge((a, j * (C + 1)), (a + 1, j * (C + 1)), weight=Fraction(lay.aisle_gaps[a]))
    return g


def reference_point(instance, v):
    C = instance.layout.cells_per_subaisle
    if hasattr(v, "cross"):
        return (v.aisle, v.cross * (C + 1))
    return (v.aisle, v.subaisle * (C + 1) + v.cell)


def reference_tour_length(instance):
    g = reference_graph(instance)
    depot = reference_point(instance, instance.depot)
    stops = [reference_point(instance, p) for p in instance.sorted_picks]
    assert len(stops) <= 6, "reference oracle is factorial in the pick count"
    dist = dict(nx.all_pairs_dijkstra_path_length(g, weight="weight"))
    best = None
    for order in itertools.permutations(stops):
        path = [depot, *order, depot]
        total = sum((dist[u][v] for u, v in zip(path, path[1:])), Fraction(0))
        if best is None or total < best:
            best = total
    return best


@pytest.fixture
def rectangle():
    """A=2, B=1, C=3 with a depot at the bottom of aisle 0; the perimeter covers it."""
    return make_instance(2, 1, 3, depot=(0, 1), picks=[(0, 0, 2), (1, 0, 1)])
