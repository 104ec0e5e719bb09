"""Shortest-path distances on the grid and the closed-walk lower bound.

Any feasible tour subgraph has an Euler circuit through the depot and every
pick, so the optimal closed walk over their shortest-path metric bounds every
tour length from below.
"""
from __future__ import annotations

import heapq
from fractions import Fraction

MAX_HELD_KARP = 12


def grid_distances(layout, source: int) -> list:
    """Scaled shortest-path distance from vertex index ``source`` to all vertices."""
    dist = [None] * layout.num_vertices
    dist[source] = 0
    heap = [(0, source)]
    ends, lengths, incident = layout.endpoints, layout.scaled_lengths, layout.incident
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for k in incident[u]:
            a, b = ends[k]
            v = b if a == u else a
            nd = d + lengths[k]
            if dist[v] is None or nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def closed_walk_bound(instance):
    """Length of the shortest closed walk from the depot through all picks.

    Held-Karp over the shortest-path metric; returns None when there are too
    many picks for the exponential table.
    """
    lay = instance.layout
    points = [lay.vertex_index(instance.depot)] + [lay.vertex_index(p)
                                                  for p in instance.sorted_picks]
    n = len(points) - 1
    if n > MAX_HELD_KARP:
        return None
    rows = [grid_distances(lay, p) for p in points]
    d = [[rows[a][points[b]] for b in range(n + 1)] for a in range(n + 1)]
    # best[mask][j]: shortest path from the depot through ``mask`` ending at pick j
    best = {}
    for j in range(n):
        best[(1 << j, j)] = d[0][j + 1]
    for mask in range(1, 1 << n):
        for j in range(n):
            cur = best.get((mask, j))
            if cur is None:
                continue
            for k in range(n):
                if mask & (1 << k):
                    continue
                key = (mask | (1 << k), k)
                cand = cur + d[j + 1][k + 1]
                if cand < best.get(key, cand + 1):
                    best[key] = cand
    full = (1 << n) - 1
    total = min(best[(full, j)] + d[j + 1][0] for j in range(n))
    return Fraction(total, lay.length_scale)
