"""Directed orbit graph: vertices are cone points, edges are multi-indices.

There is an edge ``o(I) -> o(tau I)`` for every multi-index ``I``; within a
pair of orbits the label ``I`` is unique.  Weighting each edge by ``xi_I``
turns closedness for the second-order field into a cocycle condition: weights
sum to zero around every cycle of the degree ``N >= 1`` components.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field as dc_field, replace

from .field import CoefficientField
from .multiindex import (
    LatticePoint, MultiIndex, ZERO, cone_point, decode, encode, enumerate_orbits,
    format_point, multi_indices, orbit, shift,
)


@dataclass(frozen=True)
class Edge:
    src: LatticePoint
    dst: LatticePoint
    label: MultiIndex
    weight: float | None = None


@dataclass(frozen=True)
class OrbitGraph:
    degree: int
    bound: int
    vertices: tuple[LatticePoint, ...]
    edges: tuple[Edge, ...]

    def dump(self) -> str:
        def w(e):
            return "-" if e.weight is None else repr(float(e.weight))
        return "".join(f"{format_point(e.src) or '()'} | {format_point(e.dst) or '()'} | {e.label} | {w(e)}\n"
                       for e in self.edges)

    def adjacency(self) -> set[tuple[LatticePoint, LatticePoint]]:
        return {(e.src, e.dst) for e in self.edges}


def out_edges(z: LatticePoint) -> list[Edge]:
    """Unbounded out-edges of the orbit with cone point ``z``, found by brute force
    over the orbit members ``I`` and their shifts ``tau I``."""
    rep = decode(z)
    edges = []
    for I in sorted(orbit(rep)):
        edges.append(Edge(z, cone_point(shift(I, 1)), I))
    return edges


def build(N: int, bound: int) -> OrbitGraph:
    """Orbit graph on cone points with entries ``<= bound``; edges leaving the range are dropped."""
    if N == 0:
        return OrbitGraph(0, bound, ((),), (Edge((), (), ZERO),))
    vertices = tuple(enumerate_orbits(N, bound))
    vset = set(vertices)
    edges = []
    for z in vertices:
        seen = {}
        for e in out_edges(z):
            if e.dst not in vset:
                continue
            if e.dst in seen:
                raise AssertionError(f"two labels {seen[e.dst]} and {e.label} for edge {z}->{e.dst}")
            seen[e.dst] = e.label
            edges.append(e)
    return OrbitGraph(N, bound, vertices, tuple(edges))


def edge_rule_targets(z: LatticePoint) -> set[LatticePoint]:
    """Targets allowed by the geometric rule: ``z - e`` or ``z + e_i``, kept in the cone."""
    out = set()
    down = tuple(t - 1 for t in z)
    if all(t >= 0 for t in down):
        out.add(down)
    for i in range(len(z)):
        up = tuple(t + (j == i) for j, t in enumerate(z))
        if list(up) == sorted(up):
            out.add(up)
    return out


def assign_weights(graph: OrbitGraph, coeffs: CoefficientField) -> OrbitGraph:
    if coeffs.degree != graph.degree:
        raise ValueError(f"field degree {coeffs.degree} != graph degree {graph.degree}")
    edges = tuple(replace(e, weight=coeffs.values.get(encode(e.label), 0)) for e in graph.edges)
    return replace(graph, edges=edges)


@dataclass
class CycleReport:
    ok: bool
    components: int
    cycles_checked: int
    worst_sum: float
    worst_cycle: list = dc_field(default_factory=list)
    loop_weight: float | None = None

    def lines(self) -> list[str]:
        return [f"component={self.components}", f"cycles_checked={self.cycles_checked}",
                f"max_abs_cycle_sum={abs(self.worst_sum)!r}", f"ok={int(self.ok)}"]


def _spanning_forest(graph: OrbitGraph):
    """BFS forest over the undirected graph.

    Returns per-vertex potentials (signed weight sums along tree paths from the
    root), parent links, and the non-tree edges.
    """
    incident: dict = {v: [] for v in graph.vertices}
    for idx, e in enumerate(graph.edges):
        if e.src == e.dst:
            continue
        incident[e.src].append((idx, e.dst, +1))
        incident[e.dst].append((idx, e.src, -1))
    potential: dict = {}
    parent: dict = {}
    tree_edges: set[int] = set()
    roots = []
    for root in graph.vertices:
        if root in potential:
            continue
        roots.append(root)
        potential[root] = 0.0
        parent[root] = None
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for idx, v, sign in incident[u]:
                if v in potential:
                    continue
                w = graph.edges[idx].weight or 0.0
                potential[v] = potential[u] + sign * w
                parent[v] = (u, idx, sign)
                tree_edges.add(idx)
                queue.append(v)
    non_tree = [i for i in range(len(graph.edges)) if i not in tree_edges]
    return potential, parent, non_tree, roots


def _tree_path(parent, v) -> list:
    path = []
    while parent[v] is not None:
        u, idx, sign = parent[v]
        path.append((idx, sign))
        v = u
    return path


def cycle_check(graph: OrbitGraph, tol: float = 1e-9) -> CycleReport:
    """Signed weight sums over the fundamental cycles of a spanning forest.

    The fundamental cycles span the cycle space, so every cycle sums to zero
    iff each of these does.  The degree-0 loop is excluded.
    """
    if graph.degree == 0:
        return CycleReport(True, 1, 0, 0.0, [], graph.edges[0].weight)
    potential, parent, non_tree, roots = _spanning_forest(graph)
    worst, worst_idx = 0.0, None
    for idx in non_tree:
        e = graph.edges[idx]
        s = (e.weight or 0.0) + potential[e.src] - potential[e.dst]
        if abs(s) > abs(worst):
            worst, worst_idx = s, idx
    cycle = []
    if worst_idx is not None:
        e = graph.edges[worst_idx]
        # edge src->dst, then back along the tree dst -> root -> src
        up = _tree_path(parent, e.dst)
        down = _tree_path(parent, e.src)
        common = set(up) & set(down)
        cycle = [(e.src, e.dst, str(e.label), +1)]
        for idx, sign in [p for p in up if p not in common]:
            f = graph.edges[idx]
            cycle.append((f.src, f.dst, str(f.label), -sign))
        for idx, sign in reversed([p for p in down if p not in common]):
            f = graph.edges[idx]
            cycle.append((f.src, f.dst, str(f.label), sign))
    return CycleReport(abs(worst) <= tol, len(roots), len(non_tree), worst, cycle)


def component_count(graph: OrbitGraph) -> int:
    return len(_spanning_forest(graph)[3])


def edge_bijection_check(graph: OrbitGraph, window: int) -> bool:
    """Every degree-``N`` multi-index in ``[-window, window]`` whose endpoint orbits
    are in range labels exactly one edge, and every edge has a label."""
    labels: dict[MultiIndex, int] = {}
    for e in graph.edges:
        if e.label is None:
            return False
        labels[e.label] = labels.get(e.label, 0) + 1
    if graph.degree == 0:
        return labels.get(ZERO) == 1
    vset = set(graph.vertices)
    for I in multi_indices(graph.degree, -window, window):
        if cone_point(I) in vset and cone_point(shift(I, 1)) in vset:
            if labels.get(I) != 1:
                return False
    for e in graph.edges:
        if cone_point(e.label) != e.src or cone_point(shift(e.label, 1)) != e.dst:
            return False
    return True
