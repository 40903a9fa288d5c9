"""De Bruijn graphs of one-dimensional dictionary slices.

The graph of order k has the admissible words of length k as vertices and
the admissible words of length k+1 as edges.  An edge w runs from w[:-1]
to w[1:].  Closed paths are lists of edges and the periodic word read off
a closed path is the sequence of first letters of its edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import networkx as nx

from .errors import InvalidArgument, NoGlobalPath, UnsupportedDimension
from .symcore import (Alphabet, DictionarySlice, PeriodicConfiguration, Word, complexity,
                      periodic_dictionary)

Edge = tuple[int, ...]
Vertex = tuple[int, ...]


@dataclass(frozen=True, eq=False)
class DeBruijnGraph:
    alphabet: Alphabet
    order: int
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        g = nx.DiGraph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from((e[:-1], e[1:]) for e in self.edges)
        object.__setattr__(self, "_graph", g)

    @property
    def graph(self) -> nx.DiGraph:
        """The underlying networkx digraph (vertices are letter-index tuples)."""
        return self._graph

    def in_degree(self, v: Vertex) -> int:
        return self._graph.in_degree(v)

    def out_degree(self, v: Vertex) -> int:
        return self._graph.out_degree(v)

    def degree(self, v: Vertex) -> int:
        # a loop counts once as incoming and once as outgoing
        return self.in_degree(v) + self.out_degree(v)

    def is_dandling(self, v: Vertex) -> bool:
        return self.in_degree(v) == 0 or self.out_degree(v) == 0

    def label(self, word: Sequence[int]) -> str:
        return self.alphabet.decode(word)


def source(e: Edge) -> Vertex:
    return e[:-1]


def target(e: Edge) -> Vertex:
    return e[1:]


def build_graph(s: DictionarySlice, k: int) -> DeBruijnGraph:
    if s.dim != 1:
        raise UnsupportedDimension("de Bruijn graphs are built for one-dimensional slices")
    if k < 1:
        raise InvalidArgument("order must be positive")
    if s.cap < k + 1:
        raise InvalidArgument(f"slice cap {s.cap} is too small for order {k}")
    vertices = tuple(sorted(s.patterns(k)))
    edges = tuple(sorted(s.patterns(k + 1)))
    vset = set(vertices)
    for e in edges:
        if source(e) not in vset or target(e) not in vset:
            raise InvalidArgument(f"edge {s.alphabet.decode(e)} has a boundary outside the vertex set")
    return DeBruijnGraph(s.alphabet, k, vertices, edges)


def is_strongly_connected(g: DeBruijnGraph) -> bool:
    if not g.vertices:
        return False
    return nx.is_strongly_connected(g.graph)


def branching_vertices(g: DeBruijnGraph) -> list[Vertex]:
    return [v for v in g.vertices if not g.is_dandling(v) and g.degree(v) > 2]


def branching_count(g: DeBruijnGraph) -> int:
    return len(branching_vertices(g))


@dataclass(frozen=True)
class ClosedPath:
    edges: tuple[Edge, ...]
    alphabet: Alphabet | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.edges:
            raise InvalidArgument("a closed path needs at least one edge")
        n = len(self.edges)
        for i, e in enumerate(self.edges):
            if target(e) != source(self.edges[(i + 1) % n]):
                raise InvalidArgument(f"edges {i} and {(i + 1) % n} do not chain")

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def order(self) -> int:
        return len(self.edges[0]) - 1


def _bfs_edges(g: DeBruijnGraph, start: Vertex, goal: Vertex) -> list[Edge]:
    """Edges of a shortest path; for start == goal the empty path."""
    nodes = nx.shortest_path(g.graph, start, goal)
    return [a + b[-1:] for a, b in zip(nodes, nodes[1:])]


def _shortest_cycle(g: DeBruijnGraph, v: Vertex) -> list[Edge]:
    best = None
    for w in sorted(g.graph.successors(v)):
        back = _bfs_edges(g, w, v) if w != v else []
        cand = [v + w[-1:]] + back
        if best is None or len(cand) < len(best):
            best = cand
    return best


def _is_eulerian(g: DeBruijnGraph) -> bool:
    return all(g.in_degree(v) == g.out_degree(v) for v in g.vertices)


def global_closed_path(g: DeBruijnGraph, mode: str = "edge") -> ClosedPath:
    """A closed path through every edge (mode "edge") or every vertex (mode "vertex").

    Targets are visited in lexicographic order and joined by shortest paths;
    in edge mode a balanced graph gets an Euler circuit instead.
    """
    if mode not in ("edge", "vertex"):
        raise InvalidArgument("mode must be 'edge' or 'vertex'")
    if not is_strongly_connected(g):
        raise NoGlobalPath(f"graph of order {g.order} is not strongly connected")
    if mode == "edge":
        if _is_eulerian(g):
            first = g.edges[0]
            circuit = nx.eulerian_circuit(g.graph, source=source(first))
            return ClosedPath(tuple(u + v[-1:] for u, v in circuit), g.alphabet)
        path: list[Edge] = []
        covered: set[Edge] = set()
        for e in g.edges:
            if e in covered:
                continue
            if path:
                link = _bfs_edges(g, target(path[-1]), source(e))
                path.extend(link)
                covered.update(link)
            path.append(e)
            covered.add(e)
        path.extend(_bfs_edges(g, target(path[-1]), source(path[0])))
        return ClosedPath(tuple(path), g.alphabet)
    start = g.vertices[0]
    path = []
    visited = {start}
    here = start
    for v in g.vertices[1:]:
        if v in visited:
            continue
        link = _bfs_edges(g, here, v)
        path.extend(link)
        visited.update(target(e) for e in link)
        here = v
    if path:
        path.extend(_bfs_edges(g, here, start))
    else:
        path = _shortest_cycle(g, start)
    return ClosedPath(tuple(path), g.alphabet)


def periodic_word_from_path(p: ClosedPath, alphabet: Alphabet | None = None) -> Word:
    alphabet = alphabet or p.alphabet
    if alphabet is None:
        raise InvalidArgument("path carries no alphabet; pass one explicitly")
    return Word(alphabet, tuple(e[0] for e in p.edges))


def path_from_word(alphabet: Alphabet, text: str, k: int) -> ClosedPath:
    """The closed path of order k traced by the periodic extension of ``text``."""
    cells = alphabet.encode(text)
    n = len(cells)
    if n == 0:
        raise InvalidArgument("empty word")
    edges = tuple(tuple(cells[(i + j) % n] for j in range(k + 1)) for i in range(n))
    return ClosedPath(edges, alphabet)


@dataclass(frozen=True)
class GrowthCheck:
    order: int
    period: int
    complexity: int

    @property
    def ok(self) -> bool:
        return self.period >= self.complexity


def check_per_growth(s: DictionarySlice, paths: dict[int, ClosedPath]) -> list[GrowthCheck]:
    """Compare the period of each path word with the complexity at that order."""
    comp = complexity(s)
    out = []
    for k in sorted(paths):
        out.append(GrowthCheck(k, len(paths[k]), comp[k]))
    return out


def path_word_slice(alphabet: Alphabet, p: ClosedPath, cap: int) -> DictionarySlice:
    w = periodic_word_from_path(p, alphabet)
    return periodic_dictionary(PeriodicConfiguration(w.to_block()), cap)


def to_dot(g: DeBruijnGraph, highlight: ClosedPath | None = None, name: str | None = None) -> str:
    """DOT text with stable ordering; edges of ``highlight`` are drawn in red."""
    marked = set(highlight.edges) if highlight is not None else set()
    lines = [f'digraph "{name or f"debruijn_{g.order}"}" {{']
    for v in g.vertices:
        lines.append(f'  "{g.label(v)}";')
    for e in g.edges:
        attrs = f'label="{g.label(e)}"'
        if e in marked:
            attrs += ', color="red"'
        lines.append(f'  "{g.label(source(e))}" -> "{g.label(target(e))}" [{attrs}];')
    lines.append("}")
    return "\n".join(lines) + "\n"
