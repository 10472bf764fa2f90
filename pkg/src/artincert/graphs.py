"""Labelled simplicial graphs and the structural predicates the certifier consumes.

A graph here is the presentation datum of an Artin group: finitely many named
vertices and unordered edges carrying integer labels m >= 2.  Everything is an
immutable value with a canonical form (vertices sorted lexicographically,
edges sorted as (min, max) pairs), so graphs can be hashed by content and
certificates can refer to them unambiguously.
"""

from __future__ import annotations

import hashlib
import json
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Sequence

GRAPH_FORMAT = "artin-graph/1"

# Vertex sets are machine-word bitmasks internally; larger graphs are refused.
MAX_VERTICES = 64

VertexSet = tuple  # alias used in signatures: tuple of vertex names, sorted


class GraphError(ValueError):
    """Malformed graph input or a graph operation used outside its domain."""


class LabelledGraph:
    """Finite simplicial graph with integer edge labels >= 2.

    `vertices` is the canonical (lexicographically sorted) vertex tuple and
    `edges` maps sorted pairs (u, v) to their label.  Instances are immutable;
    all operations build new graphs.
    """

    __slots__ = ("vertices", "edges", "_index", "_adj_masks", "_canonical", "_hash", "_sub_cache")

    def __init__(self, vertices: Iterable[str], edges: Iterable[Sequence]) -> None:
        verts = list(vertices)
        if not verts:
            raise GraphError("empty vertex list")
        seen = set()
        for v in verts:
            if not isinstance(v, str) or not v:
                raise GraphError(f"vertex identifiers must be nonempty strings, got {v!r}")
            if v in seen:
                raise GraphError(f"duplicate vertex {v!r}")
            seen.add(v)
        if len(verts) > MAX_VERTICES:
            raise GraphError(f"graphs are capped at {MAX_VERTICES} vertices, got {len(verts)}")
        self.vertices = tuple(sorted(verts))
        self._index = {v: i for i, v in enumerate(self.vertices)}

        edge_map: dict[tuple[str, str], int] = {}
        for entry in edges:
            try:
                u, v, m = entry
            except (TypeError, ValueError):
                raise GraphError(f"edge entries must be [u, v, label] triples, got {entry!r}") from None
            if u not in self._index:
                raise GraphError(f"edge endpoint {u!r} is not a declared vertex")
            if v not in self._index:
                raise GraphError(f"edge endpoint {v!r} is not a declared vertex")
            if u == v:
                raise GraphError(f"self-loop at {u!r}")
            if not isinstance(m, int) or isinstance(m, bool) or m < 2:
                raise GraphError(f"edge label must be an integer >= 2, got {m!r} on ({u!r}, {v!r})")
            key = (u, v) if u < v else (v, u)
            if key in edge_map:
                raise GraphError(f"duplicate edge ({key[0]!r}, {key[1]!r})")
            edge_map[key] = m
        self.edges = dict(sorted(edge_map.items()))

        masks = [0] * len(self.vertices)
        for (u, v) in self.edges:
            iu, iv = self._index[u], self._index[v]
            masks[iu] |= 1 << iv
            masks[iv] |= 1 << iu
        self._adj_masks = masks
        self._canonical = None
        self._hash = None
        self._sub_cache = None

    # -- canonical form ------------------------------------------------

    def to_json_obj(self) -> dict:
        return {
            "format": GRAPH_FORMAT,
            "vertices": list(self.vertices),
            "edges": [[u, v, m] for (u, v), m in self.edges.items()],
        }

    def canonical_json(self) -> str:
        if self._canonical is None:
            self._canonical = json.dumps(self.to_json_obj(), sort_keys=True, separators=(",", ":"))
        return self._canonical

    def content_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LabelledGraph):
            return NotImplemented
        return self.vertices == other.vertices and self.edges == other.edges

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.vertices, tuple(self.edges.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"LabelledGraph({list(self.vertices)}, {[[u, v, m] for (u, v), m in self.edges.items()]})"

    # -- basic accessors -------------------------------------------------

    def has_vertex(self, v: str) -> bool:
        return v in self._index

    def has_edge(self, u: str, v: str) -> bool:
        return ((u, v) if u < v else (v, u)) in self.edges

    def label(self, u: str, v: str) -> int:
        key = (u, v) if u < v else (v, u)
        try:
            return self.edges[key]
        except KeyError:
            raise GraphError(f"no edge between {u!r} and {v!r}") from None

    def neighbors(self, v: str) -> VertexSet:
        try:
            mask = self._adj_masks[self._index[v]]
        except KeyError:
            raise GraphError(f"unknown vertex {v!r}") from None
        return self._mask_to_vertices(mask)

    def degree(self, v: str) -> int:
        try:
            return self._adj_masks[self._index[v]].bit_count()
        except KeyError:
            raise GraphError(f"unknown vertex {v!r}") from None

    def edge_list(self) -> list[tuple[str, str, int]]:
        return [(u, v, m) for (u, v), m in self.edges.items()]

    def _mask_to_vertices(self, mask: int) -> VertexSet:
        out = []
        while mask:
            low = mask & -mask
            out.append(self.vertices[low.bit_length() - 1])
            mask ^= low
        return tuple(out)

    def _vertices_to_mask(self, subset: Iterable[str]) -> int:
        mask = 0
        for v in subset:
            try:
                mask |= 1 << self._index[v]
            except KeyError:
                raise GraphError(f"{v!r} is not a vertex of the graph") from None
        return mask

    # -- predicates ------------------------------------------------------

    def is_even(self) -> bool:
        return all(m % 2 == 0 for m in self.edges.values())

    def is_clique(self) -> bool:
        n = len(self.vertices)
        return len(self.edges) == n * (n - 1) // 2

    def is_connected(self) -> bool:
        n = len(self.vertices)
        seen = 1
        frontier = 1
        while frontier:
            nxt = 0
            m = frontier
            while m:
                low = m & -m
                nxt |= self._adj_masks[low.bit_length() - 1]
                m ^= low
            frontier = nxt & ~seen
            seen |= frontier
        return seen.bit_count() == n

    def is_tree(self) -> bool:
        return self.is_connected() and len(self.edges) == len(self.vertices) - 1

    def connected_components(self) -> list[VertexSet]:
        """Components as sorted vertex tuples, listed in canonical order."""
        n = len(self.vertices)
        unseen = (1 << n) - 1
        comps = []
        while unseen:
            start = unseen & -unseen
            seen = start
            frontier = start
            while frontier:
                nxt = 0
                m = frontier
                while m:
                    low = m & -m
                    nxt |= self._adj_masks[low.bit_length() - 1]
                    m ^= low
                frontier = nxt & ~seen
                seen |= frontier
            comps.append(self._mask_to_vertices(seen))
            unseen &= ~seen
        comps.sort()
        return comps

    def triangles(self) -> Iterator[tuple[str, str, str]]:
        for a, b, c in combinations(self.vertices, 3):
            if self.has_edge(a, b) and self.has_edge(a, c) and self.has_edge(b, c):
                yield (a, b, c)

    # -- subgraphs ---------------------------------------------------------

    def full_subgraph(self, subset: Iterable[str]) -> "LabelledGraph":
        sub = tuple(sorted(set(subset)))
        if not sub:
            raise GraphError("cannot take the full subgraph on an empty vertex set")
        if self._sub_cache is None:
            self._sub_cache = {}
        cached = self._sub_cache.get(sub)
        if cached is not None:
            return cached
        for v in sub:
            if v not in self._index:
                raise GraphError(f"{v!r} is not a vertex of the graph")
        if sub == self.vertices:
            result = self
        else:
            inside = set(sub)
            edges = [(u, v, m) for (u, v), m in self.edges.items() if u in inside and v in inside]
            result = LabelledGraph(sub, edges)
        self._sub_cache[sub] = result
        return result

    def star(self, v: str) -> VertexSet:
        return tuple(sorted(self.neighbors(v) + (v,)))

    def link(self, v: str) -> VertexSet:
        return self.neighbors(v)


# ---------------------------------------------------------------------------
# parsing / serialization


def parse_graph(text: str) -> LabelledGraph:
    """Parse the canonical graph file format.

    Accepts `{"format": "artin-graph/1", "vertices": [...], "edges": [[u,v,m],...]}`;
    the format key may be omitted on input but is always emitted.  Syntax
    errors report the offending position.
    """
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphError(f"graph syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return graph_from_json_obj(obj)


def graph_from_json_obj(obj: object) -> LabelledGraph:
    if not isinstance(obj, Mapping):
        raise GraphError("graph file must contain a JSON object")
    fmt = obj.get("format", GRAPH_FORMAT)
    if fmt != GRAPH_FORMAT:
        raise GraphError(f"unsupported graph format {fmt!r} (expected {GRAPH_FORMAT!r})")
    if "vertices" not in obj or "edges" not in obj:
        raise GraphError('graph object needs "vertices" and "edges" keys')
    vertices = obj["vertices"]
    edges = obj["edges"]
    if not isinstance(vertices, list):
        raise GraphError('"vertices" must be a list of strings')
    if not isinstance(edges, list):
        raise GraphError('"edges" must be a list of [u, v, label] triples')
    return LabelledGraph(vertices, edges)


def serialize_graph(graph: LabelledGraph) -> str:
    return graph.canonical_json()


# ---------------------------------------------------------------------------
# thin operation wrappers, matching the toolkit's operation vocabulary


def full_subgraph(graph: LabelledGraph, subset: Iterable[str]) -> LabelledGraph:
    return graph.full_subgraph(subset)


def star(graph: LabelledGraph, v: str) -> VertexSet:
    return graph.star(v)


def link(graph: LabelledGraph, v: str) -> VertexSet:
    return graph.link(v)


def is_even(graph: LabelledGraph) -> bool:
    return graph.is_even()


def is_tree(graph: LabelledGraph) -> bool:
    return graph.is_tree()


def is_fc_even(graph: LabelledGraph) -> bool:
    """FC criterion for even graphs: every triangle has >= 2 edges labelled 2.

    Only valid for even graphs; non-even input is rejected.
    """
    if not graph.is_even():
        raise GraphError("the triangle criterion applies to even graphs only")
    for a, b, c in graph.triangles():
        twos = (
            (graph.label(a, b) == 2)
            + (graph.label(a, c) == 2)
            + (graph.label(b, c) == 2)
        )
        if twos < 2:
            return False
    return True


# ---------------------------------------------------------------------------
# maximal cliques (Bron-Kerbosch with pivoting on bitmasks)


def enumerate_maximal_cliques(graph: LabelledGraph) -> list[VertexSet]:
    """All maximal cliques, each sorted, list sorted canonically.

    Isolated vertices come out as singleton cliques.
    """
    n = len(graph.vertices)
    adj = graph._adj_masks
    found: list[int] = []

    def bk(r: int, p: int, x: int) -> None:
        if p == 0 and x == 0:
            found.append(r)
            return
        # pivot: vertex of p | x with the most neighbours inside p
        best, best_count = -1, -1
        m = p | x
        while m:
            low = m & -m
            i = low.bit_length() - 1
            c = (adj[i] & p).bit_count()
            if c > best_count:
                best, best_count = i, c
            m ^= low
        cand = p & ~adj[best]
        while cand:
            low = cand & -cand
            i = low.bit_length() - 1
            bk(r | low, p & adj[i], x & adj[i])
            p ^= low
            x |= low
            cand ^= low

    bk(0, (1 << n) - 1, 0)
    cliques = sorted(graph._mask_to_vertices(m) for m in found)
    return cliques


# ---------------------------------------------------------------------------
# spherical factorization of even cliques


class SphericalFactorization:
    """Decomposition of an even clique into single vertices and heavy edges.

    `singles` are the vertices not covered by a heavy (label >= 4) edge;
    `heavy` are the heavy edges, pairwise vertex-disjoint.  Existence of this
    matching is exactly sphericity for even cliques.
    """

    __slots__ = ("singles", "heavy")

    def __init__(self, singles: tuple, heavy: tuple) -> None:
        self.singles = singles
        self.heavy = heavy

    @property
    def factors(self) -> list[tuple]:
        """Factors in canonical order, each ("vertex", v) or ("edge", u, v, m)."""
        items = [("vertex", v) for v in self.singles]
        items += [("edge", u, v, m) for (u, v, m) in self.heavy]
        return sorted(items, key=lambda f: f[1])

    @property
    def rank(self) -> int:
        """Rank of the free-abelian group the factorized clique maps onto."""
        return len(self.singles) + 2 * len(self.heavy)

    def __repr__(self) -> str:
        return f"SphericalFactorization(singles={self.singles!r}, heavy={self.heavy!r})"


class NotSpherical:
    """Witness that the heavy edges of an even clique do not form a matching."""

    __slots__ = ("first", "second", "shared")

    def __init__(self, first: tuple, second: tuple, shared: str) -> None:
        self.first = first
        self.second = second
        self.shared = shared

    def describe(self) -> str:
        a = f"{self.first[0]}{self.first[1]}"
        b = f"{self.second[0]}{self.second[1]}"
        return f"heavy edges {a}, {b} share {self.shared}"

    def __repr__(self) -> str:
        return f"NotSpherical({self.describe()})"


def spherical_factorization(graph: LabelledGraph):
    """Factor an even clique into Z vertices and heavy-edge factors.

    Returns a SphericalFactorization when the label >= 4 edges are pairwise
    disjoint, otherwise a NotSpherical witness naming the first conflict.
    """
    if not graph.is_clique():
        raise GraphError("spherical factorization expects a clique")
    if not graph.is_even():
        raise GraphError("spherical factorization expects even labels")
    heavy = [(u, v, m) for (u, v), m in graph.edges.items() if m >= 4]
    used: dict[str, tuple] = {}
    for edge in heavy:
        u, v, _ = edge
        for w in (u, v):
            if w in used:
                return NotSpherical(used[w], edge, w)
        used[u] = edge
        used[v] = edge
    singles = tuple(v for v in graph.vertices if v not in used)
    return SphericalFactorization(singles, tuple(heavy))


# ---------------------------------------------------------------------------
# join decomposition


class JoinDecomposition:
    """Finest partition of the vertices with all cross-factor edges labelled 2."""

    __slots__ = ("factors",)

    def __init__(self, factors: Sequence[VertexSet]) -> None:
        self.factors = tuple(sorted(tuple(sorted(f)) for f in factors))

    def __len__(self) -> int:
        return len(self.factors)

    def __iter__(self):
        return iter(self.factors)

    def __repr__(self) -> str:
        return f"JoinDecomposition({list(self.factors)!r})"


def join_decomposition(graph: LabelledGraph) -> JoinDecomposition:
    """Finest 2-labelled join decomposition.

    Computed as the connected components of the auxiliary graph joining u ~ v
    whenever (u, v) is not an edge or carries a label other than 2.  A
    connected graph with no 2-labels is a single factor.
    """
    n = len(graph.vertices)
    aux = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            u, v = graph.vertices[i], graph.vertices[j]
            m = graph.edges.get((u, v))
            if m != 2:
                aux[i] |= 1 << j
                aux[j] |= 1 << i
    unseen = (1 << n) - 1
    factors = []
    while unseen:
        start = unseen & -unseen
        seen = start
        frontier = start
        while frontier:
            nxt = 0
            m = frontier
            while m:
                low = m & -m
                nxt |= aux[low.bit_length() - 1]
                m ^= low
            frontier = nxt & ~seen
            seen |= frontier
        factors.append(graph._mask_to_vertices(seen))
        unseen &= ~seen
    return JoinDecomposition(factors)
