"""Constructive reductions: quotient steps with controlled kernels.

A certificate chain is a sequence of symbolic group homomorphisms, each with
a recorded kernel class (free or trivial) and a rule tag naming the fact that
guarantees the kernel class.  The group expressions themselves are
GroupDescriptor values: Artin groups of labelled graphs, direct products,
free products, the integers and the trivial group, kept in a canonical form
so chains are byte-stable and steps can be re-verified from their evidence.

The constructions here are: star splits (retraction pairs into star times
rest), clique-reduction chains, towers over even spherical cliques, tree
folds, edge additions, and the level-wise composition of component chains
across free products.  Direct products are always quotiented one coordinate
at a time so every kernel stays free; collapsing several coordinates at once
would produce product kernels, which are not free.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .graphs import (
    GraphError,
    LabelledGraph,
    NotSpherical,
    SphericalFactorization,
    spherical_factorization,
)

# rule tags; these exact strings appear in the certificate wire format
TAG_HEAVY_EDGE = "L2.3"  # heavy even edge onto its rank-2 abelianization
TAG_SPHERICAL = "L2.4"  # even spherical clique regrouped as a direct product
TAG_FREE_PRODUCT = "L2.5"  # level-wise advance of free-product components
TAG_AMALGAM = "L2.6/R2.7"  # generic star split (alias of P2.9 evidence)
TAG_STAR_SPLIT = "P2.9"  # retraction pair at a vertex star
TAG_ADD_EDGE = "L3.1"  # adding one edge to the presentation graph
TAG_EDGE_EXPONENT = "L3.4"  # edge group onto Z by exponent sum
TAG_LEAF_FOLD = "P3.6"  # fold a valence-one vertex onto its neighbour
TAG_KILL = "product-coordinate"  # kill one free-abelian coordinate
TAG_COMPLETION = "completion-T3.3"  # alias for edge-addition evidence
TAG_NORMALIZE = "normalize"  # trivial-kernel regrouping

KERNEL_FREE = "free"
KERNEL_TRIVIAL = "trivial"

KNOWN_TAGS = frozenset(
    {
        TAG_HEAVY_EDGE,
        TAG_SPHERICAL,
        TAG_FREE_PRODUCT,
        TAG_AMALGAM,
        TAG_STAR_SPLIT,
        TAG_ADD_EDGE,
        TAG_EDGE_EXPONENT,
        TAG_LEAF_FOLD,
        TAG_KILL,
        TAG_COMPLETION,
        TAG_NORMALIZE,
    }
)


class ReductionError(ValueError):
    """A reduction was asked for outside its domain of validity."""


# ---------------------------------------------------------------------------
# group descriptors


class GroupDescriptor:
    """Symbolic group expression naming sources and targets of chain steps."""

    kind: str = "?"

    def to_json_obj(self) -> object:
        raise NotImplementedError

    def canonical(self) -> str:
        raise NotImplementedError

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroupDescriptor):
            return NotImplemented
        return self.canonical() == other.canonical()

    def __hash__(self) -> int:
        return hash(self.canonical())

    def __repr__(self) -> str:
        return self.describe()

    def describe(self) -> str:
        raise NotImplementedError


class TrivialGroup(GroupDescriptor):
    kind = "trivial"

    def to_json_obj(self) -> object:
        return {"kind": "trivial"}

    def canonical(self) -> str:
        return '{"kind":"trivial"}'

    def describe(self) -> str:
        return "1"


class IntegersGroup(GroupDescriptor):
    kind = "integers"

    def to_json_obj(self) -> object:
        return {"kind": "integers"}

    def canonical(self) -> str:
        return '{"kind":"integers"}'

    def describe(self) -> str:
        return "Z"


TRIVIAL = TrivialGroup()
INTEGERS = IntegersGroup()


class ArtinGroupOf(GroupDescriptor):
    """The Artin group of a labelled graph."""

    kind = "artin"
    __slots__ = ("graph", "_canonical")

    def __init__(self, graph: LabelledGraph) -> None:
        self.graph = graph
        self._canonical = None

    def to_json_obj(self) -> object:
        return {"kind": "artin", "graph": self.graph.to_json_obj()}

    def canonical(self) -> str:
        if self._canonical is None:
            self._canonical = '{"graph":%s,"kind":"artin"}' % self.graph.canonical_json()
        return self._canonical

    def describe(self) -> str:
        return "A(%s)" % ",".join(self.graph.vertices)


class _CompositeDescriptor(GroupDescriptor):
    __slots__ = ("factors", "_canonical")
    joiner = "?"

    def __init__(self, factors: Sequence[GroupDescriptor]) -> None:
        if len(factors) < 2:
            raise ReductionError(f"{self.kind} descriptors need at least two factors")
        self.factors = tuple(sorted(factors, key=lambda d: d.canonical()))
        self._canonical = None

    def to_json_obj(self) -> object:
        return {"kind": self.kind, "factors": [f.to_json_obj() for f in self.factors]}

    def canonical(self) -> str:
        if self._canonical is None:
            inner = ",".join(f.canonical() for f in self.factors)
            self._canonical = '{"factors":[%s],"kind":"%s"}' % (inner, self.kind)
        return self._canonical

    def describe(self) -> str:
        return self.joiner.join(f.describe() for f in self.factors)


class DirectProductGroup(_CompositeDescriptor):
    kind = "product"
    joiner = " x "


class FreeProductGroup(_CompositeDescriptor):
    kind = "free-product"
    joiner = " * "


def product_of(factors: Sequence[GroupDescriptor]) -> GroupDescriptor:
    """Direct product in canonical form: nested products flatten, trivial
    factors drop, empty product is trivial, singleton product is its factor."""
    flat: list[GroupDescriptor] = []
    for f in factors:
        if isinstance(f, DirectProductGroup):
            flat.extend(f.factors)
        elif isinstance(f, TrivialGroup):
            continue
        else:
            flat.append(f)
    if not flat:
        return TRIVIAL
    if len(flat) == 1:
        return flat[0]
    return DirectProductGroup(flat)


def free_product_of(factors: Sequence[GroupDescriptor]) -> GroupDescriptor:
    """Free product in canonical form: trivial factors drop, the empty product
    is trivial, and a singleton is its factor.  Unlike direct products, nested
    free products are NOT flattened: the level-wise composition advances each
    component by identity, and a component whose own state is a free product
    must remain a single factor."""
    flat = [f for f in factors if not isinstance(f, TrivialGroup)]
    if not flat:
        return TRIVIAL
    if len(flat) == 1:
        return flat[0]
    return FreeProductGroup(flat)


def artin(graph: LabelledGraph) -> ArtinGroupOf:
    return ArtinGroupOf(graph)


def descriptor_from_json_obj(obj: object) -> GroupDescriptor:
    from .graphs import graph_from_json_obj

    if not isinstance(obj, Mapping) or "kind" not in obj:
        raise ReductionError(f"not a group descriptor: {obj!r}")
    kind = obj["kind"]
    if kind == "trivial":
        return TRIVIAL
    if kind == "integers":
        return INTEGERS
    if kind == "artin":
        return ArtinGroupOf(graph_from_json_obj(obj.get("graph")))
    if kind in ("product", "free-product"):
        factors = obj.get("factors")
        if not isinstance(factors, list):
            raise ReductionError("composite descriptor needs a factor list")
        parsed = [descriptor_from_json_obj(f) for f in factors]
        cls = DirectProductGroup if kind == "product" else FreeProductGroup
        return cls(parsed)
    raise ReductionError(f"unknown descriptor kind {kind!r}")


# ---------------------------------------------------------------------------
# quotient steps and chains


@dataclass(frozen=True, eq=False)
class QuotientStep:
    """One symbolic homomorphism with a kernel-class claim.

    `justification` is a rule tag; `evidence` carries exactly the data the
    verifier needs to re-check the rule's side conditions.  A step acting on
    one factor of an ambient direct product records that factor under
    evidence["factor"].
    """

    source: GroupDescriptor
    target: GroupDescriptor
    kernel: str
    justification: str
    map_description: str
    evidence: dict = field(default_factory=dict)

    def to_json_obj(self) -> dict:
        return {
            "source": self.source.to_json_obj(),
            "target": self.target.to_json_obj(),
            "kernel": self.kernel,
            "justification": self.justification,
            "map": self.map_description,
            "evidence": self.evidence,
        }

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QuotientStep):
            return NotImplemented
        return self.to_json_obj() == other.to_json_obj()


@dataclass(frozen=True)
class Chain:
    """A chain of quotient steps; `initial` anchors the empty chain."""

    initial: GroupDescriptor
    steps: tuple = ()

    @property
    def final(self) -> GroupDescriptor:
        return self.steps[-1].target if self.steps else self.initial

    def free_length(self) -> int:
        return sum(1 for s in self.steps if s.kernel == KERNEL_FREE)

    def well_formed(self) -> bool:
        current = self.initial
        for step in self.steps:
            if step.source != current:
                return False
            current = step.target
        return True

    def to_json_obj(self) -> list:
        return [s.to_json_obj() for s in self.steps]


# ---------------------------------------------------------------------------
# primitive steps


def factorize_clique_step(clique: LabelledGraph, fact: SphericalFactorization) -> QuotientStep:
    """Regroup an even spherical clique as the direct product of its single
    vertices (each a copy of Z) and heavy-edge factors.  Trivial kernel."""
    parts: list[GroupDescriptor] = [INTEGERS] * len(fact.singles)
    parts += [ArtinGroupOf(clique.full_subgraph((u, v))) for (u, v, _) in fact.heavy]
    return QuotientStep(
        source=ArtinGroupOf(clique),
        target=product_of(parts),
        kernel=KERNEL_TRIVIAL,
        justification=TAG_SPHERICAL,
        map_description="vertex generators to their factor coordinates",
        evidence={
            "singles": list(fact.singles),
            "heavy": [[u, v, m] for (u, v, m) in fact.heavy],
        },
    )


def heavy_edge_step(edge_graph: LabelledGraph) -> QuotientStep:
    """Quotient an even edge group onto its rank-2 abelianization; the kernel
    acts freely on the Bass-Serre tree of the HNN structure, hence is free."""
    ((u, v), m) = next(iter(edge_graph.edges.items()))
    return QuotientStep(
        source=ArtinGroupOf(edge_graph),
        target=product_of([INTEGERS, INTEGERS]),
        kernel=KERNEL_FREE,
        justification=TAG_HEAVY_EDGE,
        map_description=f"{u} -> (1,0), {v} -> (0,1)",
        evidence={"edge": [u, v, m]},
    )


def edge_exponent_step(edge_graph: LabelledGraph) -> QuotientStep:
    """Quotient an edge group (any label) onto Z by vertex exponent sum."""
    ((u, v), m) = next(iter(edge_graph.edges.items()))
    return QuotientStep(
        source=ArtinGroupOf(edge_graph),
        target=INTEGERS,
        kernel=KERNEL_FREE,
        justification=TAG_EDGE_EXPONENT,
        map_description=f"{u} -> 1, {v} -> 1",
        evidence={"edge": [u, v, m]},
    )


def kill_coordinate_step() -> QuotientStep:
    return QuotientStep(
        source=INTEGERS,
        target=TRIVIAL,
        kernel=KERNEL_FREE,
        justification=TAG_KILL,
        map_description="kill the free-abelian coordinate",
        evidence={},
    )


@dataclass(frozen=True)
class AmalgamSplit:
    """Splitting of a graph group over a vertex link: star times rest glued
    along the link.  Requires the star to be a proper part of the graph."""

    graph: LabelledGraph
    vertex: str
    star: tuple
    link: tuple
    rest: tuple

    @property
    def star_graph(self) -> LabelledGraph:
        return self.graph.full_subgraph(self.star)

    @property
    def rest_graph(self) -> LabelledGraph:
        return self.graph.full_subgraph(self.rest)


def choose_split_vertex(graph: LabelledGraph):
    """Least vertex whose star is proper, or None when the graph is a clique."""
    n = len(graph.vertices)
    for v in graph.vertices:
        if graph.degree(v) < n - 1:
            return v
    return None


def split_at_vertex(graph: LabelledGraph, v0: str) -> AmalgamSplit:
    st = graph.star(v0)
    if len(st) == len(graph.vertices):
        raise ReductionError(f"the star of {v0!r} is the whole graph")
    rest = tuple(v for v in graph.vertices if v != v0)
    return AmalgamSplit(graph, v0, st, graph.link(v0), rest)


def star_split_step(graph: LabelledGraph, v0: str) -> QuotientStep:
    """Map a graph group into star times rest through the two vertex-killing
    retractions; both restrictions are injective, so the kernel is free."""
    if not graph.is_even():
        raise ReductionError("star splits require an even graph")
    split = split_at_vertex(graph, v0)
    return QuotientStep(
        source=ArtinGroupOf(graph),
        target=product_of([ArtinGroupOf(split.star_graph), ArtinGroupOf(split.rest_graph)]),
        kernel=KERNEL_FREE,
        justification=TAG_STAR_SPLIT,
        map_description=f"w -> (pi_star({v0})(w), pi_rest(w))",
        evidence={
            "vertex": v0,
            "star": list(split.star),
            "link": list(split.link),
            "rest": list(split.rest),
        },
    )


def leaf_fold_step(graph: LabelledGraph, v0: str) -> QuotientStep:
    """Fold a valence-one vertex onto its unique neighbour."""
    if graph.degree(v0) != 1:
        raise ReductionError(f"{v0!r} does not have valence one")
    (w0,) = graph.neighbors(v0)
    rest = graph.full_subgraph(tuple(v for v in graph.vertices if v != v0))
    return QuotientStep(
        source=ArtinGroupOf(graph),
        target=ArtinGroupOf(rest),
        kernel=KERNEL_FREE,
        justification=TAG_LEAF_FOLD,
        map_description=f"{v0} -> {w0}, other vertices fixed",
        evidence={"vertex": v0, "onto": w0},
    )


def edge_addition_step(g1: LabelledGraph, g2: LabelledGraph) -> QuotientStep:
    """Induced map when one edge is added to the presentation graph."""
    if g1.vertices != g2.vertices:
        raise ReductionError("edge addition requires identical vertex sets")
    added = [e for e in g2.edges if e not in g1.edges]
    if len(added) != 1 or len(g2.edges) != len(g1.edges) + 1:
        raise ReductionError("the target must add exactly one new edge")
    for e, m in g1.edges.items():
        if g2.edges[e] != m:
            raise ReductionError(f"label changed on existing edge {e!r}")
    (u, v) = added[0]
    return QuotientStep(
        source=ArtinGroupOf(g1),
        target=ArtinGroupOf(g2),
        kernel=KERNEL_FREE,
        justification=TAG_ADD_EDGE,
        map_description="identity on vertex generators",
        evidence={"edge": [u, v, g2.edges[(u, v)]]},
    )


def join_normalize_step(graph: LabelledGraph, factors: Sequence[tuple]) -> QuotientStep:
    """Regroup a 2-labelled join as the direct product of its factors."""
    return QuotientStep(
        source=ArtinGroupOf(graph),
        target=product_of([ArtinGroupOf(graph.full_subgraph(f)) for f in factors]),
        kernel=KERNEL_TRIVIAL,
        justification=TAG_NORMALIZE,
        map_description="identity on generators",
        evidence={"kind": "join-product", "factors": [list(f) for f in factors]},
    )


def free_product_normalize_step(graph: LabelledGraph, components: Sequence[tuple]) -> QuotientStep:
    """Regroup a disconnected presentation as the free product of components."""
    return QuotientStep(
        source=ArtinGroupOf(graph),
        target=free_product_of([ArtinGroupOf(graph.full_subgraph(c)) for c in components]),
        kernel=KERNEL_TRIVIAL,
        justification=TAG_NORMALIZE,
        map_description="identity on generators",
        evidence={"kind": "free-product", "components": [list(c) for c in components]},
    )


# ---------------------------------------------------------------------------
# embedding a step into an ambient direct product


def reembed(step: QuotientStep, states: Sequence[GroupDescriptor], index: int) -> QuotientStep:
    """Apply `step` to coordinate `index` of the ambient product of `states`.

    The rest of the coordinates are carried along unchanged, so the kernel of
    the ambient map is the kernel of the coordinate map.  The acted factor is
    recorded in the evidence unless the ambient product collapses to the bare
    step."""
    src = product_of([*states[:index], step.source, *states[index + 1 :]])
    tgt = product_of([*states[:index], step.target, *states[index + 1 :]])
    if src == step.source and tgt == step.target:
        return step
    evidence = dict(step.evidence)
    if "factor" not in evidence:
        evidence["factor"] = step.source.to_json_obj()
    return QuotientStep(
        source=src,
        target=tgt,
        kernel=step.kernel,
        justification=step.justification,
        map_description=step.map_description,
        evidence=evidence,
    )


# ---------------------------------------------------------------------------
# chain constructions


def clique_reduction_chain(graph: LabelledGraph):
    """Chain of star splits from a connected even graph down to a direct
    product of clique groups.  Returns (chain, cliques); the chain is empty
    exactly when the graph is already a clique."""
    if not graph.is_even():
        raise ReductionError("clique reduction requires an even graph")
    if not graph.is_connected():
        raise ReductionError("clique reduction requires a connected graph; split off components first")
    parts: list[LabelledGraph] = [graph]
    steps: list[QuotientStep] = []
    while True:
        order = sorted(range(len(parts)), key=lambda i: parts[i].canonical_json())
        at = next((i for i in order if not parts[i].is_clique()), None)
        if at is None:
            break
        H = parts[at]
        v0 = choose_split_vertex(H)
        local = star_split_step(H, v0)
        states = [ArtinGroupOf(g) for g in parts]
        steps.append(reembed(local, states, at))
        split = split_at_vertex(H, v0)
        parts[at : at + 1] = [split.star_graph, split.rest_graph]
    cliques = tuple(sorted(tuple(g.vertices) for g in parts))
    return Chain(ArtinGroupOf(graph), tuple(steps)), cliques


def spherical_tower(clique: LabelledGraph) -> Chain:
    """Chain from an even spherical clique group down to the trivial group:
    regroup into factors, quotient each heavy-edge factor onto rank-2 abelian,
    then kill the free-abelian coordinates one at a time."""
    fact = spherical_factorization(clique)
    if isinstance(fact, NotSpherical):
        raise ReductionError(f"clique is not spherical: {fact.describe()}")
    steps: list[QuotientStep] = []
    norm = factorize_clique_step(clique, fact)
    states: list[GroupDescriptor]
    if norm.target != norm.source:
        steps.append(norm)
        states = [INTEGERS] * len(fact.singles)
        states += [ArtinGroupOf(clique.full_subgraph((u, v))) for (u, v, _) in fact.heavy]
    else:
        states = [norm.source]
    for i, state in enumerate(states):
        if isinstance(state, ArtinGroupOf):
            steps.append(reembed(heavy_edge_step(state.graph), states, i))
            states[i] = product_of([INTEGERS, INTEGERS])
    states = [INTEGERS] * fact.rank
    while states:
        steps.append(reembed(kill_coordinate_step(), states, 0))
        states.pop(0)
    return Chain(ArtinGroupOf(clique), tuple(steps))


def tree_reduction(graph: LabelledGraph) -> Chain:
    """Chain from a tree group to the trivial group: fold the least
    valence-one vertex onto its neighbour until one edge remains, quotient
    that edge group onto Z by exponent sum, then kill the Z."""
    if not graph.is_tree():
        raise ReductionError("tree reduction requires a tree")
    steps: list[QuotientStep] = []
    if len(graph.vertices) == 1:
        fact = spherical_factorization(graph)
        steps.append(factorize_clique_step(graph, fact))
        steps.append(kill_coordinate_step())
        return Chain(ArtinGroupOf(graph), tuple(steps))
    H = graph
    while len(H.vertices) > 2:
        v0 = min(v for v in H.vertices if H.degree(v) == 1)
        steps.append(leaf_fold_step(H, v0))
        H = H.full_subgraph(tuple(v for v in H.vertices if v != v0))
    steps.append(edge_exponent_step(H))
    steps.append(kill_coordinate_step())
    return Chain(ArtinGroupOf(graph), tuple(steps))


def completion_chain(graph: LabelledGraph, target: LabelledGraph) -> Chain:
    """Edge-addition steps from `graph` to a supergraph on the same vertices,
    edges added in canonical order."""
    if graph.vertices != target.vertices:
        raise ReductionError("completion requires identical vertex sets")
    for e, m in graph.edges.items():
        if e not in target.edges:
            raise ReductionError(f"target graph is missing edge {e!r}")
        if target.edges[e] != m:
            raise ReductionError(f"label mismatch on shared edge {e!r}")
    added = sorted(e for e in target.edges if e not in graph.edges)
    steps: list[QuotientStep] = []
    H = graph
    for (u, v) in added:
        nxt = LabelledGraph(H.vertices, H.edge_list() + [(u, v, target.edges[(u, v)])])
        steps.append(edge_addition_step(H, nxt))
        H = nxt
    return Chain(ArtinGroupOf(graph), tuple(steps))


def free_product_split(graph: LabelledGraph):
    """Free-product descriptor of a disconnected graph's components."""
    components = graph.connected_components()
    if len(components) < 2:
        raise ReductionError("the graph is connected")
    descriptor = free_product_of([ArtinGroupOf(graph.full_subgraph(c)) for c in components])
    return descriptor, tuple(components)


def compose_free_product(graph: LabelledGraph, components: Sequence[tuple], chains: Sequence[Chain]) -> Chain:
    """Compose component chains across a free product, level by level.

    Each level advances every unfinished component by one step; its kernel is
    a free product of the component kernels and free groups, hence free as
    soon as one component step has a free kernel.  Components that reach the
    trivial group drop out; a single remaining component continues bare."""
    steps: list[QuotientStep] = [free_product_normalize_step(graph, components)]
    states: list[GroupDescriptor] = [ArtinGroupOf(graph.full_subgraph(c)) for c in components]
    pos = [0] * len(components)
    while True:
        active = [i for i in range(len(states)) if states[i] != TRIVIAL]
        if not active:
            break
        if len(active) == 1:
            i = active[0]
            steps.extend(chains[i].steps[pos[i] :])
            break
        source = free_product_of(states)
        order = sorted(active, key=lambda i: states[i].canonical())
        advances = []
        kernel = KERNEL_TRIVIAL
        for slot, i in enumerate(order):
            sub = chains[i].steps[pos[i]]
            advances.append({"index": slot, "step": sub.to_json_obj()})
            if sub.kernel == KERNEL_FREE:
                kernel = KERNEL_FREE
        for i in active:
            states[i] = chains[i].steps[pos[i]].target
            pos[i] += 1
        steps.append(
            QuotientStep(
                source=source,
                target=free_product_of(states),
                kernel=kernel,
                justification=TAG_FREE_PRODUCT,
                map_description="componentwise",
                evidence={"advances": advances},
            )
        )
    return Chain(ArtinGroupOf(graph), tuple(steps))


def compose_direct_product(graph: LabelledGraph, factors: Sequence[tuple], chains: Sequence[Chain]) -> Chain:
    """Compose factor chains across a 2-labelled join, one coordinate at a
    time (factor by factor, in canonical order)."""
    steps: list[QuotientStep] = [join_normalize_step(graph, factors)]
    states: list[GroupDescriptor] = [ArtinGroupOf(graph.full_subgraph(f)) for f in factors]
    for i in range(len(factors)):
        for sub in chains[i].steps:
            steps.append(reembed(sub, states, i))
            states[i] = sub.target
    return Chain(ArtinGroupOf(graph), tuple(steps))
