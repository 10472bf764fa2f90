import json
import random

import pytest

from artincert.graphs import LabelledGraph
from artincert.reductions import (
    INTEGERS,
    KERNEL_FREE,
    KERNEL_TRIVIAL,
    TRIVIAL,
    ArtinGroupOf,
    Chain,
    DirectProductGroup,
    FreeProductGroup,
    ReductionError,
    choose_split_vertex,
    clique_reduction_chain,
    completion_chain,
    compose_direct_product,
    compose_free_product,
    descriptor_from_json_obj,
    edge_addition_step,
    free_product_of,
    free_product_split,
    product_of,
    split_at_vertex,
    spherical_tower,
    tree_reduction,
)

from oracles import random_connected_graph


def triangle(mab, mac, mbc):
    return LabelledGraph(["a", "b", "c"], [("a", "b", mab), ("a", "c", mac), ("b", "c", mbc)])


def path_abc(m1, m2):
    return LabelledGraph(["a", "b", "c"], [("a", "b", m1), ("b", "c", m2)])


def four_cycle():
    pairs = [("a", "b"), ("b", "c"), ("c", "d"), ("a", "d")]
    return LabelledGraph(["a", "b", "c", "d"], [(u, v, 2) for u, v in pairs])


def edge(u, v, m):
    return LabelledGraph([u, v], [(u, v, m)])


# ---------------------------------------------------------------------------
# descriptors


def test_product_of_normalizes():
    a = ArtinGroupOf(edge("a", "b", 4))
    assert product_of([]) == TRIVIAL
    assert product_of([a]) == a
    assert product_of([a, TRIVIAL]) == a
    nested = product_of([INTEGERS, product_of([a, INTEGERS])])
    assert isinstance(nested, DirectProductGroup)
    assert len(nested.factors) == 3
    # canonical factor order is independent of construction order
    assert product_of([a, INTEGERS]) == product_of([INTEGERS, a])


def test_free_product_of_normalizes():
    a = ArtinGroupOf(edge("a", "b", 3))
    assert free_product_of([a, TRIVIAL]) == a
    # components keep their identity: nested free products do not flatten
    fp = free_product_of([a, free_product_of([INTEGERS, INTEGERS])])
    assert isinstance(fp, FreeProductGroup)
    assert len(fp.factors) == 2
    # direct and free products are distinct descriptors
    assert product_of([INTEGERS, INTEGERS]) != free_product_of([INTEGERS, INTEGERS])


def test_descriptor_json_roundtrip():
    a = ArtinGroupOf(triangle(2, 2, 6))
    for desc in (TRIVIAL, INTEGERS, a, product_of([a, INTEGERS]), free_product_of([a, a])):
        text = json.dumps(desc.to_json_obj())
        assert descriptor_from_json_obj(json.loads(text)) == desc


def test_composite_needs_two_factors():
    with pytest.raises(ReductionError):
        DirectProductGroup([INTEGERS])


# ---------------------------------------------------------------------------
# star splits


def test_choose_split_vertex():
    assert choose_split_vertex(triangle(2, 2, 2)) is None
    assert choose_split_vertex(path_abc(2, 2)) == "a"
    assert choose_split_vertex(four_cycle()) == "a"


def test_split_at_vertex():
    split = split_at_vertex(path_abc(2, 2), "a")
    assert split.star == ("a", "b") and split.link == ("b",) and split.rest == ("b", "c")
    split = split_at_vertex(four_cycle(), "a")
    assert split.star == ("a", "b", "d") and split.link == ("b", "d")
    assert split.rest == ("b", "c", "d")
    with pytest.raises(ReductionError):
        split_at_vertex(triangle(2, 2, 2), "a")


# ---------------------------------------------------------------------------
# clique reduction


def test_clique_reduction_path():
    g = path_abc(4, 6)
    chain, cliques = clique_reduction_chain(g)
    assert len(chain.steps) == 1
    assert chain.well_formed()
    assert cliques == (("a", "b"), ("b", "c"))
    expected = product_of(
        [ArtinGroupOf(g.full_subgraph(("a", "b"))), ArtinGroupOf(g.full_subgraph(("b", "c")))]
    )
    assert chain.final == expected


def test_clique_reduction_on_clique_is_empty():
    chain, cliques = clique_reduction_chain(triangle(2, 4, 6))
    assert chain.steps == ()
    assert cliques == (("a", "b", "c"),)
    assert chain.final == ArtinGroupOf(triangle(2, 4, 6))


def test_clique_reduction_four_cycle():
    chain, cliques = clique_reduction_chain(four_cycle())
    assert len(chain.steps) == 3
    # the four edge cliques, which here are exactly the maximal cliques
    assert cliques == (("a", "b"), ("a", "d"), ("b", "c"), ("c", "d"))
    assert chain.well_formed()


def test_clique_reduction_rejects_bad_input():
    with pytest.raises(ReductionError, match="even"):
        clique_reduction_chain(path_abc(3, 4))
    disconnected = LabelledGraph(["a", "b"], [])
    with pytest.raises(ReductionError, match="connected"):
        clique_reduction_chain(disconnected)


def test_clique_reduction_random_contract():
    rng = random.Random(99)
    for _ in range(60):
        g = random_connected_graph(rng, 7, (2, 4, 6, 8))
        chain, cliques = clique_reduction_chain(g)
        assert chain.well_formed()
        assert len(chain.steps) <= len(g.vertices) ** 2
        covered = set()
        for clique in cliques:
            sub = g.full_subgraph(clique)
            assert sub.is_clique()
            covered.update(clique)
        assert covered == set(g.vertices)
        assert chain.final == product_of([ArtinGroupOf(g.full_subgraph(c)) for c in cliques])


def test_clique_reduction_deterministic():
    g = random_connected_graph(random.Random(123), 7, (2, 4))
    chain1, _ = clique_reduction_chain(g)
    chain2, _ = clique_reduction_chain(g)
    assert json.dumps(chain1.to_json_obj()) == json.dumps(chain2.to_json_obj())


# ---------------------------------------------------------------------------
# spherical towers


def test_tower_single_vertex():
    chain = spherical_tower(LabelledGraph(["v"], []))
    assert [s.kernel for s in chain.steps] == [KERNEL_TRIVIAL, KERNEL_FREE]
    assert chain.free_length() == 1
    assert chain.final == TRIVIAL


def test_tower_single_edge():
    chain = spherical_tower(edge("a", "b", 6))
    # no regrouping needed: the heavy-edge step then two coordinate kills
    assert len(chain.steps) == 3
    assert chain.free_length() == 3
    assert [s.justification for s in chain.steps] == ["L2.3", "product-coordinate", "product-coordinate"]
    assert chain.final == TRIVIAL and chain.well_formed()


def test_tower_triangle_224():
    chain = spherical_tower(triangle(2, 2, 4))
    assert len(chain.steps) == 5
    assert chain.free_length() == 4
    assert chain.well_formed() and chain.final == TRIVIAL


def test_tower_not_spherical():
    with pytest.raises(ReductionError, match="share"):
        spherical_tower(triangle(4, 4, 4))


def test_tower_length_bookkeeping():
    # free length = heavy count + rank over even spherical cliques up to 5 vertices
    rng = random.Random(55)
    from artincert.graphs import SphericalFactorization, spherical_factorization

    cases = 0
    while cases < 60:
        n = rng.randint(1, 5)
        verts = [chr(ord("a") + i) for i in range(n)]
        edges = [(u, v, rng.choice((2, 2, 4, 6))) for i, u in enumerate(verts) for v in verts[i + 1 :]]
        g = LabelledGraph(verts, edges)
        fact = spherical_factorization(g)
        if not isinstance(fact, SphericalFactorization):
            continue
        cases += 1
        chain = spherical_tower(g)
        heavy = len(fact.heavy)
        assert chain.free_length() == heavy + fact.rank
        assert chain.well_formed() and chain.final == TRIVIAL


# ---------------------------------------------------------------------------
# tree reduction


def test_tree_single_edge_odd():
    chain = tree_reduction(edge("a", "b", 3))
    assert [s.justification for s in chain.steps] == ["L3.4", "product-coordinate"]
    assert chain.free_length() == 2


def test_tree_path():
    chain = tree_reduction(path_abc(3, 4))
    assert [s.justification for s in chain.steps] == ["P3.6", "L3.4", "product-coordinate"]
    assert chain.steps[0].evidence == {"vertex": "a", "onto": "b"}
    assert chain.free_length() == 3


def test_tree_three_leaf_star():
    g = LabelledGraph(
        ["hub", "l1", "l2", "l3"],
        [("hub", "l1", 3), ("hub", "l2", 5), ("hub", "l3", 7)],
    )
    chain = tree_reduction(g)
    assert chain.free_length() == 4
    assert chain.well_formed() and chain.final == TRIVIAL


def test_tree_single_vertex():
    chain = tree_reduction(LabelledGraph(["v"], []))
    assert chain.free_length() == 1


def test_tree_length_formula():
    rng = random.Random(77)
    for _ in range(40):
        n = rng.randint(2, 7)
        verts = [f"v{i:02d}" for i in range(n)]
        edges = [
            (verts[i], verts[rng.randint(0, i - 1)], rng.choice((2, 3, 4, 5)))
            for i in range(1, n)
        ]
        g = LabelledGraph(verts, edges)
        chain = tree_reduction(g)
        assert chain.free_length() == n
        assert chain.well_formed() and chain.final == TRIVIAL


def test_tree_rejects_non_tree():
    with pytest.raises(ReductionError):
        tree_reduction(triangle(2, 2, 2))


# ---------------------------------------------------------------------------
# edge additions and completions


def test_edge_addition_step():
    g1 = LabelledGraph(["a", "b", "c", "d"], [("a", "b", 2), ("c", "d", 2)])
    g2 = LabelledGraph(["a", "b", "c", "d"], [("a", "b", 2), ("c", "d", 2), ("a", "c", 2)])
    step = edge_addition_step(g1, g2)
    assert step.kernel == KERNEL_FREE
    assert step.evidence == {"edge": ["a", "c", 2]}

    p = path_abc(2, 2)
    t = triangle(2, 6, 2)
    step = edge_addition_step(p, t)
    assert step.evidence == {"edge": ["a", "c", 6]}


def test_edge_addition_rejects_label_change():
    g1 = edge("a", "b", 2)
    g2 = edge("a", "b", 4)
    with pytest.raises(ReductionError):
        edge_addition_step(g1, g2)
    with pytest.raises(ReductionError):
        edge_addition_step(g1, LabelledGraph(["a", "b", "c"], [("a", "b", 2)]))


def test_completion_chain():
    g = path_abc(2, 2)
    assert completion_chain(g, g).steps == ()
    chain = completion_chain(g, triangle(2, 2, 2))
    assert len(chain.steps) == 1
    c4 = four_cycle()
    k4 = LabelledGraph(
        ["a", "b", "c", "d"],
        c4.edge_list() + [("a", "c", 2), ("b", "d", 2)],
    )
    chain = completion_chain(c4, k4)
    assert len(chain.steps) == 2
    assert [s.evidence["edge"] for s in chain.steps] == [["a", "c", 2], ["b", "d", 2]]
    assert chain.well_formed() and chain.final == ArtinGroupOf(k4)


def test_completion_rejects_label_mismatch():
    with pytest.raises(ReductionError):
        completion_chain(edge("a", "b", 2), edge("a", "b", 4))


# ---------------------------------------------------------------------------
# free products


def test_free_product_split():
    g = LabelledGraph(["a", "b"], [])
    desc, components = free_product_split(g)
    assert components == (("a",), ("b",))
    assert isinstance(desc, FreeProductGroup)

    g2 = LabelledGraph(["a", "b", "c"], [("b", "c", 4)])
    desc2, comps2 = free_product_split(g2)
    assert comps2 == (("a",), ("b", "c"))

    with pytest.raises(ReductionError):
        free_product_split(edge("a", "b", 2))


def test_compose_free_product_two_vertices():
    g = LabelledGraph(["a", "b"], [])
    comps = g.connected_components()
    chains = [tree_reduction(g.full_subgraph(c)) for c in comps]
    chain = compose_free_product(g, comps, chains)
    assert chain.well_formed() and chain.final == TRIVIAL
    # one normalization level (trivial kernels) and one killing level: F2 has length 1
    assert chain.free_length() == 1
    level_tags = [s.justification for s in chain.steps]
    assert level_tags[0] == "normalize" and set(level_tags[1:]) == {"L2.5"}


def test_compose_free_product_uneven_lengths():
    g = LabelledGraph(["a", "b", "c"], [("b", "c", 3)])
    comps = g.connected_components()
    chains = [tree_reduction(g.full_subgraph(c)) for c in comps]
    chain = compose_free_product(g, comps, chains)
    assert chain.well_formed() and chain.final == TRIVIAL
    # vertex component finishes first, the edge component continues bare
    assert chain.free_length() == 2


def test_compose_direct_product():
    g = triangle(2, 2, 5)  # join of {a} and the 5-edge {b, c}
    factors = [("a",), ("b", "c")]
    chains = [
        tree_reduction(g.full_subgraph(("a",))),
        tree_reduction(g.full_subgraph(("b", "c"))),
    ]
    chain = compose_direct_product(g, factors, chains)
    assert chain.well_formed() and chain.final == TRIVIAL
    assert chain.free_length() == 1 + 2
    assert chain.steps[0].justification == "normalize"
