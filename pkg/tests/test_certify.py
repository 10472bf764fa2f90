import copy
import json
import random

import pytest

from artincert.certify import (
    CertificateError,
    FjcCertificate,
    PolyFreeCertificate,
    certify_fjcw,
    certify_polyfree,
    explain,
    verify_certificate,
)
from artincert.graphs import LabelledGraph, is_fc_even
from artincert.reductions import KERNEL_FREE, KERNEL_TRIVIAL

from oracles import random_connected_graph, random_labelled_graph


def triangle(mab, mac, mbc):
    return LabelledGraph(["a", "b", "c"], [("a", "b", mab), ("a", "c", mac), ("b", "c", mbc)])


def complete(names, m):
    edges = [(u, v, m) for i, u in enumerate(names) for v in names[i + 1 :]]
    return LabelledGraph(names, edges)


def star357():
    return LabelledGraph(
        ["hub", "l1", "l2", "l3"],
        [("hub", "l1", 3), ("hub", "l2", 5), ("hub", "l3", 7)],
    )


def roundtrip(graph):
    """Certify, serialize, reparse, verify; returns (verdict, result or None)."""
    verdict = certify_polyfree(graph)
    if not verdict.certified:
        return verdict, None
    payload = json.loads(json.dumps(verdict.certificate.to_json_obj()))
    return verdict, verify_certificate(payload, graph)


# ---------------------------------------------------------------------------
# golden verdicts


def test_golden_triangle_226():
    verdict, result = roundtrip(triangle(2, 2, 6))
    assert verdict.certified
    assert verdict.certificate.claim_kind == "normally-poly-free"
    assert verdict.certificate.length == 4
    assert result.ok


def test_golden_star_357():
    verdict, result = roundtrip(star357())
    assert verdict.certified and verdict.certificate.length == 4
    assert result.ok


def test_golden_triangle_666():
    verdict = certify_fjcw(triangle(6, 6, 6))
    assert verdict.certified
    assert verdict.certificate.derivation.rule == "CliqueAllLabelsAtLeast6"
    assert verify_certificate(verdict.certificate, triangle(6, 6, 6)).ok


def test_golden_triangle_444():
    pf = certify_polyfree(triangle(4, 4, 4))
    assert not pf.certified
    assert any("not spherical" in r.detail for r in pf.reasons)
    fjc = certify_fjcw(triangle(4, 4, 4))
    assert fjc.certified
    assert fjc.certificate.derivation.rule == "CliqueAtMost3"


def test_golden_k4_all_4():
    k4 = complete(["a", "b", "c", "d"], 4)
    assert not certify_polyfree(k4).certified
    assert not certify_fjcw(k4).certified


# ---------------------------------------------------------------------------
# rule coverage


def test_single_vertex():
    g = LabelledGraph(["v"], [])
    verdict, result = roundtrip(g)
    assert verdict.certified and verdict.certificate.length == 1
    assert verdict.certificate.rule_trace[0] == "single-vertex"
    assert result.ok


def test_disconnected_free_product():
    g = LabelledGraph(["a", "b", "c"], [("b", "c", 4)])
    verdict, result = roundtrip(g)
    assert verdict.certified
    assert verdict.certificate.rule_trace[0] == "free-product"
    assert result.ok


def test_odd_join_direct_product():
    verdict, result = roundtrip(triangle(2, 2, 5))
    assert verdict.certified
    assert verdict.certificate.rule_trace[0] == "join"
    # one Z coordinate plus the edge-group chain of length 2
    assert verdict.certificate.length == 3
    assert result.ok


def test_even_join_goes_through_towers():
    # even graphs route to clique reduction and towers for reproducible lengths
    verdict, _ = roundtrip(triangle(2, 2, 6))
    assert verdict.certificate.rule_trace == ("even-spherical",)


def test_raag_four_cycle():
    pairs = [("a", "b"), ("b", "c"), ("c", "d"), ("a", "d")]
    g = LabelledGraph(["a", "b", "c", "d"], [(u, v, 2) for u, v in pairs])
    verdict, result = roundtrip(g)
    assert verdict.certified and result.ok


def test_join_with_odd_edge_factor():
    # join of the vertex {a} with the 5-labelled edge {b, c}
    g = LabelledGraph(["a", "b", "c"], [("a", "b", 2), ("b", "c", 5), ("a", "c", 2)])
    verdict, result = roundtrip(g)
    assert verdict.certified and result.ok


def test_join_with_disconnected_factor():
    # join of the edgeless pair {x1, x2} with a 3-labelled edge: the factor
    # chain passes through a free product nested inside the ambient product
    g = LabelledGraph(
        ["x1", "x2", "y1", "y2"],
        [
            ("x1", "y1", 2),
            ("x1", "y2", 2),
            ("x2", "y1", 2),
            ("x2", "y2", 2),
            ("y1", "y2", 3),
        ],
    )
    verdict, result = roundtrip(g)
    assert verdict.certified and result.ok
    tags = [s.justification for s in verdict.certificate.chain.steps]
    assert "L2.5" in tags


def test_bare_free_product_component_state_roundtrip():
    # one component is a join whose disconnected factor is processed after the
    # ambient product has collapsed, so its mid-chain state is a bare free
    # product; the other component keeps the outer composition active long
    # enough to advance across that state
    edges = [
        ("a1", "a2", 3),
        ("a1", "z1", 2),
        ("a1", "z2", 2),
        ("a2", "z1", 2),
        ("a2", "z2", 2),
        ("p1", "p2", 4),
        ("p2", "p3", 4),
        ("p3", "p4", 4),
        ("p4", "p5", 6),
        ("p5", "p6", 6),
    ]
    g = LabelledGraph(["a1", "a2", "z1", "z2", "p1", "p2", "p3", "p4", "p5", "p6"], edges)
    verdict, result = roundtrip(g)
    assert verdict.certified and result.ok


def test_nested_composition_roundtrip():
    # disconnected graph whose components exercise tree, even and join rules
    g = LabelledGraph(
        ["a", "b", "c", "d", "e", "f"],
        [("a", "b", 3), ("c", "d", 2), ("c", "e", 2), ("d", "e", 6)],
    )
    verdict, result = roundtrip(g)
    assert verdict.certified and result.ok


def test_unknown_diagnostics_mention_rules():
    verdict = certify_polyfree(complete(["a", "b", "c", "d"], 4))
    rules = [r.rule for r in verdict.reasons]
    assert "even-spherical" in rules
    text = explain(verdict)
    assert "Unknown" in text and "failed" in text


def test_non_even_non_join_unknown():
    g = triangle(3, 3, 3)
    verdict = certify_polyfree(g)
    assert not verdict.certified
    assert any(r.rule == "join" for r in verdict.reasons)


# ---------------------------------------------------------------------------
# FJCw derivations


def test_fjc_clique_reduction_node():
    g = LabelledGraph(
        ["a", "b", "c", "d"],
        [("a", "b", 4), ("a", "c", 4), ("b", "c", 4), ("c", "d", 2)],
    )
    verdict = certify_fjcw(g)
    assert verdict.certified
    root = verdict.certificate.derivation
    assert root.rule == "CliqueReduction"
    assert {child.rule for child in root.children} == {"CliqueAtMost3"}
    assert verify_certificate(verdict.certificate, g).ok


def test_fjc_join_of_base_cliques():
    # K6 made of two all-4 triangles joined by 2-labelled edges
    left, right = ["a", "b", "c"], ["d", "e", "f"]
    edges = [(u, v, 4) for part in (left, right) for i, u in enumerate(part) for v in part[i + 1 :]]
    edges += [(u, v, 2) for u in left for v in right]
    g = LabelledGraph(left + right, edges)
    verdict = certify_fjcw(g)
    assert verdict.certified
    root = verdict.certificate.derivation
    assert root.rule == "JoinOf2Labelled"
    assert {c.rule for c in root.children} == {"CliqueAtMost3"}
    assert verify_certificate(verdict.certificate, g).ok


def test_fjc_free_product_node():
    g = LabelledGraph(
        ["a", "b", "c", "z"],
        [("a", "b", 4), ("a", "c", 4), ("b", "c", 4)],
    )
    verdict = certify_fjcw(g)
    assert verdict.certified
    assert verdict.certificate.derivation.rule == "FreeProduct"
    assert verify_certificate(verdict.certificate, g).ok


def test_fjc_direct_product_node():
    # non-even join: all-4 triangle joined with a 3-labelled edge
    tri, pair = ["a", "b", "c"], ["d", "e"]
    edges = [(u, v, 4) for i, u in enumerate(tri) for v in tri[i + 1 :]]
    edges.append(("d", "e", 3))
    edges += [(u, v, 2) for u in tri for v in pair]
    g = LabelledGraph(tri + pair, edges)
    verdict = certify_fjcw(g)
    assert verdict.certified
    root = verdict.certificate.derivation
    assert root.rule == "DirectProduct"
    assert verify_certificate(verdict.certificate, g).ok


def test_fjc_embedded_polyfree_leaf():
    g = triangle(2, 2, 6)
    verdict = certify_fjcw(g)
    assert verdict.certified
    assert verdict.certificate.derivation.rule == "NormallyPolyFree"
    assert verify_certificate(verdict.certificate, g).ok


def test_fjc_subgraph_node_verifies():
    # the generator never emits Subgraph nodes; the verifier still checks them
    sub = triangle(4, 4, 4)
    super_g = LabelledGraph(
        ["a", "b", "c", "d"],
        sub.edge_list() + [("a", "d", 2), ("b", "d", 2), ("c", "d", 2)],
    )
    inner = certify_fjcw(super_g)
    assert inner.certified
    node = {
        "rule": "Subgraph",
        "graph": sub.to_json_obj(),
        "evidence": {"supergraph": super_g.to_json_obj()},
        "children": [inner.certificate.derivation.to_json_obj()],
    }
    cert = {
        "format": "artin-fjc/1",
        "graph_hash": sub.content_hash(),
        "derivation": node,
    }
    assert verify_certificate(cert, sub).ok


# ---------------------------------------------------------------------------
# verifier rejections


def _cert_obj(graph):
    verdict = certify_polyfree(graph)
    assert verdict.certified
    return verdict.certificate.to_json_obj()


def test_verify_wrong_graph_hash():
    cert = _cert_obj(triangle(2, 2, 6))
    result = verify_certificate(cert, triangle(2, 2, 4))
    assert not result.ok
    assert result.failures[0]["location"] == "binding"


def test_verify_dropped_step():
    cert = _cert_obj(triangle(2, 2, 6))
    del cert["chain"][1]
    result = verify_certificate(cert, triangle(2, 2, 6))
    assert not result.ok and result.first_failure_index == 1


def test_verify_edited_evidence_label():
    cert = _cert_obj(triangle(2, 2, 6))
    cert["chain"][1]["evidence"]["edge"][2] = 4
    result = verify_certificate(cert, triangle(2, 2, 6))
    assert not result.ok and result.first_failure_index == 1


def test_verify_wrong_kernel_class():
    cert = _cert_obj(triangle(2, 2, 6))
    cert["chain"][0]["kernel"] = KERNEL_FREE
    result = verify_certificate(cert, triangle(2, 2, 6))
    assert not result.ok and result.first_failure_index == 0


def test_verify_wrong_claim_length():
    cert = _cert_obj(triangle(2, 2, 6))
    cert["claim"]["length"] = 7
    result = verify_certificate(cert, triangle(2, 2, 6))
    assert not result.ok
    assert result.failures[0]["location"] == "claim"


def test_verify_truncated_chain():
    cert = _cert_obj(triangle(2, 2, 6))
    cert["chain"] = cert["chain"][:-1]
    result = verify_certificate(cert, triangle(2, 2, 6))
    assert not result.ok
    assert "trivial group" in result.failures[0]["reason"]


def test_verify_schema_garbage():
    with pytest.raises(CertificateError):
        verify_certificate({"format": "bogus/9"}, triangle(2, 2, 6))
    with pytest.raises(CertificateError):
        verify_certificate({"format": "artin-cert/1"}, triangle(2, 2, 6))


def test_verify_fjc_leaf_violations():
    t555 = triangle(5, 5, 5)
    cert = {
        "format": "artin-fjc/1",
        "graph_hash": t555.content_hash(),
        "derivation": {
            "rule": "CliqueAllLabelsAtLeast6",
            "graph": t555.to_json_obj(),
            "evidence": {},
            "children": [],
        },
    }
    result = verify_certificate(cert, t555)
    assert not result.ok and result.first_failure_index == 0


# ---------------------------------------------------------------------------
# structural regressions


def test_no_semidirect_descriptors():
    # group expressions are exactly: trivial, integers, Artin, direct and free
    # products; there is no extension/semidirect constructor for a product
    # rule to be misapplied to
    from artincert import reductions

    kinds = {
        cls.kind
        for cls in vars(reductions).values()
        if isinstance(cls, type)
        and issubclass(cls, reductions.GroupDescriptor)
        and cls is not reductions.GroupDescriptor
        and cls.kind != "?"
    }
    assert kinds == {"trivial", "integers", "artin", "product", "free-product"}


def test_steps_act_on_single_factors():
    # every chain step is either bare or scoped to one recorded factor of a
    # product; no step ever quotients several coordinates at once
    rng = random.Random(300)
    checked = 0
    while checked < 20:
        g = random_connected_graph(rng, 6, (2, 4))
        verdict = certify_polyfree(g)
        if not verdict.certified:
            continue
        checked += 1
        for step in verdict.certificate.chain.steps:
            obj = step.to_json_obj()
            if obj["source"]["kind"] == "product":
                assert "factor" in obj["evidence"]


def test_subgraph_consistency_sample():
    # full subgraphs of certified even FC graphs stay certified
    rng = random.Random(301)
    checked = 0
    while checked < 8:
        g = random_connected_graph(rng, 5, (2, 4, 6))
        if not is_fc_even(g):
            continue
        checked += 1
        verts = list(g.vertices)
        for size in range(1, len(verts) + 1):
            for _ in range(4):
                sub = g.full_subgraph(rng.sample(verts, size))
                assert certify_polyfree(sub).certified


def test_rule_trace_and_explain_render():
    verdict = certify_polyfree(star357())
    text = explain(verdict)
    assert "NormallyPolyFree" in text and "P3.6" in text and "L3.4" in text
    fjc = certify_fjcw(triangle(6, 6, 6))
    assert "CliqueAllLabelsAtLeast6" in explain(fjc)


def test_certificates_are_byte_stable():
    g = random_connected_graph(random.Random(302), 6, (2, 4, 6))
    a = json.dumps(certify_polyfree(g).certificate.to_json_obj(), sort_keys=True)
    b = json.dumps(certify_polyfree(g).certificate.to_json_obj(), sort_keys=True)
    assert a == b


def test_certificate_wire_format_keys():
    g = triangle(2, 2, 6)
    cert = certify_polyfree(g).certificate.to_json_obj()
    assert cert["format"] == "artin-cert/1"
    assert set(cert) == {"format", "graph_hash", "claim", "chain", "rule_trace"}
    assert set(cert["claim"]) == {"kind", "length"}
    for step in cert["chain"]:
        assert {"source", "target", "kernel", "justification", "evidence"} <= set(step)
        assert step["kernel"] in ("free", "trivial")

    fjc = certify_fjcw(triangle(6, 6, 6)).certificate.to_json_obj()
    assert fjc["format"] == "artin-fjc/1"
    assert set(fjc) == {"format", "graph_hash", "derivation"}
    assert {"rule", "graph", "evidence", "children"} <= set(fjc["derivation"])
