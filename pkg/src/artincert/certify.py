"""Rule engine and independent verifier for poly-freeness and FJCw certificates.

`certify_polyfree` assembles a chain of quotient steps with free (or trivial)
kernels from an Artin group descriptor down to the trivial group; the chain,
its claim and the applied rule names form a PolyFreeCertificate.
`certify_fjcw` builds a derivation tree whose leaves are base facts (small
even cliques, large-label even cliques, or an embedded poly-freeness
certificate) and whose internal nodes are closure rules (clique reduction,
2-labelled joins, direct and free products).

`verify_certificate` re-checks a serialized certificate against a graph with
no access to the generator's intermediate state: every step's side conditions
are re-derived from its recorded evidence, source/target bookkeeping is
recomputed, and the heavy-edge and exponent-sum steps are corroborated by a
small randomized free-kernel spot check.

Negative results are never produced: a graph the rules do not reach yields an
Unknown verdict carrying the failed rule attempts.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .graphs import (
    GraphError,
    LabelledGraph,
    NotSpherical,
    graph_from_json_obj,
    join_decomposition,
    spherical_factorization,
)
from .reductions import (
    INTEGERS,
    KERNEL_FREE,
    KERNEL_TRIVIAL,
    KNOWN_TAGS,
    TAG_ADD_EDGE,
    TAG_AMALGAM,
    TAG_COMPLETION,
    TAG_EDGE_EXPONENT,
    TAG_FREE_PRODUCT,
    TAG_HEAVY_EDGE,
    TAG_KILL,
    TAG_LEAF_FOLD,
    TAG_NORMALIZE,
    TAG_SPHERICAL,
    TAG_STAR_SPLIT,
    TRIVIAL,
    ArtinGroupOf,
    Chain,
    DirectProductGroup,
    FreeProductGroup,
    GroupDescriptor,
    QuotientStep,
    ReductionError,
    clique_reduction_chain,
    compose_direct_product,
    compose_free_product,
    descriptor_from_json_obj,
    free_product_of,
    product_of,
    reembed,
    spherical_tower,
    tree_reduction,
)
from .words import BaumslagSolitarGroup, OddDihedralGroup, kernel_free_action_check

CERT_FORMAT_POLYFREE = "artin-cert/1"
CERT_FORMAT_FJC = "artin-fjc/1"

CLAIM_NORMALLY_POLYFREE = "normally-poly-free"
CLAIM_POLYFREE = "poly-free"

# budget for the per-step free-kernel corroboration during verification
_CORROBORATION_SAMPLES = 24
_CORROBORATION_MAX_LEN = 8
_CORROBORATION_SEED = 11


class CertificateError(ValueError):
    """Certificate payload does not match the schema."""


# ---------------------------------------------------------------------------
# certificates and verdicts


@dataclass(frozen=True)
class PolyFreeCertificate:
    graph: LabelledGraph
    claim_kind: str
    length: int
    chain: Chain
    rule_trace: tuple

    def to_json_obj(self) -> dict:
        return {
            "format": CERT_FORMAT_POLYFREE,
            "graph_hash": self.graph.content_hash(),
            "claim": {"kind": self.claim_kind, "length": self.length},
            "chain": self.chain.to_json_obj(),
            "rule_trace": list(self.rule_trace),
        }


@dataclass(frozen=True)
class FjcNode:
    """One derivation node; leaves carry no children."""

    rule: str
    graph: LabelledGraph
    evidence: dict
    children: tuple
    certificate: PolyFreeCertificate | None = None

    def to_json_obj(self) -> dict:
        obj = {
            "rule": self.rule,
            "graph": self.graph.to_json_obj(),
            "evidence": self.evidence,
            "children": [c.to_json_obj() for c in self.children],
        }
        if self.certificate is not None:
            obj["certificate"] = self.certificate.to_json_obj()
        return obj


@dataclass(frozen=True)
class FjcCertificate:
    graph: LabelledGraph
    derivation: FjcNode

    def to_json_obj(self) -> dict:
        return {
            "format": CERT_FORMAT_FJC,
            "graph_hash": self.graph.content_hash(),
            "derivation": self.derivation.to_json_obj(),
        }


@dataclass(frozen=True)
class RuleFailure:
    rule: str
    detail: str


@dataclass(frozen=True)
class Verdict:
    """Certified(certificate) or Unknown(reasons); never a refutation."""

    certificate: object | None = None
    reasons: tuple = ()

    @property
    def certified(self) -> bool:
        return self.certificate is not None

    @staticmethod
    def of(certificate) -> "Verdict":
        return Verdict(certificate=certificate)

    @staticmethod
    def unknown(reasons: Sequence[RuleFailure]) -> "Verdict":
        return Verdict(certificate=None, reasons=tuple(reasons))


def _vset(vertices) -> str:
    return "{" + ", ".join(vertices) + "}"


def _summarize_reasons(reasons: Sequence[RuleFailure]) -> str:
    return "; ".join(f"{r.rule}: {r.detail}" for r in reasons) or "no rule applied"


# ---------------------------------------------------------------------------
# poly-freeness rule engine


def certify_polyfree(graph: LabelledGraph) -> Verdict:
    """Try, in order: single vertex, free product of components, tree
    reduction, 2-labelled join decomposition (for graphs with odd labels),
    and clique reduction followed by spherical towers (for even graphs)."""
    failures: list[RuleFailure] = []

    if len(graph.vertices) == 1:
        return _certified_polyfree(graph, spherical_tower(graph), ("single-vertex",))

    if not graph.is_connected():
        components = graph.connected_components()
        verdicts = [certify_polyfree(graph.full_subgraph(c)) for c in components]
        bad = [
            f"component {_vset(c)}: {_summarize_reasons(v.reasons)}"
            for c, v in zip(components, verdicts)
            if not v.certified
        ]
        if not bad:
            chains = [v.certificate.chain for v in verdicts]
            chain = compose_free_product(graph, components, chains)
            trace = ("free-product",) + tuple(
                f"component {_vset(c)}: " + ", ".join(v.certificate.rule_trace)
                for c, v in zip(components, verdicts)
            )
            return _certified_polyfree(graph, chain, trace)
        failures.append(RuleFailure("free-product", "; ".join(bad)))
        return Verdict.unknown(failures)

    if graph.is_tree():
        return _certified_polyfree(graph, tree_reduction(graph), ("tree",))

    if not graph.is_even():
        decomposition = join_decomposition(graph)
        if len(decomposition) >= 2:
            factors = list(decomposition.factors)
            verdicts = [certify_polyfree(graph.full_subgraph(f)) for f in factors]
            bad = [
                f"factor {_vset(f)}: {_summarize_reasons(v.reasons)}"
                for f, v in zip(factors, verdicts)
                if not v.certified
            ]
            if not bad:
                chains = [v.certificate.chain for v in verdicts]
                chain = compose_direct_product(graph, factors, chains)
                trace = ("join",) + tuple(
                    f"factor {_vset(f)}: " + ", ".join(v.certificate.rule_trace)
                    for f, v in zip(factors, verdicts)
                )
                return _certified_polyfree(graph, chain, trace)
            failures.append(RuleFailure("join", "; ".join(bad)))
        else:
            failures.append(RuleFailure("join", "no 2-labelled join decomposition"))
        failures.append(RuleFailure("even-spherical", "not applicable: the graph has odd labels"))
        return Verdict.unknown(failures)

    chain, bad = _even_connected_chain(graph)
    if chain is not None:
        return _certified_polyfree(graph, chain, ("even-spherical",))
    failures.append(RuleFailure("even-spherical", "; ".join(bad)))
    return Verdict.unknown(failures)


def _even_connected_chain(graph: LabelledGraph):
    """Clique-reduction chain plus one spherical tower per final clique.
    Returns (chain, None) or (None, failure details)."""
    reduction, cliques = clique_reduction_chain(graph)
    towers = []
    bad = []
    for clique in cliques:
        sub = graph.full_subgraph(clique)
        fact = spherical_factorization(sub)
        if isinstance(fact, NotSpherical):
            bad.append(f"clique {_vset(clique)} is not spherical: {fact.describe()}")
        else:
            towers.append(spherical_tower(sub))
    if bad:
        return None, bad
    steps = list(reduction.steps)
    states: list[GroupDescriptor] = [ArtinGroupOf(graph.full_subgraph(c)) for c in cliques]
    for i, tower in enumerate(towers):
        for sub_step in tower.steps:
            steps.append(reembed(sub_step, states, i))
            states[i] = sub_step.target
    return Chain(ArtinGroupOf(graph), tuple(steps)), None


def _certified_polyfree(graph: LabelledGraph, chain: Chain, trace: tuple) -> Verdict:
    cert = PolyFreeCertificate(
        graph=graph,
        claim_kind=CLAIM_NORMALLY_POLYFREE,
        length=chain.free_length(),
        chain=chain,
        rule_trace=trace,
    )
    return Verdict.of(cert)


# ---------------------------------------------------------------------------
# FJCw rule engine


def certify_fjcw(graph: LabelledGraph) -> Verdict:
    """Try, in order: an embedded poly-freeness certificate, the even clique
    base facts (through clique reduction when needed), and free-product or
    direct-product recursion."""
    failures: list[RuleFailure] = []

    pf = certify_polyfree(graph)
    if pf.certified:
        node = FjcNode("NormallyPolyFree", graph, {}, (), certificate=pf.certificate)
        return Verdict.of(FjcCertificate(graph, node))
    failures.append(RuleFailure("normally-poly-free", _summarize_reasons(pf.reasons)))

    if graph.is_even() and graph.is_connected():
        if graph.is_clique():
            node = _base_fact_node(graph)
            if isinstance(node, FjcNode):
                return Verdict.of(FjcCertificate(graph, node))
            failures.append(RuleFailure("even-clique-base", node))
        else:
            reduction, cliques = clique_reduction_chain(graph)
            children = []
            bad = []
            for clique in cliques:
                node = _base_fact_node(graph.full_subgraph(clique))
                if isinstance(node, FjcNode):
                    children.append(node)
                else:
                    bad.append(node)
            if not bad:
                root = FjcNode(
                    "CliqueReduction",
                    graph,
                    {
                        "steps": reduction.to_json_obj(),
                        "cliques": [list(c) for c in cliques],
                    },
                    tuple(children),
                )
                return Verdict.of(FjcCertificate(graph, root))
            failures.append(RuleFailure("clique-reduction", "; ".join(bad)))

    if not graph.is_connected():
        components = graph.connected_components()
        verdicts = [certify_fjcw(graph.full_subgraph(c)) for c in components]
        bad = [
            f"component {_vset(c)}: {_summarize_reasons(v.reasons)}"
            for c, v in zip(components, verdicts)
            if not v.certified
        ]
        if not bad:
            root = FjcNode(
                "FreeProduct",
                graph,
                {"components": [list(c) for c in components]},
                tuple(v.certificate.derivation for v in verdicts),
            )
            return Verdict.of(FjcCertificate(graph, root))
        failures.append(RuleFailure("free-product", "; ".join(bad)))
    else:
        decomposition = join_decomposition(graph)
        if len(decomposition) >= 2:
            factors = list(decomposition.factors)
            verdicts = [certify_fjcw(graph.full_subgraph(f)) for f in factors]
            bad = [
                f"factor {_vset(f)}: {_summarize_reasons(v.reasons)}"
                for f, v in zip(factors, verdicts)
                if not v.certified
            ]
            if not bad:
                root = FjcNode(
                    "DirectProduct",
                    graph,
                    {"factors": [list(f) for f in factors]},
                    tuple(v.certificate.derivation for v in verdicts),
                )
                return Verdict.of(FjcCertificate(graph, root))
            failures.append(RuleFailure("direct-product", "; ".join(bad)))

    return Verdict.unknown(failures)


def _base_fact_node(sub: LabelledGraph):
    """Base fact for an even clique: all labels >= 6, at most 3 vertices, or
    a 2-labelled join of base cliques.  Returns an FjcNode or a failure
    string."""
    name = _vset(sub.vertices)
    if not sub.is_clique():
        return f"{name} is not a clique"
    if not sub.is_even():
        return f"clique {name} has odd labels"
    if sub.edges and all(m >= 6 for m in sub.edges.values()):
        return FjcNode("CliqueAllLabelsAtLeast6", sub, {}, ())
    if len(sub.vertices) <= 3:
        return FjcNode("CliqueAtMost3", sub, {}, ())
    decomposition = join_decomposition(sub)
    if len(decomposition) >= 2:
        children = []
        for factor in decomposition:
            child = _base_fact_node(sub.full_subgraph(factor))
            if not isinstance(child, FjcNode):
                return f"clique {name}: join factor fails: {child}"
            children.append(child)
        return FjcNode(
            "JoinOf2Labelled",
            sub,
            {"factors": [list(f) for f in decomposition]},
            tuple(children),
        )
    return f"clique {name}: more than 3 vertices, some label below 6, and no 2-labelled join"


# ---------------------------------------------------------------------------
# the independent verifier


@dataclass
class VerificationResult:
    ok: bool = True
    failures: list = field(default_factory=list)
    lines: list = field(default_factory=list)

    def fail(self, index, location: str, reason: str) -> None:
        self.ok = False
        self.failures.append({"index": index, "location": location, "reason": reason})
        self.lines.append(f"FAIL {location}: {reason}")

    @property
    def first_failure_index(self):
        return self.failures[0]["index"] if self.failures else None

    def render(self) -> str:
        head = "certificate accepted" if self.ok else "certificate rejected"
        return "\n".join([head] + self.lines)

    def to_json_obj(self) -> dict:
        return {"ok": self.ok, "failures": self.failures, "report": self.lines}


class _CheckFail(Exception):
    pass


def _parse_descriptor(obj, what: str) -> GroupDescriptor:
    try:
        return descriptor_from_json_obj(obj)
    except (ReductionError, GraphError) as exc:
        raise _CheckFail(f"bad {what} descriptor: {exc}") from None


def _parse_evidence_graph(desc: GroupDescriptor, what: str) -> LabelledGraph:
    if not isinstance(desc, ArtinGroupOf):
        raise _CheckFail(f"{what} must be an Artin descriptor")
    return desc.graph


def _remove_factor(factors: tuple, local: GroupDescriptor) -> list:
    for i, f in enumerate(factors):
        if f == local:
            return list(factors[:i] + factors[i + 1 :])
    raise _CheckFail("evidence factor does not occur in the source product")


_corroboration_cache: dict = {}


def _corroborate_edge_step(tag: str, label: int) -> None:
    """Randomized spot check that the step's kernel has no elliptic nontrivial
    elements; cached per group since the check is deterministic."""
    if tag == TAG_HEAVY_EDGE or label % 2 == 0:
        n = label // 2
        key = ("bs-R", n) if tag == TAG_HEAVY_EDGE else ("bs-chi", n)
        if key not in _corroboration_cache:
            group = BaumslagSolitarGroup(n)
            if tag == TAG_HEAVY_EDGE:
                report = kernel_free_action_check(
                    group, _CORROBORATION_SAMPLES, _CORROBORATION_MAX_LEN, _CORROBORATION_SEED
                )
            else:
                # exponent-sum map in (a, t) coordinates: a -> 2, t -> 1
                report = kernel_free_action_check(
                    group,
                    _CORROBORATION_SAMPLES,
                    _CORROBORATION_MAX_LEN,
                    _CORROBORATION_SEED,
                    kernel_map=lambda w: sum(
                        e * (2 if g == "a" else 1) for g, e in w.letters
                    ),
                    kernel_zero=0,
                    map_name="chi",
                )
            _corroboration_cache[key] = report
        report = _corroboration_cache[key]
    else:
        k = (label - 1) // 2
        key = ("dihedral-chi", k)
        if key not in _corroboration_cache:
            group = OddDihedralGroup(k)
            _corroboration_cache[key] = kernel_free_action_check(
                group, _CORROBORATION_SAMPLES, _CORROBORATION_MAX_LEN, _CORROBORATION_SEED
            )
        report = _corroboration_cache[key]
    if not report.ok:
        raise _CheckFail(
            f"free-kernel spot check found an elliptic nontrivial kernel element: {report.elliptic[0]}"
        )


def _check_edge_evidence(graph: LabelledGraph, evidence: Mapping, even_only: bool) -> int:
    if len(graph.vertices) != 2 or len(graph.edges) != 1:
        raise _CheckFail("the acted factor must be a single-edge graph")
    ((u, v), m) = next(iter(graph.edges.items()))
    edge = evidence.get("edge")
    if edge != [u, v, m] and edge != (u, v, m):
        raise _CheckFail(f"evidence edge {edge!r} does not match the factor edge [{u}, {v}, {m}]")
    if even_only and m % 2 != 0:
        raise _CheckFail("rule applies to even labels only")
    return m


def _local_results(tag: str, local: GroupDescriptor, evidence: Mapping):
    """Re-derive the factors a step must produce from its local source and
    evidence.  Returns (results, expected kernel class)."""
    if tag == TAG_HEAVY_EDGE:
        graph = _parse_evidence_graph(local, "acted factor")
        label = _check_edge_evidence(graph, evidence, even_only=True)
        _corroborate_edge_step(tag, label)
        return [INTEGERS, INTEGERS], KERNEL_FREE

    if tag == TAG_EDGE_EXPONENT:
        graph = _parse_evidence_graph(local, "acted factor")
        label = _check_edge_evidence(graph, evidence, even_only=False)
        _corroborate_edge_step(tag, label)
        return [INTEGERS], KERNEL_FREE

    if tag == TAG_KILL:
        if local != INTEGERS:
            raise _CheckFail("coordinate kills act on an integers factor")
        return [], KERNEL_FREE

    if tag == TAG_SPHERICAL:
        graph = _parse_evidence_graph(local, "acted factor")
        if not graph.is_clique():
            raise _CheckFail("spherical factorization evidence on a non-clique")
        if not graph.is_even():
            raise _CheckFail("spherical factorization requires even labels")
        singles = evidence.get("singles")
        heavy = evidence.get("heavy")
        if not isinstance(singles, list) or not isinstance(heavy, list):
            raise _CheckFail("factorization evidence needs singles and heavy lists")
        covered = list(singles)
        heavy_pairs = {}
        for item in heavy:
            if not (isinstance(item, (list, tuple)) and len(item) == 3):
                raise _CheckFail(f"bad heavy factor {item!r}")
            u, v, m = item
            covered += [u, v]
            heavy_pairs[(u, v) if u < v else (v, u)] = m
        if sorted(covered) != list(graph.vertices):
            raise _CheckFail("factorization does not partition the clique's vertices")
        for (u, v), m in graph.edges.items():
            if (u, v) in heavy_pairs:
                if m != heavy_pairs[(u, v)]:
                    raise _CheckFail(f"heavy factor label mismatch on ({u}, {v})")
                if m < 4 or m % 2 != 0:
                    raise _CheckFail(f"heavy factor ({u}, {v}) must carry an even label >= 4")
            elif m != 2:
                raise _CheckFail(
                    f"pair ({u}, {v}) is labelled {m} but lies in no heavy factor: not a matching"
                )
        results: list[GroupDescriptor] = [INTEGERS] * len(singles)
        results += [ArtinGroupOf(graph.full_subgraph(p)) for p in sorted(heavy_pairs)]
        return results, KERNEL_TRIVIAL

    if tag in (TAG_STAR_SPLIT, TAG_AMALGAM):
        graph = _parse_evidence_graph(local, "acted factor")
        if not graph.is_even():
            raise _CheckFail("star splits require an even graph")
        v0 = evidence.get("vertex")
        if v0 not in graph.vertices:
            raise _CheckFail(f"split vertex {v0!r} is not in the acted factor")
        star = graph.star(v0)
        if len(star) == len(graph.vertices):
            raise _CheckFail(f"the star of {v0!r} is the whole graph")
        rest = tuple(v for v in graph.vertices if v != v0)
        if evidence.get("star") != list(star):
            raise _CheckFail("recorded star does not match the graph")
        if evidence.get("link") != list(graph.link(v0)):
            raise _CheckFail("recorded link does not match the graph")
        if evidence.get("rest") != list(rest):
            raise _CheckFail("recorded rest does not match the graph")
        return (
            [ArtinGroupOf(graph.full_subgraph(star)), ArtinGroupOf(graph.full_subgraph(rest))],
            KERNEL_FREE,
        )

    if tag == TAG_LEAF_FOLD:
        graph = _parse_evidence_graph(local, "acted factor")
        v0 = evidence.get("vertex")
        if v0 not in graph.vertices:
            raise _CheckFail(f"fold vertex {v0!r} is not in the acted factor")
        if graph.degree(v0) != 1:
            raise _CheckFail(f"fold vertex {v0!r} does not have valence one")
        (w0,) = graph.neighbors(v0)
        if evidence.get("onto") != w0:
            raise _CheckFail(f"fold target {evidence.get('onto')!r} is not the neighbour of {v0!r}")
        rest = tuple(v for v in graph.vertices if v != v0)
        return [ArtinGroupOf(graph.full_subgraph(rest))], KERNEL_FREE

    if tag in (TAG_ADD_EDGE, TAG_COMPLETION):
        graph = _parse_evidence_graph(local, "acted factor")
        edge = evidence.get("edge")
        if not (isinstance(edge, (list, tuple)) and len(edge) == 3):
            raise _CheckFail(f"bad added-edge evidence {edge!r}")
        u, v, m = edge
        if u not in graph.vertices or v not in graph.vertices or u == v:
            raise _CheckFail("added edge endpoints must be distinct vertices of the source graph")
        if graph.has_edge(u, v):
            raise _CheckFail(f"({u}, {v}) is already an edge; not an addition")
        if not isinstance(m, int) or m < 2:
            raise _CheckFail(f"added edge label must be an integer >= 2, got {m!r}")
        enlarged = LabelledGraph(graph.vertices, graph.edge_list() + [(u, v, m)])
        return [ArtinGroupOf(enlarged)], KERNEL_FREE

    if tag == TAG_NORMALIZE:
        graph = _parse_evidence_graph(local, "acted factor")
        kind = evidence.get("kind")
        if kind == "join-product":
            factors = evidence.get("factors")
            if not isinstance(factors, list) or len(factors) < 2:
                raise _CheckFail("join normalization needs at least two factors")
            flat = [v for f in factors for v in f]
            if sorted(flat) != list(graph.vertices):
                raise _CheckFail("join factors do not partition the vertices")
            member = {v: i for i, f in enumerate(factors) for v in f}
            for u in graph.vertices:
                for v in graph.vertices:
                    if u < v and member[u] != member[v]:
                        if not graph.has_edge(u, v) or graph.label(u, v) != 2:
                            raise _CheckFail(
                                f"cross pair ({u}, {v}) is not an edge labelled 2"
                            )
            return [ArtinGroupOf(graph.full_subgraph(f)) for f in factors], KERNEL_TRIVIAL
        if kind == "free-product":
            components = evidence.get("components")
            expected = [list(c) for c in graph.connected_components()]
            if components != expected:
                raise _CheckFail("recorded components do not match the graph")
            if len(components) < 2:
                raise _CheckFail("free-product normalization needs a disconnected graph")
            subs = [ArtinGroupOf(graph.full_subgraph(c)) for c in components]
            return [free_product_of(subs)], KERNEL_TRIVIAL
        raise _CheckFail(f"unknown normalization kind {kind!r}")

    if tag == TAG_FREE_PRODUCT:
        if not isinstance(local, FreeProductGroup):
            raise _CheckFail("component advances act on a free product")
        advances = evidence.get("advances")
        if not isinstance(advances, list) or not advances:
            raise _CheckFail("component advance evidence missing")
        factors = list(local.factors)
        seen = set()
        kernel = KERNEL_TRIVIAL
        for adv in advances:
            if not isinstance(adv, Mapping):
                raise _CheckFail(f"bad advance entry {adv!r}")
            idx = adv.get("index")
            if not isinstance(idx, int) or not (0 <= idx < len(factors)) or idx in seen:
                raise _CheckFail(f"bad advance index {idx!r}")
            seen.add(idx)
            sub_source, sub_target, sub_kernel = _check_step_obj(adv.get("step"))
            if sub_source != local.factors[idx]:
                raise _CheckFail(f"advance {idx} does not start at its component state")
            factors[idx] = sub_target
            if sub_kernel == KERNEL_FREE:
                kernel = KERNEL_FREE
        return [free_product_of(factors)], kernel

    raise _CheckFail(f"unknown rule tag {tag!r}")


def _check_step_obj(obj) -> tuple:
    """Validate one serialized step: evidence side conditions, target
    reconstruction and kernel class.  Returns (source, target, kernel)."""
    if not isinstance(obj, Mapping):
        raise _CheckFail("step is not an object")
    for key in ("source", "target", "kernel", "justification"):
        if key not in obj:
            raise _CheckFail(f"step is missing the {key!r} key")
    tag = obj["justification"]
    if tag not in KNOWN_TAGS:
        raise _CheckFail(f"unknown rule tag {tag!r}")
    source = _parse_descriptor(obj["source"], "source")
    target = _parse_descriptor(obj["target"], "target")
    kernel = obj["kernel"]
    evidence = obj.get("evidence", {})
    if not isinstance(evidence, Mapping):
        raise _CheckFail("evidence must be an object")

    if "factor" in evidence:
        local = _parse_descriptor(evidence["factor"], "evidence factor")
        if not isinstance(source, DirectProductGroup):
            raise _CheckFail("a step scoped to a factor needs a product source")
        remaining = _remove_factor(source.factors, local)
    else:
        local = source
        remaining = None

    results, expected_kernel = _local_results(tag, local, evidence)
    expected_target = product_of((remaining or []) + results) if remaining is not None else product_of(results)
    if expected_target != target:
        raise _CheckFail("target descriptor does not follow from the evidence")
    if kernel != expected_kernel:
        raise _CheckFail(f"kernel class must be {expected_kernel!r}, certificate says {kernel!r}")
    return source, target, kernel


def _kernel_weight(kernel) -> int:
    if kernel == KERNEL_FREE:
        return 1
    if kernel == KERNEL_TRIVIAL:
        return 0
    if isinstance(kernel, Mapping) and set(kernel) == {"poly-free"}:
        return int(kernel["poly-free"])
    raise _CheckFail(f"unknown kernel class {kernel!r}")


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise CertificateError(message)


def verify_certificate(cert, graph: LabelledGraph) -> VerificationResult:
    """Re-check a certificate against a graph.  Accepts parsed JSON objects or
    certificate values; schema-level garbage raises CertificateError, anything
    else is reported as a rejection naming the first failing step."""
    if isinstance(cert, (PolyFreeCertificate, FjcCertificate)):
        cert = cert.to_json_obj()
    _require(isinstance(cert, Mapping), "certificate must be a JSON object")
    fmt = cert.get("format")
    if fmt == CERT_FORMAT_POLYFREE:
        return _verify_polyfree(cert, graph)
    if fmt == CERT_FORMAT_FJC:
        return _verify_fjc(cert, graph)
    raise CertificateError(f"unsupported certificate format {fmt!r}")


def _verify_polyfree(cert: Mapping, graph: LabelledGraph) -> VerificationResult:
    _require(isinstance(cert.get("graph_hash"), str), 'missing "graph_hash"')
    _require(isinstance(cert.get("chain"), list), '"chain" must be a list')
    claim = cert.get("claim")
    _require(isinstance(claim, Mapping) and "kind" in claim and "length" in claim,
             '"claim" must carry kind and length')

    result = VerificationResult()
    if cert["graph_hash"] != graph.content_hash():
        result.fail(None, "binding", "graph hash mismatch: certificate was issued for a different graph")
        return result

    current = ArtinGroupOf(graph)
    weights = []
    for i, step_obj in enumerate(cert["chain"]):
        try:
            source, target, kernel = _check_step_obj(step_obj)
            if source != current:
                raise _CheckFail("source does not match the previous step's target")
            weights.append(_kernel_weight(kernel))
        except _CheckFail as exc:
            result.fail(i, f"chain[{i}]", str(exc))
            return result
        current = target
        result.lines.append(f"chain[{i}] [{step_obj['justification']}] ok")

    if current != TRIVIAL:
        index = len(cert["chain"]) - 1 if cert["chain"] else None
        result.fail(index, "chain", "chain does not end at the trivial group")
        return result

    kind = claim["kind"]
    if kind == CLAIM_NORMALLY_POLYFREE:
        if any(w not in (0, 1) for w in weights):
            result.fail(None, "claim", "normally-poly-free chains admit free kernels only")
            return result
    elif kind != CLAIM_POLYFREE:
        result.fail(None, "claim", f"unknown claim kind {kind!r}")
        return result
    expected_length = sum(weights)
    if claim["length"] != expected_length:
        result.fail(None, "claim", f"claim length {claim['length']} != {expected_length} from the chain")
        return result
    result.lines.append(f"claim {kind} length {expected_length} ok")
    return result


_FJC_RULES = {
    "NormallyPolyFree",
    "CliqueAtMost3",
    "CliqueAllLabelsAtLeast6",
    "JoinOf2Labelled",
    "CliqueReduction",
    "DirectProduct",
    "FreeProduct",
    "Subgraph",
}

_BASE_FACT_RULES = {"CliqueAtMost3", "CliqueAllLabelsAtLeast6", "JoinOf2Labelled"}


class _NodeFail(Exception):
    def __init__(self, index: int, reason: str) -> None:
        super().__init__(reason)
        self.index = index
        self.reason = reason


def _verify_fjc(cert: Mapping, graph: LabelledGraph) -> VerificationResult:
    _require(isinstance(cert.get("graph_hash"), str), 'missing "graph_hash"')
    _require(isinstance(cert.get("derivation"), Mapping), '"derivation" must be an object')

    result = VerificationResult()
    if cert["graph_hash"] != graph.content_hash():
        result.fail(None, "binding", "graph hash mismatch: certificate was issued for a different graph")
        return result

    counter = itertools.count()
    try:
        _walk_fjc_node(cert["derivation"], graph, counter, result)
    except _NodeFail as exc:
        result.fail(exc.index, f"derivation[{exc.index}]", exc.reason)
    return result


def _walk_fjc_node(node, expected_graph, counter, result) -> None:
    index = next(counter)

    def fail(reason: str):
        raise _NodeFail(index, reason)

    if not isinstance(node, Mapping):
        fail("derivation node is not an object")
    rule = node.get("rule")
    if rule not in _FJC_RULES:
        fail(f"unknown derivation rule {rule!r}")
    try:
        g = graph_from_json_obj(node.get("graph"))
    except GraphError as exc:
        fail(f"bad node graph: {exc}")
    if expected_graph is not None and g != expected_graph:
        fail("node graph does not match its place in the derivation")
    children = node.get("children", [])
    if not isinstance(children, list):
        fail("children must be a list")
    evidence = node.get("evidence", {})
    if not isinstance(evidence, Mapping):
        fail("evidence must be an object")

    if rule == "NormallyPolyFree":
        if children:
            fail("poly-freeness leaves carry no children")
        inner = node.get("certificate")
        if not isinstance(inner, Mapping):
            fail("missing embedded poly-freeness certificate")
        try:
            report = _verify_polyfree(inner, g)
        except CertificateError as exc:
            fail(f"embedded certificate malformed: {exc}")
        if not report.ok:
            first = report.failures[0]
            fail(f"embedded poly-freeness certificate rejected at {first['location']}: {first['reason']}")
        result.lines.append(f"derivation[{index}] NormallyPolyFree ok")
        return

    if rule == "CliqueAtMost3":
        if children:
            fail("base-fact leaves carry no children")
        if not g.is_clique() or not g.is_even():
            fail("base fact needs an even clique")
        if len(g.vertices) > 3:
            fail("clique has more than 3 vertices")
        result.lines.append(f"derivation[{index}] CliqueAtMost3 ok")
        return

    if rule == "CliqueAllLabelsAtLeast6":
        if children:
            fail("base-fact leaves carry no children")
        if not g.is_clique() or not g.is_even():
            fail("base fact needs an even clique")
        if any(m < 6 for m in g.edges.values()):
            fail("some label is below 6")
        result.lines.append(f"derivation[{index}] CliqueAllLabelsAtLeast6 ok")
        return

    if rule == "JoinOf2Labelled":
        if not g.is_clique() or not g.is_even():
            fail("the join base fact applies to even cliques")
        factors = evidence.get("factors")
        _check_join_evidence(g, factors, fail)
        if len(children) != len(factors):
            fail("one child derivation per join factor is required")
        result.lines.append(f"derivation[{index}] JoinOf2Labelled ok")
        for child, factor in zip(children, factors):
            if not isinstance(child, Mapping) or child.get("rule") not in _BASE_FACT_RULES:
                raise _NodeFail(index, "join children must be base facts")
            _walk_fjc_node(child, g.full_subgraph(factor), counter, result)
        return

    if rule == "CliqueReduction":
        if not g.is_even():
            fail("clique reduction applies to even graphs")
        if not g.is_connected():
            fail("clique reduction applies to connected graphs")
        steps = evidence.get("steps")
        cliques = evidence.get("cliques")
        if not isinstance(steps, list) or not isinstance(cliques, list) or not cliques:
            fail("clique reduction evidence needs steps and cliques")
        current: GroupDescriptor = ArtinGroupOf(g)
        for j, step_obj in enumerate(steps):
            try:
                source, target, _ = _check_step_obj(step_obj)
                if source != current:
                    raise _CheckFail("source does not match the previous step's target")
            except _CheckFail as exc:
                fail(f"reduction step {j}: {exc}")
            current = target
        for c in cliques:
            sub = g.full_subgraph(c)
            if not sub.is_clique():
                fail(f"recorded set {_vset(c)} is not a clique")
        expected = product_of([ArtinGroupOf(g.full_subgraph(c)) for c in cliques])
        if current != expected:
            fail("reduction chain does not end at the product over the recorded cliques")
        if len(children) != len(cliques):
            fail("one child derivation per clique is required")
        result.lines.append(f"derivation[{index}] CliqueReduction ok ({len(steps)} steps)")
        for child, c in zip(children, cliques):
            _walk_fjc_node(child, g.full_subgraph(c), counter, result)
        return

    if rule == "DirectProduct":
        factors = evidence.get("factors")
        _check_join_evidence(g, factors, fail)
        if len(children) != len(factors):
            fail("one child derivation per factor is required")
        result.lines.append(f"derivation[{index}] DirectProduct ok")
        for child, factor in zip(children, factors):
            _walk_fjc_node(child, g.full_subgraph(factor), counter, result)
        return

    if rule == "FreeProduct":
        components = evidence.get("components")
        expected = [list(c) for c in g.connected_components()]
        if components != expected or len(components) < 2:
            fail("recorded components do not match the graph")
        if len(children) != len(components):
            fail("one child derivation per component is required")
        result.lines.append(f"derivation[{index}] FreeProduct ok")
        for child, c in zip(children, components):
            _walk_fjc_node(child, g.full_subgraph(c), counter, result)
        return

    if rule == "Subgraph":
        try:
            supergraph = graph_from_json_obj(evidence.get("supergraph"))
        except GraphError as exc:
            fail(f"bad supergraph evidence: {exc}")
        for v in g.vertices:
            if not supergraph.has_vertex(v):
                fail(f"vertex {v!r} missing from the supergraph")
        for (u, v), m in g.edges.items():
            if not supergraph.has_edge(u, v) or supergraph.label(u, v) != m:
                fail(f"edge ({u}, {v}) missing or relabelled in the supergraph")
        if len(children) != 1:
            fail("subgraph nodes take exactly one child")
        result.lines.append(f"derivation[{index}] Subgraph ok")
        _walk_fjc_node(children[0], supergraph, counter, result)
        return


def _check_join_evidence(g: LabelledGraph, factors, fail) -> None:
    if not isinstance(factors, list) or len(factors) < 2:
        fail("join evidence needs at least two factors")
    flat = [v for f in factors for v in f]
    if sorted(flat) != list(g.vertices):
        fail("join factors do not partition the vertices")
    member = {v: i for i, f in enumerate(factors) for v in f}
    for u in g.vertices:
        for v in g.vertices:
            if u < v and member[u] != member[v]:
                if not g.has_edge(u, v) or g.label(u, v) != 2:
                    fail(f"cross pair ({u}, {v}) is not an edge labelled 2")


# ---------------------------------------------------------------------------
# human-readable explanations


_STEP_DETAIL = {
    TAG_HEAVY_EDGE: lambda e: "heavy edge {0}-{1} (label {2}) onto Z^2".format(*e["edge"]),
    TAG_EDGE_EXPONENT: lambda e: "exponent sum on edge {0}-{1} (label {2})".format(*e["edge"]),
    TAG_SPHERICAL: lambda e: "split into {0} Z factor(s) and {1} heavy edge(s)".format(
        len(e["singles"]), len(e["heavy"])
    ),
    TAG_STAR_SPLIT: lambda e: f"retraction pair at the star of {e['vertex']}",
    TAG_AMALGAM: lambda e: f"retraction pair at the star of {e['vertex']}",
    TAG_LEAF_FOLD: lambda e: f"fold {e['vertex']} onto {e['onto']}",
    TAG_ADD_EDGE: lambda e: "add edge {0}-{1} (label {2})".format(*e["edge"]),
    TAG_COMPLETION: lambda e: "add edge {0}-{1} (label {2})".format(*e["edge"]),
    TAG_KILL: lambda e: "kill one Z coordinate",
    TAG_NORMALIZE: lambda e: f"regroup ({e.get('kind')})",
    TAG_FREE_PRODUCT: lambda e: f"advance {len(e['advances'])} component(s)",
}


def _step_line(i: int, step: QuotientStep) -> str:
    detail = _STEP_DETAIL.get(step.justification, lambda e: "")(step.evidence)
    return (
        f"  q{i + 1} [{step.justification}] ({step.kernel} kernel) "
        f"{step.source.describe()} -> {step.target.describe()}: {detail}"
    )


def _fjc_lines(node: FjcNode, depth: int) -> list:
    pad = "  " * depth
    line = f"{pad}{node.rule} on {_vset(node.graph.vertices)}"
    if node.rule == "CliqueAllLabelsAtLeast6":
        line += " (all labels are at least 6)"
    elif node.rule == "CliqueAtMost3":
        line += " (has at most 3 vertices)"
    elif node.certificate is not None:
        line += f" (normally poly-free, length {node.certificate.length})"
    out = [line]
    for child in node.children:
        out.extend(_fjc_lines(child, depth + 1))
    return out


def explain(verdict: Verdict) -> str:
    """Render a verdict: the applied rules and steps, or the failed attempts."""
    if not verdict.certified:
        lines = ["Unknown: no applicable rule certified the graph."]
        for failure in verdict.reasons:
            lines.append(f"  rule {failure.rule} failed: {failure.detail}")
        return "\n".join(lines)
    cert = verdict.certificate
    if isinstance(cert, PolyFreeCertificate):
        kind = "NormallyPolyFree" if cert.claim_kind == CLAIM_NORMALLY_POLYFREE else "PolyFree"
        lines = [
            f"Certified: {kind}, length {cert.length} "
            f"({len(cert.chain.steps)} chain steps; construction length, not minimal)",
            "rules: " + "; ".join(cert.rule_trace),
        ]
        lines += [_step_line(i, s) for i, s in enumerate(cert.chain.steps)]
        return "\n".join(lines)
    if isinstance(cert, FjcCertificate):
        lines = ["Certified: satisfies FJCw", "derivation:"]
        lines += ["  " + line for line in _fjc_lines(cert.derivation, 0)]
        return "\n".join(lines)
    return "Certified"
