"""Command-line surface.

Subcommands: classify, certify (polyfree | fjcw), verify, word (nf | eval |
kernel-check) and corpus.  Exit codes are the machine contract:

    0  success / Certified / certificate accepted
    1  Unknown verdict
    2  usage or input error
    3  verification rejection (including failed kernel spot checks)

Stdout carries the payload (human text, or canonical JSON under --json);
stderr carries diagnostics.  All output is deterministic for fixed inputs and
seeds; the corpus command writes a zero placeholder in its timing column
unless --timings is given, since real timings would break byte-stability.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time

from .certify import (
    CertificateError,
    certify_fjcw,
    certify_polyfree,
    explain,
    verify_certificate,
)
from .graphs import (
    GraphError,
    LabelledGraph,
    enumerate_maximal_cliques,
    is_fc_even,
    join_decomposition,
    parse_graph,
    spherical_factorization,
    SphericalFactorization,
)
from .words import (
    BaumslagSolitarGroup,
    OddDihedralGroup,
    Word,
    WordError,
    eval_R,
    eval_chi,
    kernel_free_action_check,
)

EXIT_OK = 0
EXIT_UNKNOWN = 1
EXIT_INPUT = 2
EXIT_REJECTED = 3


def _dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _load_graph(path: str) -> LabelledGraph:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise GraphError(f"cannot read {path}: {exc}") from None
    return parse_graph(text)


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise CertificateError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise CertificateError(f"{path}: syntax error at line {exc.lineno}, column {exc.colno}") from None


def _group_from_args(args) -> object:
    if args.group == "bs":
        if args.n is None:
            raise WordError("--group bs needs --n")
        return BaumslagSolitarGroup(args.n)
    if args.k is None:
        raise WordError("--group dihedral needs --k")
    return OddDihedralGroup(args.k)


# ---------------------------------------------------------------------------
# subcommand bodies


def _cmd_classify(args, out) -> int:
    graph = _load_graph(args.graph)
    even = graph.is_even()
    fc = is_fc_even(graph) if even else None
    cliques = enumerate_maximal_cliques(graph)
    factors = join_decomposition(graph)
    spherical = {}
    if even:
        for clique in cliques:
            fact = spherical_factorization(graph.full_subgraph(clique))
            spherical[",".join(clique)] = isinstance(fact, SphericalFactorization)
    info = {
        "graph_hash": graph.content_hash(),
        "vertices": len(graph.vertices),
        "edges": len(graph.edges),
        "even": even,
        "fc_even": fc,
        "tree": graph.is_tree(),
        "clique": graph.is_clique(),
        "connected": graph.is_connected(),
        "components": [list(c) for c in graph.connected_components()],
        "join_factors": [list(f) for f in factors],
        "maximal_cliques": [list(c) for c in cliques],
        "spherical_maximal_cliques": spherical if even else None,
    }
    if args.json:
        out.write(_dump_json(info) + "\n")
        return EXIT_OK
    out.write(f"graph {info['graph_hash'][:16]}: {info['vertices']} vertices, {info['edges']} edges\n")
    out.write(f"even: {even}" + (f", fc(even): {fc}" if even else "") + "\n")
    out.write(f"tree: {info['tree']}, clique: {info['clique']}, connected: {info['connected']}\n")
    out.write("join factors: " + "; ".join("{" + ",".join(f) + "}" for f in factors) + "\n")
    out.write("maximal cliques: " + "; ".join("{" + ",".join(c) + "}" for c in cliques) + "\n")
    if even:
        for name, ok in spherical.items():
            out.write(f"  clique {{{name}}} spherical: {ok}\n")
    return EXIT_OK


def _cmd_certify(args, out) -> int:
    graph = _load_graph(args.graph)
    verdict = certify_polyfree(graph) if args.kind == "polyfree" else certify_fjcw(graph)
    if verdict.certified and args.output:
        payload = _dump_json(verdict.certificate.to_json_obj()) + "\n"
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(payload)
    if args.json:
        obj = {
            "graph_hash": graph.content_hash(),
            "certified": verdict.certified,
        }
        if verdict.certified:
            obj["certificate"] = verdict.certificate.to_json_obj()
        else:
            obj["reasons"] = [{"rule": r.rule, "detail": r.detail} for r in verdict.reasons]
        out.write(_dump_json(obj) + "\n")
    else:
        out.write(explain(verdict) + "\n")
    return EXIT_OK if verdict.certified else EXIT_UNKNOWN


def _cmd_verify(args, out) -> int:
    cert = _load_json(args.certificate)
    graph = _load_graph(args.graph)
    result = verify_certificate(cert, graph)
    if args.json:
        out.write(_dump_json(result.to_json_obj()) + "\n")
    else:
        out.write(result.render() + "\n")
    return EXIT_OK if result.ok else EXIT_REJECTED


def _cmd_word(args, out) -> int:
    group = _group_from_args(args)
    if args.action == "nf":
        w = Word.parse(args.word)
        nf = group.normal_form(w)
        if args.json:
            out.write(_dump_json(nf.to_json_obj()) + "\n")
        else:
            out.write(str(nf) + "\n")
        return EXIT_OK
    if args.action == "eval":
        w = Word.parse(args.word)
        if args.map == "R":
            image = eval_R(w)
            rendered = "({},{})".format(*image)
            payload = list(image)
        else:
            dialect = args.dialect or ("amalgam" if args.group == "dihedral" else "vertex")
            k = args.k if args.group == "dihedral" else None
            image = eval_chi(w, k=k, dialect=dialect)
            rendered = str(image)
            payload = image
        if args.json:
            out.write(_dump_json({"image": payload}) + "\n")
        else:
            out.write(rendered + "\n")
        return EXIT_OK
    report = kernel_free_action_check(group, args.samples, args.max_len, args.seed)
    if args.json:
        out.write(_dump_json(report.to_json_obj()) + "\n")
    else:
        out.write(str(report) + "\n")
    return EXIT_OK if report.ok else EXIT_REJECTED


def random_graph(rng: random.Random, max_vertices: int, labels) -> LabelledGraph:
    """Edge-probability 1/2 random graph with labels drawn uniformly."""
    n = rng.randint(1, max_vertices)
    vertices = [f"v{i + 1:02d}" for i in range(n)]
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.5:
                edges.append((vertices[i], vertices[j], rng.choice(labels)))
    return LabelledGraph(vertices, edges)


_CORPUS_COLUMNS = (
    "index,hash,vertices,edges,even,fc_even,tree,clique,connected,"
    "join_factors,polyfree,polyfree_length,fjcw,wall_ms"
)


def _cmd_corpus(args, out) -> int:
    labels = sorted({int(s) for s in args.labels.split(",") if s.strip()})
    if not labels or any(m < 2 for m in labels):
        raise GraphError("--labels needs a comma-separated list of integers >= 2")
    if not (1 <= args.max_vertices <= 64):
        raise GraphError("--max-vertices must be between 1 and 64")
    if args.count < 1:
        raise GraphError("--count must be >= 1")
    rng = random.Random(args.seed)
    out.write(
        f"# artin-corpus/1 count={args.count} max_vertices={args.max_vertices} "
        f"labels={','.join(map(str, labels))} seed={args.seed} p=0.5\n"
    )
    out.write(_CORPUS_COLUMNS + "\n")
    totals = {
        "vertices": 0,
        "edges": 0,
        "even": 0,
        "fc": 0,
        "tree": 0,
        "clique": 0,
        "connected": 0,
        "pf": 0,
        "fjc": 0,
        "wall": 0.0,
    }
    for i in range(args.count):
        graph = random_graph(rng, args.max_vertices, labels)
        start = time.perf_counter()
        even = graph.is_even()
        fc = is_fc_even(graph) if even else None
        pf = certify_polyfree(graph)
        fjc = certify_fjcw(graph)
        elapsed = (time.perf_counter() - start) * 1000.0 if args.timings else 0.0
        factors = len(join_decomposition(graph))
        totals["vertices"] += len(graph.vertices)
        totals["edges"] += len(graph.edges)
        totals["even"] += even
        totals["fc"] += bool(fc)
        totals["tree"] += graph.is_tree()
        totals["clique"] += graph.is_clique()
        totals["connected"] += graph.is_connected()
        totals["pf"] += pf.certified
        totals["fjc"] += fjc.certified
        totals["wall"] += elapsed
        row = [
            str(i),
            graph.content_hash()[:16],
            str(len(graph.vertices)),
            str(len(graph.edges)),
            str(even).lower(),
            "" if fc is None else str(fc).lower(),
            str(graph.is_tree()).lower(),
            str(graph.is_clique()).lower(),
            str(graph.is_connected()).lower(),
            str(factors),
            "certified" if pf.certified else "unknown",
            str(pf.certificate.length) if pf.certified else "",
            "certified" if fjc.certified else "unknown",
            f"{elapsed:.3f}",
        ]
        out.write(",".join(row) + "\n")
    summary = [
        "summary",
        "-",
        str(totals["vertices"]),
        str(totals["edges"]),
        str(totals["even"]),
        str(totals["fc"]),
        str(totals["tree"]),
        str(totals["clique"]),
        str(totals["connected"]),
        "",
        str(totals["pf"]),
        "",
        str(totals["fjc"]),
        f"{totals['wall']:.3f}",
    ]
    out.write(",".join(summary) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="artincert",
        description="Certify poly-freeness and FJCw for Artin groups of labelled graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="structural report for a graph file")
    p.add_argument("graph")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("certify", help="produce a certificate or an Unknown verdict")
    p.add_argument("kind", choices=("polyfree", "fjcw"))
    p.add_argument("graph")
    p.add_argument("-o", "--output", help="write the certificate JSON here")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("verify", help="re-check a certificate against a graph")
    p.add_argument("certificate")
    p.add_argument("graph")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("word", help="word arithmetic in the base-case groups")
    word_sub = p.add_subparsers(dest="action", required=True)

    def _word_common(q, with_word: bool) -> None:
        q.add_argument("--group", choices=("bs", "dihedral"), required=True)
        q.add_argument("--n", type=int, help="parameter for the even-edge group BS(n,n)")
        q.add_argument("--k", type=int, help="parameter for the odd-edge group s^2 = t^(2k+1)")
        q.add_argument("--json", action="store_true")
        if with_word:
            q.add_argument("word", help="whitespace-separated tokens gen or gen^e")

    q = word_sub.add_parser("nf", help="canonical normal form of a word")
    _word_common(q, with_word=True)

    q = word_sub.add_parser("eval", help="abelianized image of a word")
    q.add_argument("--map", choices=("R", "chi"), default="R")
    q.add_argument("--dialect", choices=("vertex", "amalgam"))
    _word_common(q, with_word=True)

    q = word_sub.add_parser("kernel-check", help="randomized free-kernel spot check")
    q.add_argument("--samples", type=int, default=1000)
    q.add_argument("--max-len", type=int, default=16)
    q.add_argument("--seed", type=int, default=0)
    _word_common(q, with_word=False)

    p = sub.add_parser("corpus", help="random-graph verdict statistics as CSV")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--max-vertices", type=int, default=7)
    p.add_argument("--labels", default="2,4,6")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--timings", action="store_true", help="measure wall time (breaks byte-stability)")

    return parser


_DISPATCH = {
    "classify": _cmd_classify,
    "certify": _cmd_certify,
    "verify": _cmd_verify,
    "word": _cmd_word,
    "corpus": _cmd_corpus,
}


def run(argv, out=None, err=None) -> int:
    """Dispatch an argv vector; returns the exit code."""
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    try:
        return _DISPATCH[args.command](args, out)
    except (GraphError, WordError, CertificateError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT


def main(argv=None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
