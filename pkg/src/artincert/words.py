"""Exact element arithmetic in the base-case groups.

Free words, generator substitutions, and canonical normal forms for the two
dihedral-type edge groups:

* the even-edge group  <a, t | t a^n t^-1 = a^n>  (the Baumslag-Solitar group
  BS(n, n)), and
* the odd-edge group   <s, t | s^2 = t^(2k+1)>    (a torus-knot group).

Both are central extensions: a^n (resp. z = s^2 = t^(2k+1)) generates a
central infinite cyclic subgroup, and the quotient is the free product
Z_n * Z (resp. Z_2 * Z_(2k+1)).  An element is therefore written uniquely as
a central power times an alternating syllable word over the quotient, which
gives exact multiplication, inversion and equality.

On top of the normal forms the module provides the abelianized evaluation
maps, vertex-killing retractions, ellipticity tests against the Bass-Serre
trees of the HNN/amalgam structures, and a randomized spot check that sampled
nontrivial kernel elements of those maps never fix a tree vertex.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .graphs import LabelledGraph


class WordError(ValueError):
    """Malformed word syntax or an operation applied to the wrong alphabet."""


_TOKEN = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)(?:\^(-?[0-9]+))?$")


class Word:
    """Freely reduced word: a sequence of (generator, nonzero exponent) pairs
    with adjacent pairs on distinct generators.  The empty word is the
    identity."""

    __slots__ = ("letters",)

    def __init__(self, letters: Iterable[tuple[str, int]] = ()) -> None:
        # letters are assumed reduced; use from_letters on raw input
        self.letters = tuple(letters)

    @staticmethod
    def from_letters(raw: Iterable[tuple[str, int]]) -> "Word":
        stack: list[list] = []
        for gen, exp in raw:
            if not isinstance(exp, int) or isinstance(exp, bool):
                raise WordError(f"exponent must be an integer, got {exp!r}")
            if exp == 0:
                continue
            if stack and stack[-1][0] == gen:
                stack[-1][1] += exp
                if stack[-1][1] == 0:
                    stack.pop()
            else:
                stack.append([gen, exp])
        return Word(tuple((g, e) for g, e in stack))

    @staticmethod
    def parse(text: str) -> "Word":
        """Parse whitespace-separated tokens `gen` or `gen^e` (e nonzero)."""
        raw = []
        for pos, token in enumerate(text.split()):
            m = _TOKEN.match(token)
            if not m:
                raise WordError(f"bad word token {token!r} at position {pos}")
            exp = int(m.group(2)) if m.group(2) is not None else 1
            if exp == 0:
                raise WordError(f"zero exponent in token {token!r} at position {pos}")
            raw.append((m.group(1), exp))
        return Word.from_letters(raw)

    def is_identity(self) -> bool:
        return not self.letters

    def generators(self) -> set:
        return {g for g, _ in self.letters}

    def __mul__(self, other: "Word") -> "Word":
        return Word.from_letters(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(tuple((g, -e) for g, e in reversed(self.letters)))

    def __pow__(self, n: int) -> "Word":
        if n == 0:
            return Word()
        base = self if n > 0 else self.inverse()
        out = base
        for _ in range(abs(n) - 1):
            out = out * base
        return out

    def length(self) -> int:
        return sum(abs(e) for _, e in self.letters)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Word):
            return NotImplemented
        return self.letters == other.letters

    def __hash__(self) -> int:
        return hash(self.letters)

    def __str__(self) -> str:
        if not self.letters:
            return "1"
        return " ".join(g if e == 1 else f"{g}^{e}" for g, e in self.letters)

    def __repr__(self) -> str:
        return f"Word({self.letters!r})"


def word(text: str) -> Word:
    return Word.parse(text)


def free_reduce(raw: Iterable[tuple[str, int]], alphabet: Sequence[str] | None = None) -> Word:
    """Freely reduce a raw letter sequence; validates the alphabet if given."""
    if alphabet is not None:
        allowed = set(alphabet)
        for g, _ in raw:
            if g not in allowed:
                raise WordError(f"unknown generator {g!r}")
    return Word.from_letters(raw)


def substitute(w: Word, mapping: Mapping[str, Word]) -> Word:
    """Image of w under generator -> word substitution, freely reduced."""
    raw: list[tuple[str, int]] = []
    for gen, exp in w.letters:
        if gen not in mapping:
            raise WordError(f"substitution undefined on generator {gen!r}")
        image = mapping[gen] if exp > 0 else mapping[gen].inverse()
        for _ in range(abs(exp)):
            raw.extend(image.letters)
    return Word.from_letters(raw)


# ---------------------------------------------------------------------------
# abelianized evaluation maps


_R_IMAGES = {"a": (1, 1), "t": (0, 1), "x": (1, 0), "y": (0, 1)}


def eval_R(w: Word) -> tuple[int, int]:
    """Rank-2 abelianized image: a -> (1,1), t -> (0,1), x -> (1,0), y -> (0,1)."""
    acc0 = acc1 = 0
    for gen, exp in w.letters:
        try:
            v0, v1 = _R_IMAGES[gen]
        except KeyError:
            raise WordError(f"unknown generator {gen!r} for the rank-2 evaluation") from None
        acc0 += exp * v0
        acc1 += exp * v1
    return (acc0, acc1)


def eval_chi(w: Word, k: int | None = None, dialect: str = "vertex") -> int:
    """Exponent-sum map to Z.

    dialect "vertex": every generator maps to 1.
    dialect "amalgam": s -> 2k+1 and t -> 2 (requires k >= 1).
    """
    if dialect == "vertex":
        return sum(exp for _, exp in w.letters)
    if dialect == "amalgam":
        if k is None or k < 1:
            raise WordError("the amalgam dialect needs k >= 1")
        weights = {"s": 2 * k + 1, "t": 2}
        total = 0
        for gen, exp in w.letters:
            if gen not in weights:
                raise WordError(f"generator {gen!r} does not belong to the (s, t) alphabet")
            total += exp * weights[gen]
        return total
    raise WordError(f"unknown dialect {dialect!r}")


def eval_retraction(graph: LabelledGraph, w: Word, subset: Iterable[str]) -> Word:
    """Retraction onto the subgroup generated by `subset`: deletes the other
    vertex generators and freely reduces.  Only a homomorphism for even
    graphs, so non-even input is rejected."""
    if not graph.is_even():
        raise WordError("vertex-killing retractions are homomorphisms for even graphs only")
    keep = set(subset)
    for v in keep:
        if not graph.has_vertex(v):
            raise WordError(f"{v!r} is not a vertex of the graph")
    declared = set(graph.vertices)
    for gen, _ in w.letters:
        if gen not in declared:
            raise WordError(f"unknown vertex generator {gen!r}")
    return Word.from_letters((g, e) for g, e in w.letters if g in keep)


# ---------------------------------------------------------------------------
# normal forms


def _cyclic_syllables(syllables: Sequence[tuple[str, int]], combine: Callable[[str, int, int], int]) -> tuple:
    """Cyclically reduce an alternating syllable word in a free product.

    combine(kind, e_last, e_first) returns the normalized exponent of the
    merged syllable (0 means it vanishes).  Central carries are irrelevant
    here, only syllable kinds and survival matter."""
    s = list(syllables)
    while len(s) >= 2 and s[0][0] == s[-1][0]:
        kind = s[0][0]
        merged = combine(kind, s[-1][1], s[0][1])
        s = s[1:-1]
        if merged != 0:
            s.append((kind, merged))
    return tuple(s)


class BSNormalForm:
    """Normal form in BS(n, n) = <a, t | t a^n t^-1 = a^n>.

    `central` is the exponent of the central element a^n; `syllables` is the
    alternating image in Z_n * Z, with "a" exponents in [1, n-1] and "t"
    exponents nonzero.  For n = 1 only "t" syllables occur.  Two words are
    equal in the group iff their normal forms coincide.
    """

    __slots__ = ("n", "central", "syllables")

    def __init__(self, n: int, central: int, syllables: tuple) -> None:
        self.n = n
        self.central = central
        self.syllables = syllables

    def is_identity(self) -> bool:
        return self.central == 0 and not self.syllables

    def __mul__(self, other: "BSNormalForm") -> "BSNormalForm":
        if self.n != other.n:
            raise WordError("cannot multiply normal forms with different n")
        acc = _BSAccumulator(self.n)
        acc.central = self.central
        acc.stack = list(self.syllables)
        acc.push_central(other.central)
        for kind, exp in other.syllables:
            acc.push(kind, exp)
        return acc.result()

    def inverse(self) -> "BSNormalForm":
        acc = _BSAccumulator(self.n)
        acc.push_central(-self.central)
        for kind, exp in reversed(self.syllables):
            acc.push(kind, -exp)
        return acc.result()

    def to_word(self) -> Word:
        """A representative word; the central power is written first."""
        raw = [("a", self.n * self.central)]
        raw += [(kind, exp) for kind, exp in self.syllables]
        return Word.from_letters(raw)

    def is_elliptic(self) -> bool:
        """True iff the element fixes a vertex of the Bass-Serre tree of the
        HNN structure over <a>, i.e. is conjugate into <a>.  Concretely: the
        cyclically reduced syllable word is empty or a single "a" syllable."""
        reduced = _cyclic_syllables(
            self.syllables,
            lambda kind, e1, e2: (e1 + e2) % self.n if kind == "a" else e1 + e2,
        )
        if not reduced:
            return True
        return len(reduced) == 1 and reduced[0][0] == "a"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BSNormalForm):
            return NotImplemented
        return (self.n, self.central, self.syllables) == (other.n, other.central, other.syllables)

    def __hash__(self) -> int:
        return hash((self.n, self.central, self.syllables))

    def __str__(self) -> str:
        if self.is_identity():
            return "1"
        parts = []
        if self.central:
            parts.append(f"(a^{self.n})^{self.central}")
        parts += [g if e == 1 else f"{g}^{e}" for g, e in self.syllables]
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"BSNormalForm(n={self.n}, central={self.central}, syllables={self.syllables!r})"

    def to_json_obj(self) -> dict:
        return {"n": self.n, "central": self.central, "syllables": [list(s) for s in self.syllables]}


class _BSAccumulator:
    __slots__ = ("n", "central", "stack")

    def __init__(self, n: int) -> None:
        self.n = n
        self.central = 0
        self.stack: list[tuple[str, int]] = []

    def push_central(self, q: int) -> None:
        self.central += q

    def push(self, kind: str, exp: int) -> None:
        while True:
            if kind == "a":
                self.central += exp // self.n
                exp %= self.n
            if exp == 0:
                return
            if self.stack and self.stack[-1][0] == kind:
                _, prev = self.stack.pop()
                exp = prev + exp
                continue
            self.stack.append((kind, exp))
            return

    def result(self) -> BSNormalForm:
        return BSNormalForm(self.n, self.central, tuple(self.stack))


def bs_normal_form(w: Word, n: int) -> BSNormalForm:
    """Normal form of a word over {a, t} in BS(n, n)."""
    if n < 1:
        raise WordError("n must be >= 1")
    acc = _BSAccumulator(n)
    for gen, exp in w.letters:
        if gen not in ("a", "t"):
            raise WordError(f"unknown generator {gen!r}, expected a or t")
        acc.push(gen, exp)
    return acc.result()


class DihedralNormalForm:
    """Normal form in G_k = <s, t | s^2 = t^(2k+1)>.

    `central` is the exponent of z = s^2 = t^(2k+1); `syllables` is the
    alternating image in Z_2 * Z_(2k+1): "s" syllables always have exponent 1
    and "t" exponents lie in [1, 2k].
    """

    __slots__ = ("k", "central", "syllables")

    def __init__(self, k: int, central: int, syllables: tuple) -> None:
        self.k = k
        self.central = central
        self.syllables = syllables

    def is_identity(self) -> bool:
        return self.central == 0 and not self.syllables

    def __mul__(self, other: "DihedralNormalForm") -> "DihedralNormalForm":
        if self.k != other.k:
            raise WordError("cannot multiply normal forms with different k")
        acc = _DihedralAccumulator(self.k)
        acc.central = self.central
        acc.stack = list(self.syllables)
        acc.push_central(other.central)
        for kind, exp in other.syllables:
            acc.push(kind, exp)
        return acc.result()

    def inverse(self) -> "DihedralNormalForm":
        acc = _DihedralAccumulator(self.k)
        acc.push_central(-self.central)
        for kind, exp in reversed(self.syllables):
            acc.push(kind, -exp)
        return acc.result()

    def to_word(self) -> Word:
        raw = [("s", 2 * self.central)]
        raw += [(kind, exp) for kind, exp in self.syllables]
        return Word.from_letters(raw)

    def is_elliptic(self) -> bool:
        """True iff conjugate into one of the cyclic vertex groups <s> or <t>
        of the amalgam: the cyclically reduced syllable word has length <= 1."""
        order_t = 2 * self.k + 1
        reduced = _cyclic_syllables(
            self.syllables,
            lambda kind, e1, e2: (e1 + e2) % 2 if kind == "s" else (e1 + e2) % order_t,
        )
        return len(reduced) <= 1

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DihedralNormalForm):
            return NotImplemented
        return (self.k, self.central, self.syllables) == (other.k, other.central, other.syllables)

    def __hash__(self) -> int:
        return hash((self.k, self.central, self.syllables))

    def __str__(self) -> str:
        if self.is_identity():
            return "1"
        parts = []
        if self.central:
            parts.append(f"z^{self.central}")
        parts += [g if e == 1 else f"{g}^{e}" for g, e in self.syllables]
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"DihedralNormalForm(k={self.k}, central={self.central}, syllables={self.syllables!r})"

    def to_json_obj(self) -> dict:
        return {"k": self.k, "central": self.central, "syllables": [list(s) for s in self.syllables]}


class _DihedralAccumulator:
    __slots__ = ("k", "central", "stack")

    def __init__(self, k: int) -> None:
        self.k = k
        self.central = 0
        self.stack: list[tuple[str, int]] = []

    def push_central(self, q: int) -> None:
        self.central += q

    def push(self, kind: str, exp: int) -> None:
        order = 2 if kind == "s" else 2 * self.k + 1
        while True:
            self.central += exp // order
            exp %= order
            if exp == 0:
                return
            if self.stack and self.stack[-1][0] == kind:
                _, prev = self.stack.pop()
                exp = prev + exp
                continue
            self.stack.append((kind, exp))
            return

    def result(self) -> DihedralNormalForm:
        return DihedralNormalForm(self.k, self.central, tuple(self.stack))


def dihedral_normal_form(w: Word, k: int) -> DihedralNormalForm:
    """Normal form of a word over {s, t} in <s, t | s^2 = t^(2k+1)>."""
    if k < 1:
        raise WordError("k must be >= 1")
    acc = _DihedralAccumulator(k)
    for gen, exp in w.letters:
        if gen not in ("s", "t"):
            raise WordError(f"unknown generator {gen!r}, expected s or t")
        acc.push(gen, exp)
    return acc.result()


def is_elliptic(nf) -> bool:
    """Whether a normal form fixes a vertex of the relevant Bass-Serre tree.
    The identity counts as elliptic."""
    return nf.is_elliptic()


# ---------------------------------------------------------------------------
# the two base-case groups as objects


class BaumslagSolitarGroup:
    """BS(n, n) = <a, t | t a^n t^-1 = a^n> on the alphabet (a, t)."""

    alphabet = ("a", "t")

    def __init__(self, n: int) -> None:
        if n < 1:
            raise WordError("n must be >= 1")
        self.n = n

    @property
    def name(self) -> str:
        return f"BS({self.n},{self.n})"

    def relator(self) -> Word:
        return Word.from_letters([("t", 1), ("a", self.n), ("t", -1), ("a", -self.n)])

    def normal_form(self, w: Word) -> BSNormalForm:
        return bs_normal_form(w, self.n)

    def kernel_map(self, w: Word):
        return eval_R(w)

    kernel_zero = (0, 0)
    kernel_map_name = "R"


class OddDihedralGroup:
    """G_k = <s, t | s^2 = t^(2k+1)> on the alphabet (s, t)."""

    alphabet = ("s", "t")

    def __init__(self, k: int) -> None:
        if k < 1:
            raise WordError("k must be >= 1")
        self.k = k

    @property
    def name(self) -> str:
        return f"<s,t | s^2 = t^{2 * self.k + 1}>"

    def relator(self) -> Word:
        return Word.from_letters([("s", 2), ("t", -(2 * self.k + 1))])

    def normal_form(self, w: Word) -> DihedralNormalForm:
        return dihedral_normal_form(w, self.k)

    def kernel_map(self, w: Word):
        return eval_chi(w, k=self.k, dialect="amalgam")

    kernel_zero = 0
    kernel_map_name = "chi"


# ---------------------------------------------------------------------------
# presentation changes between vertex and edge coordinates


@dataclass(frozen=True)
class GeneratorChange:
    """A pair of mutually inverse substitutions between the vertex presentation
    of an edge group and its (a, t) or (s, t) coordinates."""

    source_relators: tuple
    target_relators: tuple
    fwd: Mapping[str, Word]
    bwd: Mapping[str, Word]
    target_group: object


def even_edge_change(n: int) -> GeneratorChange:
    """Vertex presentation <x, y | (xy)^n = (yx)^n> against BS(n, n):
    a = xy, t = y and back x = a t^-1, y = t."""
    if n < 1:
        raise WordError("n must be >= 1")
    xy = Word.from_letters([("x", 1), ("y", 1)])
    yx = Word.from_letters([("y", 1), ("x", 1)])
    src_rel = (xy ** n) * (yx ** n).inverse()
    group = BaumslagSolitarGroup(n)
    fwd = {
        "x": Word.from_letters([("a", 1), ("t", -1)]),
        "y": Word.from_letters([("t", 1)]),
    }
    bwd = {"a": xy, "t": Word.from_letters([("y", 1)])}
    return GeneratorChange((src_rel,), (group.relator(),), fwd, bwd, group)


def odd_edge_change(k: int) -> GeneratorChange:
    """Vertex presentation <x, y | x(yx)^k = (yx)^k y> against
    <s, t | s^2 = t^(2k+1)>: s = x(yx)^k, t = yx and back
    x = s t^-k, y = t^(k+1) s^-1."""
    if k < 1:
        raise WordError("k must be >= 1")
    yx = Word.from_letters([("y", 1), ("x", 1)])
    left = Word.from_letters([("x", 1)]) * (yx ** k)
    right = (yx ** k) * Word.from_letters([("y", 1)])
    src_rel = left * right.inverse()
    group = OddDihedralGroup(k)
    fwd = {
        "x": Word.from_letters([("s", 1), ("t", -k)]),
        "y": Word.from_letters([("t", k + 1), ("s", -1)]),
    }
    bwd = {"s": left, "t": yx}
    return GeneratorChange((src_rel,), (group.relator(),), fwd, bwd, group)


def check_substitution(
    relators_src: Sequence[Word],
    relators_tgt: Sequence[Word],
    fwd: Mapping[str, Word],
    bwd: Mapping[str, Word],
    target_group,
) -> bool:
    """Verify a generator change between two one-relator presentations.

    Checks, via the target group's exact normal form (which also decides the
    source side through fwd):

    * every source relator maps to the identity (fwd is a homomorphism),
    * every target relator pulled back through bwd maps to the identity,
    * fwd(bwd(y)) = y for each target generator,
    * bwd(fwd(x)) = x for each source generator.

    Returns False as soon as one identity fails; raises WordError on alphabet
    mismatches.
    """
    src_gens = set(fwd)
    tgt_gens = set(bwd)
    if set(target_group.alphabet) != tgt_gens:
        raise WordError("bwd must be defined exactly on the target group's alphabet")
    for rel in relators_src:
        if not rel.generators() <= src_gens:
            raise WordError("source relator uses generators outside fwd's domain")
    for rel in relators_tgt:
        if not rel.generators() <= tgt_gens:
            raise WordError("target relator uses generators outside bwd's domain")
    for image in fwd.values():
        if not image.generators() <= tgt_gens:
            raise WordError("fwd image leaves the target alphabet")
    for image in bwd.values():
        if not image.generators() <= src_gens:
            raise WordError("bwd image leaves the source alphabet")

    nf = target_group.normal_form

    def trivial(w: Word) -> bool:
        return nf(w).is_identity()

    # fwd respects the source relators
    for rel in relators_src:
        if not trivial(substitute(rel, fwd)):
            return False
    # bwd pulls target relators back to consequences of the source relators
    for rel in relators_tgt:
        if not trivial(substitute(substitute(rel, bwd), fwd)):
            return False
    # fwd o bwd is the identity on target generators
    for gen in sorted(tgt_gens):
        g = Word.from_letters([(gen, 1)])
        if not trivial(substitute(substitute(g, bwd), fwd) * g.inverse()):
            return False
    # bwd o fwd is the identity on source generators
    for gen in sorted(src_gens):
        g = Word.from_letters([(gen, 1)])
        roundtrip = substitute(substitute(g, fwd), bwd)
        if not trivial(substitute(roundtrip * g.inverse(), fwd)):
            return False
    return True


# ---------------------------------------------------------------------------
# randomized free-kernel spot check


@dataclass
class KernelActionReport:
    """Outcome of sampling kernel elements and testing them for ellipticity.

    A failure (any elliptic nontrivial kernel element) would contradict the
    free-kernel claims this toolkit certifies; `elliptic` lists offending
    words, so an empty list means the check passed.
    """

    group: str
    kernel_map: str
    samples: int
    max_len: int
    seed: int
    kernel_hits: int = 0
    nontrivial: int = 0
    elliptic: list = field(default_factory=list)
    note: str | None = None

    @property
    def ok(self) -> bool:
        return not self.elliptic

    def lines(self) -> list[str]:
        out = [
            f"group {self.group}, kernel of {self.kernel_map}",
            f"samples={self.samples} max_len={self.max_len} seed={self.seed}",
            f"kernel elements sampled: {self.kernel_hits} ({self.nontrivial} nontrivial)",
            f"elliptic nontrivial kernel elements: {len(self.elliptic)}",
        ]
        for w in self.elliptic:
            out.append(f"  counterexample: {w}")
        if self.note:
            out.append(f"note: {self.note}")
        return out

    def __str__(self) -> str:
        return "\n".join(self.lines())

    def to_json_obj(self) -> dict:
        return {
            "group": self.group,
            "kernel_map": self.kernel_map,
            "samples": self.samples,
            "max_len": self.max_len,
            "seed": self.seed,
            "kernel_hits": self.kernel_hits,
            "nontrivial": self.nontrivial,
            "elliptic": list(self.elliptic),
            "ok": self.ok,
            "note": self.note,
        }


def random_word(rng: random.Random, alphabet: Sequence[str], max_len: int) -> Word:
    """Uniform letters g or g^-1 over the alphabet, raw length in [1, max_len]."""
    length = rng.randint(1, max_len)
    raw = [(rng.choice(alphabet), rng.choice((1, -1))) for _ in range(length)]
    return Word.from_letters(raw)


def kernel_free_action_check(
    group,
    samples: int,
    max_len: int,
    seed: int,
    kernel_map: Callable[[Word], object] | None = None,
    kernel_zero: object | None = None,
    map_name: str | None = None,
) -> KernelActionReport:
    """Sample random words, keep those in the kernel of the evaluation map,
    drop the ones that normalize to the identity, and flag any survivor that
    is elliptic.  The underlying kernels act freely on their Bass-Serre trees,
    so a counterexample indicates a bug rather than new mathematics; the
    sampler corroborates, it does not prove.
    """
    if samples < 1 or max_len < 1:
        raise WordError("samples and max_len must be >= 1")
    if kernel_map is None:
        kernel_map = group.kernel_map
        kernel_zero = group.kernel_zero
        map_name = group.kernel_map_name
    report = KernelActionReport(
        group=group.name,
        kernel_map=map_name or "custom",
        samples=samples,
        max_len=max_len,
        seed=seed,
    )
    rng = random.Random(seed)
    for _ in range(samples):
        w = random_word(rng, group.alphabet, max_len)
        if kernel_map(w) != kernel_zero:
            continue
        report.kernel_hits += 1
        nf = group.normal_form(w)
        if nf.is_identity():
            continue
        report.nontrivial += 1
        if nf.is_elliptic():
            report.elliptic.append(str(w))
    if report.kernel_hits == 0:
        report.note = "no kernel elements sampled at this length"
    elif report.nontrivial == 0:
        report.note = "kernel trivial at this scale"
    return report
