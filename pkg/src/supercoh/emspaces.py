"""Low-degree cohomology of K(Z/2, n) and a symbolic Serre evaluator.

Mod-2 cohomology of ``K(Z/2, n)`` is polynomial on ``Sq^I i_n`` for admissible
``I`` of excess below ``n``. Classes here are F2 polynomials in such
generators over named fundamental classes (``c2``, ``m2``, ``t2`` of degree
2 and ``t3`` of degree 3). A ``SymbolicClass`` with ``exponential=True``
stands for ``(-1)^{expr}`` in ``k^x`` cohomology; equality of those classes
is decided modulo an explicit relation database.

Integral information enters through the Bockstein spectral sequence: when
the ``Sq^1``-homology vanishes in degree ``d`` or ``d + 1``, the group
``H^d(-; k^x) = H^{d+1}(-; Z)`` is elementary abelian of rank
``rank(Sq^1: H^d -> H^{d+1})``. Entries outside that criterion come from
the fixture database and are flagged.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import fixtures
from .linalg import gf2_nullspace, gf2_rank, gf2_rref_dense, gf2_solve
from .specseq import Entry, SpectralPage

Word = tuple[int, ...]
Gen = tuple[str, Word]  # (fundamental class, admissible word)
Monomial = tuple[tuple[Gen, int], ...]

# fundamental classes and their degrees; order fixes the normal form
FUNDAMENTAL = {"m2": 2, "c2": 2, "t2": 2, "i2": 2, "t3": 3, "i3": 3}
_BASE_RANK = {name: r for r, name in enumerate(FUNDAMENTAL)}

BASE = ("c2", "m2")
FIBER = ("t3",)
TOTAL = ("c2", "m2", "t3")
COMPARISON = ("t2", "t3")


class DegreeOutOfRange(ValueError):
    pass


# --- Steenrod words ------------------------------------------------------------------


def is_admissible(word: Word) -> bool:
    return all(a >= 2 * b for a, b in zip(word, word[1:])) and all(w > 0 for w in word)


def excess(word: Word) -> int:
    if not word:
        return 0
    return word[0] - sum(word[1:])


@lru_cache(maxsize=None)
def admissible_form(word: Word) -> frozenset[Word]:
    """The F2 sum of admissible words equal to ``word`` by the Adem relations."""
    word = tuple(w for w in word if w)
    for t in range(len(word) - 1):
        a, b = word[t], word[t + 1]
        if a < 2 * b:
            out: set[Word] = set()
            for c in range(a // 2 + 1):
                if comb(b - c - 1, a - 2 * c) % 2:
                    new = word[:t] + (a + b - c, c) + word[t + 2 :]
                    out ^= admissible_form(new)
            return frozenset(out)
    return frozenset([word])


def admissible_words(n: int, max_degree: int) -> list[Word]:
    """Admissible words ``I`` with excess below ``n`` and ``n + |I| <= max_degree``."""
    out: list[Word] = [()]
    budget = max_degree - n

    def grow(word: Word, total: int) -> None:
        last = word[-1] if word else None
        lo = 1
        # extend on the left so the new first entry is at least twice the old one
        first = word[0] if word else 0
        for a in range(max(lo, 2 * first), budget - total + 1):
            w = (a,) + word
            if excess(w) < n:
                out.append(w)
            if excess(w) < n or a <= budget:
                grow(w, total + a)

    grow((), 0)
    words = sorted({w for w in out if sum(w) <= budget and is_admissible(w) and excess(w) < n})
    words.sort(key=lambda w: (sum(w), w))
    return words


@dataclass(frozen=True, order=True)
class AdmissibleMonomial:
    """``Sq^{i_1} ... Sq^{i_k}`` applied to a fundamental class of degree ``n``."""

    word: Word
    n: int
    base: str = ""

    def __post_init__(self) -> None:
        if not is_admissible(self.word):
            raise ValueError(f"{self.word} is not admissible")
        if excess(self.word) >= self.n:
            raise ValueError(f"excess of {self.word} is not below {self.n}")

    @property
    def degree(self) -> int:
        return self.n + sum(self.word)

    @property
    def excess(self) -> int:
        return excess(self.word)

    def __str__(self) -> str:
        return gen_name((self.base or f"i{self.n}", self.word))


def gen_name(g: Gen) -> str:
    return "".join(f"Sq{i}" for i in g[1]) + g[0]


def gen_degree(g: Gen) -> int:
    return FUNDAMENTAL[g[0]] + sum(g[1])


def _gen_key(g: Gen) -> tuple:
    return (_BASE_RANK[g[0]], len(g[1]), g[1])


# --- polynomials -------------------------------------------------------------------------


def _mono(factors: Mapping[Gen, int]) -> Monomial:
    return tuple(sorted(((g, e) for g, e in factors.items() if e), key=lambda ge: _gen_key(ge[0])))


def mono_degree(m: Monomial) -> int:
    return sum(gen_degree(g) * e for g, e in m)


def mono_name(m: Monomial) -> str:
    if not m:
        return "1"
    parts = sorted(m, key=lambda ge: (len(ge[0][1]), _DISPLAY.index(ge[0][0]), ge[0][1]))
    return "".join(gen_name(g) + (f"^{e}" if e > 1 else "") for g, e in parts)


_DISPLAY = ("t3", "i3", "t2", "i2", "c2", "m2")


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    f = dict(a)
    for g, e in b:
        f[g] = f.get(g, 0) + e
    return _mono(f)


def poly_mul(a: frozenset, b: frozenset) -> frozenset:
    out: set[Monomial] = set()
    for x in a:
        for y in b:
            out ^= {mono_mul(x, y)}
    return frozenset(out)


def poly_square(p: frozenset) -> frozenset:
    return frozenset(_mono({g: 2 * e for g, e in m}) for m in p)


def gen_poly(base: str, word: Word) -> frozenset:
    """``Sq^word`` of the fundamental class, for an admissible ``word``."""
    n = FUNDAMENTAL[base]
    e = excess(word)
    if not word or e < n:
        return frozenset([_mono({(base, tuple(word)): 1})])
    if e == n:
        return poly_square(gen_poly(base, word[1:]))
    return frozenset()


def _sq_gen(k: int, g: Gen) -> frozenset:
    if k == 0:
        return frozenset([_mono({g: 1})])
    out: set[Monomial] = set()
    for w in admissible_form((k,) + g[1]):
        out ^= set(gen_poly(g[0], w))
    return frozenset(out)


@lru_cache(maxsize=None)
def _sq_mono(k: int, m: Monomial) -> frozenset:
    if k == 0:
        return frozenset([m])
    if not m:
        return frozenset()
    if k > mono_degree(m):
        return frozenset()
    (g, e), rest = m[0], m[1:]
    first = _mono({g: 1})
    tail = _mono({**dict(rest), **({g: e - 1} if e > 1 else {})})
    out: set[Monomial] = set()
    for i in range(0, k + 1):
        a = _sq_gen(i, g) if i <= gen_degree(g) else frozenset()
        if not a:
            continue
        b = _sq_mono(k - i, tail)
        out ^= set(poly_mul(a, b))
    _ = first
    return frozenset(out)


def sq_poly(k: int, p: frozenset) -> frozenset:
    out: set[Monomial] = set()
    for m in p:
        out ^= set(_sq_mono(k, m))
    return frozenset(out)


def apply_word(word: Word, p: frozenset) -> frozenset:
    for k in reversed(word):
        p = sq_poly(k, p)
    return p


# --- bases ---------------------------------------------------------------------------------


@lru_cache(maxsize=None)
def generators(bases: tuple[str, ...], max_degree: int) -> tuple[Gen, ...]:
    out = []
    for b in bases:
        n = FUNDAMENTAL[b]
        for w in admissible_words(n, max_degree):
            out.append((b, w))
    return tuple(sorted(out, key=_gen_key))


@lru_cache(maxsize=None)
def basis(bases: tuple[str, ...], degree: int) -> tuple[Monomial, ...]:
    """Monomial basis of the mod-2 cohomology of ``prod K(Z/2, |b|)`` in ``degree``."""
    gens = [g for g in generators(bases, degree) if gen_degree(g) <= degree]
    out: list[Monomial] = []

    def rec(idx: int, left: int, acc: dict) -> None:
        if left == 0:
            out.append(_mono(acc))
            return
        if idx == len(gens):
            return
        g = gens[idx]
        d = gen_degree(g)
        for e in range(left // d, -1, -1):
            if e:
                acc[g] = e
            rec(idx + 1, left - e * d, acc)
            acc.pop(g, None)

    if degree == 0:
        return ((),)
    rec(0, degree, {})
    return tuple(sorted(out, key=_mono_key, reverse=True))


def _mono_key(m: Monomial) -> tuple:
    """Normal-form order: the largest monomial of a relation is the one eliminated."""
    count = sum(e for _, e in m)
    exps = []
    for name in FUNDAMENTAL:
        exps.append(sum(e for g, e in m if g[0] == name and not g[1]))
    return (count, tuple(exps), tuple((_gen_key(g), e) for g, e in m))


def em_mod2_basis(n: int, max_degree: int) -> dict[int, list[str]]:
    """Graded monomial basis of ``H^*(K(Z/2, n); Z/2)`` in degrees ``n .. max_degree``."""
    if n not in (2, 3):
        raise DegreeOutOfRange("only K(Z/2, 2) and K(Z/2, 3) are supported")
    if max_degree > n + 4:
        raise DegreeOutOfRange(f"degrees above {n + 4} are not supported")
    base = f"i{n}"
    return {d: [mono_name(m) for m in basis((base,), d)] for d in range(n, max_degree + 1)}


def sq_matrix(bases: tuple[str, ...], k: int, degree: int) -> np.ndarray:
    src = basis(bases, degree)
    tgt = basis(bases, degree + k)
    idx = {m: i for i, m in enumerate(tgt)}
    mat = np.zeros((len(tgt), len(src)), dtype=np.uint8)
    for j, m in enumerate(src):
        for t in _sq_mono(k, m):
            mat[idx[t], j] ^= 1
    return mat


def _rank(mat: np.ndarray) -> int:
    return gf2_rank(mat) if mat.size else 0


def bockstein_e2_dim(bases: tuple[str, ...], degree: int) -> int:
    """Dimension of ``Sq^1``-homology in ``degree``."""
    if degree == 0:
        return 1
    dim = len(basis(bases, degree))
    out_rank = _rank(sq_matrix(bases, 1, degree))
    in_rank = _rank(sq_matrix(bases, 1, degree - 1))
    return dim - out_rank - in_rank


def kx_orders(bases: tuple[str, ...], degree: int) -> list[int] | None:
    """``H^degree(-; k^x)`` when the Bockstein criterion certifies exponent 2, else ``None``."""
    if degree == 0:
        return [0]
    if bockstein_e2_dim(bases, degree) and bockstein_e2_dim(bases, degree + 1):
        return None
    return [2] * _rank(sq_matrix(bases, 1, degree))


# --- symbolic k^x classes and relations ----------------------------------------------------


@dataclass(frozen=True)
class SymbolicClass:
    terms: frozenset
    degree: int
    exponential: bool = True

    @classmethod
    def zero(cls, degree: int, exponential: bool = True) -> "SymbolicClass":
        return cls(frozenset(), degree, exponential)

    def __add__(self, other: "SymbolicClass") -> "SymbolicClass":
        if other.degree != self.degree and self.terms and other.terms:
            raise ValueError("degrees differ")
        deg = self.degree if self.terms else other.degree
        return SymbolicClass(self.terms ^ other.terms, deg, self.exponential)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def expr(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(mono_name(m) for m in sorted(self.terms, key=_display_key))

    def __str__(self) -> str:
        if not self.exponential:
            return self.expr()
        return "0" if not self.terms else f"(-1)^({self.expr()})"


def _display_key(m: Monomial) -> tuple:
    has_t3 = any(g[0] == "t3" for g, _ in m)
    return (not has_t3, -max((len(g[1]) for g, _ in m), default=0), mono_name(m))


_TOKEN = re.compile(r"((?:Sq\d+)*)(" + "|".join(FUNDAMENTAL) + r")(?:\^(\d+))?")


def parse_monomial(text: str) -> Monomial:
    text = text.replace("*", "").replace(" ", "")
    if text == "1":
        return ()
    pos = 0
    factors: dict[Gen, int] = {}
    poly = frozenset([()])
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"cannot parse {text!r}")
        word = tuple(int(x) for x in re.findall(r"Sq(\d+)", m.group(1)))
        e = int(m.group(3) or 1)
        g_poly = frozenset()
        # non-admissible or high-excess words are normalized
        base_poly = frozenset([_mono({(m.group(2), ()): 1})])
        g_poly = apply_word(word, base_poly)
        for _ in range(e):
            poly = poly_mul(poly, g_poly)
        pos = m.end()
    if len(poly) != 1:
        raise ValueError(f"{text!r} is not a single monomial after normalization")
    _ = factors
    return next(iter(poly))


def parse(text: str, exponential: bool = True) -> SymbolicClass:
    """Parse ``"Sq2t3 + t3m2"`` (optionally wrapped as ``(-1)^(...)``)."""
    text = text.strip()
    mo = re.fullmatch(r"\(-1\)\^\((.*)\)", text)
    if mo:
        text = mo.group(1)
        exponential = True
    terms: set[Monomial] = set()
    deg = None
    for part in text.split("+"):
        part = part.strip()
        if not part or part == "0":
            continue
        word_poly = _parse_poly(part)
        for m in word_poly:
            d = mono_degree(m)
            if deg is not None and d != deg:
                raise ValueError(f"inhomogeneous expression {text!r}")
            deg = d
        terms ^= set(word_poly)
    return SymbolicClass(frozenset(terms), deg or 0, exponential)


def _parse_poly(text: str) -> frozenset:
    pos = 0
    poly = frozenset([()])
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse {text!r}")
        word = tuple(int(x) for x in re.findall(r"Sq(\d+)", m.group(1)))
        g = apply_word(word, frozenset([_mono({(m.group(2), ()): 1})]))
        for _ in range(int(m.group(3) or 1)):
            poly = poly_mul(poly, g)
        pos = m.end()
    return poly


DERIVED = "derived"
LITERATURE = "literature"


@dataclass(frozen=True)
class Relation:
    """``(-1)^{lhs} = (-1)^{rhs}`` with a provenance tag."""

    lhs: str
    rhs: str
    tag: str
    source: str

    def difference(self) -> SymbolicClass:
        a, b = parse(self.lhs), parse(self.rhs)
        if a.terms and b.terms and a.degree != b.degree:
            raise ValueError("relation is inhomogeneous")
        return a + b

    def __str__(self) -> str:
        return f"(-1)^({self.lhs}) = (-1)^({self.rhs})" if self.rhs != "0" else f"(-1)^({self.lhs}) = 0"


SQ1_RULE = Relation("Sq1 u", "0", DERIVED, "t -> (-1)^t kills the image of the Bockstein Sq^1")

RELATIONS: tuple[Relation, ...] = (
    Relation("c2Sq1m2", "m2Sq1c2", DERIVED, "(-1)^(Sq1(c2m2)) = 0"),
    Relation("c2^2m2", "c2m2^2", LITERATURE, "stated relation in the (6,0) entry of the Serre page"),
    Relation("c2Sq1c2", "Sq2Sq1c2", LITERATURE, "reduction of the Pontryagin-square Bockstein on c2"),
    Relation("m2Sq1m2", "Sq2Sq1m2", LITERATURE, "reduction of the Pontryagin-square Bockstein on m2"),
    Relation("t2Sq1t2", "Sq2Sq1t2", LITERATURE, "reduction of the Pontryagin-square Bockstein on t2"),
)


def _applicable(rel: Relation, bases: tuple[str, ...]) -> bool:
    d = rel.difference()
    return all(g[0] in bases for m in d.terms for g, _ in m)


def relation_space(bases: tuple[str, ...], degree: int,
                   relations: Sequence[Relation] = RELATIONS) -> np.ndarray:
    """Rows span the kernel of ``t -> (-1)^t`` known to the database in ``degree``."""
    cols = basis(bases, degree)
    idx = {m: i for i, m in enumerate(cols)}
    rows = []
    if degree >= 1:
        mat = sq_matrix(bases, 1, degree - 1)
        rows.extend(mat.T)
    for rel in relations:
        d = rel.difference()
        if d.degree != degree or not d.terms or not _applicable(rel, bases):
            continue
        r = np.zeros(len(cols), dtype=np.uint8)
        for m in d.terms:
            r[idx[m]] ^= 1
        rows.append(r)
    if not rows:
        return np.zeros((0, len(cols)), dtype=np.uint8)
    return np.array(rows, dtype=np.uint8)


def normal_form(cls: SymbolicClass, bases: tuple[str, ...],
                relations: Sequence[Relation] = RELATIONS) -> SymbolicClass:
    """Canonical representative of ``(-1)^{cls}`` modulo the relation database."""
    if not cls.exponential or not cls.terms:
        return cls
    cols = basis(bases, cls.degree)
    idx = {m: i for i, m in enumerate(cols)}
    vec = np.zeros(len(cols), dtype=np.uint8)
    for m in cls.terms:
        if m not in idx:
            raise ValueError(f"{mono_name(m)} is not over {bases}")
        vec[idx[m]] ^= 1
    rel = relation_space(bases, cls.degree, relations)
    if rel.shape[0]:
        red, rank, piv = gf2_rref_dense(rel)
        for r, c in enumerate(piv):
            if vec[c]:
                vec ^= red[r]
    return SymbolicClass(frozenset(cols[i] for i in np.nonzero(vec)[0]), cls.degree, True)


def equal(a: SymbolicClass, b: SymbolicClass, bases: tuple[str, ...] = TOTAL,
          relations: Sequence[Relation] = RELATIONS) -> bool:
    return not normal_form(a + b, bases, relations)


def kx_basis(bases: tuple[str, ...], degree: int,
             relations: Sequence[Relation] = RELATIONS) -> list[SymbolicClass]:
    """Normal-form monomials spanning the image of ``t -> (-1)^t`` in ``degree``."""
    cols = basis(bases, degree)
    rel = relation_space(bases, degree, relations)
    pivots = set()
    if rel.shape[0]:
        _, _, piv = gf2_rref_dense(rel)
        pivots = set(piv)
    return [SymbolicClass(frozenset([m]), degree) for i, m in enumerate(cols) if i not in pivots]


# --- pullback certificates for relations ---------------------------------------------------


@dataclass
class RelationCheck:
    relation: Relation
    status: str  # "refuted", "consistent" or "untestable"
    witness: str = ""


def certify_relations(relations: Sequence[Relation] = RELATIONS,
                      groups: Sequence[Sequence[int]] = ((2,), (4,), (2, 2), (4, 2))) -> list[RelationCheck]:
    """Test each relation by pulling back along maps ``BG -> K(Z/2 + Z/2, 2)``.

    A map is a choice of degree-2 classes for ``c2`` and ``m2`` (or ``t2``);
    a nonzero pulled-back difference refutes the relation because
    ``t -> (-1)^t`` is natural. Agreement on every map is only consistency.
    """
    from .groups import FiniteAbelianGroup
    from .grpcoh import exp_map, kx_cohomology, mod2_ring

    out = []
    for rel in relations:
        diff = rel.difference()
        names = sorted({g[0] for m in diff.terms for g, _ in m})
        if any(FUNDAMENTAL[n] != 2 for n in names) or diff.degree > 6:
            out.append(RelationCheck(rel, "untestable"))
            continue
        status, witness = "consistent", ""
        for facs in groups:
            G = FiniteAbelianGroup(list(facs))
            ring = mod2_ring(G)
            h2 = [ring.from_vector(2, v) for v in itertools.product([0, 1], repeat=ring.dim(2))]
            if kx_cohomology(G, diff.degree).order == 1:
                continue
            for choice in itertools.product(h2, repeat=len(names)):
                env = dict(zip(names, choice))
                val = evaluate(diff, G, env)
                if val is None:
                    status = "untestable"
                    break
                if any(exp_map(G, diff.degree, val)):
                    status = "refuted"
                    witness = f"G = {G}, " + ", ".join(f"{k} -> {v}" for k, v in env.items())
                    break
            if status != "consistent":
                break
        out.append(RelationCheck(rel, status, witness))
    return out


def evaluate(cls: SymbolicClass, group, env: Mapping[str, object]):
    """Mod-2 class over ``group`` obtained by substituting ``env`` (``None`` if ``Sq^k``, ``k > 2``)."""
    from .grpcoh import cup_product, mod2_ring
    from .steenrod import sq

    ring = mod2_ring(group)
    total = ring.zero(cls.degree)
    for m in cls.terms:
        acc = ring.one()
        for (base, word), e in m:
            v = env[base]
            for k in reversed(word):
                if k == 3:
                    v = sq(group, 1, sq(group, 2, v))
                elif k > 3:
                    return None
                else:
                    v = sq(group, k, v)
            for _ in range(e):
                acc = cup_product(group, acc, v)
        total = total + acc
    return total


def verified_relations() -> tuple[Relation, ...]:
    """The database with every relation refuted by a pullback certificate removed."""
    return tuple(c.relation for c in certify_relations() if c.status != "refuted")


# --- the Serre spectral sequence of the fibration K(Z/2,3) -> Y -> K(Z/2+Z/2,2) ------------


K_INVARIANT = "c2^2 + c2m2"


def _fiber_group(j: int) -> tuple[list[int] | None, str]:
    if j == 0:
        return [0], "1"
    orders = kx_orders(FIBER, j)
    if orders is None:
        return None, ""
    gens = kx_basis(FIBER, j)
    name = gens[0].expr() if len(gens) == 1 else ""
    return orders, name


def serre_e2_lemma45(max_i: int = 6, max_j: int = 5) -> SpectralPage:
    """``E_2^{i,j} = H^i(K(Z/2+Z/2, 2); H^j(K(Z/2, 3); k^x))``."""
    entries: dict[tuple[int, int], Entry] = {}
    for j in range(max_j + 1):
        a_j, fname = _fiber_group(j)
        if a_j is None:
            raise ArithmeticError(f"fiber group in degree {j} is not certified")
        for i in range(max_i + 1):
            if j == 0:
                entries[(i, 0)] = _base_kx_entry(i)
                continue
            if not a_j:
                continue
            if a_j != [2]:
                raise ArithmeticError("fiber coefficients beyond Z/2 are not modelled")
            mons = basis(BASE, i)
            labels = [f"(-1)^({fname}{'' if not m else mono_name(m)})" for m in mons]
            if mons:
                entries[(i, j)] = Entry.from_e2([2] * len(mons), labels)
    entries = {k: v for k, v in entries.items() if not v.is_zero or v.fixture}
    return SpectralPage(2, entries, {}, max_i, max_j)


def _base_kx_entry(i: int) -> Entry:
    if i == 0:
        return Entry([0], [[1]], ["k^x"], [0], (), divisible=True)
    orders = kx_orders(BASE, i)
    if orders is not None:
        gens = kx_basis(BASE, i)
        labels = [str(g) for g in gens] if len(gens) == len(orders) else None
        return Entry.from_e2(orders, labels)
    fx = fixtures.lookup(f"em-serre-entry-{i}-0")
    if fx is None:
        return Entry([], [], [], [], (), fixture=f"missing: em-serre-entry-{i}-0")
    orders = list(fx.value["orders"])
    return Entry.from_e2(orders, [f"u{i}_{k}" for k in range(len(orders))], fixture=fx.key)


def transgressive_d3(cls: SymbolicClass, relations: Sequence[Relation] = RELATIONS,
                     k_invariant: str = K_INVARIANT) -> SymbolicClass:
    """Transgression ``(-1)^{t3 b} -> (-1)^{k b}`` extended linearly.

    On bidegrees this is the differential from row 3 to row 0, which sits on
    page 4; the name follows common usage for the transgression of ``t3``.
    """
    k = parse(k_invariant, exponential=False)
    out: set[Monomial] = set()
    for m in cls.terms:
        f = dict(m)
        if f.get(("t3", ())) != 1 or any(g[0] == "t3" and g != ("t3", ()) for g in f):
            raise ValueError(f"{mono_name(m)} is not t3 times a base class")
        del f[("t3", ())]
        out ^= set(poly_mul(k.terms, frozenset([_mono(f)])))
    if not out:
        return SymbolicClass.zero(cls.degree + 1)
    res = SymbolicClass(frozenset(out), cls.degree + 1)
    return normal_form(res, BASE, relations)


@dataclass
class H5Y:
    generators: list[SymbolicClass]
    killed: list[tuple[SymbolicClass, SymbolicClass]]
    relations: list[str]
    notes: list[str] = field(default_factory=list)


def h5Y(relations: Sequence[Relation] = RELATIONS) -> H5Y:
    """Survivors in total degree 5 of the Serre page, with the reasons for each."""
    notes = []
    gens: list[SymbolicClass] = []
    killed = []
    # (0,5): the fibre class Sq2t3; nothing in total degree 6 of row 0 is examined
    # here; survival rests on the nonzero edge map to K(Z/2,3)
    top = kx_basis(FIBER, 5, relations)
    gens.extend(top)
    notes.append("(0,5) survives: the edge map to H^5(K(Z/2,3); k^x) is nonzero")
    # (2,3): kernel of the transgression on t3 * H^2(base)
    sources = [SymbolicClass(frozenset([mono_mul(_mono({("t3", ()): 1}), m)]), 5) for m in basis(BASE, 2)]
    images = [transgressive_d3(s, relations) for s in sources]
    target = basis(BASE, 6)
    rel = relation_space(BASE, 6, relations)
    # image vectors modulo the relation space
    idx = {m: i for i, m in enumerate(target)}
    mat = np.zeros((len(target), len(images)), dtype=np.uint8)
    for c, img in enumerate(images):
        for m in img.terms:
            mat[idx[m], c] ^= 1
    ker = gf2_nullspace(mat) if mat.size else np.eye(len(images), dtype=np.uint8)
    kept = []
    for row in ker:
        cls = SymbolicClass.zero(5)
        for c in np.nonzero(row)[0]:
            cls = cls + sources[c]
        kept.append(cls)
    for s, img in zip(sources, images):
        if img:
            killed.append((s, img))
    gens.extend(kept)
    _ = rel
    # (5,0): nothing can hit it, and it supports no differential
    gens.extend(kx_basis(BASE, 5, relations))
    used = [str(r) for r in relations]
    return H5Y(gens, killed, used, notes)


def h5Y_generators(relations: Sequence[Relation] = RELATIONS) -> list[SymbolicClass]:
    return h5Y(relations).generators


def substitute(cls: SymbolicClass, rule: Mapping[str, str], bases: tuple[str, ...] = TOTAL,
               relations: Sequence[Relation] = RELATIONS) -> SymbolicClass:
    """Apply ``base -> expression`` to every fundamental class, then normalize."""
    images = {b: parse(e, exponential=False).terms for b, e in rule.items()}
    out: set[Monomial] = set()
    for m in cls.terms:
        acc = frozenset([()])
        for (base, word), e in m:
            img = images.get(base, frozenset([_mono({(base, ()): 1})]))
            g = apply_word(word, img)
            for _ in range(e):
                acc = poly_mul(acc, g)
        out ^= set(acc)
    res = SymbolicClass(frozenset(out), cls.degree, cls.exponential)
    return normal_form(res, bases, relations)


AUTOEQUIVALENCE = {"t3": "t3 + Sq1c2"}


def substitute_autoequivalence(cls: SymbolicClass, rule: Mapping[str, str] | None = None,
                               relations: Sequence[Relation] = RELATIONS) -> SymbolicClass:
    return substitute(cls, AUTOEQUIVALENCE if rule is None else rule, TOTAL, relations)


# pullbacks along the two comparison maps X -> Y
PULLBACK_F = {"c2": "0", "m2": "t2", "t3": "t3"}
PULLBACK_G = {"c2": "t2", "m2": "t2", "t3": "t3"}
SIGMA_RESTRICTION = "Sq2t3 + t3t2"


@dataclass
class SigmaResolution:
    generators: list[SymbolicClass]
    candidates: list[SymbolicClass]
    orbits: list[list[SymbolicClass]]
    constraints: list[str]

    def to_dict(self) -> dict:
        return {
            "generators": [str(g) for g in self.generators],
            "constraints": self.constraints,
            "candidates": [str(c) for c in self.candidates],
            "orbits": [[str(c) for c in o] for o in self.orbits],
        }


def resolve_sigma(constraints: Sequence[str] = ("f", "g"),
                  relations: Sequence[Relation] = RELATIONS) -> SigmaResolution:
    """Classes in the span of the generators of ``H^5(Y; k^x)`` meeting the restrictions.

    Each named constraint demands that the pullback to ``X`` equals
    ``(-1)^(Sq2t3 + t3t2)``; candidates are then grouped into orbits of the
    autoequivalence ``t3 -> t3 + Sq1c2``.
    """
    gens = h5Y_generators(relations)
    rules = {"f": PULLBACK_F, "g": PULLBACK_G}
    want = normal_form(parse(SIGMA_RESTRICTION), COMPARISON, relations)
    cols = basis(COMPARISON, 5)
    idx = {m: i for i, m in enumerate(cols)}
    rows, rhs = [], []
    for name in constraints:
        imgs = [substitute(g, rules[name], COMPARISON, relations) for g in gens]
        block = np.zeros((len(cols), len(gens)), dtype=np.uint8)
        for c, img in enumerate(imgs):
            for m in img.terms:
                block[idx[m], c] ^= 1
        target = np.zeros(len(cols), dtype=np.uint8)
        for m in want.terms:
            target[idx[m]] ^= 1
        rows.append(block)
        rhs.append(target)
    if rows:
        a = np.vstack(rows)
        b = np.concatenate(rhs)
        part = gf2_solve(a, b)
        if part is None:
            raise ArithmeticError("inconsistent constraints; the relation database is suspect")
        null = gf2_nullspace(a)
    else:
        part = np.zeros(len(gens), dtype=np.uint8)
        null = np.eye(len(gens), dtype=np.uint8)
    cands = []
    for coeffs in itertools.product([0, 1], repeat=len(null)):
        v = part.copy()
        for c, r in zip(coeffs, null):
            if c:
                v ^= r
        cls = SymbolicClass.zero(5)
        for k in np.nonzero(v)[0]:
            cls = cls + gens[k]
        cands.append(normal_form(cls, TOTAL, relations))
    cands.sort(key=lambda c: (len(c.terms), c.expr()))
    orbits: list[list[SymbolicClass]] = []
    seen: set[frozenset] = set()
    for c in cands:
        if c.terms in seen:
            continue
        orbit = [c]
        seen.add(c.terms)
        nxt = substitute_autoequivalence(c, relations=relations)
        while nxt.terms not in seen:
            orbit.append(nxt)
            seen.add(nxt.terms)
            nxt = substitute_autoequivalence(nxt, relations=relations)
        orbits.append(orbit)
    return SigmaResolution(gens, cands, orbits, list(constraints))
