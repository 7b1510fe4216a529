"""Cohomology of classifying spaces of finite abelian groups.

Coefficients ``Z/2``, ``Z`` and ``k^x`` are supported; ``k^x`` is modelled
by ``Q/Z`` so that ``H^n(G; k^x) = H^{n+1}(G; Z)`` for ``n >= 1``.

Mod-2 classes are stored by cochain multidegree: for a product of cyclic
groups of even order the mod-2 cochain complex of the tensored periodic
resolution has zero differential, so the basis tuple ``k`` is both the
cochain and its class. In ring terms ``k_i = e_1 + 2 e_2`` for the
exterior/polynomial pair ``x1, x2`` of a factor with 2-part at least 4, and
``k_i`` is the exponent of ``t`` for a factor with 2-part exactly 2.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .cache import Memo
from .groups import FiniteAbelianGroup, GroupError, GroupHom, two_part
from .linalg import Presentation, homology, matvec
from .resolution import chain_map, resolution

EXTERIOR = "exterior"
POLYNOMIAL = "polynomial"

COEFFICIENTS = ("Z/2", "Z", "Q/Z")
_ALIASES = {"Z/2": "Z/2", "F2": "Z/2", "Z": "Z", "Q/Z": "Q/Z", "kx": "Q/Z", "k^x": "Q/Z"}

_memo = Memo()


def coefficient(name: str) -> str:
    try:
        return _ALIASES[name]
    except KeyError:
        raise ValueError(f"unsupported coefficients {name!r}; use one of {COEFFICIENTS}")


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int
    kind: str
    factor: int


class Mod2Ring:
    """``H^*(BG; Z/2)`` with generators, monomial bases and products."""

    def __init__(self, group: FiniteAbelianGroup):
        self.group = group
        self.res = resolution(group)
        gens: list[Generator] = []
        self.kinds: list[str | None] = []
        for i, (n, p) in enumerate(zip(group.factors, group.names)):
            t = two_part(n)
            if t == 1:
                self.kinds.append(None)
            elif t == 2:
                self.kinds.append(POLYNOMIAL)
                gens.append(Generator(p + "1", 1, POLYNOMIAL, i))
            else:
                self.kinds.append(EXTERIOR)
                gens.append(Generator(p + "1", 1, EXTERIOR, i))
                gens.append(Generator(p + "2", 2, POLYNOMIAL, i))
        self.generators = tuple(gens)
        self._gen_by_name = {g.name: g for g in gens}
        self._basis: dict[int, list[tuple[int, ...]]] = {}
        self._index: dict[int, dict[tuple[int, ...], int]] = {}
        # longest names first so that prefixes never shadow longer names
        alts = sorted(self._gen_by_name, key=len, reverse=True)
        self._token = re.compile(
            "(" + "|".join(map(re.escape, alts)) + r")(?:\^(\d+))?" if alts else r"(?!x)x"
        )

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Mod2Ring) and other.group == self.group

    def __hash__(self) -> int:
        return hash(("Mod2Ring", self.group))

    # --- bases ----------------------------------------------------------------

    def basis(self, d: int) -> list[tuple[int, ...]]:
        if d not in self._basis:
            ok = [i for i, k in enumerate(self.kinds) if k is None]
            self._basis[d] = [k for k in self.res.basis(d) if all(k[i] == 0 for i in ok)]
            self._index[d] = {k: j for j, k in enumerate(self._basis[d])}
        return self._basis[d]

    def index(self, d: int) -> dict[tuple[int, ...], int]:
        self.basis(d)
        return self._index[d]

    def dim(self, d: int) -> int:
        return len(self.basis(d))

    def dims(self, max_degree: int) -> list[int]:
        return [self.dim(d) for d in range(max_degree + 1)]

    # --- monomials ------------------------------------------------------------

    def exponents(self, k: Sequence[int]) -> dict[str, int]:
        out: dict[str, int] = {}
        for i, (kind, p) in enumerate(zip(self.kinds, self.group.names)):
            if kind == POLYNOMIAL:
                if k[i]:
                    out[p + "1"] = k[i]
            elif kind == EXTERIOR:
                if k[i] % 2:
                    out[p + "1"] = 1
                if k[i] // 2:
                    out[p + "2"] = k[i] // 2
        return out

    def monomial_name(self, k: Sequence[int]) -> str:
        exps = self.exponents(k)
        if not exps:
            return "1"
        return "".join(n if e == 1 else f"{n}^{e}" for n, e in exps.items())

    def multiply_monomials(self, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...] | None:
        for i, kind in enumerate(self.kinds):
            if kind == EXTERIOR and a[i] % 2 and b[i] % 2:
                return None
        return tuple(x + y for x, y in zip(a, b))

    def parse_monomial(self, text: str) -> tuple[int, ...] | None:
        """Multidegree of a monomial like ``x1x2^2``; ``None`` if it vanishes."""
        text = text.replace("*", "").replace(" ", "")
        k = [0] * self.group.rank
        if text == "1":
            return tuple(k)
        pos = 0
        seen_ext: set[str] = set()
        while pos < len(text):
            m = self._token.match(text, pos)
            if not m:
                raise ValueError(f"cannot parse monomial {text!r} over generators "
                                 f"{[g.name for g in self.generators]}")
            g = self._gen_by_name[m.group(1)]
            e = int(m.group(2) or 1)
            if g.kind == EXTERIOR:
                if e > 1 or g.name in seen_ext:
                    return None
                seen_ext.add(g.name)
            k[g.factor] += e * g.degree
            pos = m.end()
        return tuple(k)

    # --- classes --------------------------------------------------------------

    def zero(self, degree: int) -> "Mod2Class":
        return Mod2Class(self, degree, frozenset())

    def one(self) -> "Mod2Class":
        return Mod2Class(self, 0, frozenset([(0,) * self.group.rank]))

    def monomial(self, k: Sequence[int]) -> "Mod2Class":
        k = tuple(k)
        if k not in self.index(sum(k)):
            raise ValueError(f"{k} is not a basis monomial")
        return Mod2Class(self, sum(k), frozenset([k]))

    def gen(self, name: str) -> "Mod2Class":
        g = self._gen_by_name[name]
        k = [0] * self.group.rank
        k[g.factor] = g.degree
        return self.monomial(k)

    def parse(self, text: str, degree: int | None = None) -> "Mod2Class":
        """Parse a sum of monomials, e.g. ``"x1y1 + x2^2"`` or ``"0"``."""
        support: set[tuple[int, ...]] = set()
        deg = degree
        for term in text.split("+"):
            term = term.strip()
            if not term or term == "0":
                continue
            k = self.parse_monomial(term)
            if k is None:
                continue
            if deg is None:
                deg = sum(k)
            elif sum(k) != deg:
                raise ValueError(f"inhomogeneous class {text!r}")
            support ^= {k}
        if deg is None:
            raise ValueError(f"degree of {text!r} is ambiguous; pass degree")
        return Mod2Class(self, deg, frozenset(support))

    def from_vector(self, degree: int, vec: Iterable[int]) -> "Mod2Class":
        b = self.basis(degree)
        return Mod2Class(self, degree, frozenset(b[i] for i, v in enumerate(vec) if int(v) % 2))

    def from_cochain(self, degree: int, vec: Sequence[int]) -> "Mod2Class":
        """Class of a mod-2 cocycle given on the resolution's cochain basis."""
        full = self.res.basis(degree)
        idx = self.index(degree)
        return Mod2Class(
            self, degree, frozenset(k for k, v in zip(full, vec) if int(v) % 2 and k in idx)
        )


@dataclass(frozen=True)
class Mod2Class:
    """An F2 combination of monomials of a fixed degree."""

    ring: Mod2Ring
    degree: int
    support: frozenset

    def _check(self, other: "Mod2Class") -> None:
        if not isinstance(other, Mod2Class) or other.ring.group != self.ring.group:
            raise GroupError("classes live over different groups")

    def __add__(self, other: "Mod2Class") -> "Mod2Class":
        self._check(other)
        if not other.support:
            return self
        if not self.support:
            return other
        if other.degree != self.degree:
            raise ValueError("cannot add classes of different degrees")
        return Mod2Class(self.ring, self.degree, self.support ^ other.support)

    __sub__ = __add__

    def __mul__(self, other: "Mod2Class") -> "Mod2Class":
        return cup_product(self.ring.group, self, other)

    def __bool__(self) -> bool:
        return bool(self.support)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Mod2Class) or other.ring.group != self.ring.group:
            return NotImplemented
        if not self.support and not other.support:
            return True
        return self.degree == other.degree and self.support == other.support

    def __hash__(self) -> int:
        return hash((self.ring.group, self.degree if self.support else -1, self.support))

    def terms(self) -> list[tuple[int, ...]]:
        idx = self.ring.index(self.degree)
        return sorted(self.support, key=idx.__getitem__)

    def __str__(self) -> str:
        if not self.support:
            return "0"
        return " + ".join(self.ring.monomial_name(k) for k in self.terms())

    __repr__ = __str__

    def vector(self) -> np.ndarray:
        idx = self.ring.index(self.degree)
        v = np.zeros(len(idx), dtype=np.uint8)
        for k in self.support:
            v[idx[k]] = 1
        return v

    def cochain(self) -> list[int]:
        """0/1 integer lift on the resolution's cochain basis."""
        idx = self.ring.res.index(self.degree)
        v = [0] * len(idx)
        for k in self.support:
            v[idx[k]] = 1
        return v


# --- ring ----------------------------------------------------------------------




def mod2_ring(group: FiniteAbelianGroup) -> Mod2Ring:
    return _memo.get_or_compute(("ring", group), lambda: Mod2Ring(group))


def mod2_cohomology(group: FiniteAbelianGroup, max_degree: int) -> Mod2Ring:
    """The mod-2 ring; ``ring.basis(d)`` lists the monomial basis in degree ``d``."""
    if max_degree < 0:
        raise ValueError("max_degree must be non-negative")
    ring = mod2_ring(group)
    for d in range(max_degree + 1):
        ring.basis(d)
    return ring


def cup_product(group: FiniteAbelianGroup, a: Mod2Class, b: Mod2Class) -> Mod2Class:
    if a.ring.group != group or b.ring.group != group:
        raise GroupError("cup product of classes over mismatched groups")
    ring = a.ring
    out: set[tuple[int, ...]] = set()
    for x in a.support:
        for y in b.support:
            z = ring.multiply_monomials(x, y)
            if z is not None:
                out ^= {z}
    return Mod2Class(ring, a.degree + b.degree, frozenset(out))


# --- integral and k^x ------------------------------------------------------------


def integral_cohomology(group: FiniteAbelianGroup, degree: int) -> Presentation:
    """``H^degree(BG; Z)`` with cocycle lifts on the tensor resolution.

    Degree 0 is ``Z`` and appears as the single invariant factor ``0``.
    """
    if degree < 0:
        raise ValueError("degree must be non-negative")

    def build() -> Presentation:
        res = resolution(group)
        d_in = res.coboundary(degree - 1) if degree > 0 else []
        pres = homology(d_in, res.coboundary(degree), res.rank(degree), degree)
        pres.labels = [f"g{degree}_{i}" for i in range(pres.ngens)]
        return pres

    return _memo.get_or_compute(("Z", group.factors, degree), build)


def kx_cohomology(group: FiniteAbelianGroup, degree: int) -> Presentation:
    """``H^degree(BG; k^x)``; degree 0 returns the divisible ``k^x`` marker."""
    if degree < 0:
        raise ValueError("degree must be non-negative")
    if degree == 0:
        return Presentation([0], [[1]], [[1]], 1, 0, ["k^x"])
    return integral_cohomology(group, degree + 1)


def is_kx_marker(pres: Presentation) -> bool:
    return pres.labels == ["k^x"]


def exp_map(group: FiniteAbelianGroup, degree: int, cls: Mod2Class) -> list[int]:
    """Coordinates of ``(-1)^cls`` in ``kx_cohomology(group, degree)``.

    Realized as the Bockstein ``[delta(c~) / 2]`` of the 0/1 lift ``c~``.
    """
    if cls.ring.group != group:
        raise GroupError("class lives over a different group")
    if cls.support and cls.degree != degree:
        raise ValueError(f"class has degree {cls.degree}, expected {degree}")
    if degree == 0:
        # (-1)^1 is the element -1 of k^x itself
        return [1 if cls.support else 0]
    res = resolution(group)
    pres = kx_cohomology(group, degree)
    if not cls.support:
        return [0] * pres.ngens
    lift = [0] * res.rank(degree)
    idx = res.index(degree)
    for k in cls.support:
        lift[idx[k]] = 1
    delta = matvec(res.coboundary(degree), lift)
    if any(v % 2 for v in delta):
        raise ValueError("not a mod-2 cocycle")
    return pres.coords([v // 2 for v in delta])


def exp_matrix(group: FiniteAbelianGroup, degree: int) -> list[list[int]]:
    """Columns are ``exp_map`` of the mod-2 basis in ``degree``."""
    ring = mod2_ring(group)
    cols = [exp_map(group, degree, ring.monomial(k)) for k in ring.basis(degree)]
    n = kx_cohomology(group, degree).ngens if degree else 1
    return [[c[i] for c in cols] for i in range(n)]


# --- pullback --------------------------------------------------------------------


def pullback(hom: GroupHom, cls, coefficients: str = "Z/2", degree: int | None = None):
    """``hom^*`` on a class over ``hom.target``.

    Mod-2 classes are ``Mod2Class`` values. For ``Z`` and ``Q/Z`` pass the
    coordinates in the target presentation and the degree; coordinates in
    the source presentation are returned.
    """
    coeffs = coefficient(coefficients)
    cmap = chain_map(hom)
    if coeffs == "Z/2":
        if not isinstance(cls, Mod2Class):
            raise TypeError("mod-2 pullback expects a Mod2Class")
        if cls.ring.group != hom.target:
            raise GroupError("class does not live over the homomorphism's target")
        src_ring = mod2_ring(hom.source)
        if not cls.support:
            return src_ring.zero(cls.degree)
        mat = cmap.cochain_matrix(cls.degree)
        return src_ring.from_cochain(cls.degree, matvec(mat, cls.cochain()))
    if degree is None:
        raise ValueError("degree is required for integral and Q/Z pullback")
    if coeffs == "Q/Z":
        if degree == 0:
            return list(cls)
        degree += 1
    tgt = integral_cohomology(hom.target, degree)
    src = integral_cohomology(hom.source, degree)
    if degree == 0:
        return list(cls)
    mat = cmap.cochain_matrix(degree)
    return src.coords(matvec(mat, tgt.lift(cls)))


def pullback_matrix(hom: GroupHom, degree: int, coefficients: str = "Z/2") -> list[list[int]]:
    """Matrix of ``hom^*`` in basis coordinates (columns are images of target basis)."""
    coeffs = coefficient(coefficients)
    if coeffs == "Z/2":
        tgt = mod2_ring(hom.target)
        src = mod2_ring(hom.source)
        cols = [pullback(hom, tgt.monomial(k)).vector() for k in tgt.basis(degree)]
        return [[int(c[i]) for c in cols] for i in range(src.dim(degree))]
    tp = kx_cohomology(hom.target, degree) if coeffs == "Q/Z" else integral_cohomology(hom.target, degree)
    sp = kx_cohomology(hom.source, degree) if coeffs == "Q/Z" else integral_cohomology(hom.source, degree)
    cols = []
    for j in range(tp.ngens):
        e = [0] * tp.ngens
        e[j] = 1
        cols.append(pullback(hom, e, coeffs, degree))
    return [[c[i] for c in cols] for i in range(sp.ngens)]


def clear_caches() -> None:
    _memo.clear()
