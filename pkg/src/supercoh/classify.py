"""Classification data of fermionic strongly fusion 2-categories.

A classification over a finite abelian group ``G`` is a twist ``w`` in
``H^2(BG; Z/2)`` together with a class of ``SH^{4+w}(BG)``, written as a
triple ``(alpha, beta, gamma)`` of layer representatives. The ``alpha``
layer is the extension class of the group of invertible objects.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Hashable, Mapping, Sequence

import numpy as np

from . import fixtures
from .ahss import SuperCohQuery, SuperCohResult, compute_sh, coordinate_projections, mod2_reductions
from .groups import FiniteAbelianGroup, GroupError, invariant_factors, two_part
from .grpcoh import EXTERIOR, POLYNOMIAL, Mod2Class, kx_cohomology, mod2_ring
from .linalg import gf2_solve

FILTRATION_CAVEAT = ("beta and gamma are layer representatives, not canonical classes; "
                     "the triple depends on choices of lifts")
OUT_NOTE = ("classifications are listed before quotienting by Out(G); isomorphic "
            "2-categories may appear more than once")
CENTER_NOTE = "the loop space of the Drinfeld center is expected to be Rep(G~, z); unverified"


# --- classifications ---------------------------------------------------------------------


@dataclass
class FermionicClassification:
    group: FiniteAbelianGroup
    twist: Mod2Class
    pi_alpha: Mod2Class | None
    pi_beta: Mod2Class | None
    pi_gamma: tuple[int, ...] | None
    coordinates: tuple[int, ...] = ()
    status: str = "exact"
    notes: list[str] = field(default_factory=list)
    citations: list[str] = field(default_factory=list)

    def triple(self) -> tuple[str, str, str]:
        def show(c):
            if c is None:
                return "?"
            if isinstance(c, tuple):
                return "triv" if not any(c) else "(" + ",".join(map(str, c)) + ")"
            return "triv" if not c else str(c)

        return show(self.pi_alpha), show(self.pi_beta), show(self.pi_gamma)

    def to_dict(self) -> dict:
        a, b, g = self.triple()
        return {
            "group": list(self.group.factors),
            "twist": str(self.twist),
            "alpha": a,
            "beta": b,
            "gamma": g,
            "gamma_ambient": list(kx_cohomology(self.group, 4).orders),
            "coordinates": list(self.coordinates),
            "status": self.status,
            "notes": list(self.notes),
            "citations": list(self.citations),
        }


def default_homs(group: FiniteAbelianGroup) -> tuple:
    homs = list(mod2_reductions(group))
    if group.rank > 1:
        homs.extend(coordinate_projections(group))
    return tuple(homs)


def _twist(group: FiniteAbelianGroup, twist) -> Mod2Class:
    ring = mod2_ring(group)
    if twist is None:
        return ring.zero(2)
    if isinstance(twist, str):
        return ring.parse(twist, degree=2)
    return twist


def _combine_mod2(ring, degree: int, lifts: Sequence[Sequence[int]], coeffs: Sequence[int]) -> Mod2Class:
    v = np.zeros(ring.dim(degree), dtype=np.int64)
    for c, lift in zip(coeffs, lifts):
        v += c * np.asarray(lift, dtype=np.int64)
    return ring.from_vector(degree, v % 2)


def enumerate_classifications(group: FiniteAbelianGroup, twist=None, policy: str = "allow",
                              homs: Sequence | None = None) -> list[FermionicClassification]:
    """One representative per element of ``SH^{4+w}(BG)``.

    When the computation is only bounded, the layers that are determined are
    enumerated and every entry carries a gap note.
    """
    w = _twist(group, twist)
    if homs is None:
        homs = default_homs(group)
    query = SuperCohQuery(group, w if w else None, 4, tuple(homs), policy)
    res = compute_sh(query)
    return classifications_from(res, w)


def classifications_from(res: SuperCohResult, twist: Mod2Class) -> list[FermionicClassification]:
    group = res.query.group
    ring = mod2_ring(group)
    ambient = list(kx_cohomology(group, 4).orders)
    citations = [f.citation for f in res.fixtures_used]
    notes = [FILTRATION_CAVEAT, OUT_NOTE]
    if res.status == "bounded":
        lo, hi = res.bounds
        notes.append(f"gap: SH^4 order is only bounded in [{lo}, {hi}]; undetermined layers are left out")
    elif res.status == "fixture":
        notes.append("layer orders come from a fixture")

    # per layer: list of (coordinate, value) options
    options: list[list[tuple[int, object]]] = []
    for j in (2, 1, 0):
        layer = res.layer(j)
        if layer is None or (not layer.exact and res.status == "bounded") or not layer.orders:
            options.append([(0, None if layer is not None and not layer.exact else _zero(ring, j, ambient))])
            continue
        lifts = layer.lifts
        if not lifts and j == 2:
            lifts = _fill_alpha(ring, layer.orders)
        combos = list(itertools.product(*(range(o) for o in layer.orders)))
        opts = []
        for idx, coeffs in enumerate(combos):
            if j == 0:
                if lifts:
                    vec = tuple(sum(c * l[k] for c, l in zip(coeffs, lifts)) % (o or 1)
                                for k, o in enumerate(ambient))
                else:
                    vec = tuple(coeffs)
                opts.append((idx, vec))
            elif lifts:
                opts.append((idx, _combine_mod2(ring, 4 - j, lifts, coeffs)))
            else:
                opts.append((idx, None))
        options.append(opts)
    out = []
    for (ia, a), (ib, b), (ig, g) in itertools.product(*options):
        out.append(FermionicClassification(group, twist, a, b, g, (ia, ib, ig), res.status,
                                           list(notes), list(citations)))
    return out


def _zero(ring, j: int, ambient: list[int]):
    if j == 0:
        return tuple(0 for _ in ambient)
    return ring.zero(4 - j)


def _fill_alpha(ring, orders: list[int]) -> list[list[int]]:
    """Fixture alpha layers: when the layer is all of ``H^2(;Z/2)`` use its basis."""
    dim = ring.dim(2)
    if orders == [2] * dim:
        return [[int(i == k) for i in range(dim)] for k in range(dim)]
    return []


def enumerate_all_twists(group: FiniteAbelianGroup, policy: str = "allow",
                         homs: Sequence | None = None) -> dict[str, list[FermionicClassification]]:
    """Classifications for every twist class in ``H^2(BG; Z/2)``."""
    ring = mod2_ring(group)
    out = {}
    for v in itertools.product([0, 1], repeat=ring.dim(2)):
        w = ring.from_vector(2, v)
        out[str(w)] = enumerate_classifications(group, w, policy, homs)
    return out


# --- central extensions ----------------------------------------------------------------------


Element = tuple  # (g, s) with g in G and s in Z/2


def _degree1(group: FiniteAbelianGroup, factor: int) -> Callable[[Sequence[int]], int]:
    return lambda g: g[factor] % 2


def _carry(group: FiniteAbelianGroup, factor: int) -> Callable[[Sequence[int], Sequence[int]], int]:
    n = group.factors[factor]
    return lambda g, h: int(g[factor] % n + h[factor] % n >= n)


def cocycle_of(cls: Mod2Class) -> Callable[[Sequence[int], Sequence[int]], int]:
    """Normalized 2-cocycle representing ``cls`` built from cup products.

    A product of degree-one classes ``a b`` gives ``(g, h) -> a(g) b(h)``;
    the degree-two generator of a factor with 2-part at least 4 is the carry
    cocycle of that factor.
    """
    if cls.degree != 2 and cls:
        raise ValueError("a 2-cocycle needs a degree-2 class")
    ring = cls.ring
    group = ring.group
    parts = []
    for k in cls.support:
        ones = [i for i, e in enumerate(k) if e == 1]
        twos = [i for i, e in enumerate(k) if e == 2]
        if len(ones) == 2:
            a, b = (_degree1(group, i) for i in ones)
            parts.append(lambda g, h, a=a, b=b: a(g) * b(h))
        elif twos and ring.kinds[twos[0]] == POLYNOMIAL:
            a = _degree1(group, twos[0])
            parts.append(lambda g, h, a=a: a(g) * a(h))
        elif twos and ring.kinds[twos[0]] == EXTERIOR:
            parts.append(_carry(group, twos[0]))
        else:
            raise ValueError(f"unexpected degree-2 monomial {k}")
    return lambda g, h: sum(p(g, h) for p in parts) % 2


@dataclass
class CentralExtension:
    """``0 -> Z/2 -> E -> G -> 1`` with multiplication ``(g,s)(h,t) = (g+h, s+t+f(g,h))``."""

    group: FiniteAbelianGroup
    cls: Mod2Class
    cocycle: Callable[[Sequence[int], Sequence[int]], int]
    elements: list[Element] = field(default_factory=list)
    table: np.ndarray | None = None

    def __post_init__(self) -> None:
        self.elements = [(g, s) for g in self.group.elements() for s in (0, 1)]
        self._index = {e: i for i, e in enumerate(self.elements)}
        if len(self.elements) <= 128:
            n = len(self.elements)
            self.table = np.zeros((n, n), dtype=np.int32)
            for i, a in enumerate(self.elements):
                for j, b in enumerate(self.elements):
                    self.table[i, j] = self._index[self.mul(a, b)]

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def central(self) -> Element:
        return (self.group.identity(), 1)

    @property
    def identity(self) -> Element:
        return (self.group.identity(), 0)

    def mul(self, a: Element, b: Element) -> Element:
        return (self.group.add(a[0], b[0]), (a[1] + b[1] + self.cocycle(a[0], b[0])) % 2)

    def power(self, a: Element, k: int) -> Element:
        out = self.identity
        for _ in range(k):
            out = self.mul(out, a)
        return out

    def inverse(self, a: Element) -> Element:
        for b in self.elements:
            if self.mul(a, b) == self.identity:
                return b
        raise ArithmeticError("no inverse")

    def element_order(self, a: Element) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.mul(x, a)
            k += 1
        return k

    def commutator(self, a: Element, b: Element) -> Element:
        return self.mul(self.mul(a, b), self.inverse(self.mul(b, a)))

    def check_cocycle(self) -> bool:
        G = self.group
        f = self.cocycle
        els = list(G.elements())
        if f(G.identity(), G.identity()) or any(f(G.identity(), g) or f(g, G.identity()) for g in els):
            return False
        return all(
            (f(b, c) + f(a, G.add(b, c)) + f(G.add(a, b), c) + f(a, b)) % 2 == 0
            for a in els for b in els for c in els
        )

    def is_abelian(self) -> bool:
        if self.table is not None:
            return bool((self.table == self.table.T).all())
        return all(self.mul(a, b) == self.mul(b, a) for a in self.elements for b in self.elements)

    def commutator_pairing(self) -> list[list[int]]:
        """``[e_i, e_j]`` on lifts of the factor generators, as an element of Z/2."""
        gens = _factor_generators(self.group)
        return [[self.commutator((a, 0), (b, 0))[1] for b in gens] for a in gens]

    def abelian_invariants(self) -> list[int] | None:
        if not self.is_abelian():
            return None
        return _abelian_invariants(self.elements, self.element_order)

    def summary(self) -> dict:
        inv = self.abelian_invariants()
        out = {
            "group": str(self.group),
            "class": str(self.cls),
            "order": self.order,
            "abelian": inv is not None,
        }
        if inv is not None:
            out["invariants"] = inv
            out["description"] = "+".join(f"Z/{n}" for n in inv) if inv else "0"
        else:
            out["commutator_pairing"] = self.commutator_pairing()
            out["description"] = f"nonabelian of order {self.order}"
        return out

    def multiplication_table(self) -> list[list[int]]:
        if self.table is None:
            raise ValueError("multiplication tables are built for |G| <= 64 only")
        return self.table.tolist()


def _factor_generators(group: FiniteAbelianGroup) -> list[tuple[int, ...]]:
    return [tuple(int(i == k) for i in range(group.rank)) for k in range(group.rank)]


def _abelian_invariants(elements: Sequence, order_of: Callable) -> list[int]:
    """Invariant factors of a finite abelian group from its element orders."""
    orders = [order_of(e) for e in elements]
    n = len(elements)
    primes = [p for p in range(2, n + 1) if n % p == 0 and all(p % q for q in range(2, p))]
    cyclic: list[int] = []
    for p in primes:
        # |{x : p^k x = 0}| = p^(sum_j min(k, e_j))
        logs = []
        k = 0
        while True:
            cnt = sum(1 for o in orders if (p**k) % o == 0)
            lg = round(np.log(cnt) / np.log(p))
            logs.append(lg)
            if k and logs[-1] == logs[-2]:
                break
            k += 1
        # number of factors with exponent >= k is logs[k] - logs[k-1]
        at_least = [logs[k] - logs[k - 1] for k in range(1, len(logs))]
        for k in range(len(at_least)):
            exact = at_least[k] - (at_least[k + 1] if k + 1 < len(at_least) else 0)
            cyclic.extend([p ** (k + 1)] * exact)
    return invariant_factors(cyclic)


def invertible_group(c: FermionicClassification | Mod2Class) -> CentralExtension:
    """The central extension of ``G`` by ``Z/2`` classified by the alpha layer."""
    alpha = c.pi_alpha if isinstance(c, FermionicClassification) else c
    if alpha is None:
        raise ValueError("alpha layer is undetermined; the invertible objects are not known")
    ext = CentralExtension(alpha.ring.group, alpha, cocycle_of(alpha))
    return ext


def classify_cocycle(group: FiniteAbelianGroup, cocycle: Callable) -> Mod2Class:
    """Class in ``H^2(G; Z/2)`` of a normalized 2-cocycle, read off its extension.

    The class of an abelian-group extension is determined by the commutators
    of lifted factor generators and by the ``n``-th powers of the lifts of
    order-``n`` generators; both are measured on the multiplication rule.
    """
    ring = mod2_ring(group)
    ext = CentralExtension(group, ring.zero(2), cocycle)
    even = [i for i, k in enumerate(ring.kinds) if k is not None]
    gens = _factor_generators(group)
    invariants = []
    for i in even:
        invariants.append(ext.power((gens[i], 0), group.factors[i])[1])
    for a, b in itertools.combinations(even, 2):
        invariants.append(ext.commutator((gens[a], 0), (gens[b], 0))[1])
    # invariants of the basis monomials
    cols = []
    for k in ring.basis(2):
        col = []
        for i in even:
            col.append(int(k[i] == 2))
        for a, b in itertools.combinations(even, 2):
            col.append(int(k[a] == 1 and k[b] == 1))
        cols.append(col)
    mat = np.array(cols, dtype=np.uint8).T.reshape(len(invariants), len(cols))
    sol = gf2_solve(mat, np.array(invariants, dtype=np.uint8))
    if sol is None:
        raise ArithmeticError("invariants do not match any class")
    return ring.from_vector(2, sol)


# --- hom grids -----------------------------------------------------------------------------


@dataclass
class HomGrid:
    objects: list
    labels: dict
    support: list
    pi0: list[list]
    pi0_invariants: list[int] | None
    names: dict = field(default_factory=dict)

    def label(self, g, h) -> str:
        return self.labels[(g, h)]

    def to_dict(self) -> dict:
        n = self.names
        return {
            "objects": [n[o] for o in self.objects],
            "grid": [[self.labels[(g, h)] for h in self.objects] for g in self.objects],
            "support": [n[o] for o in self.support],
            "pi0_order": len(self.pi0),
            "pi0": [[n[o] for o in coset] for coset in self.pi0],
            "pi0_invariants": self.pi0_invariants,
        }

    def to_dot(self) -> str:
        n = self.names
        lines = ["digraph homgrid {", "  rankdir=LR;", "  node [shape=circle];"]
        for o in self.objects:
            lines.append(f'  "{n[o]}";')
        for g in self.objects:
            for h in self.objects:
                lab = self.labels[(g, h)]
                if lab != "0":
                    lines.append(f'  "{n[g]}" -> "{n[h]}" [label="{lab}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


class _GroupOps:
    def __init__(self, g):
        if isinstance(g, FiniteAbelianGroup):
            self.elements = g.element_list()
            self.mul = g.add
            self.inv = g.neg
            self.identity = g.identity()
            self.name = lambda e: "".join(map(str, e)) if len(e) != 1 else str(e[0])
            self.order_of = g.element_order
        elif isinstance(g, CentralExtension):
            self.elements = g.elements
            self.mul = g.mul
            self.inv = g.inverse
            self.identity = g.identity
            self.name = lambda e: "".join(map(str, e[0])) + ("z" if e[1] else "")
            self.order_of = g.element_order
        else:
            raise TypeError("hom_grid needs a FiniteAbelianGroup or a CentralExtension")


def hom_grid(group, z=None, labels: Mapping[Hashable, str] | None = None) -> HomGrid:
    """Hom-category labels ``Hom(g, h) = C_{h g^-1}`` over ``group``.

    ``labels`` maps elements of the support to sector names; elements left
    out carry the zero category.
    """
    ops = _GroupOps(group)
    els = ops.elements
    if z is not None:
        z = _coerce(z, els)
        if ops.order_of(z) != 2:
            raise GroupError(f"{ops.name(z)} does not have order exactly 2")
        if any(ops.mul(z, g) != ops.mul(g, z) for g in els):
            raise GroupError(f"{ops.name(z)} is not central")
    labels = {_coerce(k, els): v for k, v in (labels or {}).items()}
    support = [g for g in els if g in labels]
    if ops.identity not in labels:
        raise GroupError("the identity sector must be labelled")
    sset = set(support)
    if any(ops.mul(a, b) not in sset for a in support for b in support):
        raise GroupError("the support is not a subgroup")
    if any(ops.mul(ops.mul(g, s), ops.inv(g)) not in sset for g in els for s in support):
        raise GroupError("the support is not normal")
    grid = {}
    for g in els:
        for h in els:
            grid[(g, h)] = labels.get(ops.mul(h, ops.inv(g)), "0")
    cosets, seen = [], set()
    for g in els:
        if g in seen:
            continue
        coset = sorted({ops.mul(g, s) for s in support}, key=els.index)
        seen.update(coset)
        cosets.append(coset)
    inv = None
    quotient_abelian = all(
        ops.mul(ops.mul(a[0], b[0]), ops.inv(ops.mul(b[0], a[0]))) in sset for a in cosets for b in cosets
    )
    if quotient_abelian:
        def coset_order(c):
            k, x = 1, c[0]
            while x not in sset:
                x = ops.mul(x, c[0])
                k += 1
            return k

        inv = _abelian_invariants(cosets, coset_order)
    return HomGrid(els, grid, support, cosets, inv, {e: ops.name(e) for e in els})


def _coerce(x, els):
    if isinstance(x, int):
        x = (x,)
    if isinstance(x, tuple) and x in els:
        return x
    for e in els:
        if isinstance(e, tuple) and len(e) == 2 and isinstance(e[0], tuple) and e == x:
            return e
    raise GroupError(f"{x!r} is not an element")


# --- Brauer-Picard tables --------------------------------------------------------------------


CENTERS = {"2Vect": "brpic-2Vect", "2SVect": "brpic-2SVect",
           "2Vect_G^pi": "brpic-2Vect_G^pi", "Mod(E)": "brpic-Mod(E)"}


@dataclass
class BrPicTable:
    center: str
    groups: tuple[str, str, str, str]
    citation: str
    notes: tuple[str, ...]

    def to_dict(self) -> dict:
        return {"center": self.center,
                "pi": {f"pi{k}": v for k, v in enumerate(self.groups)},
                "citation": self.citation, "notes": list(self.notes)}

    def to_text(self) -> str:
        width = max(len(v) for v in self.groups) + 2
        head = "".join(f"{'pi' + str(k):>{width}}" for k in range(4))
        row = "".join(f"{v:>{width}}" for v in self.groups)
        return f"{self.center}\n{head}\n{row}\n"


def brpic_table(center: str) -> BrPicTable:
    """Homotopy groups of the Brauer-Picard space; literature values only."""
    if center not in CENTERS:
        raise ValueError(f"unsupported center {center!r}; use one of {sorted(CENTERS)}")
    fx = fixtures.lookup(CENTERS[center])
    if fx is None:
        raise LookupError(f"fixture {CENTERS[center]} is not available")
    return BrPicTable(center, tuple(fx.value), fx.citation, fx.notes)
