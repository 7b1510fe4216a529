"""Atiyah-Hirzebruch spectral sequence for (twisted) supercohomology of BG.

The coefficient spectrum has homotopy ``Z/2, Z/2, k^x`` in rows ``j = 2, 1, 0``.
Untwisted ``d2`` is ``Sq^2`` out of row 2 and ``(-1)^{Sq^2}`` out of row 1.
Twisted ``d2`` is unknown and flagged as such. ``d3`` runs from row 2 to
row 0 and is settled by position, by naturality along homomorphisms to
smaller groups, or left undetermined.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import fixtures
from .cache import Memo
from .groups import FiniteAbelianGroup, GroupError, GroupHom, canonicalize, two_part
from .grpcoh import Mod2Class, exp_map, kx_cohomology, mod2_ring, pullback
from .linalg import gf2_nullspace, gf2_row_basis
from .specseq import (
    KNOWN,
    UNDETERMINED,
    ZERO_BY_POSITION,
    Entry,
    FiltrationResult,
    Layer,
    SpectralPage,
    assemble,
    turn_page,
)
from .steenrod import sq, sq_matrix

POLICIES = ("forbid", "allow", "require")
MAX_DEGREE = 6

_memo = Memo()


class FixtureRequired(LookupError):
    """``fixture_policy='require'`` but neither computation nor fixture settles the query."""


# --- queries and results ------------------------------------------------------------------


@dataclass(frozen=True)
class SuperCohQuery:
    group: FiniteAbelianGroup
    twist: Mod2Class | None = None
    degree: int = 4
    naturality_homs: tuple[GroupHom, ...] = ()
    fixture_policy: str = "forbid"

    def __post_init__(self) -> None:
        if not 1 <= self.degree <= MAX_DEGREE:
            raise ValueError(f"degree must lie in 1..{MAX_DEGREE}")
        if self.fixture_policy not in POLICIES:
            raise ValueError(f"fixture_policy must be one of {POLICIES}")
        if self.twist is not None:
            if self.twist.ring.group != self.group:
                raise GroupError("twist lives over a different group")
            if self.twist.degree != 2:
                raise ValueError("twist must have degree 2")
        for h in self.naturality_homs:
            if h.source != self.group:
                raise GroupError("naturality homomorphisms must start at the queried group")
        object.__setattr__(self, "naturality_homs", tuple(self.naturality_homs))

    @property
    def twisted(self) -> bool:
        return self.twist is not None and bool(self.twist)


@dataclass
class SuperCohResult:
    query: SuperCohQuery
    status: str
    filtration: FiltrationResult
    alpha_layer: list[Mod2Class]
    beta_layer: dict
    gamma_layer: dict
    notes: list[str] = field(default_factory=list)
    fixtures_used: list[fixtures.Fixture] = field(default_factory=list)
    d3: dict = field(default_factory=dict)
    pages: list[SpectralPage] = field(default_factory=list)

    @property
    def order(self) -> int | None:
        return self.filtration.order

    @property
    def bounds(self) -> tuple[int, int]:
        return self.filtration.lower, self.filtration.upper

    def layer(self, j: int) -> Layer | None:
        for l in self.filtration.layers:
            if l.position[1] == j:
                return l
        return None

    def to_dict(self) -> dict:
        q = self.query
        return {
            "group": list(q.group.factors),
            "twist": str(q.twist) if q.twist is not None else "0",
            "degree": q.degree,
            "status": self.status,
            "order": self.order,
            "order_bounds": list(self.bounds),
            "filtration": self.filtration.to_dict(),
            "alpha_layer": [str(c) for c in self.alpha_layer],
            "beta_layer": self.beta_layer,
            "gamma_layer": self.gamma_layer,
            "d3": {f"{k[0]},{k[1]}": v for k, v in sorted(self.d3.items())},
            "notes": list(self.notes),
            "fixtures": [f.to_dict() for f in self.fixtures_used],
        }


# --- E2 page and d2 --------------------------------------------------------------------------


def build_super_e2(group: FiniteAbelianGroup, degree: int = 4, twist: Mod2Class | None = None) -> SpectralPage:
    """``E_2`` page for total degree ``degree`` over the window ``i <= degree + 3, j <= 2``.

    The entries do not depend on the twist.
    """
    max_i = degree + 3
    ring = mod2_ring(group)
    entries: dict[tuple[int, int], Entry] = {}
    entries[(0, 0)] = Entry([0], [[1]], ["k^x"], [0], (), divisible=True)
    for i in range(1, max_i + 1):
        pres = kx_cohomology(group, i)
        if pres.orders:
            labels = [f"k{i}_{g}" for g in range(pres.ngens)]
            entries[(i, 0)] = Entry.from_e2(pres.orders, labels)
    for i in range(0, max_i + 1):
        names = [ring.monomial_name(k) for k in ring.basis(i)]
        if names:
            for j in (1, 2):
                entries[(i, j)] = Entry.from_e2([2] * len(names), names)
    return SpectralPage(2, entries, {}, max_i, 2)


def _exp_sq2_matrix(group: FiniteAbelianGroup, i: int) -> list[list[int]]:
    ring = mod2_ring(group)
    cols = [exp_map(group, i + 2, sq(group, 2, ring.monomial(k))) for k in ring.basis(i)]
    n = kx_cohomology(group, i + 2).ngens
    return [[c[r] for c in cols] for r in range(n)]


def install_d2_untwisted(page: SpectralPage, group: FiniteAbelianGroup) -> SpectralPage:
    """``d2 = Sq^2`` from row 2 and ``(-1)^{Sq^2}`` from row 1, for columns ``i >= 1``."""
    out = page.copy()
    for i in range(0, page.max_i + 1):
        for j in (2, 1):
            src = (i, j)
            if page.entry(src).is_zero or i + 2 > page.max_i:
                continue
            if i == 0:
                out.set_differential(src, None, UNDETERMINED, "column 0 lies outside the known formula")
                continue
            if j == 2:
                mat = sq_matrix(group, 2, i).astype(int).tolist()
            else:
                mat = _exp_sq2_matrix(group, i)
            out.set_differential(src, mat, KNOWN)
    return out


def install_d2_twisted(page: SpectralPage, twist: Mod2Class) -> SpectralPage:
    """Flag every ``d2`` leg as undetermined; a zero twist belongs on the untwisted path."""
    if not twist:
        raise ValueError("zero twist: use install_d2_untwisted")
    out = page.copy()
    for (i, j), e in page.entries.items():
        if j in (1, 2) and not e.is_zero and i + 2 <= page.max_i:
            out.set_differential((i, j), None, UNDETERMINED, "twisted d2 is not known")
    return out


def _windows(n: int) -> tuple[list[tuple[int, int]], list[tuple[int, int]]]:
    e3 = [(n, 0), (n - 1, 1), (n - 2, 2)]
    e2 = e3 + [(n - 3, 2), (n + 1, 0)]
    return [p for p in e2 if p[0] >= 0], [p for p in e3 if p[0] >= 0]


def e3_page(group: FiniteAbelianGroup, degree: int = 4) -> SpectralPage:
    """Untwisted ``E_3`` page around total degree ``degree`` (memoized)."""

    def build() -> SpectralPage:
        e2 = install_d2_untwisted(build_super_e2(group, degree), group)
        w2, _ = _windows(degree)
        return turn_page(e2, w2, assume_zero=True)

    return _memo.get_or_compute(("e3", group, degree), build)


# --- d3 by naturality ------------------------------------------------------------------------


def _two_torsion(entry: Entry) -> list[int]:
    return [k for k, o in enumerate(entry.orders) if o % 2 == 0]


def _to_bits(entry: Entry, coords: Sequence[int]) -> list[int]:
    """F2 coordinates of a 2-torsion element on the basis ``o_k / 2 * e_k``."""
    bits = []
    for k, (c, o) in enumerate(zip(coords, entry.orders)):
        c %= o
        if o % 2 == 0:
            if c not in (0, o // 2):
                raise ArithmeticError("element is not 2-torsion")
            bits.append(1 if c else 0)
        elif c:
            raise ArithmeticError("element is not 2-torsion")
    return bits


def _combine(entry: Entry, coords: Sequence[int]) -> list[int]:
    vec = [0] * len(entry.e2_orders)
    for c, lift in zip(coords, entry.lifts):
        if c:
            for k, v in enumerate(lift):
                vec[k] += c * v
    return [v % o if o else v for v, o in zip(vec, entry.e2_orders)]


@dataclass
class D3Solution:
    """Outcome of the naturality solver for one ``d3`` source.

    ``matrix`` is in page coordinates of the target entry when every entry
    of ``d3`` is forced, else ``None`` with the reduced constraints in
    ``residual``. ``equations`` and ``variables`` keep the full F2 system
    for re-substitution.
    """

    source: tuple[int, int]
    status: str
    matrix: list[list[int]] | None
    equations: np.ndarray
    variables: list[str]
    n_unknown: int
    residual: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def check(self) -> bool:
        """Re-substitute the forced assignment: some completion solves every equation."""
        if self.matrix is None or self.equations.size == 0:
            return True
        eq = self.equations
        fixed = eq[:, : self.n_unknown]
        rest = eq[:, self.n_unknown :]
        x = np.array(self._bits(), dtype=np.uint8)
        rhs = (fixed.astype(int) @ x.astype(int)) % 2
        if rest.shape[1] == 0:
            return not rhs.any()
        aug = np.concatenate([rest, rhs.reshape(-1, 1).astype(np.uint8)], axis=1)
        return _rank(rest) == _rank(aug)

    def _bits(self) -> list[int]:
        return [0] * self.n_unknown if self.matrix is not None else []

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "matrix": self.matrix,
            "residual": self.residual,
            "notes": self.notes,
        }


def _rank(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    return len(gf2_row_basis(a % 2))


def solve_d3_by_naturality(page3: SpectralPage, group: FiniteAbelianGroup,
                           unknowns: Sequence[tuple[int, int]], homs: Sequence[GroupHom],
                           degree: int = 4) -> dict[tuple[int, int], D3Solution]:
    """Constrain ``d3`` on ``page3`` through ``h^* d3 = d3 h^*`` for each ``h: G -> H``.

    The comparison ``d3`` on each ``H`` is itself an unknown unless it is zero
    by position. A ``G`` unknown is forced when it vanishes on the whole
    solution space of the homogeneous system.
    """
    out: dict[tuple[int, int], D3Solution] = {}
    for src in unknowns:
        tgt = page3.target(src)
        s_g, t_g = page3.entry(src), page3.entry(tgt)
        if s_g.is_zero or t_g.is_zero:
            out[src] = D3Solution(src, ZERO_BY_POSITION, [[0] * len(s_g.orders) for _ in t_g.orders],
                                  np.zeros((0, 0), np.uint8), [], 0)
            continue
        if any(o != 2 for o in s_g.orders):
            raise ValueError("d3 sources are expected in a mod-2 row")
        tor_g = _two_torsion(t_g)
        m_g, n_g = len(tor_g), len(s_g.orders)
        variables = [f"d3[{s_g.labels[c]}]_{t_g.labels[k]}" for k in tor_g for c in range(n_g)]
        blocks: list[tuple[np.ndarray, np.ndarray]] = []
        notes: list[str] = []
        for h in homs:
            hp = e3_page(h.target, degree)
            s_h, t_h = hp.entry(src), hp.entry(tgt)
            if s_h.is_zero:
                notes.append(f"{h.target}: source entry vanishes, no constraint")
                continue
            ring_h = mod2_ring(h.target)
            # h^* on the source entry, columns are images of H generators
            a = np.zeros((n_g, len(s_h.orders)), dtype=np.uint8)
            for c, lift in enumerate(s_h.lifts):
                cls = ring_h.from_vector(src[0], lift)
                vec = pullback(h, cls).vector()
                a[:, c] = np.array(s_g.coords([int(v) for v in vec]), dtype=np.uint8) % 2
            tor_h = _two_torsion(t_h)
            b = np.zeros((m_g, len(tor_h)), dtype=np.uint8)
            for l, k in enumerate(tor_h):
                e = [0] * len(t_h.orders)
                e[k] = t_h.orders[k] // 2
                img = pullback(h, _combine(t_h, e), "Q/Z", tgt[0])
                b[:, l] = _to_bits(t_g, t_g.coords(img))
            if t_h.is_zero or not tor_h:
                notes.append(f"{h.target}: comparison d3 is zero by position")
            blocks.append((a, b))
        n_extra = sum(b.shape[1] * a.shape[1] for a, b in blocks)
        rows = []
        off = m_g * n_g
        for a, b in blocks:
            m_h, s_h_dim = b.shape[1], a.shape[1]
            for col in range(s_h_dim):
                for k in range(m_g):
                    row = np.zeros(m_g * n_g + n_extra, dtype=np.uint8)
                    # (D_G a)_k = sum_c D_G[k, c] a[c, col]
                    row[k * n_g : (k + 1) * n_g] = a[:, col]
                    # (B D_H)_k = sum_l B[k, l] D_H[l, col]
                    for l in range(m_h):
                        if b[k, l]:
                            row[off + l * s_h_dim + col] ^= 1
                    rows.append(row)
            off += m_h * s_h_dim
        eqs = np.array(rows, dtype=np.uint8) if rows else np.zeros((0, m_g * n_g + n_extra), np.uint8)
        if not rows:
            out[src] = D3Solution(src, UNDETERMINED, None, eqs, variables, m_g * n_g,
                                  ["no constraints"], notes)
            continue
        null = gf2_nullspace(eqs) if eqs.shape[1] else np.zeros((0, 0), np.uint8)
        free_g = null[:, : m_g * n_g] if null.size else np.zeros((0, m_g * n_g), np.uint8)
        if not free_g.any():
            mat = [[0] * n_g for _ in t_g.orders]
            sol = D3Solution(src, "naturality", mat, eqs, variables, m_g * n_g, [], notes)
            if not sol.check():
                raise ArithmeticError("forced d3 fails re-substitution")
            out[src] = sol
            continue
        basis = gf2_row_basis(free_g)
        residual = []
        for r in basis:
            terms = [variables[v] for v in np.nonzero(r)[0]]
            residual.append("free direction: " + " + ".join(terms))
        out[src] = D3Solution(src, UNDETERMINED, None, eqs, variables, m_g * n_g, residual, notes)
    return out


def mod2_reductions(group: FiniteAbelianGroup) -> list[GroupHom]:
    """Surjections halving one cyclic factor of order divisible by 4."""
    homs = []
    for i, n in enumerate(group.factors):
        if n % 4:
            continue
        facs = list(group.factors)
        facs[i] = n // 2
        tgt = FiniteAbelianGroup(facs, group.names)
        homs.append(GroupHom(group, tgt, [[int(a == b) for a in range(group.rank)] for b in range(group.rank)]))
    return homs


def coordinate_projections(group: FiniteAbelianGroup) -> list[GroupHom]:
    """Projections onto each cyclic factor."""
    homs = []
    for i, n in enumerate(group.factors):
        tgt = FiniteAbelianGroup([n], [group.names[i]])
        homs.append(GroupHom(group, tgt, [[int(a == i) for a in range(group.rank)]]))
    return homs


# --- the pipeline -------------------------------------------------------------------------


def compute_sh(query: SuperCohQuery) -> SuperCohResult:
    """``SH^{n(+w)}(BG)`` with layers, order bounds and provenance."""
    G, n = query.group, query.degree
    ring = mod2_ring(G)
    notes: list[str] = []
    e2 = build_super_e2(G, n, query.twist)
    w2, w3 = _windows(n)
    if query.twisted:
        e2 = install_d2_twisted(e2, query.twist)
    else:
        e2 = install_d2_untwisted(e2, G)
    e3 = turn_page(e2, w2, assume_zero=True)
    d3: dict[tuple[int, int], dict] = {}
    for src in [(n - 3, 2), (n - 2, 2)]:
        if src[0] < 0:
            continue
        if query.twisted:
            # E3 itself is only an upper bound, so naturality has nothing firm to act on
            if not e3.differential(src).status == ZERO_BY_POSITION:
                e3.set_differential(src, None, UNDETERMINED, "twisted page")
            continue
        d = e3.differential(src)
        if d.status == ZERO_BY_POSITION:
            d3[src] = {"status": ZERO_BY_POSITION}
            continue
        if query.naturality_homs:
            sol = solve_d3_by_naturality(e3, G, [src], query.naturality_homs, n)[src]
            d3[src] = sol.to_dict()
            if sol.matrix is not None:
                e3.set_differential(src, sol.matrix, KNOWN, "forced by naturality")
                continue
            e3.set_differential(src, None, UNDETERMINED, "naturality leaves free directions")
        else:
            d3[src] = {"status": UNDETERMINED, "residual": ["no homomorphisms supplied"]}
            e3.set_differential(src, None, UNDETERMINED, "no naturality data")
    e4 = turn_page(e3, w3, assume_zero=True)
    filt = assemble([e2, e3, e4], n)
    status = "exact" if filt.exact else "bounded"
    used: list[fixtures.Fixture] = []
    if status == "bounded" and query.fixture_policy != "forbid":
        fx = _fixture_for(query)
        if fx is not None:
            used.append(fx)
            filt = _fixture_filtration(query, fx, filt)
            status = "fixture"
            notes.append(f"fixture {fx.key}: {fx.citation}")
        elif query.fixture_policy == "require":
            raise FixtureRequired(f"no fixture settles SH^{n} for {G} with twist {query.twist}")
    if query.twisted and status == "bounded":
        notes.append("twisted d2 differentials are unknown; the order is only bounded")
    alpha = [ring.from_vector(n - 2, v) for v in _layer_lifts(filt, 2)] if n >= 2 else []
    beta = _mod2_layer(ring, filt, 1, n - 1)
    gamma = _kx_layer(filt, G, n)
    notes.extend(filt.notes)
    return SuperCohResult(query, status, filt, alpha, beta, gamma, list(dict.fromkeys(notes)),
                          used, d3, [e2, e3, e4])


def _layer_lifts(filt: FiltrationResult, j: int) -> list[list[int]]:
    for l in filt.layers:
        if l.position[1] == j:
            return l.lifts
    return []


def _mod2_layer(ring, filt: FiltrationResult, j: int, deg: int) -> dict:
    for l in filt.layers:
        if l.position[1] == j:
            reps = [str(ring.from_vector(deg, v)) for v in l.lifts]
            return {"orders": l.orders, "representatives": reps, "order_bounds": [l.lower, l.upper]}
    return {"orders": [], "representatives": [], "order_bounds": [1, 1]}


def _kx_layer(filt: FiltrationResult, group: FiniteAbelianGroup, n: int) -> dict:
    for l in filt.layers:
        if l.position[1] == 0:
            return {"orders": l.orders, "e2_coordinates": l.lifts,
                    "ambient": list(kx_cohomology(group, n).orders) if n else [0],
                    "order_bounds": [l.lower, l.upper]}
    return {"orders": [], "e2_coordinates": [], "ambient": [], "order_bounds": [1, 1]}


def _fixture_for(query: SuperCohQuery) -> fixtures.Fixture | None:
    G = canonicalize(query.group)
    if (query.twisted and query.degree == 4 and G.rank == 1 and two_part(G.factors[0]) == G.factors[0]):
        return fixtures.lookup("sh4-twisted-cyclic-2group")
    return None


def _fixture_filtration(query: SuperCohQuery, fx: fixtures.Fixture, computed: FiltrationResult) -> FiltrationResult:
    """Layers from a fixture value, keeping the computed labels where they survive."""
    n = query.degree
    layers = []
    for l in computed.layers:
        key = {2: "alpha", 1: "beta", 0: "gamma"}[l.position[1]]
        orders = list(fx.value["layers"][key])
        size = 1
        for o in orders:
            size *= o
        if orders == l.orders:
            layers.append(Layer(l.position, orders, l.labels, l.lifts, size, size, True))
        elif not orders:
            layers.append(Layer(l.position, [], [], [], 1, 1, True))
        else:
            layers.append(Layer(l.position, orders, [f"fixture {key}"], [], size, size, True))
    total = fx.value["order"]
    return FiltrationResult(n, layers, total, total, True, [f"layers from fixture {fx.key}"])


def clear_caches() -> None:
    _memo.clear()
