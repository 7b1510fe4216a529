"""First-quadrant cohomological spectral sequences with determinacy tracking.

Entries are finite abelian groups presented by invariant factors together
with generator lifts into the ``E_2`` entry at the same position, so every
page can be related back to concrete ``E_2`` elements. A differential on page
``r`` maps ``(i, j)`` to ``(i + r, j - r + 1)`` and is stored as an integer
matrix on generator coordinates, or flagged as undetermined.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .linalg import Matrix, hom_image_order, matmul, subquotient

KNOWN = "known"
ZERO_BY_POSITION = "zero-by-position"
UNDETERMINED = "undetermined"


class UndeterminedDifferential(RuntimeError):
    """A page turn needed a differential that is not known."""

    def __init__(self, which: list[tuple[int, int]], r: int):
        self.which = which
        self.r = r
        super().__init__(f"undetermined d{r} at sources {which}")


def format_group(orders: Sequence[int], divisible: bool = False) -> str:
    """Compact name such as ``Z/4^2+Z/2`` or ``0``."""
    if divisible:
        return "k^x"
    if not orders:
        return "0"
    counts: dict[int, int] = {}
    for o in orders:
        counts[o] = counts.get(o, 0) + 1
    parts = []
    for o in sorted(counts, reverse=True):
        name = "Z" if o == 0 else f"Z/{o}"
        parts.append(name if counts[o] == 1 else f"{name}^{counts[o]}")
    return "+".join(parts)


@dataclass
class Entry:
    """One spectral-sequence entry on some page.

    ``lifts[g]`` is a vector of ``E_2`` coordinates representing generator
    ``g``. ``history`` holds the subquotient steps from ``E_2``; feeding an
    ``E_2`` vector through them gives coordinates on this page.
    """

    orders: list[int]
    lifts: list[list[int]]
    labels: list[str] = field(default_factory=list)
    e2_orders: list[int] = field(default_factory=list)
    history: tuple = ()
    divisible: bool = False
    fixture: str | None = None

    @classmethod
    def from_e2(cls, orders: Sequence[int], labels: Sequence[str] | None = None, **kw) -> "Entry":
        orders = list(orders)
        n = len(orders)
        lifts = [[int(i == j) for j in range(n)] for i in range(n)]
        labels = list(labels) if labels is not None else [f"e{i}" for i in range(n)]
        return cls(orders, lifts, labels, list(orders), (), **kw)

    @property
    def order(self) -> int:
        if self.divisible:
            return 0
        out = 1
        for o in self.orders:
            out *= o
        return out

    @property
    def is_zero(self) -> bool:
        return not self.divisible and not self.orders

    def coords(self, e2_vec: Sequence[int]) -> list[int]:
        """Coordinates on this page of an ``E_2`` element that survives to it."""
        x = [v % o if o else v for v, o in zip(e2_vec, self.e2_orders)]
        for step in self.history:
            x = step.coords(x)
        return x

    def name(self) -> str:
        return format_group(self.orders, self.divisible)


@dataclass
class Differential:
    matrix: Matrix | None
    status: str
    note: str = ""


@dataclass
class SpectralPage:
    r: int
    entries: dict[tuple[int, int], Entry]
    differentials: dict[tuple[int, int], Differential] = field(default_factory=dict)
    max_i: int = 0
    max_j: int = 0

    def entry(self, pos: tuple[int, int]) -> Entry:
        e = self.entries.get(pos)
        if e is None:
            return Entry([], [], [], [], ())
        return e

    def target(self, pos: tuple[int, int]) -> tuple[int, int]:
        i, j = pos
        return (i + self.r, j - self.r + 1)

    def source_of(self, pos: tuple[int, int]) -> tuple[int, int]:
        i, j = pos
        return (i - self.r, j + self.r - 1)

    def in_window(self, pos: tuple[int, int]) -> bool:
        i, j = pos
        return 0 <= i <= self.max_i and 0 <= j <= self.max_j

    def differential(self, src: tuple[int, int]) -> Differential:
        """The stored differential, or the zero-by-position default."""
        tgt = self.target(src)
        if tgt[0] < 0 or tgt[1] < 0 or self.entry(src).is_zero:
            return Differential(None, ZERO_BY_POSITION)
        if self.in_window(tgt) and self.entry(tgt).is_zero:
            return Differential(None, ZERO_BY_POSITION)
        d = self.differentials.get(src)
        if d is not None:
            return d
        if not self.in_window(tgt):
            return Differential(None, UNDETERMINED, "target outside stored window")
        return Differential(None, UNDETERMINED, "not installed")

    def set_differential(self, src: tuple[int, int], matrix: Matrix | None,
                         status: str = KNOWN, note: str = "") -> None:
        if status == KNOWN and matrix is not None:
            tgt = self.entry(self.target(src))
            s = self.entry(src)
            matrix = [[v % o if o else v for v in row] for row, o in zip(matrix, tgt.orders)]
            if len(matrix) != len(tgt.orders) or any(len(row) != len(s.orders) for row in matrix):
                raise ValueError(f"differential at {src} has the wrong shape")
        self.differentials[src] = Differential(matrix, status, note)

    def copy(self) -> "SpectralPage":
        return SpectralPage(self.r, dict(self.entries), dict(self.differentials), self.max_i, self.max_j)

    # --- output ----------------------------------------------------------------

    def grid(self) -> list[list[str]]:
        rows = []
        for j in range(self.max_j, -1, -1):
            rows.append([self.entry((i, j)).name() for i in range(self.max_i + 1)])
        return rows

    def to_text(self) -> str:
        """Aligned table: ``j`` vertical (top row highest), ``i`` horizontal."""
        cells = self.grid()
        width = max([len(c) for row in cells for c in row] + [3])
        lines = []
        for j, row in zip(range(self.max_j, -1, -1), cells):
            lines.append(f"{j:>2} | " + " ".join(c.rjust(width) for c in row))
        lines.append("---+" + "-" * ((width + 1) * (self.max_i + 1)))
        lines.append("   | " + " ".join(str(i).rjust(width) for i in range(self.max_i + 1)))
        return "\n".join(lines)

    def to_dict(self) -> dict:
        entries = []
        for (i, j) in sorted(self.entries):
            e = self.entries[(i, j)]
            entries.append({
                "i": i, "j": j, "orders": list(e.orders), "labels": list(e.labels),
                "divisible": e.divisible, **({"fixture": e.fixture} if e.fixture else {}),
            })
        diffs = []
        for (i, j) in sorted(self.differentials):
            d = self.differentials[(i, j)]
            diffs.append({"i": i, "j": j, "status": d.status,
                          "matrix": d.matrix, **({"note": d.note} if d.note else {})})
        return {"r": self.r, "max_i": self.max_i, "max_j": self.max_j,
                "entries": entries, "differentials": diffs}


def turn_page(page: SpectralPage, window: Iterable[tuple[int, int]] | None = None,
              assume_zero: bool = False) -> SpectralPage:
    """Pass to the next page.

    Entries outside ``window`` (if given) are carried over unchanged and
    flagged in their labels only through the returned page's missing
    differentials. With ``assume_zero`` undetermined differentials are
    treated as zero instead of raising; callers use this to compute upper
    bounds.
    """
    r = page.r
    win = set(window) if window is not None else None
    missing = []
    new_entries: dict[tuple[int, int], Entry] = {}
    for pos, e in page.entries.items():
        if e.divisible or (win is not None and pos not in win):
            new_entries[pos] = e
            continue
        d_out = page.differential(pos)
        src = page.source_of(pos)
        d_in = page.differential(src)
        for d, s in ((d_out, pos), (d_in, src)):
            if d.status == UNDETERMINED:
                missing.append(s)
        out_m = d_out.matrix if d_out.status == KNOWN else None
        in_m = d_in.matrix if d_in.status == KNOWN else None
        tgt = page.entry(page.target(pos))
        sq = subquotient(e.orders, out_m, tgt.orders, in_m, len(page.entry(src).orders))
        lifts = []
        for g in sq.gens:
            vec = [0] * len(e.e2_orders)
            for c, lift in zip(g, e.lifts):
                if c:
                    for k, v in enumerate(lift):
                        vec[k] += c * v
            lifts.append([v % o if o else v for v, o in zip(vec, e.e2_orders)])
        labels = [_label_for(g, e.labels) for g in sq.gens]
        new_entries[pos] = Entry(sq.orders, lifts, labels, e.e2_orders, e.history + (sq,),
                                 e.divisible, e.fixture)
    if missing and not assume_zero:
        raise UndeterminedDifferential(sorted(set(missing)), r)
    return SpectralPage(r + 1, new_entries, {}, page.max_i, page.max_j)


def _label_for(g: Sequence[int], labels: Sequence[str]) -> str:
    terms = []
    for c, lab in zip(g, labels):
        if c:
            terms.append(lab if c == 1 else f"{c}*{lab}")
    return " + ".join(terms) if terms else "0"


def image_order(page: SpectralPage, src: tuple[int, int]) -> int:
    d = page.differential(src)
    if d.status != KNOWN:
        return 1
    return hom_image_order(page.entry(src).orders, d.matrix, page.entry(page.target(src)).orders)


def check_composition(page: SpectralPage) -> list[tuple[int, int]]:
    """Sources where two composable known differentials fail to compose to zero."""
    bad = []
    for src, d in page.differentials.items():
        mid = page.target(src)
        d2 = page.differentials.get(mid)
        if d.status != KNOWN or d2 is None or d2.status != KNOWN or d.matrix is None or d2.matrix is None:
            continue
        tgt = page.entry(page.target(mid))
        comp = matmul(d2.matrix, d.matrix)
        if any(v % o if o else v for row, o in zip(comp, tgt.orders) for v in row):
            bad.append(src)
    return bad


# --- assembly ---------------------------------------------------------------------------


@dataclass
class Layer:
    position: tuple[int, int]
    orders: list[int]
    labels: list[str]
    lifts: list[list[int]]
    lower: int
    upper: int
    exact: bool


@dataclass
class FiltrationResult:
    degree: int
    layers: list[Layer]
    lower: int
    upper: int
    extension_resolved: bool
    notes: list[str] = field(default_factory=list)

    @property
    def exact(self) -> bool:
        return self.lower == self.upper and all(l.exact for l in self.layers)

    @property
    def order(self) -> int | None:
        return self.upper if self.lower == self.upper else None

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "order_bounds": [self.lower, self.upper],
            "extension_resolved": self.extension_resolved,
            "layers": [
                {"i": l.position[0], "j": l.position[1], "orders": l.orders,
                 "labels": l.labels, "order_bounds": [l.lower, l.upper], "exact": l.exact}
                for l in self.layers
            ],
            "notes": list(self.notes),
        }


def assemble(pages: Sequence[SpectralPage], degree: int) -> FiltrationResult:
    """Filtration layers of total degree ``degree``, bottom row first.

    ``pages`` runs from ``E_2`` to a page beyond which no differential can
    reach the degree (for ``j <= 2`` that is ``E_4``). Undetermined
    differentials are tolerated: their entries keep the upper bound from
    treating them as zero, and the lower bound divides by the largest image
    such a differential could have.
    """
    notes: list[str] = []
    if not pages:
        return FiltrationResult(degree, [], 1, 1, True, ["empty page"])
    last = pages[-1]
    layers = []
    for j in range(0, last.max_j + 1):
        pos = (degree - j, j)
        if pos[0] < 0:
            continue
        e = last.entry(pos)
        if e.divisible:
            notes.append(f"entry {pos} is the divisible group k^x")
            layers.append(Layer(pos, [0], ["k^x"], [], 0, 0, False))
            continue
        upper = e.order
        lower = upper
        exact = True
        for p in pages[:-1]:
            for src in (pos, p.source_of(pos)):
                d = p.differential(src)
                if d.status == UNDETERMINED:
                    exact = False
                    a = p.entry(src).order
                    b = p.entry(p.target(src)).order
                    lower //= max(1, min(a, b, lower))
                    notes.append(f"d{p.r} from {src} undetermined" + (f" ({d.note})" if d.note else ""))
        layers.append(Layer(pos, list(e.orders), list(e.labels), [list(v) for v in e.lifts],
                            max(lower, 1), upper, exact))
    lower = 1
    upper = 1
    for l in layers:
        lower *= l.lower
        upper *= l.upper
    nontrivial = sum(1 for l in layers if l.upper > 1)
    resolved = nontrivial <= 1
    if not resolved:
        notes.append("extension problem between filtration layers is not resolved")
    notes = list(dict.fromkeys(notes))
    return FiltrationResult(degree, layers, lower, upper, resolved, notes)
