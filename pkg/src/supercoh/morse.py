"""Algebraic Morse reduction of the normalized bar complex.

Elements of ``G = Z/n_1 + ... + Z/n_r`` are read as normal words
``x_1^a_1 ... x_r^a_r`` for the rewriting system ``x_i^n_i -> 1`` and
``x_j x_i -> x_i x_j`` (``j > i``). The collapsing scheme attached to these
normal forms pairs almost every bar cell ``[w_1 | ... | w_d]`` with a
neighbour along a merge face of coefficient ``+-1``; the unpaired (critical)
cells are the chains of overlapping rewriting tips. The Morse complex built
on them is chain equivalent to the bar complex with trivial coefficients and
is tiny, so integral cohomology follows from a small Smith normal form.

Nothing here refers to the tensor resolution; cells, faces and flows are
computed from the bar differential alone.
"""

from __future__ import annotations

from functools import lru_cache

from .groups import FiniteAbelianGroup

CRITICAL, UP, DOWN = "critical", "up", "down"

Word = tuple[int, ...]
Cell = tuple[Word, ...]


class BarMorse:
    """Collapsing scheme and Morse differentials for the bar complex of ``G``."""

    def __init__(self, group: FiniteAbelianGroup):
        self.group = group
        self.orders = group.factors
        self.r = len(self.orders)
        self._flow: dict[Cell, dict[Cell, int]] = {}
        self._critical: dict[int, list[Cell]] = {}

    # -- words ---------------------------------------------------------------

    def _first(self, w: Word) -> int:
        for i, a in enumerate(w):
            if a:
                return i
        raise ValueError("identity has no letters")

    def _last(self, w: Word) -> int:
        for i in range(self.r - 1, -1, -1):
            if w[i]:
                return i
        raise ValueError("identity has no letters")

    def _tip_prefix(self, w: Word, b: Word) -> Word | None:
        """Shortest prefix ``u`` of ``b`` with ``w u`` reducible, or None if ``w b`` is normal."""
        j, i = self._last(w), self._first(b)
        if i < j:
            return tuple(1 if t == i else 0 for t in range(self.r))
        if i == j:
            c = self.orders[j] - w[j]
            if c <= b[j]:
                return tuple(c if t == j else 0 for t in range(self.r))
        return None

    def _mul(self, a: Word, b: Word) -> Word:
        return tuple((x + y) % n for x, y, n in zip(a, b, self.orders))

    def _sub(self, a: Word, b: Word) -> Word:
        return tuple(x - y for x, y in zip(a, b))

    # -- the matching ----------------------------------------------------------

    def classify(self, cell: Cell) -> tuple[str, Cell | None, int]:
        """Type of ``cell`` with its partner and the merge position joining them.

        ``UP`` means the partner has one more entry and ``cell`` is its face
        at merge position ``pos`` (1-based, merging entries ``pos`` and
        ``pos + 1`` of the partner); ``DOWN`` means the reverse.
        """
        if not cell:
            return CRITICAL, None, 0
        w1 = cell[0]
        if sum(w1) >= 2:
            f = self._first(w1)
            x = tuple(1 if t == f else 0 for t in range(self.r))
            return UP, (x, self._sub(w1, x)) + cell[1:], 1
        for p in range(1, len(cell)):
            u = self._tip_prefix(cell[p - 1], cell[p])
            if u is None:
                merged = cell[: p - 1] + (self._mul(cell[p - 1], cell[p]),) + cell[p + 1 :]
                return DOWN, merged, p
            if u != cell[p]:
                return UP, cell[:p] + (u, self._sub(cell[p], u)) + cell[p + 1 :], p + 1
        return CRITICAL, None, 0

    def boundary(self, cell: Cell) -> dict[Cell, int]:
        """Normalized bar boundary with trivial coefficients."""
        d = len(cell)
        out: dict[Cell, int] = {}

        def add(c: Cell, s: int) -> None:
            v = out.get(c, 0) + s
            if v:
                out[c] = v
            else:
                out.pop(c, None)

        if d == 0:
            return out
        add(cell[1:], 1)
        for i in range(1, d):
            m = self._mul(cell[i - 1], cell[i])
            if any(m):
                add(cell[: i - 1] + (m,) + cell[i + 1 :], -1 if i % 2 else 1)
        add(cell[:-1], -1 if d % 2 else 1)
        return out

    # -- Morse complex ----------------------------------------------------------

    def critical(self, d: int) -> list[Cell]:
        """Critical cells of degree ``d`` in a fixed order."""
        hit = self._critical.get(d)
        if hit is not None:
            return hit
        letters = [tuple(1 if t == i else 0 for t in range(self.r)) for i in range(self.r)]
        cells: list[Cell] = [()]
        for _ in range(d):
            grown = []
            for c in cells:
                if not c:
                    grown.extend((x,) for x in letters)
                    continue
                w = c[-1]
                for i in range(self.r):
                    for a in range(1, self.orders[i]):
                        b = tuple(a if t == i else 0 for t in range(self.r))
                        if self._tip_prefix(w, b) == b:
                            grown.append(c + (b,))
            cells = grown
        # only letters and pure powers occur in chains; keep the fully attached ones
        cells = [c for c in cells if self.classify(c)[0] == CRITICAL]
        cells.sort()
        self._critical[d] = cells
        return cells

    def flow(self, cell: Cell) -> dict[Cell, int]:
        """Image of a cell in the Morse complex (a combination of critical cells)."""
        hit = self._flow.get(cell)
        if hit is not None:
            return hit
        # iterative post-order to avoid deep recursion along long gradient paths
        stack = [cell]
        open_: set[Cell] = set()
        while stack:
            c = stack[-1]
            if c in self._flow:
                stack.pop()
                continue
            kind, partner, pos = self.classify(c)
            if kind == CRITICAL:
                self._flow[c] = {c: 1}
                stack.pop()
                continue
            if kind == DOWN:
                self._flow[c] = {}
                stack.pop()
                continue
            faces = self.boundary(partner)
            coeff = faces.pop(c, 0)
            if coeff not in (1, -1):
                raise ArithmeticError(f"matched face has coefficient {coeff}")
            pending = [f for f in faces if f not in self._flow]
            if pending:
                if c in open_:
                    raise ArithmeticError("gradient path revisits a cell; matching is not acyclic")
                open_.add(c)
                stack.extend(pending)
                continue
            open_.discard(c)
            out: dict[Cell, int] = {}
            for f, s in faces.items():
                for crit, t in self._flow[f].items():
                    v = out.get(crit, 0) - coeff * s * t
                    if v:
                        out[crit] = v
                    else:
                        out.pop(crit, None)
            self._flow[c] = out
            stack.pop()
        return self._flow[cell]

    def differential(self, d: int) -> list[list[int]]:
        """Matrix of the Morse boundary ``M_d -> M_{d-1}`` (rows index ``M_{d-1}``)."""
        rows = self.critical(d - 1)
        pos = {c: i for i, c in enumerate(rows)}
        cols = self.critical(d)
        mat = [[0] * len(cols) for _ in rows]
        for j, c in enumerate(cols):
            for f, s in self.boundary(c).items():
                for crit, t in self.flow(f).items():
                    mat[pos[crit]][j] += s * t
        return mat


@lru_cache(maxsize=None)
def bar_morse(group: FiniteAbelianGroup) -> BarMorse:
    return BarMorse(group)

