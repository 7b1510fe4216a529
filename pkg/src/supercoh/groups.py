"""Finite abelian groups as lists of cyclic factors, and homomorphisms between them."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd
from typing import Iterator, Sequence

DEFAULT_NAMES = "xyzwuvpq"


class GroupError(ValueError):
    """Invalid group descriptor or homomorphism."""


def _factorize(n: int) -> list[tuple[int, int]]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1
    if n > 1:
        out.append((n, 1))
    return out


def two_part(n: int) -> int:
    return n & -n


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """``Z/n_1 + ... + Z/n_r`` with a generator-name prefix per factor."""

    factors: tuple[int, ...]
    names: tuple[str, ...] = ()

    def __init__(self, factors: Sequence[int], names: Sequence[str] | None = None):
        factors = tuple(int(n) for n in factors)
        for n in factors:
            if n < 2:
                raise GroupError(f"cyclic factor order must be >= 2, got {n}")
        if names is None or len(names) == 0:
            if len(factors) > len(DEFAULT_NAMES):
                names = tuple(f"g{i}_" for i in range(len(factors)))
            else:
                names = tuple(DEFAULT_NAMES[: len(factors)])
        names = tuple(names)
        if len(names) != len(factors):
            raise GroupError("one name per cyclic factor is required")
        if len(set(names)) != len(names):
            raise GroupError(f"duplicate factor names {names}")
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "names", names)

    @classmethod
    def parse(cls, text: str, names: str | None = None) -> "FiniteAbelianGroup":
        """Parse ``"4,4"``; the empty string or ``"1"`` is the trivial group."""
        text = text.strip()
        try:
            facs = [int(t) for t in text.split(",") if t.strip()] if text else []
        except ValueError as exc:
            raise GroupError(f"bad group descriptor {text!r}") from exc
        if facs == [1]:
            facs = []
        nm = [s.strip() for s in names.split(",")] if names else None
        return cls(facs, nm)

    @property
    def order(self) -> int:
        out = 1
        for n in self.factors:
            out *= n
        return out

    @property
    def rank(self) -> int:
        return len(self.factors)

    def __len__(self) -> int:
        return len(self.factors)

    def __str__(self) -> str:
        if not self.factors:
            return "0"
        return "+".join(f"Z/{n}" for n in self.factors)

    def descriptor(self) -> str:
        return ",".join(map(str, self.factors))

    # elements are tuples of residues
    def elements(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(*(range(n) for n in self.factors))

    def element_list(self) -> list[tuple[int, ...]]:
        return list(self.elements())

    def identity(self) -> tuple[int, ...]:
        return (0,) * len(self.factors)

    def add(self, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
        return tuple((x + y) % n for x, y, n in zip(a, b, self.factors))

    def neg(self, a: Sequence[int]) -> tuple[int, ...]:
        return tuple((-x) % n for x, n in zip(a, self.factors))

    def index(self, a: Sequence[int]) -> int:
        """Mixed-radix index of an element; the last factor varies fastest."""
        out = 0
        for x, n in zip(a, self.factors):
            out = out * n + x % n
        return out

    def element(self, idx: int) -> tuple[int, ...]:
        out = []
        for n in reversed(self.factors):
            idx, r = divmod(idx, n)
            out.append(r)
        return tuple(reversed(out))

    def element_order(self, a: Sequence[int]) -> int:
        out = 1
        for x, n in zip(a, self.factors):
            k = n // gcd(x, n)
            out = out * k // gcd(out, k)
        return out

    def is_odd(self) -> bool:
        return self.order % 2 == 1


def canonicalize(group: FiniteAbelianGroup) -> FiniteAbelianGroup:
    """Primary decomposition, primes ascending and exponents descending within a prime.

    Names are not carried over since factors may split.
    """
    parts: list[tuple[int, int]] = []
    for n in group.factors:
        parts.extend(_factorize(n))
    parts.sort(key=lambda pe: (pe[0], -pe[1]))
    return FiniteAbelianGroup([p**e for p, e in parts])


def isomorphic(a: FiniteAbelianGroup, b: FiniteAbelianGroup) -> bool:
    return canonicalize(a).factors == canonicalize(b).factors


def invariant_factors(orders: Sequence[int]) -> list[int]:
    """Invariant-factor form ``d_1 | d_2 | ...`` of a product of cyclic groups."""
    byp: dict[int, list[int]] = {}
    for n in orders:
        if n == 0:
            continue
        for p, e in _factorize(n):
            byp.setdefault(p, []).append(p**e)
    if not byp:
        return []
    width = max(len(v) for v in byp.values())
    out = [1] * width
    for p, powers in byp.items():
        powers.sort()
        for k, q in enumerate(powers):
            out[width - len(powers) + k] *= q
    return [d for d in out if d > 1]


@dataclass(frozen=True)
class GroupHom:
    """Homomorphism given by an integer matrix.

    ``matrix[j][i]`` is the coefficient of target generator ``j`` in the image
    of source generator ``i``.
    """

    source: FiniteAbelianGroup
    target: FiniteAbelianGroup
    matrix: tuple[tuple[int, ...], ...]

    def __init__(self, source, target, matrix):
        mat = tuple(tuple(int(v) for v in row) for row in matrix)
        if len(mat) != target.rank or any(len(r) != source.rank for r in mat):
            raise GroupError(
                f"matrix shape must be {target.rank}x{source.rank} for {source} -> {target}"
            )
        for j, m in enumerate(target.factors):
            for i, n in enumerate(source.factors):
                if (n * mat[j][i]) % m:
                    raise GroupError(
                        f"ill-defined homomorphism: generator of Z/{n} sent to element "
                        f"{mat[j][i]} of Z/{m}"
                    )
        mat = tuple(tuple(v % m for v in row) for row, m in zip(mat, target.factors))
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def identity(cls, group: FiniteAbelianGroup) -> "GroupHom":
        n = group.rank
        return cls(group, group, [[int(i == j) for i in range(n)] for j in range(n)])

    def __call__(self, a: Sequence[int]) -> tuple[int, ...]:
        return tuple(
            sum(c * x for c, x in zip(row, a)) % m
            for row, m in zip(self.matrix, self.target.factors)
        )

    def compose(self, first: "GroupHom") -> "GroupHom":
        """``self`` after ``first``."""
        if first.target.factors != self.source.factors:
            raise GroupError("composition of incompatible homomorphisms")
        mat = [
            [sum(self.matrix[k][j] * first.matrix[j][i] for j in range(self.source.rank))
             for i in range(first.source.rank)]
            for k in range(self.target.rank)
        ]
        return GroupHom(first.source, self.target, mat)

    def is_surjective(self) -> bool:
        img = {self(a) for a in self.source.elements()}
        return len(img) == self.target.order


def projection(group: FiniteAbelianGroup, factor: int) -> GroupHom:
    """The coordinate projection onto one cyclic factor."""
    tgt = FiniteAbelianGroup([group.factors[factor]], [group.names[factor]])
    row = [int(i == factor) for i in range(group.rank)]
    return GroupHom(group, tgt, [row])
