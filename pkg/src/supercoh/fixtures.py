"""Literature values that the engine cannot derive on its own.

Every record carries a citation string describing where the value comes
from. The database is immutable at runtime; ``isolated()`` swaps in an empty
one so callers can prove that a computation does not depend on it.
"""

from __future__ import annotations

import contextlib
import os
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Iterator, Mapping

SOURCE = "fermionic strongly fusion 2-category classification (literature)"


@dataclass(frozen=True)
class Fixture:
    key: str
    value: Any
    citation: str
    notes: tuple[str, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {"key": self.key, "citation": self.citation, "notes": list(self.notes)}


def _records() -> dict[str, Fixture]:
    recs = [
        Fixture(
            "sh4-twisted-cyclic-2group",
            {"order": 2, "layers": {"alpha": [2], "beta": [], "gamma": []}},
            f"{SOURCE}: twisted supercohomology SH^(4+w)(BZ/2^n) = Z/2",
            ("the (2,2) entry survives and the (3,1) entry is killed; the argument is "
             "categorical, not spectral",),
        ),
        Fixture(
            "sh4-klein-representatives",
            {"order": 16, "alpha": [], "beta_span": ["c1^2d1", "c1d1^2"], "gamma_orders": [2, 2]},
            f"{SOURCE}: representative triples (triv, beta, gamma) for SH^4(B(Z/2+Z/2))",
            ("conflicts with the exact computation, which gives order 4",),
        ),
        Fixture(
            "em-serre-entry-4-0",
            {"orders": [4, 2, 2]},
            f"{SOURCE}: H^4(K(Z/2+Z/2,2); k^x) = Z/2^2 + Z/4",
            ("needs higher Bocksteins of Eilenberg-MacLane spaces",
             "quadratic forms on Z/2+Z/2 give Z/4^2 + Z/2 instead; the order differs (16 vs 32)"),
        ),
        Fixture(
            "brpic-2Vect",
            ("1", "0", "0", "k^x"),
            f"{SOURCE}: homotopy groups of the Brauer-Picard space of 2Vect",
        ),
        Fixture(
            "brpic-2SVect",
            ("1", "Z/2+Z/2", "Z/2", "k^x"),
            f"{SOURCE}: homotopy groups of the Brauer-Picard space of 2SVect",
        ),
        Fixture(
            "brpic-2Vect_G^pi",
            ("H^3(G; k^x) x| Out(G)", "Z(G) (+) H^2(G; k^x)", "G^ (characters)", "k^x"),
            f"{SOURCE}: homotopy groups for twisted G-graded 2-vector spaces",
            ("symbolic entries only",),
        ),
        Fixture(
            "brpic-Mod(E)",
            ("Mext~(E) x| Aut^br(E)", "Z(Spec(E)) (+) Pic(E)", "Inv(E)", "k^x"),
            f"{SOURCE}: homotopy groups for module 2-categories over a symmetric fusion category E",
            ("symbolic entries only",),
        ),
    ]
    return {r.key: r for r in recs}


_FULL: Mapping[str, Fixture] = MappingProxyType(_records())
_EMPTY: Mapping[str, Fixture] = MappingProxyType({})
_active: list[Mapping[str, Fixture]] = [
    _EMPTY if os.environ.get("SUPERCOH_FIXTURES", "").lower() in ("0", "off", "empty") else _FULL
]


def database() -> Mapping[str, Fixture]:
    return _active[-1]


def lookup(key: str) -> Fixture | None:
    return database().get(key)


@contextlib.contextmanager
def isolated() -> Iterator[None]:
    """Run the enclosed block against an empty fixture database."""
    _active.append(_EMPTY)
    try:
        yield
    finally:
        _active.pop()
