"""Variables, literals, clauses and cubes.

Literals are DIMACS-style signed integers: ``v`` is the positive literal of
variable ``v`` and ``-v`` its negation, so negation is an involution and the
integers can be handed to a SAT backend unchanged.  Clauses and cubes are
tuples of literals kept in canonical order (by variable index, positive
phase first), which makes structural equality coincide with set equality.
Variable indices are allocated in kind blocks (state, input, internal,
next-state, then auxiliary) so that ordering by index is ordering by kind.
"""

from __future__ import annotations

import enum
from typing import Iterable, Sequence

Lit = int
Clause = tuple[int, ...]
Cube = tuple[int, ...]


class TautologyError(ValueError):
    """Raised when a clause would contain both a literal and its negation."""


class VarKind(enum.Enum):
    STATE = "state"
    INPUT = "input"
    NEXT = "next-state"
    AUX = "auxiliary"
    INTERNAL = "tseitin-internal"


def var(lit: Lit) -> int:
    return lit if lit > 0 else -lit


def neg(lit: Lit) -> Lit:
    return -lit


def lit_key(lit: Lit) -> tuple[int, bool]:
    return (lit if lit > 0 else -lit, lit < 0)


def canonicalize(lits: Iterable[Lit]) -> Clause:
    """Deduplicate and sort ``lits``; raise :class:`TautologyError` on ``l, -l``."""
    s = set(lits)
    for l in s:
        if -l in s:
            raise TautologyError(f"literal {l} occurs in both phases")
    return tuple(sorted(s, key=lit_key))


def try_canonicalize(lits: Iterable[Lit]) -> Clause | None:
    """Like :func:`canonicalize` but returns ``None`` for tautologies."""
    s = set(lits)
    for l in s:
        if -l in s:
            return None
    return tuple(sorted(s, key=lit_key))


def clause_subsumes(c1: Sequence[Lit], c2: Sequence[Lit]) -> bool:
    """True iff every literal of ``c1`` occurs in ``c2`` (both duplicate-free)."""
    if len(c1) > len(c2):
        return False
    return set(c1).issubset(c2)


def negate_cube(q: Sequence[Lit]) -> Clause:
    return tuple(sorted((-l for l in q), key=lit_key))


# a clause and a cube share representation, so negation is the same map
negate_clause = negate_cube


def evaluate_clause(c: Sequence[Lit], true_lits: set[int] | frozenset[int]) -> bool:
    return any(l in true_lits for l in c)


class VarTable:
    """Allocates variable indices and remembers the kind of each one."""

    def __init__(self) -> None:
        self._kinds: list[VarKind | None] = [None]

    @property
    def max_var(self) -> int:
        return len(self._kinds) - 1

    def new(self, kind: VarKind) -> int:
        self._kinds.append(kind)
        return len(self._kinds) - 1

    def kind(self, v: int) -> VarKind:
        k = self._kinds[v]
        if k is None:
            raise KeyError(v)
        return k

    def __len__(self) -> int:
        return self.max_var
