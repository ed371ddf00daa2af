"""Incremental SAT oracle with assumptions, models and cores.

A thin layer over :mod:`pysat` that adds per-level activation literals,
retirement bookkeeping and a cooperative deadline.
"""

from __future__ import annotations

import time
from typing import Iterable, Sequence

from pysat.solvers import Solver

DEFAULT_BACKEND = "minisat22"


class ResourceLimit(RuntimeError):
    """Raised when the configured time budget is exhausted."""


class Deadline:
    def __init__(self, seconds: float | None = None):
        self.at = None if seconds is None else time.monotonic() + seconds

    def check(self) -> None:
        if self.at is not None and time.monotonic() > self.at:
            raise ResourceLimit("time budget exhausted")


HELPER_BASE = 1 << 40


class Model:
    """Frozen view of one satisfying assignment in external numbering."""

    __slots__ = ("_m", "_map")

    def __init__(self, m: list[int], mapping: dict[int, int]):
        self._m = m
        self._map = mapping

    def value(self, lit: int) -> bool:
        x = self._map.get(abs(lit))
        if x is None or x > len(self._m):
            val = False
        else:
            val = self._m[x - 1] > 0
        return val if lit > 0 else not val


class SatSolver:
    """One incremental solver instance.

    Callers use their own variable indices.  Internally variables are
    renumbered densely in order of first use, and helper variables from
    :meth:`fresh` live in a separate range above ``HELPER_BASE``, so a
    rebuilt solver starts small again no matter how many helpers its
    predecessors consumed.
    """

    def __init__(self, backend: str = DEFAULT_BACKEND, deadline: Deadline | None = None):
        self._backend = backend
        self._s = Solver(name=backend)
        self.deadline = deadline or Deadline()
        self.loaded = 0
        self.retired = 0
        self.calls = 0
        self._map: dict[int, int] = {}
        self._helpers = 0
        self._sat: bool | None = None
        self._model: Model | None = None
        self._core: list[int] | None = None

    def close(self) -> None:
        self._s.delete()

    def __enter__(self) -> "SatSolver":
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()

    def _int(self, lit: int) -> int:
        v = lit if lit > 0 else -lit
        x = self._map.get(v)
        if x is None:
            x = len(self._map) + 1
            self._map[v] = x
        return x if lit > 0 else -x

    def add_clause(self, clause: Iterable[int]) -> None:
        self._s.add_clause([self._int(l) for l in clause])
        self.loaded += 1

    def add_clauses(self, clauses: Iterable[Iterable[int]]) -> None:
        for c in clauses:
            self.add_clause(c)

    def add_guarded(self, act: int, clause: Sequence[int]) -> None:
        """Add ``clause`` active only while ``act`` is assumed."""
        self.add_clause((-act, *clause))

    def fresh(self) -> int:
        self._helpers += 1
        return HELPER_BASE + self._helpers

    def retire(self, n: int = 1) -> None:
        self.retired += n

    def solve(self, assumptions: Sequence[int] = ()) -> bool:
        self.deadline.check()
        self.calls += 1
        res = bool(self._s.solve(assumptions=[self._int(l) for l in assumptions]))
        self._sat = res
        self._model = self._core = None
        return res

    def solve_with_temp(self, clause: Sequence[int], assumptions: Sequence[int]) -> bool:
        """Solve with an extra clause that is dropped afterwards."""
        t = self.fresh()
        self.add_clause((-t, *clause))
        try:
            return self.solve([t, *assumptions])
        finally:
            self.add_clause((-t,))
            self.retired += 2

    def model(self) -> Model:
        assert self._sat, "no model: last call was not satisfiable"
        if self._model is None:
            self._model = Model(self._s.get_model() or [], self._map)
        return self._model

    def value(self, lit: int) -> bool:
        """Truth value of ``lit`` in the last model (unassigned counts as false)."""
        return self.model().value(lit)

    @property
    def core(self) -> list[int]:
        assert self._sat is False, "no core: last call was satisfiable"
        if self._core is None:
            rev = {x: v for v, x in self._map.items()}
            self._core = [rev[l] if l > 0 else -rev[-l] for l in (self._s.get_core() or [])]
        return self._core


def solve_once(clauses: Iterable[Iterable[int]], assumptions: Sequence[int] = (), backend: str = DEFAULT_BACKEND):
    """Fresh-solver satisfiability check; returns the model or ``None``."""
    with Solver(name=backend, bootstrap_with=[list(c) for c in clauses]) as s:
        if s.solve(assumptions=list(assumptions)):
            return s.get_model()
        return None
