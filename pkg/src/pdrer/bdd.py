"""Reduced ordered BDDs for clause implication checks.

Nodes are integers indexing into parallel arrays; ``0`` and ``1`` are the
terminals.  The variable order is the state-variable index order and is
never changed.  There are no complement edges.
"""

from __future__ import annotations

import logging
from typing import Sequence

from .aux import AuxCircuit, Op, UndefinedAuxiliary

log = logging.getLogger(__name__)

FALSE = 0
TRUE = 1
_TERMINAL_LEVEL = 1 << 60


class BddManager:
    def __init__(self, watchdog: int = 1_000_000):
        self._var = [_TERMINAL_LEVEL, _TERMINAL_LEVEL]
        self._lo = [0, 1]
        self._hi = [0, 1]
        self._unique: dict[tuple[int, int, int], int] = {}
        self._and: dict[tuple[int, int], int] = {}
        self._xor: dict[tuple[int, int], int] = {}
        self._not: dict[int, int] = {}
        self._imp: dict[tuple[int, int], bool] = {}
        self._clause_cache: dict[tuple[tuple[int, ...], int], int] = {}
        self._lit_cache: dict[int, int] = {}
        self.watchdog = watchdog
        self._warned = False

    def __len__(self) -> int:
        return len(self._var)

    def node(self, f: int) -> tuple[int, int, int]:
        return self._var[f], self._lo[f], self._hi[f]

    def mk(self, v: int, lo: int, hi: int) -> int:
        if lo == hi:
            return lo
        key = (v, lo, hi)
        n = self._unique.get(key)
        if n is None:
            n = len(self._var)
            self._var.append(v)
            self._lo.append(lo)
            self._hi.append(hi)
            self._unique[key] = n
            if n > self.watchdog and not self._warned:
                self._warned = True
                log.warning("BDD node table exceeded %d nodes", self.watchdog)
        return n

    def var(self, v: int) -> int:
        return self.mk(v, FALSE, TRUE)

    def NOT(self, f: int) -> int:
        if f <= 1:
            return 1 - f
        r = self._not.get(f)
        if r is None:
            r = self.mk(self._var[f], self.NOT(self._lo[f]), self.NOT(self._hi[f]))
            self._not[f] = r
        return r

    def AND(self, f: int, g: int) -> int:
        if f == FALSE or g == FALSE:
            return FALSE
        if f == TRUE:
            return g
        if g == TRUE or f == g:
            return f
        if f > g:
            f, g = g, f
        key = (f, g)
        r = self._and.get(key)
        if r is not None:
            return r
        vf, vg = self._var[f], self._var[g]
        v = min(vf, vg)
        f0, f1 = (self._lo[f], self._hi[f]) if vf == v else (f, f)
        g0, g1 = (self._lo[g], self._hi[g]) if vg == v else (g, g)
        r = self.mk(v, self.AND(f0, g0), self.AND(f1, g1))
        self._and[key] = r
        return r

    def OR(self, f: int, g: int) -> int:
        return self.NOT(self.AND(self.NOT(f), self.NOT(g)))

    def XOR(self, f: int, g: int) -> int:
        if f == g:
            return FALSE
        if f == FALSE:
            return g
        if g == FALSE:
            return f
        if f == TRUE:
            return self.NOT(g)
        if g == TRUE:
            return self.NOT(f)
        if f > g:
            f, g = g, f
        key = (f, g)
        r = self._xor.get(key)
        if r is not None:
            return r
        vf, vg = self._var[f], self._var[g]
        v = min(vf, vg)
        f0, f1 = (self._lo[f], self._hi[f]) if vf == v else (f, f)
        g0, g1 = (self._lo[g], self._hi[g]) if vg == v else (g, g)
        r = self.mk(v, self.XOR(f0, g0), self.XOR(f1, g1))
        self._xor[key] = r
        return r

    def implies(self, f: int, g: int) -> bool:
        """True iff ``f -> g`` is valid, without building ``NOT f OR g``."""
        if f == FALSE or g == TRUE or f == g:
            return True
        if f == TRUE or g == FALSE:
            # f is TRUE and g not TRUE, or g is FALSE and f not FALSE
            return False
        key = (f, g)
        r = self._imp.get(key)
        if r is not None:
            return r
        vf, vg = self._var[f], self._var[g]
        v = min(vf, vg)
        f0, f1 = (self._lo[f], self._hi[f]) if vf == v else (f, f)
        g0, g1 = (self._lo[g], self._hi[g]) if vg == v else (g, g)
        r = self.implies(f0, g0) and self.implies(f1, g1)
        self._imp[key] = r
        return r

    def evaluate(self, f: int, assignment: dict[int, bool]) -> bool:
        while f > 1:
            f = self._hi[f] if assignment[self._var[f]] else self._lo[f]
        return f == TRUE

    # clause construction

    def literal(self, lit: int, aux: AuxCircuit) -> int:
        v = abs(lit)
        r = self._lit_cache.get(v)
        if r is None:
            if aux.is_aux(v):
                d = aux.definition(v)
                a, b = self.literal(d.lhs, aux), self.literal(d.rhs, aux)
                r = self.AND(a, b) if d.op is Op.AND else self.XOR(a, b)
            elif aux.is_state(v):
                r = self.var(v)
            else:
                raise UndefinedAuxiliary(f"variable {v} is neither state nor defined auxiliary")
            self._lit_cache[v] = r
        return r if lit > 0 else self.NOT(r)

    def clause(self, c: Sequence[int], aux: AuxCircuit) -> int:
        """BDD over state variables of ``c`` with auxiliary literals expanded."""
        key = (tuple(c), aux.epoch)
        r = self._clause_cache.get(key)
        if r is None:
            r = FALSE
            for l in c:
                r = self.OR(r, self.literal(l, aux))
            self._clause_cache[key] = r
        return r


def build_clause_bdd(m: BddManager, c: Sequence[int], e: AuxCircuit) -> int:
    return m.clause(c, e)


def bdd_implies(m: BddManager, f: int, g: int) -> bool:
    return m.implies(f, g)
