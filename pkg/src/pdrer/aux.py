"""Auxiliary (extension) variables and their defining circuit.

Every auxiliary variable ``a`` is defined as ``a <-> l1 AND l2`` or
``a <-> l1 XOR l2`` over state variables and earlier auxiliary variables.
XOR definitions are stored over positive operands; the phase is folded into
the literal handed back to the caller.  Each definition also gets a primed
copy ``a' <-> l1' op l2'`` over next-state variables.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .logic import Clause, VarKind, VarTable, lit_key, try_canonicalize


class AuxError(ValueError):
    pass


class CyclicDefinition(AuxError):
    pass


class NotAuxiliary(AuxError):
    pass


class NotLast(AuxError):
    pass


class UndefinedAuxiliary(AuxError):
    pass


class Op(enum.Enum):
    AND = "AND"
    XOR = "XOR"


@dataclass(frozen=True)
class AuxDef:
    var: int
    op: Op
    lhs: int
    rhs: int
    primed: int | None
    index: int


def _def_clauses(x: int, op: Op, p: int, q: int) -> list[Clause]:
    if op is Op.AND:
        raw = [(-x, p), (-x, q), (x, -p, -q)]
    else:
        raw = [(-x, p, q), (-x, -p, -q), (x, -p, q), (x, p, -q)]
    return [tuple(sorted(c, key=lit_key)) for c in raw]


class AuxCircuit:
    """Ordered list of auxiliary definitions.

    ``prime`` maps state variables to their next-state copies; without it no
    primed definitions are produced.  Subscribers are called with the
    current-state and primed definition clauses of every new variable.
    """

    def __init__(self, vars: VarTable, prime: Mapping[int, int] | None = None):
        self.vars = vars
        self._prime_state = dict(prime) if prime is not None else None
        self.defs: list[AuxDef] = []
        self._by_var: dict[int, AuxDef] = {}
        self._by_primed: dict[int, AuxDef] = {}
        self._by_key: dict[tuple, int] = {}
        self._coi: dict[int, frozenset[int]] = {}
        self._clean: dict[int, bool] = {}
        self._state_cache: dict[int, bool] = {}
        self._subscribers: list[Callable[[list[Clause], list[Clause]], None]] = []
        # bumped only if definitions are ever dropped wholesale
        self.epoch = 0

    def __len__(self) -> int:
        return len(self.defs)

    def __iter__(self):
        return iter(self.defs)

    def subscribe(self, fn: Callable[[list[Clause], list[Clause]], None]) -> None:
        self._subscribers.append(fn)

    def is_aux(self, v: int) -> bool:
        return abs(v) in self._by_var

    def is_state(self, v: int) -> bool:
        v = abs(v)
        r = self._state_cache.get(v)
        if r is None:
            r = v <= self.vars.max_var and self.vars.kind(v) is VarKind.STATE
            self._state_cache[v] = r
        return r

    def definition(self, v: int) -> AuxDef:
        try:
            return self._by_var[abs(v)]
        except KeyError:
            raise NotAuxiliary(f"variable {abs(v)} is not auxiliary") from None

    def prime(self, lit: int) -> int:
        v = abs(lit)
        d = self._by_var.get(v)
        if d is not None:
            p = d.primed
        else:
            p = self._prime_state[v] if self._prime_state is not None else None
        if p is None:
            raise KeyError(f"no primed copy for variable {v}")
        return p if lit > 0 else -p

    def define(self, op: Op, lhs: int, rhs: int) -> int:
        """Define (or reuse) ``lhs op rhs``; returns the literal equal to it."""
        if abs(lhs) == abs(rhs):
            raise AuxError("operands must be over distinct variables")
        for l in (lhs, rhs):
            v = abs(l)
            if not (self.is_state(v) or v in self._by_var):
                raise CyclicDefinition(f"operand {l} is neither a state variable nor an earlier auxiliary")
        phase = 1
        if op is Op.XOR:
            if (lhs < 0) != (rhs < 0):
                phase = -1
            lhs, rhs = abs(lhs), abs(rhs)
        lhs, rhs = sorted((lhs, rhs), key=lit_key)
        key = (op, lhs, rhs)
        hit = self._by_key.get(key)
        if hit is not None:
            return phase * hit

        x = self.vars.new(VarKind.AUX)
        xp = None
        if self._prime_state is not None:
            xp = self.vars.new(VarKind.AUX)
        d = AuxDef(x, op, lhs, rhs, xp, len(self.defs))
        self.defs.append(d)
        self._by_var[x] = d
        if xp is not None:
            self._by_primed[xp] = d
        self._by_key[key] = x
        c1, c2 = self.coi(lhs), self.coi(rhs)
        self._coi[x] = c1 | c2
        self._clean[x] = self._is_clean(lhs) and self._is_clean(rhs) and not (c1 & c2)

        cur = _def_clauses(x, op, lhs, rhs)
        primed = _def_clauses(xp, op, self.prime(lhs), self.prime(rhs)) if xp is not None else []
        for fn in self._subscribers:
            fn(cur, primed)
        return phase * x

    def clauses(self, primed: bool = False) -> list[Clause]:
        out: list[Clause] = []
        for d in self.defs:
            if primed:
                out += _def_clauses(d.primed, d.op, self.prime(d.lhs), self.prime(d.rhs))
            else:
                out += _def_clauses(d.var, d.op, d.lhs, d.rhs)
        return out

    # cones of influence

    def coi(self, lit: int) -> frozenset[int]:
        v = abs(lit)
        hit = self._coi.get(v)
        if hit is not None:
            return hit
        if not self.is_state(v):
            raise UndefinedAuxiliary(f"variable {v} is neither state nor defined auxiliary")
        hit = self._coi[v] = frozenset((v,))
        return hit

    def coi_clause(self, c: Iterable[int]) -> frozenset[int]:
        out: frozenset[int] = frozenset()
        for l in c:
            out = out | self.coi(l)
        return out

    def _is_clean(self, lit: int) -> bool:
        return self._clean.get(abs(lit), True)

    def independent(self, c: Sequence[int]) -> bool:
        """True when the literals of ``c`` denote independent, non-constant functions.

        Holds when every auxiliary literal has a non-degenerate definition
        (operand cones disjoint, recursively) and the cones of the literals
        are pairwise disjoint.  Such a clause can always be falsified.
        """
        seen: set[int] = set()
        for l in c:
            if not self._is_clean(l):
                return False
            k = self.coi(l)
            if not seen.isdisjoint(k):
                return False
            seen |= k
        return True

    def is_clean_literal(self, lit: int) -> bool:
        return self._is_clean(lit)

    def aux_literals(self, c: Iterable[int]) -> list[int]:
        return [l for l in c if abs(l) in self._by_var]

    def max_aux(self, c: Iterable[int]) -> int | None:
        idx = [self._by_var[abs(l)].index for l in c if abs(l) in self._by_var]
        return max(idx) if idx else None

    # expansion and elimination

    def expand(self, c: Sequence[int], lit: int) -> list[Clause]:
        """Clauses over ``c`` with ``lit`` replaced by its definition.

        Their conjunction is equivalent to ``c`` under the circuit;
        tautological pieces are dropped.
        """
        d = self.definition(lit)
        if lit not in c:
            raise ValueError(f"literal {lit} does not occur in clause")
        rest = [l for l in c if l != lit]
        p, q = d.lhs, d.rhs
        if d.op is Op.AND:
            pieces = [[p], [q]] if lit > 0 else [[-p, -q]]
        elif lit > 0:
            pieces = [[p, q], [-p, -q]]
        else:
            pieces = [[p, -q], [-p, q]]
        out: list[Clause] = []
        for extra in pieces:
            cl = try_canonicalize(rest + extra)
            if cl is not None and cl not in out:
                out.append(cl)
        return out

    def substitute(self, f: Iterable[Sequence[int]], a: int) -> list[Clause]:
        """Replace every occurrence of auxiliary variable ``a`` in ``f`` by its definition."""
        d = self.definition(a)
        f = list(f)
        for c in f:
            m = self.max_aux(c)
            if m is not None and m > d.index:
                raise NotLast(f"auxiliary {self.defs[m].var} defined after {abs(a)} still occurs")
        out: list[Clause] = []
        seen: set[Clause] = set()
        for c in f:
            c = tuple(c)
            if d.var in c:
                pieces = self.expand(c, d.var)
            elif -d.var in c:
                pieces = self.expand(c, -d.var)
            else:
                pieces = [c]
            for p in pieces:
                if p not in seen:
                    seen.add(p)
                    out.append(p)
        return out

    def eliminate_all(self, f: Iterable[Sequence[int]]) -> list[Clause]:
        f = [tuple(c) for c in f]
        for d in reversed(self.defs):
            f = self.substitute(f, d.var)
        return f

    # evaluation

    def evaluate(self, state: Mapping[int, bool]) -> dict[int, bool]:
        """Values of all auxiliary variables given state-variable values."""
        val = dict(state)

        def lv(l: int) -> bool:
            return val[abs(l)] if l > 0 else not val[abs(l)]

        for d in self.defs:
            if d.op is Op.AND:
                val[d.var] = lv(d.lhs) and lv(d.rhs)
            else:
                val[d.var] = lv(d.lhs) != lv(d.rhs)
        return val

    def primed_to_current(self, v: int) -> int | None:
        d = self._by_primed.get(v)
        return d.var if d is not None else None
