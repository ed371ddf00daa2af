"""CNF encoding of an AIG as a transition system ``(Init, Tr, Bad)``.

Variable layout (all DIMACS indices):

* ``1 .. L``                 current-state copy of each latch, in latch order
* ``L+1 .. L+I``             primary inputs
* next block                 one internal variable per and-gate, plus ``true_var``
* next ``L`` indices         next-state copy of each latch

Auxiliary variables introduced later by the engine are allocated above this
range through :attr:`TransitionSystem.vars`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from pysat.solvers import Solver

from .aiger import AigCircuit
from .logic import Clause, Cube, VarKind, VarTable


class NoPropertyError(ValueError):
    pass


class EncodingError(ValueError):
    pass


@dataclass
class TransitionSystem:
    vars: VarTable
    state_vars: list[int]
    input_vars: list[int]
    next_vars: list[int]
    true_var: int
    init: list[Clause]
    gate_clauses: list[Clause]
    latch_clauses: list[Clause]
    bad_lit: int
    circuit: AigCircuit
    _prime: dict[int, int] = field(default_factory=dict, repr=False)

    @property
    def tr(self) -> list[Clause]:
        return self.gate_clauses + self.latch_clauses

    @property
    def bad(self) -> list[Clause]:
        """Bad-state formula: the gate definitions plus the indicator literal."""
        return self.gate_clauses + [(self.bad_lit,)]

    @property
    def init_cube(self) -> Cube:
        return tuple(c[0] for c in self.init)

    @property
    def num_latches(self) -> int:
        return len(self.state_vars)

    def prime(self, lit: int) -> int:
        p = self._prime[abs(lit)]
        return p if lit > 0 else -p

    def is_state(self, v: int) -> bool:
        return 1 <= v <= len(self.state_vars)

    def state_cube(self, bits: list[bool] | tuple[bool, ...]) -> Cube:
        return tuple(v if b else -v for v, b in zip(self.state_vars, bits))

    def input_cube(self, bits: list[bool] | tuple[bool, ...]) -> Cube:
        return tuple(v if b else -v for v, b in zip(self.input_vars, bits))

    def state_name(self, v: int) -> str:
        return f"s{v - 1}"


def encode_transition_system(c: AigCircuit, check: bool = True) -> TransitionSystem:
    prop = c.property_literal()
    if prop is None:
        raise NoPropertyError("circuit has neither bad-state properties nor outputs")

    vt = VarTable()
    amap: dict[int, int] = {}  # AIG variable -> DIMACS variable
    state_vars = []
    for latch in c.latches:
        v = vt.new(VarKind.STATE)
        amap[latch.lit >> 1] = v
        state_vars.append(v)
    input_vars = []
    for lit in c.inputs:
        v = vt.new(VarKind.INPUT)
        amap[lit >> 1] = v
        input_vars.append(v)
    for lhs, _, _ in c.and_gates:
        amap[lhs >> 1] = vt.new(VarKind.INTERNAL)
    true_var = vt.new(VarKind.INTERNAL)
    next_vars = [vt.new(VarKind.NEXT) for _ in c.latches]

    def tolit(a: int) -> int:
        if a < 2:
            return true_var if a == 1 else -true_var
        v = amap[a >> 1]
        return -v if a & 1 else v

    gates: list[Clause] = [(true_var,)]
    for lhs, r0, r1 in c.and_gates:
        g, x, y = amap[lhs >> 1], tolit(r0), tolit(r1)
        gates.append(_sorted((-g, x)))
        gates.append(_sorted((-g, y)))
        gates.append(_sorted((g, -x, -y)))
    gates = [cl for cl in gates if _non_taut(cl)]

    latch_cls: list[Clause] = []
    init: list[Clause] = []
    for latch, s, n in zip(c.latches, state_vars, next_vars):
        f = tolit(latch.next)
        latch_cls.append(_sorted((-n, f)))
        latch_cls.append(_sorted((n, -f)))
        if latch.reset == 0:
            init.append((-s,))
        elif latch.reset == 1:
            init.append((s,))

    ts = TransitionSystem(
        vars=vt,
        state_vars=state_vars,
        input_vars=input_vars,
        next_vars=next_vars,
        true_var=true_var,
        init=init,
        gate_clauses=gates,
        latch_clauses=latch_cls,
        bad_lit=tolit(prop),
        circuit=c,
    )
    ts._prime = dict(zip(state_vars, next_vars))
    if check:
        with Solver(name="minisat22", bootstrap_with=[list(x) for x in ts.tr]) as s:
            if not s.solve():
                raise EncodingError("transition relation is unsatisfiable")
    return ts


def _sorted(lits: tuple[int, ...]) -> Clause:
    return tuple(sorted(set(lits), key=lambda l: (abs(l), l < 0)))


def _non_taut(c: Clause) -> bool:
    return not any(-l in c for l in c)
