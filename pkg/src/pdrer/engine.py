"""PDR (IC3) over a delta-encoded trace, optionally with extension-rule re-encoding."""

from __future__ import annotations

import enum
import heapq
import logging
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Iterator

from .aux import AuxCircuit, Op
from .bdd import BddManager
from .logic import Clause, Cube, lit_key, negate_cube, try_canonicalize
from .reencode import ReencodeConfig, re_encode
from .sat import DEFAULT_BACKEND, Deadline, Model, ResourceLimit, SatSolver
from .trace import GeneralizedTrace, Implication
from .tsys import TransitionSystem

log = logging.getLogger(__name__)


class Status(enum.Enum):
    SAFE = "SAFE"
    UNSAFE = "UNSAFE"
    UNKNOWN = "UNKNOWN"


@dataclass
class EngineConfig:
    use_er: bool = False
    delta: int = 300
    gen_ev: bool = True
    push_ev: bool = True
    imp_ev: bool = True
    seed: int = 0
    timeout: float | None = None
    backend: str = DEFAULT_BACKEND
    reencode: ReencodeConfig = field(default_factory=ReencodeConfig)
    debug: bool = False
    max_frames: int | None = None

    def __post_init__(self) -> None:
        if self.delta < 1:
            raise ValueError("delta must be positive")
        if not self.use_er:
            self.gen_ev = self.push_ev = self.imp_ev = False


Step = tuple[tuple[bool, ...], tuple[bool, ...]]


@dataclass
class Stats:
    frames: int = 0
    trace_clauses: int = 0
    invariant_clauses: int = 0
    proof_obligations: int = 0
    aux_vars: int = 0
    aux_vars_in_invariant: int = 0
    xor_percent: float = 0.0
    reencodings: int = 0
    reencode_clusters: int = 0
    sat_calls: int = 0
    solver_rebuilds: int = 0
    gen_ev_substitutions: int = 0
    push_ev_fractions: int = 0
    cex_length: int | None = None
    imp_ev: dict[str, int] = field(default_factory=dict)
    time: dict[str, float] = field(default_factory=dict)

    def as_dict(self) -> dict:
        d = dict(vars(self))
        d["imp_ev"] = dict(self.imp_ev)
        d["time"] = {k: round(v, 6) for k, v in sorted(self.time.items())}
        return d


@dataclass
class VerificationResult:
    status: Status
    invariant: list[Clause] | None = None
    aux: AuxCircuit | None = None
    path: list[Step] | None = None
    reason: str = ""
    stats: Stats = field(default_factory=Stats)

    @property
    def safe(self) -> bool:
        return self.status is Status.SAFE


@dataclass
class Obligation:
    cube: Cube
    level: int
    parent: "Obligation | None"
    # inputs applied in this state to reach the parent (or to trigger Bad)
    inputs: tuple[bool, ...]


class _Cex(Exception):
    def __init__(self, path: list[Step]):
        self.path = path


class Engine:
    def __init__(self, ts: TransitionSystem, config: EngineConfig | None = None):
        self.ts = ts
        self.cfg = config or EngineConfig()
        self.stats = Stats()
        self.deadline = Deadline(self.cfg.timeout)
        self.aux = AuxCircuit(ts.vars, prime=ts._prime)
        self.imp = Implication(self.aux, BddManager(), semantic=self.cfg.imp_ev)
        self.trace = GeneralizedTrace(ts.init, self.aux, self.imp)
        self.trace.on_add.append(self._on_add)
        self.trace.on_remove.append(self._on_remove)
        self.aux.subscribe(self._on_define)
        self._init_lits = frozenset(ts.init_cube)
        self._prime_state = dict(ts._prime)
        self._unprime = {p: s for s, p in self._prime_state.items()}
        self._seq = 0
        self._sat_calls = 0
        self._build_solvers()

    # solver management

    def _build_solvers(self) -> None:
        if getattr(self, "solver", None) is not None:
            self._sat_calls += self.solver.calls
            self.solver.close()
            self.stats.solver_rebuilds += 1
        s = SatSolver(self.cfg.backend, self.deadline)
        s.add_clauses(self.ts.tr)
        s.add_clauses(self.aux.clauses(False))
        s.add_clauses(self.aux.clauses(True))
        self.act = [s.fresh() for _ in range(self.trace.depth + 1)]
        for c in self.ts.init:
            s.add_guarded(self.act[0], c)
        for i, c in self.trace:
            s.add_guarded(self.act[i], c)
        self.solver = s
        if getattr(self, "init_solver", None) is None:
            self.init_solver = SatSolver(self.cfg.backend, self.deadline)
            self.init_solver.add_clauses(self.ts.init)
            self.init_solver.add_clauses(self.aux.clauses(False))

    def _maybe_rebuild(self) -> None:
        s = self.solver
        if s.retired * 2 >= s.loaded and s.retired > 500:
            self._build_solvers()

    def _on_add(self, i: int, c: Clause) -> None:
        self.solver.add_guarded(self.act[i], c)

    def _on_remove(self, i: int, c: Clause) -> None:
        self.solver.retire()

    def _on_define(self, cur: list[Clause], primed: list[Clause]) -> None:
        self.solver.add_clauses(cur)
        self.solver.add_clauses(primed)
        self.init_solver.add_clauses(cur)

    def _extend(self) -> None:
        self.trace.extend()
        self.act.append(self.solver.fresh())

    def _acts(self, i: int) -> list[int]:
        return self.act[i:] if i > 0 else [self.act[0], *self.act[1:]]

    @contextmanager
    def _phase(self, name: str) -> Iterator[None]:
        t = time.perf_counter()
        try:
            yield
        finally:
            self.stats.time[name] = self.stats.time.get(name, 0.0) + time.perf_counter() - t

    # primitive queries

    def _state_of_model(self) -> tuple[Cube, tuple[bool, ...]]:
        s = self.solver
        cube = tuple(v if s.value(v) else -v for v in self.ts.state_vars)
        inputs = tuple(s.value(v) for v in self.ts.input_vars)
        return cube, inputs

    def _prime(self, lit: int) -> int:
        return self.aux.prime(lit)

    def _init_ok(self, c: Clause) -> bool:
        if not self.aux.aux_literals(c):
            return any(l in self._init_lits for l in c)
        return not self.init_solver.solve([-l for l in c])

    def _relative_inductive(self, c: Clause, i: int) -> tuple[bool, Clause]:
        """``G_i & c & Tr => c'``; on success also a core-reduced subclause."""
        self._maybe_rebuild()
        primed = {-self._prime(l): l for l in c}
        sat = self.solver.solve_with_temp(c, self._acts(i) + list(primed))
        if sat:
            return False, c
        core = set(self.solver.core)
        return True, tuple(l for l in c if -self._prime(l) in core)

    def _predecessor(self, cube: Cube, i: int):
        """SAT: ``(cube, inputs)`` of a predecessor in ``G_{i-1}``; UNSAT: core subcube."""
        self._maybe_rebuild()
        primed = {self._prime(l): l for l in cube}
        if self.solver.solve_with_temp(negate_cube(cube), self._acts(i - 1) + list(primed)):
            return True, self._state_of_model()
        core = set(self.solver.core)
        return False, tuple(l for l in cube if self._prime(l) in core)

    def _blocked(self, cube: Cube, i: int) -> bool:
        return not self.solver.solve(self._acts(i) + list(cube))

    def _propagates(self, c: Clause, i: int) -> bool:
        """``G_i & E & Tr & E' => c'``."""
        self._maybe_rebuild()
        return not self.solver.solve(self._acts(i) + [-self._prime(l) for l in c])

    # generalization

    def _with_initiation(self, d: Clause, full: Clause) -> Clause:
        """Repair ``d`` (a subclause of ``full``) so it satisfies initiation."""
        if d and self._init_ok(d):
            return d
        for l in full:
            if l not in d and (l in self._init_lits or self.aux.aux_literals((l,))):
                cand = try_canonicalize(d + (l,))
                if cand is not None and self._init_ok(cand):
                    return cand
        return full

    def ind_gen(self, i: int, c: Clause) -> Clause:
        """Drop literals while initiation and relative induction at ``i-1`` hold."""
        c = tuple(sorted(c, key=lit_key))
        order = sorted(c, key=lambda l: -abs(l))
        for _ in range(2):
            changed = False
            for l in order:
                if l not in c or len(c) == 1:
                    continue
                cand = tuple(x for x in c if x != l)
                if not self._init_ok(cand):
                    continue
                ok, core = self._relative_inductive(cand, i - 1)
                if ok:
                    c = self._with_initiation(core, cand)
                    changed = True
            if not changed:
                break
        return c

    def gen_ev(self, i: int, c: Clause) -> Clause:
        """Bottom-up substitution of operand literals by auxiliary literals."""
        for d in self.aux.defs:
            cand = _substitution(c, d.op, d.lhs, d.rhs, d.var)
            if cand is None or cand == c:
                continue
            ok = self._init_ok(cand) and self._relative_inductive(cand, i - 1)[0]
            if ok:
                c = cand
                self.stats.gen_ev_substitutions += 1
        return c

    def generalize(self, i: int, c: Clause) -> Clause:
        with self._phase("generalize"):
            c = self.ind_gen(i, c)
            if self.cfg.gen_ev and len(self.aux):
                c = self.gen_ev(i, c)
        return c

    # blocking

    def mk_safe(self) -> None:
        """Block every bad state at the top frame; raises :class:`_Cex` on failure."""
        n = self.trace.depth
        while True:
            self.deadline.check()
            self._maybe_rebuild()
            if not self.solver.solve(self._acts(n) + [self.ts.bad_lit]):
                return
            cube, inputs = self._state_of_model()
            self._block(Obligation(cube, n, None, inputs))

    def _push_ob(self, heap: list, ob: Obligation) -> None:
        self._seq += 1
        heapq.heappush(heap, (ob.level, self._seq, ob))

    def _block(self, root: Obligation) -> None:
        n = self.trace.depth
        heap: list = []
        self.stats.proof_obligations += 1
        self._push_ob(heap, root)
        while heap:
            self.deadline.check()
            _, _, ob = heapq.heappop(heap)
            i = ob.level
            if self._blocked(ob.cube, i):
                if i < n:
                    self._push_ob(heap, Obligation(ob.cube, i + 1, ob.parent, ob.inputs))
                continue
            sat, res = self._predecessor(ob.cube, i)
            if sat:
                pcube, pinputs = res
                pred = Obligation(pcube, i - 1, ob, pinputs)
                self.stats.proof_obligations += 1
                if i - 1 == 0 or self._init_lits.issubset(pcube):
                    raise _Cex(_path(pred))
                self._push_ob(heap, pred)
                self._push_ob(heap, ob)
                continue
            full = negate_cube(ob.cube)
            c = self._with_initiation(negate_cube(res), full)
            c = self.generalize(i, c)
            k = i
            while k < n and self._relative_inductive(c, k)[0]:
                k += 1
            self.trace.insert_clause(k, c)
            if k < n:
                self._push_ob(heap, Obligation(ob.cube, k + 1, ob.parent, ob.inputs))

    # propagation

    def push_ev(self, i: int, c: Clause) -> bool:
        """Fractional propagation of ``c`` from ``G_i`` to ``G_{i+1}``."""
        seen: list[Model] = []
        cur = c
        while True:
            if self._propagates(cur, i):
                self.trace.insert_clause(i + 1, cur)
                if cur != c:
                    self.stats.push_ev_fractions += 1
                return True
            seen.append(self.solver.model())
            nxt = None
            for a in self.aux.aux_literals(cur):
                for d in self.aux.expand(cur, a):
                    primed = [self._prime(l) for l in d]
                    if all(any(m.value(p) for p in primed) for m in seen):
                        nxt = d
                        break
                if nxt is not None:
                    break
            if nxt is None:
                return False
            cur = nxt

    def propagate(self) -> None:
        t = self.trace
        frac = self.cfg.use_er and self.cfg.push_ev
        for i in range(1, t.depth):
            for c in sorted(t.delta(i)):
                if t.level.get(c) != i:
                    continue
                self.deadline.check()
                if frac and self.aux.aux_literals(c):
                    self.push_ev(i, c)
                elif self._propagates(c, i):
                    t.insert_clause(i + 1, c)

    # main loop

    def solve(self) -> VerificationResult:
        t0 = time.perf_counter()
        try:
            res = self._run()
        except _Cex as e:
            res = VerificationResult(Status.UNSAFE, path=e.path)
            self.stats.cex_length = len(e.path) - 1
        except ResourceLimit as e:
            res = VerificationResult(Status.UNKNOWN, reason=str(e))
        self.stats.time["total"] = time.perf_counter() - t0
        self._finish_stats(res)
        res.stats = self.stats
        return res

    def _run(self) -> VerificationResult:
        ts = self.ts
        # length-0 counterexample
        if self.solver.solve([self.act[0], ts.bad_lit]):
            cube, inputs = self._state_of_model()
            raise _Cex([(_bits(cube), inputs)])
        self._extend()
        size = 0
        while True:
            with self._phase("mk_safe"):
                self.mk_safe()
            if self.cfg.use_er and self.trace.num_clauses() > size + self.cfg.delta:
                with self._phase("reencode"):
                    rep = re_encode(self.trace, self.aux, self.cfg.reencode)
                self.stats.reencodings += 1
                self.stats.reencode_clusters += len(rep.clusters)
                size = self.trace.num_clauses()
            if self.cfg.max_frames is not None and self.trace.depth >= self.cfg.max_frames:
                return VerificationResult(Status.UNKNOWN, reason="frame limit reached")
            self._extend()
            before = self.debug_snapshot() if self.cfg.debug else None
            with self._phase("propagate"):
                self.propagate()
            if before is not None:
                self.debug_check(before)
            for i in range(1, self.trace.depth):
                if self.trace.frames_equal(i):
                    inv = sorted(self.trace.frame(i + 1))
                    return VerificationResult(Status.SAFE, invariant=inv, aux=self.aux)

    def _finish_stats(self, res: VerificationResult) -> None:
        st = self.stats
        st.frames = self.trace.depth
        st.trace_clauses = self.trace.num_clauses()
        st.aux_vars = len(self.aux)
        st.sat_calls = self._sat_calls + self.solver.calls + self.init_solver.calls
        st.imp_ev = self.imp.stats.as_dict()
        xors = sum(1 for d in self.aux if d.op is Op.XOR)
        st.xor_percent = round(100.0 * xors / len(self.aux), 3) if len(self.aux) else 0.0
        if res.invariant is not None:
            st.invariant_clauses = len(res.invariant)
            used = {abs(l) for c in res.invariant for l in self.aux.aux_literals(c)}
            st.aux_vars_in_invariant = len(used)

    # debug checks

    def debug_snapshot(self) -> list[list[Clause]]:
        return [self.trace.frame(i) for i in range(self.trace.depth + 1)]

    def debug_check(self, before: list[list[Clause]]) -> None:
        from .certify import check_trace, frames_imply

        after = self.debug_snapshot()
        bad = check_trace(self.ts, after, list(self.aux))
        if bad:
            raise AssertionError(f"trace condition violated: {bad}")
        bad = frames_imply(self.ts, after, before, list(self.aux))
        if bad:
            raise AssertionError(f"propagation weakened frame {bad}")


def _substitution(c: Clause, op: Op, l1: int, l2: int, a: int) -> Clause | None:
    s = set(c)
    if op is Op.AND:
        if (l1 in s) == (l2 in s):
            return None
        drop = l1 if l1 in s else l2
        return try_canonicalize((s - {drop}) | {a})
    for p, q, out in ((l1, -l2, -a), (-l1, l2, -a), (l1, l2, a), (-l1, -l2, a)):
        if p in s and q in s:
            return try_canonicalize((s - {p, q}) | {out})
    return None


def _bits(cube: Cube) -> tuple[bool, ...]:
    return tuple(l > 0 for l in cube)


def _path(ob: Obligation) -> list[Step]:
    out = []
    node: Obligation | None = ob
    while node is not None:
        out.append((_bits(node.cube), node.inputs))
        node = node.parent
    return out


def solve(ts: TransitionSystem, config: EngineConfig | None = None) -> VerificationResult:
    return Engine(ts, config).solve()
