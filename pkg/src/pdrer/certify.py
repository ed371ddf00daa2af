"""Independent checks of invariants and counterexamples, plus file formats.

Every query here runs on a fresh solver built from the frontend encoding and
the listed auxiliary definitions; no engine state is consulted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from pysat.solvers import Solver

from .aux import AuxCircuit, AuxError, Op
from .logic import Clause, lit_key
from .sat import DEFAULT_BACKEND
from .tsys import TransitionSystem


@dataclass
class CertResult:
    ok: bool
    condition: str = ""
    model: list[int] | None = None
    step: int | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


class _Encoding:
    """Local numbering of auxiliary definitions above every engine index."""

    def __init__(self, ts: TransitionSystem, defs: Sequence, extra: Iterable[Sequence[int]] = ()):
        self.ts = ts
        top = max([ts.vars.max_var, *(abs(x) for d in defs for x in (d.var, d.lhs, d.rhs))], default=0)
        for c in extra:
            for l in c:
                top = max(top, abs(l))
        self._top = top
        self.cur: dict[int, int] = {}
        self.nxt: dict[int, int] = {}
        self.ops: list[tuple[Op, int, int, int]] = []  # op, x, lhs, rhs (local, current)
        for d in defs:
            op = d.op if isinstance(d.op, Op) else Op(d.op)
            if d.var in self.cur or ts.is_state(d.var):
                raise AuxError(f"variable {d.var} defined twice or a state variable")
            lhs, rhs = self.lit(d.lhs), self.lit(d.rhs)
            x = self.fresh()
            self.cur[d.var] = x
            self.nxt[d.var] = self.fresh()
            self.ops.append((op, x, lhs, rhs))

    def fresh(self) -> int:
        self._top += 1
        return self._top

    def lit(self, l: int) -> int:
        v = abs(l)
        if self.ts.is_state(v):
            return l
        if v not in self.cur:
            raise AuxError(f"variable {v} is not a state variable or an earlier definition")
        return self.cur[v] if l > 0 else -self.cur[v]

    def prime(self, l: int) -> int:
        """Prime a local literal."""
        v = abs(l)
        if self.ts.is_state(v):
            p = self.ts.prime(v)
        else:
            p = self._local_next[v]
        return p if l > 0 else -p

    @property
    def _local_next(self) -> dict[int, int]:
        return {self.cur[k]: self.nxt[k] for k in self.cur}

    def clauses(self, primed: bool) -> list[list[int]]:
        nx = self._local_next
        out = []
        for op, x, p, q in self.ops:
            if primed:
                x = nx[x]
                p, q = self._pr(p, nx), self._pr(q, nx)
            if op is Op.AND:
                out += [[-x, p], [-x, q], [x, -p, -q]]
            else:
                out += [[-x, p, q], [-x, -p, -q], [x, -p, q], [x, p, -q]]
        return out

    def _pr(self, l: int, nx: dict[int, int]) -> int:
        v = abs(l)
        p = self.ts.prime(v) if self.ts.is_state(v) else nx[v]
        return p if l > 0 else -p

    def negation(self, cnf: list[list[int]]) -> list[list[int]]:
        """Clauses satisfiable exactly when ``cnf`` is false."""
        sel = []
        out = []
        for c in cnf:
            t = self.fresh()
            sel.append(t)
            out += [[-t, -l] for l in c]
        out.append(sel)
        return out


def _check(clauses: list[list[int]], backend: str) -> list[int] | None:
    with Solver(name=backend, bootstrap_with=clauses) as s:
        return s.get_model() if s.solve() else None


def certify_safe(
    ts: TransitionSystem,
    inv: Iterable[Sequence[int]],
    e: Iterable | None = None,
    backend: str = DEFAULT_BACKEND,
) -> CertResult:
    """Check initiation, consecution and safety of a generalized invariant."""
    inv = [list(c) for c in inv]
    defs = list(e) if e is not None else []
    try:
        enc = _Encoding(ts, defs, inv)
        cur = [[enc.lit(l) for l in c] for c in inv]
    except (AuxError, KeyError) as exc:
        return CertResult(False, "definitions", reason=str(exc))
    for c in cur:
        for l in c:
            v = abs(l)
            if not ts.is_state(v) and v not in enc._local_next:
                return CertResult(False, "definitions", reason=f"variable {v} is not state or auxiliary")
    e_cur = enc.clauses(False)
    e_nxt = enc.clauses(True)
    nxt = [[enc.prime(l) for l in c] for c in cur]

    q = [list(c) for c in ts.init] + e_cur + enc.negation(cur)
    m = _check(q, backend)
    if m is not None:
        return CertResult(False, "initiation", m)
    q = [list(c) for c in ts.tr] + e_cur + e_nxt + cur + enc.negation(nxt)
    m = _check(q, backend)
    if m is not None:
        return CertResult(False, "consecution", m)
    q = [list(c) for c in ts.bad] + e_cur + cur
    m = _check(q, backend)
    if m is not None:
        return CertResult(False, "safety", m)
    return CertResult(True)


def certify_unsafe(ts: TransitionSystem, path: Sequence, backend: str = DEFAULT_BACKEND) -> CertResult:
    """Replay a counterexample: ``path`` holds ``(state bits, input bits)`` per step."""
    if not path:
        return CertResult(False, "path", step=0, reason="empty path")
    nl, ni = len(ts.state_vars), len(ts.input_vars)
    for k, (s, x) in enumerate(path):
        if len(s) != nl or len(x) != ni:
            return CertResult(False, "path", step=k, reason="wrong vector width")
    s0 = ts.state_cube(path[0][0])
    if not set(ts.init_cube).issubset(s0):
        return CertResult(False, "init", step=0)
    with Solver(name=backend, bootstrap_with=[list(c) for c in ts.tr]) as slv:
        for k in range(len(path) - 1):
            (s, x), (t, _) = path[k], path[k + 1]
            assume = list(ts.state_cube(s)) + list(ts.input_cube(x)) + [ts.prime(l) for l in ts.state_cube(t)]
            if not slv.solve(assumptions=assume):
                return CertResult(False, "transition", step=k + 1)
        s, x = path[-1]
        assume = list(ts.state_cube(s)) + list(ts.input_cube(x)) + [ts.bad_lit]
        if not slv.solve(assumptions=assume):
            return CertResult(False, "bad", step=len(path) - 1)
    return CertResult(True)


def eliminate_to_plain(inv: Iterable[Sequence[int]], e: AuxCircuit) -> list[Clause]:
    """Substitute definitions away, last first; the result is over state variables."""
    return e.eliminate_all(inv)


# debug-mode trace checks


def check_trace(ts: TransitionSystem, frames: Sequence[Sequence[Clause]], defs: Sequence,
                backend: str = DEFAULT_BACKEND) -> list[tuple[int, Clause]]:
    """Violations of ``G_i & E & Tr & E' => G_{i+1}'`` as ``(i, clause)`` pairs."""
    enc = _Encoding(ts, defs, [c for f in frames for c in f])
    base = [list(c) for c in ts.tr] + enc.clauses(False) + enc.clauses(True)
    out = []
    with Solver(name=backend, bootstrap_with=base) as s:
        acts = []
        for f in frames:
            a = enc.fresh()
            acts.append(a)
            for c in f:
                s.add_clause([-a] + [enc.lit(l) for l in c])
        for i in range(len(frames) - 1):
            for c in frames[i + 1]:
                lits = [enc.lit(l) for l in c]
                if s.solve(assumptions=[acts[i]] + [-enc.prime(l) for l in lits]):
                    out.append((i, tuple(c)))
    return out


def frames_imply(ts: TransitionSystem, new: Sequence[Sequence[Clause]], old: Sequence[Sequence[Clause]],
                 defs: Sequence, backend: str = DEFAULT_BACKEND) -> list[tuple[int, Clause]]:
    """Clauses of ``old[j]`` not implied by ``new[j]`` under the definitions."""
    enc = _Encoding(ts, defs, [c for f in list(new) + list(old) for c in f])
    out = []
    with Solver(name=backend, bootstrap_with=enc.clauses(False)) as s:
        acts = []
        for f in new:
            a = enc.fresh()
            acts.append(a)
            for c in f:
                s.add_clause([-a] + [enc.lit(l) for l in c])
        for j in range(min(len(new), len(old))):
            for c in old[j]:
                if s.solve(assumptions=[acts[j]] + [-enc.lit(l) for l in c]):
                    out.append((j, tuple(c)))
    return out


# file formats


class FormatError(ValueError):
    pass


@dataclass
class InvariantFile:
    clauses: list[Clause]
    defs: list[tuple[str, Op, int, int]] = field(default_factory=list)


def _needed_defs(inv: Iterable[Sequence[int]], aux: AuxCircuit) -> list:
    need: set[int] = set()
    stack = [abs(l) for c in inv for l in c if aux.is_aux(l)]
    while stack:
        v = stack.pop()
        if v in need:
            continue
        need.add(v)
        d = aux.definition(v)
        stack += [abs(x) for x in (d.lhs, d.rhs) if aux.is_aux(x)]
    return [d for d in aux.defs if d.var in need]


def write_invariant(ts: TransitionSystem, inv: Sequence[Sequence[int]], aux: AuxCircuit | None) -> str:
    defs = _needed_defs(inv, aux) if aux is not None else []
    names = {d.var: f"a{k}" for k, d in enumerate(defs)}

    def name(l: int) -> str:
        v = abs(l)
        n = ts.state_name(v) if ts.is_state(v) else names[v]
        return n if l > 0 else "-" + n

    lines = [f"inv {len(inv)} {len(defs)}"]
    for d in defs:
        lines.append(f"def {names[d.var]} = {d.op.value} {name(d.lhs)} {name(d.rhs)}")
    for c in inv:
        lines.append(" ".join([name(l) for l in c] + ["0"]))
    return "\n".join(lines) + "\n"


def read_invariant(ts: TransitionSystem, text: str) -> tuple[list[Clause], AuxCircuit]:
    """Parse an invariant file into clauses over ``ts`` and a fresh circuit.

    The circuit allocates variables in a copy of the variable table, so the
    frontend encoding of ``ts`` is left untouched.
    """
    import copy

    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("c ")]
    if not lines:
        raise FormatError("empty invariant file")
    head = lines[0].split()
    if len(head) != 3 or head[0] != "inv":
        raise FormatError("missing 'inv <n-clauses> <n-aux>' header")
    try:
        nc, na = int(head[1]), int(head[2])
    except ValueError:
        raise FormatError("non-integer header counts") from None
    aux = AuxCircuit(copy.deepcopy(ts.vars), prime=ts._prime)
    names: dict[str, int] = {}
    nstate = len(ts.state_vars)

    def lit(tok: str) -> int:
        negd = tok.startswith("-")
        n = tok[1:] if negd else tok
        if n.startswith("s") and n[1:].isdigit():
            k = int(n[1:])
            if k >= nstate:
                raise FormatError(f"state variable {n} out of range")
            v = ts.state_vars[k]
        elif n in names:
            v = names[n]
        else:
            raise FormatError(f"unknown variable {n!r}")
        return -v if negd else v

    body = lines[1:]
    if len(body) != nc + na:
        raise FormatError(f"expected {nc + na} body lines, found {len(body)}")
    for ln in body[:na]:
        t = ln.split()
        if len(t) != 6 or t[0] != "def" or t[2] != "=" or t[3] not in ("AND", "XOR"):
            raise FormatError(f"bad definition line {ln!r}")
        if t[1] in names or t[1].startswith("s"):
            raise FormatError(f"bad definition name {t[1]!r}")
        try:
            names[t[1]] = aux.define(Op(t[3]), lit(t[4]), lit(t[5]))
        except AuxError as exc:
            raise FormatError(str(exc)) from None
    clauses: list[Clause] = []
    for ln in body[na:]:
        t = ln.split()
        if not t or t[-1] != "0":
            raise FormatError(f"clause line must end in 0: {ln!r}")
        lits = [lit(x) for x in t[:-1]]
        # a defined name may map to a negative literal (phase-folded XOR)
        clauses.append(tuple(sorted(set(lits), key=lit_key)))
    return clauses, aux


def write_cex(path: Sequence) -> str:
    out = []
    for s, x in path:
        sb = "".join("1" if b else "0" for b in s) or "-"
        xb = "".join("1" if b else "0" for b in x) or "-"
        out.append(f"state {sb} inputs {xb}")
    return "\n".join(out) + "\n"


def read_cex(text: str) -> list[tuple[tuple[bool, ...], tuple[bool, ...]]]:
    out = []
    for ln in text.splitlines():
        t = ln.split()
        if not t:
            continue
        if len(t) != 4 or t[0] != "state" or t[2] != "inputs":
            raise FormatError(f"bad counterexample line {ln!r}")

        def bits(s: str) -> tuple[bool, ...]:
            if s == "-":
                return ()
            if set(s) - {"0", "1"}:
                raise FormatError(f"bad bit vector {s!r}")
            return tuple(ch == "1" for ch in s)

        out.append((bits(t[1]), bits(t[3])))
    return out
