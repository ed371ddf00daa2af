from __future__ import annotations

import random

import pytest

from pdrer.aux import AuxCircuit
from pdrer.logic import VarKind, VarTable, canonicalize


def make_aux(n: int, primed: bool = False) -> tuple[AuxCircuit, list[int]]:
    """An empty auxiliary circuit over ``n`` fresh state variables."""
    vt = VarTable()
    vs = [vt.new(VarKind.STATE) for _ in range(n)]
    prime = None
    if primed:
        prime = {v: vt.new(VarKind.NEXT) for v in vs}
    return AuxCircuit(vt, prime), vs


def truth(n: int):
    """All assignments of ``n`` variables as a boolean matrix; column ``j`` is variable ``j+1``."""
    import numpy as np

    idx = np.arange(2**n, dtype=np.int64)
    return ((idx[:, None] >> np.arange(n)) & 1).astype(bool)


def eval_aux(aux: AuxCircuit, cols: dict[int, "np.ndarray"]) -> dict[int, "np.ndarray"]:
    """Extend state-variable columns with the value of every auxiliary variable."""
    vals = dict(cols)

    def lv(l):
        return vals[abs(l)] if l > 0 else ~vals[abs(l)]

    for d in aux.defs:
        a, b = lv(d.lhs), lv(d.rhs)
        vals[d.var] = (a & b) if d.op.value == "AND" else (a ^ b)
    return vals


def eval_cnf(cnf, vals, rows: int):
    import numpy as np

    out = np.ones(rows, dtype=bool)
    for c in cnf:
        cv = np.zeros(rows, dtype=bool)
        for l in c:
            cv |= vals[abs(l)] if l > 0 else ~vals[abs(l)]
        out &= cv
    return out


@pytest.fixture
def aux8():
    return make_aux(8)


def random_imp_pair(rng, max_vars: int = 12, max_depth: int = 3):
    """A random circuit (definitions of depth at most ``max_depth``) and a clause pair."""
    from pdrer.aux import Op
    from pdrer.logic import try_canonicalize

    n = rng.randint(3, max_vars)
    aux, vs = make_aux(n)
    depth = {v: 0 for v in vs}
    for _ in range(rng.randint(1, 8)):
        pool = [v for v in depth if depth[v] < max_depth]
        p, q = rng.sample(pool, 2)
        lit = aux.define(rng.choice((Op.AND, Op.XOR)), p * rng.choice((1, -1)), q * rng.choice((1, -1)))
        depth.setdefault(abs(lit), max(depth[p], depth[q]) + 1)
    all_vars = list(depth)

    def rclause():
        while True:
            k = rng.randint(1, 4)
            c = try_canonicalize(v * rng.choice((1, -1)) for v in rng.sample(all_vars, min(k, len(all_vars))))
            if c is not None:
                return c

    c1 = rclause()
    mode = rng.random()
    if mode < 0.35 and aux.aux_literals(c1):
        pieces = aux.expand(c1, rng.choice(aux.aux_literals(c1)))
        c2 = rng.choice(pieces) if pieces else rclause()
        if rng.random() < 0.5:
            c1, c2 = c2, c1
    elif mode < 0.5:
        extra = rclause()
        c2 = try_canonicalize(c1 + extra) or rclause()
    else:
        c2 = rclause()
    return aux, vs, c1, c2


def brute_implies(aux, vs, c1, c2) -> bool:
    rows = truth(len(vs))
    vals = eval_aux(aux, {v: rows[:, v - 1] for v in vs})
    a = eval_cnf([c1], vals, len(rows))
    b = eval_cnf([c2], vals, len(rows))
    return bool((~a | b).all())


def random_planted(rng: random.Random, n: int, m: int):
    vs = list(range(1, n + 1))
    cnf = set()

    def rlit(v):
        return v if rng.random() < 0.5 else -v

    def rest(excl, k):
        pool = [v for v in vs if v not in excl]
        return [rlit(v) for v in rng.sample(pool, min(k, len(pool)))]

    while len(cnf) < m:
        kind = rng.choice(("and", "xor", "ha", "rand"))
        if kind == "and":
            a, b = rng.sample(vs, 2)
            la, lb = rlit(a), rlit(b)
            for _ in range(rng.randint(1, 3)):
                r = rest({a, b}, rng.randint(0, 3))
                cnf |= {canonicalize([la, *r]), canonicalize([lb, *r])}
        elif kind == "xor":
            a, b = rng.sample(vs, 2)
            for _ in range(rng.randint(1, 3)):
                r = rest({a, b}, rng.randint(0, 3))
                pa, pb = rlit(a), rlit(b)
                cnf |= {canonicalize([pa, pb, *r]), canonicalize([-pa, -pb, *r])}
        elif kind == "ha":
            a, b, c, d = rng.sample(vs, 4)
            la, lb, lc, ld = map(rlit, (a, b, c, d))
            r = rest({a, b, c, d}, rng.randint(0, 2))
            cnf |= {canonicalize([la, lb, lc, *r]), canonicalize([la, lb, ld, *r]),
                    canonicalize([-la, -lb, lc, ld, *r])}
        else:
            cnf.add(canonicalize(rest(set(), rng.randint(1, 4))))
    return sorted(cnf)[:m]


def pusher_system():
    """At p=1 the inputs drive l1' = x and l2' = !x & y: never both set, possibly both clear."""
    from pdrer.generators import AigBuilder
    from pdrer.tsys import encode_transition_system

    b = AigBuilder()
    x, yin = b.input("x"), b.input("y")
    l1, l2, p = b.latch(1, "l1"), b.latch(0, "l2"), b.latch(0, "p")
    b.set_next(l1, b.MUX(p, x, 1))
    b.set_next(l2, b.MUX(p, b.AND(x ^ 1, yin), 0))
    b.set_next(p, 1)
    b.bad(b.AND(l1, l2))
    return encode_transition_system(b.build())


# one summary line per acceptance criterion, shown after the test run
ACCEPTANCE: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
