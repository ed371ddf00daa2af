"""Programmatic AIG construction and parametric benchmark families."""

from __future__ import annotations

import math

from .aiger import AigCircuit, Latch

FALSE, TRUE = 0, 1


class AigBuilder:
    """Structurally hashed and-inverter graph builder.

    Nodes are numbered in creation order and renumbered into the binary
    AIGER layout (inputs, latches, gates) by :meth:`build`.
    """

    def __init__(self) -> None:
        self._inputs: list[int] = []
        self._latches: list[int] = []
        self._reset: dict[int, int | None] = {}
        self._next: dict[int, int] = {}
        self._ands: list[tuple[int, int, int]] = []
        self._strash: dict[tuple[int, int], int] = {}
        self._bad: list[int] = []
        self._outputs: list[int] = []
        self._names: dict[str, str] = {}
        self._n = 0

    def _node(self) -> int:
        self._n += 1
        return 2 * self._n

    def input(self, name: str | None = None) -> int:
        lit = self._node()
        if name:
            self._names[f"i{len(self._inputs)}"] = name
        self._inputs.append(lit)
        return lit

    def latch(self, reset: int | None = 0, name: str | None = None) -> int:
        lit = self._node()
        if name:
            self._names[f"l{len(self._latches)}"] = name
        self._latches.append(lit)
        self._reset[lit] = reset
        return lit

    def set_next(self, latch: int, nxt: int) -> None:
        self._next[latch] = nxt

    def AND(self, a: int, b: int) -> int:
        if a == FALSE or b == FALSE or a == b ^ 1:
            return FALSE
        if a == TRUE:
            return b
        if b == TRUE or a == b:
            return a
        key = (max(a, b), min(a, b))
        hit = self._strash.get(key)
        if hit is not None:
            return hit
        lit = self._node()
        self._ands.append((lit, key[0], key[1]))
        self._strash[key] = lit
        return lit

    @staticmethod
    def NOT(a: int) -> int:
        return a ^ 1

    def OR(self, a: int, b: int) -> int:
        return self.AND(a ^ 1, b ^ 1) ^ 1

    def XOR(self, a: int, b: int) -> int:
        return self.OR(self.AND(a, b ^ 1), self.AND(a ^ 1, b))

    def MUX(self, sel: int, t: int, e: int) -> int:
        return self.OR(self.AND(sel, t), self.AND(sel ^ 1, e))

    def AND_all(self, lits: list[int]) -> int:
        acc = TRUE
        for l in lits:
            acc = self.AND(acc, l)
        return acc

    def OR_all(self, lits: list[int]) -> int:
        acc = FALSE
        for l in lits:
            acc = self.OR(acc, l)
        return acc

    def bad(self, lit: int) -> None:
        self._bad.append(lit)

    def output(self, lit: int) -> None:
        self._outputs.append(lit)

    def build(self) -> AigCircuit:
        order = self._inputs + self._latches + [g[0] for g in self._ands]
        remap = {old: 2 * (k + 1) for k, old in enumerate(order)}

        def m(lit: int) -> int:
            if lit < 2:
                return lit
            return remap[lit & ~1] | (lit & 1)

        latches = []
        for l in self._latches:
            if l not in self._next:
                raise ValueError("latch without next-state function")
            latches.append(Latch(m(l), m(self._next[l]), self._reset[l]))
        ands = [(m(a), m(b), m(c)) for a, b, c in self._ands]
        return AigCircuit(
            max_var=len(order),
            inputs=[m(x) for x in self._inputs],
            latches=latches,
            outputs=[m(x) for x in self._outputs],
            bad=[m(x) for x in self._bad],
            and_gates=ands,
            symbols=dict(self._names),
        )

    # word-level helpers, little-endian bit vectors

    def increment(self, bits: list[int]) -> list[int]:
        out, carry = [], TRUE
        for b in bits:
            out.append(self.XOR(b, carry))
            carry = self.AND(b, carry)
        return out

    def decrement(self, bits: list[int]) -> list[int]:
        out, borrow = [], TRUE
        for b in bits:
            out.append(self.XOR(b, borrow))
            borrow = self.AND(b ^ 1, borrow)
        return out

    def equals_const(self, bits: list[int], value: int) -> int:
        return self.AND_all([b if (value >> i) & 1 else b ^ 1 for i, b in enumerate(bits)])

    def greater_than_const(self, bits: list[int], value: int) -> int:
        """``bits > value`` as an unsigned comparison."""
        gt, eq = FALSE, TRUE
        for i in reversed(range(len(bits))):
            b = bits[i]
            if (value >> i) & 1:
                eq = self.AND(eq, b)
            else:
                gt = self.OR(gt, self.AND(eq, b))
                eq = self.AND(eq, b ^ 1)
        if value >> len(bits):
            return FALSE
        return gt


def counter_width(k: int) -> int:
    return math.ceil(math.log2(k + 1)) + 1


def gen_buffer_alloc(k: int) -> AigCircuit:
    """Buffer-allocation protocol with ``k`` cells.

    Inputs: ``alloc``, ``free`` and a binary cell index of ``ceil(log2 k)``
    bits (indices ``>= k`` select no cell).  When ``alloc`` is high and the
    selected cell is free, the cell becomes busy and the counter increments;
    otherwise, when ``free`` is high and the selected cell is busy, the cell
    is released and the counter decrements.  ``alloc`` takes priority over
    ``free``.  The property flags the counter exceeding ``k``, which cannot
    happen because the counter always equals the number of busy cells.
    """
    if k < 1:
        raise ValueError("k must be positive")
    b = AigBuilder()
    alloc = b.input("alloc")
    free = b.input("free")
    nidx = math.ceil(math.log2(k)) if k > 1 else 0
    idx = [b.input(f"idx[{i}]") for i in range(nidx)]
    busy = [b.latch(0, f"busy[{j}]") for j in range(k)]
    cnt = [b.latch(0, f"cnt[{i}]") for i in range(counter_width(k))]

    sel = [b.equals_const(idx, j) for j in range(k)]
    free_cell = b.OR_all([b.AND(s, x ^ 1) for s, x in zip(sel, busy)])
    busy_cell = b.OR_all([b.AND(s, x) for s, x in zip(sel, busy)])
    do_alloc = b.AND(alloc, free_cell)
    do_free = b.AND_all([alloc ^ 1, free, busy_cell])

    for s, x in zip(sel, busy):
        set_ = b.AND(do_alloc, s)
        clr = b.AND(do_free, s)
        b.set_next(x, b.OR(set_, b.AND(x, clr ^ 1)))
    inc = b.increment(cnt)
    dec = b.decrement(cnt)
    for c, i, d in zip(cnt, inc, dec):
        b.set_next(c, b.MUX(do_alloc, i, b.MUX(do_free, d, c)))
    b.bad(b.greater_than_const(cnt, k))
    return b.build()


def gen_toggler(bad_on_state: bool = True) -> AigCircuit:
    """One latch that flips every step; bad is the latch itself or constant false."""
    b = AigBuilder()
    s = b.latch(0, "s")
    b.set_next(s, s ^ 1)
    b.bad(s if bad_on_state else FALSE)
    return b.build()


def gen_counter(width: int, target: int, modulus: int | None = None, enable: bool = False) -> AigCircuit:
    """Counter that wraps at ``modulus`` (default ``2**width``); bad when it equals ``target``.

    With ``enable`` the counter only advances while an input is high.
    Unsafe iff ``target < modulus``.
    """
    modulus = 2**width if modulus is None else modulus
    b = AigBuilder()
    en = b.input("en") if enable else TRUE
    bits = [b.latch(0, f"c[{i}]") for i in range(width)]
    inc = b.increment(bits)
    wrap = b.equals_const(bits, modulus - 1) if modulus < 2**width else FALSE
    for x, i in zip(bits, inc):
        nxt = b.AND(i, wrap ^ 1)
        b.set_next(x, b.MUX(en, nxt, x))
    b.bad(b.equals_const(bits, target))
    return b.build()


def gen_shift_register(n: int, unsafe: bool) -> AigCircuit:
    """Shift register fed by an input; bad when all cells hold 1.

    The safe variant feeds ``input AND NOT cell0``, so two adjacent ones never
    appear and the all-ones state is unreachable for ``n >= 2``.
    """
    b = AigBuilder()
    inp = b.input("in")
    cells = [b.latch(0, f"r[{i}]") for i in range(n)]
    feed = inp if unsafe else b.AND(inp, cells[0] ^ 1)
    b.set_next(cells[0], feed)
    for i in range(1, n):
        b.set_next(cells[i], cells[i - 1])
    b.bad(b.AND_all(cells))
    return b.build()


def gen_one_hot(n: int, unsafe: bool) -> AigCircuit:
    """Token ring of ``n`` latches; bad when two adjacent latches are both set.

    The unsafe variant lets an input inject a second token.
    """
    b = AigBuilder()
    inj = b.input("inject") if unsafe else FALSE
    ring = [b.latch(1 if i == 0 else 0, f"t[{i}]") for i in range(n)]
    b.set_next(ring[0], b.OR(ring[-1], inj))
    for i in range(1, n):
        b.set_next(ring[i], ring[i - 1])
    b.bad(b.OR_all([b.AND(ring[i], ring[(i + 1) % n]) for i in range(n)]))
    return b.build()


def gen_mutex(unsafe: bool) -> AigCircuit:
    """Two processes with a shared lock; bad when both are critical."""
    b = AigBuilder()
    r0, r1 = b.input("req0"), b.input("req1")
    c0, c1 = b.latch(0, "crit0"), b.latch(0, "crit1")
    lock = b.latch(0, "lock")
    g0 = b.AND(r0, lock ^ 1)
    g1 = b.AND_all([r1, lock ^ 1] + ([] if unsafe else [g0 ^ 1]))
    b.set_next(c0, b.OR(g0, b.AND(c0, r0)))
    b.set_next(c1, b.OR(g1, b.AND(c1, r1)))
    b.set_next(lock, b.OR_all([g0, g1, b.AND(lock, b.OR(b.AND(c0, r0), b.AND(c1, r1)))]))
    b.bad(b.AND(c0, c1))
    return b.build()


def gen_constant(value: bool) -> AigCircuit:
    """Latch-free circuit whose only output is a constant."""
    b = AigBuilder()
    b.output(TRUE if value else FALSE)
    return b.build()


def gen_random(seed: int, latches: int = 4, inputs: int = 2, gates: int = 10, undefined_reset: bool = False) -> AigCircuit:
    """Seeded random sequential circuit; the property is a random gate or its negation."""
    import random

    rng = random.Random(seed)
    b = AigBuilder()
    ins = [b.input() for _ in range(inputs)]
    regs = []
    for i in range(latches):
        reset = None if undefined_reset and rng.random() < 0.25 else rng.choice((0, 0, 1))
        regs.append(b.latch(reset))
    pool = ins + regs
    for _ in range(gates):
        x, y = rng.sample(pool, 2) if len(pool) > 1 else (pool[0], pool[0])
        g = b.AND(x ^ rng.randint(0, 1), y ^ rng.randint(0, 1))
        if g > 1:
            pool.append(g)
    for r in regs:
        b.set_next(r, rng.choice(pool) ^ rng.randint(0, 1))
    # conjoin a few signals so that the property is not trivially reachable
    bad = b.AND_all([rng.choice(pool) ^ rng.randint(0, 1) for _ in range(rng.randint(1, 3))])
    b.bad(bad)
    return b.build()
