"""Explicit-state simulation and reachability for small AIGs.

Used as an independent oracle: it evaluates the AIG gate by gate and never
touches the CNF encoding.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

from .aiger import AigCircuit

State = tuple[bool, ...]


def _eval(c: AigCircuit, latch_vals: State, input_vals: State) -> dict[int, bool]:
    val: dict[int, bool] = {0: False}
    for lit, x in zip(c.inputs, input_vals):
        val[lit >> 1] = x
    for latch, x in zip(c.latches, latch_vals):
        val[latch.lit >> 1] = x
    for lhs, a, b in c.and_gates:
        val[lhs >> 1] = _lit(val, a) and _lit(val, b)
    return val


def _lit(val: dict[int, bool], lit: int) -> bool:
    return val[lit >> 1] ^ bool(lit & 1)


def step(c: AigCircuit, state: State, inputs: State) -> tuple[State, bool]:
    """Successor state and the value of the property literal."""
    val = _eval(c, state, inputs)
    nxt = tuple(_lit(val, latch.next) for latch in c.latches)
    prop = c.property_literal()
    return nxt, _lit(val, prop) if prop is not None else False


def initial_states(c: AigCircuit) -> list[State]:
    choices = [(False, True) if l.reset is None else (bool(l.reset),) for l in c.latches]
    return [tuple(s) for s in itertools.product(*choices)]


@dataclass
class ReachResult:
    safe: bool
    depth: int | None  # length of a shortest counterexample, if unsafe
    num_reachable: int
    path: list[tuple[State, State]] | None = None


def reachability(c: AigCircuit, max_bits: int = 20) -> ReachResult:
    """Breadth-first reachability; returns a shortest counterexample when unsafe."""
    if len(c.latches) + len(c.inputs) > max_bits:
        raise ValueError("circuit too large for explicit enumeration")
    all_inputs = [tuple(x) for x in itertools.product((False, True), repeat=len(c.inputs))]
    parent: dict[State, tuple[State, State] | None] = {}
    frontier: deque[tuple[State, int]] = deque()
    for s in initial_states(c):
        if s not in parent:
            parent[s] = None
            frontier.append((s, 0))
    while frontier:
        s, d = frontier.popleft()
        for inp in all_inputs:
            nxt, bad = step(c, s, inp)
            if bad:
                path = [(s, inp)]
                cur = s
                while parent[cur] is not None:
                    prev, pin = parent[cur]
                    path.append((prev, pin))
                    cur = prev
                path.reverse()
                return ReachResult(False, d, len(parent), path)
            if nxt not in parent:
                parent[nxt] = (s, inp)
                frontier.append((nxt, d + 1))
    return ReachResult(True, None, len(parent))


def reachable_states(c: AigCircuit) -> set[State]:
    all_inputs = [tuple(x) for x in itertools.product((False, True), repeat=len(c.inputs))]
    seen = set(initial_states(c))
    todo = list(seen)
    while todo:
        s = todo.pop()
        for inp in all_inputs:
            nxt, _ = step(c, s, inp)
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    return seen
