"""Delta-encoded generalized trace with semantic redundancy removal."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

from .aux import AuxCircuit
from .bdd import BddManager
from .logic import Clause


@dataclass
class ImpStats:
    calls: int = 0
    subsumption: int = 0
    no_aux: int = 0
    coi: int = 0
    bdd: int = 0
    bdd_true: int = 0

    def as_dict(self) -> dict[str, int]:
        return dict(vars(self))


class Implication:
    """Clause implication under the auxiliary circuit.

    Stages, cheapest first: syntactic subsumption, the no-auxiliary shortcut,
    a cone-of-influence disjointness refutation, and finally a BDD check.
    With ``semantic=False`` only the syntactic stage runs.
    """

    def __init__(self, aux: AuxCircuit, bdd: BddManager | None = None, semantic: bool = True):
        self.aux = aux
        self.bdd = bdd or BddManager()
        self.semantic = semantic
        self.stats = ImpStats()
        self._memo: dict[tuple[Clause, Clause], bool] = {}
        self._cinfo: dict[Clause, tuple] = {}
        self.last_stage = ""

    def _info(self, c: tuple[int, ...]):
        """Per-clause facts: aux present, independence, cone, cones of clean literals."""
        r = self._cinfo.get(c)
        if r is None:
            aux = self.aux
            has = bool(aux.aux_literals(c))
            clean = [aux.coi(l) for l in c if aux.is_clean_literal(l)] if has else []
            r = (has, has and aux.independent(c), aux.coi_clause(c) if has else frozenset(), clean)
            self._cinfo[c] = r
        return r

    def __call__(self, c1: Sequence[int], c2: Sequence[int]) -> bool:
        st = self.stats
        st.calls += 1
        if len(c1) <= len(c2) and set(c1).issubset(c2):
            st.subsumption += 1
            self.last_stage = "subsumption"
            return True
        c1, c2 = tuple(c1), tuple(c2)
        i1, i2 = self._info(c1), self._info(c2)
        if not self.semantic or not (i1[0] or i2[0]):
            st.no_aux += 1
            self.last_stage = "no_aux"
            return False
        # refutation by disjoint cones is only valid when c2 can be falsified
        # independently of the literal, which `independent` guarantees
        if i2[1] or not i2[0]:
            k2 = i2[2] if i2[0] else frozenset(abs(l) for l in c2)
            if i1[0]:
                cones = i1[3]
            else:
                cones = [frozenset((abs(l),)) for l in c1]
            if any(k2.isdisjoint(k) for k in cones):
                st.coi += 1
                self.last_stage = "coi"
                return False
        key = (c1, c2)
        st.bdd += 1
        self.last_stage = "bdd"
        r = self._memo.get(key)
        if r is None:
            m = self.bdd
            r = m.implies(m.clause(c1, self.aux), m.clause(c2, self.aux))
            self._memo[key] = r
        if r:
            st.bdd_true += 1
        return r


def imp_ev(imp: Implication, c1: Sequence[int], c2: Sequence[int]) -> bool:
    return imp(c1, c2)


Listener = Callable[[int, Clause], None]


class GeneralizedTrace:
    """Frames ``G_i = D_i | D_{i+1} | ... | D_N`` for ``i >= 1``; ``G_0 = D_0 = Init``."""

    def __init__(self, init: Iterable[Clause], aux: AuxCircuit, implies: Implication):
        self.aux = aux
        self.implies = implies
        self.deltas: list[dict[Clause, None]] = [dict.fromkeys(tuple(c) for c in init)]
        self.level: dict[Clause, int] = {}
        self._occ: dict[int, set[Clause]] = defaultdict(set)
        self._with_aux: set[Clause] = set()
        self.on_add: list[Listener] = []
        self.on_remove: list[Listener] = []

    @property
    def depth(self) -> int:
        """``N``, the index of the last frame."""
        return len(self.deltas) - 1

    def extend(self) -> None:
        self.deltas.append({})

    def delta(self, i: int) -> list[Clause]:
        return list(self.deltas[i])

    def frame(self, i: int) -> list[Clause]:
        if i == 0:
            return list(self.deltas[0])
        return [c for j in range(i, len(self.deltas)) for c in self.deltas[j]]

    def __iter__(self) -> Iterator[tuple[int, Clause]]:
        for j in range(1, len(self.deltas)):
            for c in self.deltas[j]:
                yield j, c

    def num_clauses(self) -> int:
        return sum(len(d) for d in self.deltas[1:])

    def frames_equal(self, i: int) -> bool:
        return not self.deltas[i]

    # raw mutation

    def _add(self, i: int, c: Clause) -> None:
        self.deltas[i][c] = None
        self.level[c] = i
        for l in c:
            self._occ[l].add(c)
        if self.aux.aux_literals(c):
            self._with_aux.add(c)
        for fn in self.on_add:
            fn(i, c)

    def remove(self, c: Clause) -> None:
        i = self.level.pop(c)
        del self.deltas[i][c]
        for l in c:
            self._occ[l].discard(c)
        self._with_aux.discard(c)
        for fn in self.on_remove:
            fn(i, c)

    def replace(self, i: int, old: Iterable[Clause], new: Iterable[Clause]) -> None:
        """Swap clauses inside ``D_i`` without redundancy checks."""
        for c in old:
            if self.level.get(c) != i:
                raise KeyError(f"clause {c} is not in D_{i}")
            self.remove(c)
        for c in new:
            if c in self.level:
                j = self.level[c]
                if j >= i:
                    continue
                self.remove(c)
            self._add(i, c)

    # redundancy-aware insertion

    def _has_aux(self, c: Clause) -> bool:
        return bool(self.aux.aux_literals(c))

    def implied_at(self, i: int, c: Clause) -> bool:
        """Whether some single clause of ``D_j`` with ``j >= i`` implies ``c``."""
        lv = self.level
        imp = self.implies
        if self._has_aux(c) and imp.semantic:
            return any(lv[d] >= i and imp(d, c) for d in list(lv))
        cs = set(c)
        n = len(c)
        seen: set[Clause] = set()
        for l in c:
            for d in self._occ[l]:
                if d in seen:
                    continue
                seen.add(d)
                if lv[d] >= i and len(d) <= n and cs.issuperset(d):
                    return True
        if imp.semantic:
            return any(lv[d] >= i and imp(d, c) for d in self._with_aux)
        return False

    def _implied_by(self, i: int, c: Clause) -> list[Clause]:
        """Clauses at levels ``<= i`` implied by ``c``."""
        lv = self.level
        imp = self.implies
        if self._has_aux(c) and imp.semantic:
            return [d for d in list(lv) if lv[d] <= i and imp(c, d)]
        out = []
        if c:
            rare = min(c, key=lambda l: len(self._occ[l]))
            n = len(c)
            out = [d for d in self._occ[rare] if lv[d] <= i and len(d) >= n and set(d).issuperset(c)]
        elif not imp.semantic:
            out = [d for d in lv if lv[d] <= i]
        if imp.semantic:
            cand = lv if not c else self._with_aux
            out += [d for d in cand if d not in out and lv[d] <= i and imp(c, d)]
        return out

    def insert_clause(self, i: int, c: Clause) -> bool:
        """Add ``c`` to ``D_i`` unless already implied at a level ``>= i``.

        Clauses at levels ``1..i`` implied by ``c`` are removed.  Returns
        whether ``c`` was added.
        """
        if not 1 <= i <= self.depth:
            raise IndexError(f"level {i} outside 1..{self.depth}")
        c = tuple(c)
        if self.implied_at(i, c):
            return False
        for d in sorted(self._implied_by(i, c), key=self._order):
            self.remove(d)
        self._add(i, c)
        return True

    def _order(self, c: Clause) -> tuple[int, Clause]:
        return (self.level[c], c)

    def dump(self) -> str:
        lines = [f"aux {len(self.aux)}"]
        for d in self.aux:
            lines.append(f"def {d.var} = {d.op.value} {d.lhs} {d.rhs}")
        for i, delta in enumerate(self.deltas):
            lines.append(f"level {i} {len(delta)}")
            for c in sorted(delta):
                lines.append(" ".join(map(str, c)) + " 0")
        return "\n".join(lines) + "\n"
