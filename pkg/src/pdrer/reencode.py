"""Template matching over delta frames and extension-rule re-encoding.

Three templates are recognised inside a single CNF (one delta frame):

* AND  ``(alpha | A), (beta | A)``                      -> ``(x | A)``, ``x <-> alpha & beta``
* XOR  ``(alpha | beta | A), (-alpha | -beta | A)``      -> ``(x | A)``, ``x <-> alpha ^ beta``
* HA   ``(alpha | beta | gamma | A), (alpha | beta | delta | A),
         (-alpha | -beta | gamma | delta | A)``
       -> ``(x | y | delta | A), (x | z | gamma | A)`` with
       ``x <-> alpha ^ beta``, ``y <-> alpha & beta``, ``z <-> y & delta``
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from .aux import AuxCircuit, Op
from .logic import Clause, lit_key, try_canonicalize
from .trace import GeneralizedTrace

KINDS = ("xor", "and", "ha")


@dataclass(frozen=True)
class TemplateMatch:
    kind: str
    level: int
    clauses: tuple[Clause, ...]
    sigma: dict[str, int]
    rest: Clause

    @property
    def key(self) -> tuple:
        return instantiation_key(self.kind, self.sigma)


def instantiation_key(kind: str, sigma: dict[str, int]) -> tuple:
    """Canonical instantiation; XOR keys ignore operand phases."""
    a, b = sigma["alpha"], sigma["beta"]
    if kind == "xor":
        return ("xor", *sorted((abs(a), abs(b))))
    ab = tuple(sorted((a, b), key=lit_key))
    if kind == "and":
        return ("and", *ab)
    gd = tuple(sorted((sigma["gamma"], sigma["delta"]), key=lit_key))
    return ("ha", *ab, *gd)


@dataclass
class ReencodeConfig:
    max_clusters: int = 16
    min_gain: int = 2
    template_order: tuple[str, ...] = KINDS

    def __post_init__(self) -> None:
        order = tuple(k.lower() for k in self.template_order)
        bad = [k for k in order if k not in KINDS]
        if bad or len(set(order)) != len(order) or not order:
            raise ValueError(f"invalid template order {self.template_order!r}")
        self.template_order = order


def _remove(c: Clause, *lits: int) -> Clause:
    return tuple(l for l in c if l not in lits)


def _distinct_vars(*lits: int) -> bool:
    vs = {abs(l) for l in lits}
    return len(vs) == len(lits)


def match_templates(
    d: Iterable[Clause], level: int = 0, kinds: Sequence[str] = KINDS
) -> list[TemplateMatch]:
    """Greedy, per-template disjoint matches inside one CNF.

    Clauses are scanned in canonical order; within one template kind each
    clause takes part in at most one match.  Different kinds are matched
    independently of each other.
    """
    clauses = sorted(set(tuple(c) for c in d))
    present = set(clauses)
    buckets: dict[int, list[Clause]] = defaultdict(list)
    for c in clauses:
        buckets[len(c)].append(c)
    out: list[TemplateMatch] = []
    for kind in kinds:
        if kind == "and":
            out += _match_and(buckets, level)
        elif kind == "xor":
            out += _match_xor(clauses, present, level)
        elif kind == "ha":
            out += _match_ha(buckets, present, level)
    return out


def _one_literal_index(bucket: list[Clause]) -> dict[Clause, list[tuple[int, Clause]]]:
    idx: dict[Clause, list[tuple[int, Clause]]] = defaultdict(list)
    for c in bucket:
        for l in c:
            idx[_remove(c, l)].append((l, c))
    return idx


def _match_and(buckets: dict[int, list[Clause]], level: int) -> list[TemplateMatch]:
    out = []
    for n in sorted(buckets):
        bucket = buckets[n]
        idx = _one_literal_index(bucket)
        used: set[Clause] = set()
        for c in bucket:
            if c in used:
                continue
            for l in c:
                rest = _remove(c, l)
                hit = next(
                    ((l2, c2) for l2, c2 in idx[rest] if c2 not in used and c2 != c and abs(l2) != abs(l)),
                    None,
                )
                if hit is None:
                    continue
                l2, c2 = hit
                used.update((c, c2))
                out.append(TemplateMatch("and", level, (c, c2), {"alpha": l, "beta": l2}, rest))
                break
    return out


def _match_xor(clauses: list[Clause], present: set[Clause], level: int) -> list[TemplateMatch]:
    out = []
    used: set[Clause] = set()
    for c in clauses:
        if c in used or len(c) < 2:
            continue
        for p, q in combinations(c, 2):
            rest = _remove(c, p, q)
            c2 = try_canonicalize(rest + (-p, -q))
            if c2 is None or c2 not in present or c2 in used:
                continue
            used.update((c, c2))
            out.append(TemplateMatch("xor", level, (c, c2), {"alpha": p, "beta": q}, rest))
            break
    return out


def _match_ha(buckets: dict[int, list[Clause]], present: set[Clause], level: int) -> list[TemplateMatch]:
    out = []
    used: set[Clause] = set()
    for n in sorted(buckets):
        if n < 3 or n + 1 not in buckets:
            continue
        bucket = buckets[n]
        idx = _one_literal_index(bucket)
        for c1 in bucket:
            if c1 in used:
                continue
            found = None
            for g in c1:
                k = _remove(c1, g)
                for dl, c2 in idx[k]:
                    if c2 == c1 or c2 in used or abs(dl) == abs(g):
                        continue
                    for a, b in combinations(k, 2):
                        if not _distinct_vars(a, b, g, dl):
                            continue
                        rest = _remove(k, a, b)
                        c3 = try_canonicalize(rest + (-a, -b, g, dl))
                        if c3 is None or c3 not in present or c3 in used:
                            continue
                        g_, d_ = sorted((g, dl), key=lit_key)
                        first, second = (c1, c2) if g_ == g else (c2, c1)
                        found = TemplateMatch(
                            "ha", level, (first, second, c3),
                            {"alpha": a, "beta": b, "gamma": g_, "delta": d_}, rest,
                        )
                        break
                    if found:
                        break
                if found:
                    break
            if found:
                used.update(found.clauses)
                out.append(found)
    return out


def apply_match(m: TemplateMatch, aux: AuxCircuit) -> list[Clause]:
    """Define the match's auxiliaries and return its replacement clauses."""
    s, rest = m.sigma, m.rest
    if m.kind == "and":
        x = aux.define(Op.AND, s["alpha"], s["beta"])
        new = [rest + (x,)]
    elif m.kind == "xor":
        x = aux.define(Op.XOR, s["alpha"], s["beta"])
        new = [rest + (x,)]
    else:
        x = aux.define(Op.XOR, s["alpha"], s["beta"])
        y = aux.define(Op.AND, s["alpha"], s["beta"])
        z = aux.define(Op.AND, y, s["delta"])
        new = [rest + (x, y, s["delta"]), rest + (x, z, s["gamma"])]
    out = []
    for c in new:
        cl = try_canonicalize(c)
        if cl is not None and cl not in out:
            out.append(cl)
    return out


@dataclass
class Cluster:
    key: tuple
    matches: list[TemplateMatch] = field(default_factory=list)

    @property
    def kind(self) -> str:
        return self.key[0]

    @property
    def gain(self) -> int:
        # every template replaces n matched clauses by n - 1
        return len(self.matches)

    def clause_refs(self) -> set[tuple[int, Clause]]:
        return {(m.level, c) for m in self.matches for c in m.clauses}


@dataclass
class ReencodeReport:
    clusters: list[Cluster] = field(default_factory=list)
    new_aux: int = 0
    removed: int = 0
    added: int = 0
    skipped: int = 0


def cluster_matches(matches: Iterable[TemplateMatch]) -> dict[tuple, Cluster]:
    clusters: dict[tuple, Cluster] = {}
    for m in matches:
        key = m.key
        clusters.setdefault(key, Cluster(key)).matches.append(m)
    return clusters


def choose(clusters: dict[tuple, Cluster], config: ReencodeConfig) -> list[Cluster]:
    prio = {k: i for i, k in enumerate(config.template_order)}
    ranked = sorted(
        (c for c in clusters.values() if c.kind in prio and c.gain >= config.min_gain),
        key=lambda c: (prio[c.kind], -c.gain, c.key),
    )
    chosen: list[Cluster] = []
    taken: set[tuple[int, Clause]] = set()
    for c in ranked:
        if len(chosen) >= config.max_clusters:
            break
        refs = c.clause_refs()
        if refs & taken:
            continue
        chosen.append(c)
        taken |= refs
    return chosen


def re_encode(t: GeneralizedTrace, e: AuxCircuit, config: ReencodeConfig | None = None) -> ReencodeReport:
    config = config or ReencodeConfig()
    matches: list[TemplateMatch] = []
    for i in range(1, t.depth + 1):
        matches += match_templates(t.delta(i), i, config.template_order)
    report = ReencodeReport()
    before = len(e)
    for cluster in choose(cluster_matches(matches), config):
        report.clusters.append(cluster)
        for m in cluster.matches:
            # an earlier replacement may have lifted one of these clauses to a higher level
            if any(t.level.get(c) != m.level for c in m.clauses):
                report.skipped += 1
                continue
            new = apply_match(m, e)
            t.replace(m.level, m.clauses, new)
            report.removed += len(m.clauses)
            report.added += len(new)
    report.new_aux = len(e) - before
    return report
