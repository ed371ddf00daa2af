from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import eval_aux, eval_cnf, make_aux, random_planted, truth
from pdrer.aux import Op
from pdrer.logic import canonicalize
from pdrer.reencode import (
    ReencodeConfig,
    apply_match,
    cluster_matches,
    choose,
    instantiation_key,
    match_templates,
    re_encode,
)
from pdrer.trace import GeneralizedTrace, Implication


def C(*lits):
    return canonicalize(lits)


def trace_with(aux, clauses, semantic=False):
    t = GeneralizedTrace([], aux, Implication(aux, semantic=semantic))
    t.extend()
    t.replace(1, [], [C(*c) for c in clauses])
    return t


def test_and_match_simple():
    aux, (a, b, l1, l2) = make_aux(4)
    ms = match_templates([C(a, l1, l2), C(b, l1, l2)])
    assert len(ms) == 1
    m = ms[0]
    assert m.kind == "and" and m.sigma == {"alpha": a, "beta": b} and m.rest == (l1, l2)


def test_xor_match_simple():
    aux, (a, b, l4, l5, l6) = make_aux(5)
    ms = match_templates([C(a, b, l4, l5, l6), C(-a, -b, l4, l5, l6)], kinds=("xor",))
    assert [(m.kind, m.rest) for m in ms] == [("xor", (l4, l5, l6))]


def test_ha_match_simple():
    aux, (a, b, c, d, l1, l2) = make_aux(6)
    cnf = [C(a, b, c, l1, l2), C(a, b, d, l1, l2), C(-a, -b, c, d, l1, l2)]
    ms = match_templates(cnf, kinds=("ha",))
    assert len(ms) == 1
    assert ms[0].sigma == {"alpha": a, "beta": b, "gamma": c, "delta": d}
    assert ms[0].rest == (l1, l2)


def test_no_match_on_unrelated():
    aux, (a, b, c, d) = make_aux(4)
    assert match_templates([C(a, b), C(c, d)]) == []


def test_and_requires_distinct_variables():
    # (x | A), (-x | A) resolve; that is not an AND instance
    aux, (a, l1) = make_aux(2)
    assert match_templates([C(a, l1), C(-a, l1)], kinds=("and",)) == []


def test_greedy_disjoint_within_kind():
    aux, (a, b, c, l) = make_aux(4)
    # (a|l) pairs with both (b|l) and (c|l); only one AND match may use it
    ms = match_templates([C(a, l), C(b, l), C(c, l)], kinds=("and",))
    used = [cl for m in ms for cl in m.clauses]
    assert len(used) == len(set(used))
    assert len(ms) == 1


def test_instantiation_key_xor_ignores_phase():
    assert instantiation_key("xor", {"alpha": -1, "beta": 2}) == instantiation_key("xor", {"alpha": 1, "beta": 2})
    assert instantiation_key("and", {"alpha": 2, "beta": 1}) == ("and", 1, 2)


# exact transformations of the three template figures


def test_golden_and():
    aux, (a, b, l1, l2, l3, l4, l5, l6) = make_aux(8)
    t = trace_with(aux, [(a, l1, l2), (b, l1, l2), (a, l3), (b, l3), (a, l4, l5, l6), (b, l4, l5, l6)])
    rep = re_encode(t, aux)
    assert len(aux) == 1
    d = aux.defs[0]
    assert (d.op, d.lhs, d.rhs) == (Op.AND, a, b)
    x = d.var
    assert set(t.delta(1)) == {C(x, l1, l2), C(x, l3), C(x, l4, l5, l6)}
    assert rep.removed == 6 and rep.added == 3


def test_golden_xor():
    aux, (a, b, l1, l2, l3, l4, l5, l6) = make_aux(8)
    t = trace_with(aux, [
        (-a, b, l1, l2), (a, -b, l1, l2),
        (a, -b, l3), (-a, b, l3),
        (a, b, l4, l5, l6), (-a, -b, l4, l5, l6),
    ])
    re_encode(t, aux)
    assert len(aux) == 1
    d = aux.defs[0]
    assert (d.op, d.lhs, d.rhs) == (Op.XOR, a, b)
    x = d.var
    # the flipped-phase pairs carry the negated auxiliary literal
    assert set(t.delta(1)) == {C(-x, l1, l2), C(-x, l3), C(x, l4, l5, l6)}


def test_golden_ha():
    aux, (a, b, c, d, l1, l2) = make_aux(6)
    t = trace_with(aux, [(a, b, c, l1, l2), (a, b, d, l1, l2), (-a, -b, c, d, l1, l2)])
    re_encode(t, aux, ReencodeConfig(min_gain=1, template_order=("ha",)))
    x, y, z = (df.var for df in aux.defs)
    # operands are stored in canonical order
    got = [(df.op, {df.lhs, df.rhs}) for df in aux.defs]
    assert got == [(Op.XOR, {a, b}), (Op.AND, {a, b}), (Op.AND, {y, d})]
    assert set(t.delta(1)) == {C(x, y, d, l1, l2), C(x, z, c, l1, l2)}


def test_min_gain_filters_single_matches():
    aux, (a, b, l1) = make_aux(3)
    t = trace_with(aux, [(a, l1), (b, l1)])
    rep = re_encode(t, aux)
    assert rep.clusters == [] and len(aux) == 0


def test_max_clusters_cap():
    aux, vs = make_aux(12)
    a, b, c, d = vs[:4]
    rest = vs[4:]
    cls = []
    for r in rest[:3]:
        cls += [(a, r), (b, r)]
    for r in rest[3:6]:
        cls += [(c, -r), (d, -r)]
    t = trace_with(aux, cls)
    rep = re_encode(t, aux, ReencodeConfig(max_clusters=1))
    assert len(rep.clusters) == 1 and len(aux) == 1


def test_clusters_share_aux_across_levels():
    aux, (a, b, l1, l2) = make_aux(4)
    t = trace_with(aux, [(a, l1), (b, l1)])
    t.extend()
    t.replace(2, [], [C(a, l2), C(b, l2)])
    re_encode(t, aux)
    assert len(aux) == 1
    x = aux.defs[0].var
    assert t.delta(1) == [C(l1, x)] and t.delta(2) == [C(l2, x)]


def test_template_order_validation():
    with pytest.raises(ValueError):
        ReencodeConfig(template_order=("and", "bogus"))
    with pytest.raises(ValueError):
        ReencodeConfig(template_order=("and", "and"))


def test_choose_prefers_order_then_gain():
    aux, vs = make_aux(10)
    a, b, c, d = vs[:4]
    ms = match_templates([C(a, vs[4]), C(b, vs[4]), C(a, vs[5]), C(b, vs[5]),
                          C(c, d, vs[6]), C(-c, -d, vs[6]), C(c, d, vs[7]), C(-c, -d, vs[7])])
    chosen = choose(cluster_matches(ms), ReencodeConfig())
    assert [cl.kind for cl in chosen] == ["xor", "and"]


# random planted instances: projection onto the original variables is preserved


def projection_preserved(n: int, cnf, seed: int, config: ReencodeConfig) -> tuple[bool, int]:
    aux, vs = make_aux(n)
    t = trace_with(aux, cnf)
    re_encode(t, aux, config)
    rows = truth(n)
    cols = {v: rows[:, v - 1] for v in vs}
    before = eval_cnf(cnf, cols, len(rows))
    # definitions fix every auxiliary value, so the projection is evaluation
    after = eval_cnf(t.delta(1), eval_aux(aux, cols), len(rows))
    return bool((before == after).all()), len(aux)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(4, 10), st.integers(2, 40))
def test_projection_property(seed, n, m):
    rng = random.Random(seed)
    cnf = random_planted(rng, n, m)
    ok, _ = projection_preserved(n, cnf, seed, ReencodeConfig(min_gain=1, max_clusters=100))
    assert ok


def test_apply_match_drops_tautology_with_existing_aux():
    aux, (a, b, l) = make_aux(3)
    x = aux.define(Op.AND, a, b)
    ms = match_templates([C(a, -x, l), C(b, -x, l)], kinds=("and",))
    assert len(ms) == 1
    # (x | -x | l) is valid and disappears
    assert apply_match(ms[0], aux) == []


def test_match_invalidated_by_lifted_clause():
    aux, (a, b, e, l) = make_aux(4)
    x = aux.define(Op.AND, a, b)
    # level 1: (x | l), (e | l) match AND(x, e); level 2: (a | l), (b | l) match AND(a, b)
    t = trace_with(aux, [(x, l), (e, l)])
    t.extend()
    t.replace(2, [], [C(a, l), C(b, l)])
    rep = re_encode(t, aux, ReencodeConfig(min_gain=1))
    # the level-2 rewrite yields (x | l), which moves up and breaks the other match
    assert rep.skipped == 1
    assert t.delta(2) == [C(x, l)] and t.delta(1) == [C(e, l)]
