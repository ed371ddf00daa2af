import pytest

from conftest import make_aux
from pdrer.aux import Op
from pdrer.certify import (
    FormatError,
    certify_safe,
    certify_unsafe,
    check_trace,
    eliminate_to_plain,
    read_cex,
    read_invariant,
    write_cex,
    write_invariant,
)
from pdrer.engine import EngineConfig, solve
from pdrer.generators import gen_buffer_alloc, gen_constant, gen_mutex, gen_toggler
from pdrer.logic import canonicalize
from pdrer.tsys import encode_transition_system


@pytest.fixture(scope="module")
def ba4():
    ts = encode_transition_system(gen_buffer_alloc(4))
    return ts, solve(ts, EngineConfig(use_er=True, delta=50))


def test_top_fails_safety():
    ts = encode_transition_system(gen_toggler(True))
    r = certify_safe(ts, [])
    assert not r.ok and r.condition == "safety" and r.model


def test_hand_invariant_passes():
    # the safe toggler never reaches bad; the latch alone is inductive only
    # together with the definition of bad, which is constant false
    ts = encode_transition_system(gen_toggler(False))
    assert certify_safe(ts, []).ok
    ts = encode_transition_system(gen_mutex(False))
    c0, c1, lock = ts.state_vars
    inv = [canonicalize((-c0, -c1)), canonicalize((-c0, lock)), canonicalize((-c1, lock))]
    assert certify_safe(ts, inv).ok


def test_broken_invariants_report_condition():
    ts = encode_transition_system(gen_toggler(False))
    assert certify_safe(ts, [(1,)]).condition == "initiation"
    assert certify_safe(ts, [(-1,)]).condition == "consecution"


def test_engine_invariant_and_elimination(ba4):
    ts, r = ba4
    assert r.stats.aux_vars_in_invariant > 0
    assert certify_safe(ts, r.invariant, r.aux).ok
    plain = eliminate_to_plain(r.invariant, r.aux)
    assert all(abs(l) in ts.state_vars for c in plain for l in c)
    assert certify_safe(ts, plain, []).ok


def test_elimination_examples():
    aux, (a, b, l1) = make_aux(3)
    y = aux.define(Op.AND, a, b)
    assert sorted(eliminate_to_plain([(l1, y)], aux)) == sorted([(a, l1), (b, l1)])
    assert eliminate_to_plain([(a, -l1)], aux) == [(a, -l1)]


def test_rejects_cyclic_or_foreign_definitions():
    ts = encode_transition_system(gen_toggler(False))
    aux, _ = make_aux(1)
    # clause over an undefined variable
    assert certify_safe(ts, [(5,)], []).condition == "definitions"


def test_unsafe_replay():
    ts = encode_transition_system(gen_toggler(True))
    assert certify_unsafe(ts, [((False,), ()), ((True,), ())]).ok
    bad = certify_unsafe(ts, [((False,), ()), ((False,), ())])
    assert not bad.ok and bad.step == 1
    assert not certify_unsafe(ts, [((True,), ())]).ok  # not initial
    assert not certify_unsafe(ts, []).ok


def test_length_zero_cex():
    ts = encode_transition_system(gen_constant(True))
    assert certify_unsafe(ts, [((), ())]).ok


def test_invariant_file_roundtrip(ba4):
    ts, r = ba4
    text = write_invariant(ts, r.invariant, r.aux)
    assert text.startswith(f"inv {len(r.invariant)} ")
    inv, aux = read_invariant(ts, text)
    assert len(inv) == len(r.invariant)
    assert certify_safe(ts, inv, aux).ok
    assert certify_safe(ts, eliminate_to_plain(inv, aux), []).ok


@pytest.mark.parametrize("text", [
    "",
    "inv 1\n",
    "inv 1 0\ns0\n",
    "inv 1 0\nq3 0\n",
    "inv 1 1\ndef a0 = AND s0 a1\na0 0\n",
    "inv 0 1\ndef a0 = OR s0 s1\n",
    "inv 2 0\ns0 0\n",
])
def test_invariant_format_errors(text):
    ts = encode_transition_system(gen_mutex(False))
    with pytest.raises(FormatError):
        read_invariant(ts, text)


def test_cex_file_roundtrip():
    path = [((False, True), ()), ((True, True), (True,))]
    assert read_cex(write_cex(path)) == path
    with pytest.raises(FormatError):
        read_cex("state 01 input 1\n")
    with pytest.raises(FormatError):
        read_cex("state 0x inputs 1\n")


def test_check_trace_detects_violation():
    ts = encode_transition_system(gen_toggler(False))
    # G_1 = {(-s)} is not reachable-closed from Init = {(-s)}: step 1 has s
    assert check_trace(ts, [[(-1,)], [(-1,)]], []) == [(0, (-1,))]
    assert check_trace(ts, [[(-1,)], []], []) == []
