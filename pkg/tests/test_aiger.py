import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdrer.aiger import Latch, ParseError, UnsupportedFeature, parse_aiger, write_aag, write_aig
from pdrer.explicit import step
from pdrer.generators import gen_buffer_alloc, gen_counter, gen_mutex, gen_random, gen_toggler

TOGGLER = "aag 1 0 1 0 0 1\n2 3\n2\n"


def test_parse_toggler():
    c = parse_aiger(TOGGLER)
    assert c.max_var == 1 and c.latches == [Latch(2, 3, 0)]
    assert c.bad == [2] and c.property_literal() == 2


def test_parse_and_gate_and_symbols():
    src = "aag 3 2 0 1 1\n2\n4\n6\n6 2 4\ni0 x\ni1 y\no0 both\nc\nfree text\n"
    c = parse_aiger(src)
    assert c.and_gates == [(6, 2, 4)]
    assert c.symbols["i0"] == "x" and c.symbols["o0"] == "both"


def test_resets():
    c = parse_aiger("aag 3 0 3 1 0\n2 2 1\n4 4 4\n6 6\n2\n")
    assert [l.reset for l in c.latches] == [1, None, 0]
    back = parse_aiger(write_aag(c))
    assert back.latches == c.latches


@pytest.mark.parametrize("src", [
    "aag 1 0 1 0 0\n2 5\n",          # next literal out of range
    "aag 2 0 0 1 0\n4\n",            # undefined output variable
    "aig 1 0 0 0\n",                 # truncated header
    "xyz 0 0 0 0 0\n",
    "aag 3 2 0 1 1\n2\n4\n6\n6 8 4\n",
    "aag 2 1 0 1 1\n2\n4\n4 4 2\n",  # gate refers to itself
])
def test_parse_errors(src):
    with pytest.raises(ParseError):
        parse_aiger(src)


def test_unsupported_sections():
    with pytest.raises(UnsupportedFeature):
        parse_aiger("aag 1 1 0 0 0 0 1\n2\n2\n")


def test_error_offset():
    with pytest.raises(ParseError) as e:
        parse_aiger("aag 1 0 1 0 0 1\n2 9\n2\n")
    assert e.value.offset > 0


def _same_behaviour(a, b, states=20):
    import random

    rng = random.Random(0)
    for _ in range(states):
        s = tuple(rng.random() < 0.5 for _ in a.latches)
        x = tuple(rng.random() < 0.5 for _ in a.inputs)
        assert step(a, s, x) == step(b, s, x)


@pytest.mark.parametrize("circ", [gen_toggler(), gen_counter(3, 5), gen_mutex(False), gen_buffer_alloc(3)])
def test_roundtrip_both_formats(circ):
    a = parse_aiger(write_aag(circ))
    b = parse_aiger(write_aig(circ))
    assert a.latches == circ.latches and b.latches == circ.latches
    assert a.and_gates == b.and_gates == circ.and_gates
    _same_behaviour(circ, b)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 5), st.integers(0, 3), st.integers(0, 15), st.booleans())
def test_roundtrip_random(seed, nl, ni, ng, undef):
    c = gen_random(seed, nl, ni, ng, undef)
    b = parse_aiger(write_aig(c))
    assert b.latches == c.latches and b.bad == c.bad
    _same_behaviour(c, b)
    assert parse_aiger(write_aag(b)).and_gates == c.and_gates
