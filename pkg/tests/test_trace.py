from __future__ import annotations

import pytest

from nogo.parsing import ParseError
from nogo.tensor.derivatives import flat_commute_sort
from nogo.tensor.witnesses import FIELD_DECLS, gr_witness, lorentz_gauge_contradiction
from nogo.tensor.parse import parse_tensor
from nogo.trace import RewriteTrace, final_output, replay


def test_serialize_parse_round_trip():
    trace = RewriteTrace()
    gr_witness(trace=trace)
    text = trace.serialize()
    again = RewriteTrace.parse(text)
    assert again.serialize() == text
    assert final_output(again) == "R[g]^c_{a b d} bar(T)^d"


@pytest.mark.parametrize("build", [
    lambda t: gr_witness(trace=t),
    lambda t: lorentz_gauge_contradiction(trace=t),
])
def test_replay_reproduces_steps(build):
    trace = RewriteTrace()
    build(trace)
    result = replay(RewriteTrace.parse(trace.serialize()))
    assert result.ok and result.checked == len(trace) > 0


def test_declarations_travel_with_trace():
    trace = RewriteTrace(decls=FIELD_DECLS.copy())
    flat_commute_sort(parse_tensor("D[eta,^b] D[eta,^a] F_{a b}", FIELD_DECLS), trace=trace)
    again = RewriteTrace.parse(trace.serialize())
    assert final_output(again) == "0"
    assert replay(again).ok


def test_tampered_step_is_reported():
    trace = RewriteTrace()
    gr_witness(trace=trace)
    text = trace.serialize().replace("out R[g]^c_{a b d} bar(T)^d", "out 0")
    result = replay(RewriteTrace.parse(text))
    assert not result.ok
    assert result.failures[0][2] == "0"


def test_scalar_steps_replay():
    trace = RewriteTrace()
    trace.record("classical", "{q^3, p^3}", "9*q^2*p^2")
    trace.record("order", "q*p", "qh*ph - 1/2*i", scheme="weyl")
    trace.record("quantize", "p^2", "ph^2")
    assert replay(trace).ok


@pytest.mark.parametrize("text", ["", "not a trace\n", "# nogo rewrite trace v1\nstep 1 canonicalize\nargs {}\n",
                                  "# nogo rewrite trace v1\nstep 1 x\nargs {bad\nin 0\nout 0\n"])
def test_malformed_traces(text):
    with pytest.raises(ParseError):
        RewriteTrace.parse(text)
