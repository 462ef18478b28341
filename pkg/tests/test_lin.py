from pathlib import Path

import pytest

from pastlogic import dsl
from pastlogic.lang import Fn, cmpx, skip
from pastlogic.lin import (TokenRuleApplication, apply_lin_rule, check_lin_outline,
                           counter_spec, obligation_tag)
from pastlogic.preds import Exists, Now, WPast, pt, var_is
from pastlogic.sepalg import UniverseConfig, enumerate_states

PROOFS = Path(__file__).resolve().parent.parent / "proofs"
RET = Fn(lambda e: e.get("ret"), "ret")


@pytest.fixture(scope="module")
def counter():
    pf = dsl.load(PROOFS / "counter.proof")
    read, inc = pf.outlines
    return read, inc, enumerate_states(pf.universe), pf.bound


def test_read_linearizes_in_hindsight(counter):
    read, _, S, bound = counter
    j = check_lin_outline(read, counter_spec(), "read", (),
                          [TokenRuleApplication("lin-pure", "ret", RET, tuple(range(7)))], S, bound)
    assert j.holds, j.error
    assert j.applications[-1][:2] == ("ret", "lin-pure")


def test_inc_is_impure_on_both_branches(counter):
    _, inc, S, bound = counter
    apps = [TokenRuleApplication("lin-impure", "inc_l"), TokenRuleApplication("lin-impure", "inc_r")]
    assert check_lin_outline(inc, counter_spec(), "inc", (), apps, S, bound).holds


def test_unbalanced_branches_rejected(counter):
    _, inc, S, bound = counter
    j = check_lin_outline(inc, counter_spec(), "inc", (),
                          [TokenRuleApplication("lin-impure", "inc_l")], S, bound)
    assert not j.holds and "branches" in j.error


def test_two_trades_rejected(counter):
    read, _, S, bound = counter
    apps = [TokenRuleApplication("lin-pure", "ret", RET, tuple(range(7))),
            TokenRuleApplication("lin-pure", "read_l", RET, tuple(range(7)))]
    j = check_lin_outline(read, counter_spec(), "read", (), apps, S, bound)
    assert not j.holds and "exactly one trade" in j.error


def test_missing_trade_rejected(counter):
    read, _, S, bound = counter
    j = check_lin_outline(read, counter_spec(), "read", (), [], S, bound)
    assert not j.holds


def test_impure_read_rejected(counter):
    read, _, S, bound = counter
    j = check_lin_outline(read, counter_spec(), "read", (),
                          [TokenRuleApplication("lin-impure", "read_l", RET, tuple(range(7)))],
                          S, bound)
    assert not j.holds


@pytest.fixture(scope="module")
def single():
    # counter whose right cell stays 0, so the abstract value is l
    u = UniverseConfig(addresses=("l", "r"), values=(0, 1, 2), value_domains=(("r", (0,)),),
                       heap_shape="full", denominator=1, local_vars=("x",), var_values=(0, 1, 2))
    return enumerate_states(u)


def _saw():
    return Exists(("v",), ((0, 1, 2),),
                  lambda e: Now(var_is("x", e["v"])) & WPast(pt("l", e["v"])), "saw")


def test_pure_needs_past_witness_impure_needs_current(single):
    X = Fn(lambda e: e.get("x"), "x")
    pre = _saw()
    c = skip(label="s")
    pure = apply_lin_rule(TokenRuleApplication("lin-pure", "s", X, (0, 1, 2)), pre, c, pre,
                          counter_spec(), "read", (), single)
    assert all(r.holds for _, r in pure)
    impure = apply_lin_rule(TokenRuleApplication("lin-impure", "s", X, (0, 1, 2)), pre, c, pre,
                            counter_spec(), "read", (), single)
    assert not all(r.holds for _, r in impure)


def test_mixed_rejects_effectful_read(single):
    Y = Fn(lambda e: e.get("x"), "x")
    c = cmpx("l", 0, 1, "x", label="c")
    pre = Now(var_is("x", 0))
    app = TokenRuleApplication("lin-mixed", "c", Y, (0, 1, 2), root="k")
    res = dict(apply_lin_rule(app, pre, c, pre, counter_spec(), "read", (), single))
    assert not res["impure"].holds


def test_clock_rules_need_a_root():
    with pytest.raises(ValueError):
        TokenRuleApplication("lin-pure-clock", "p").ghost(obligation_tag("read"))
    with pytest.raises(ValueError):
        TokenRuleApplication("lin-sideways", "p")
    g = TokenRuleApplication("lin-pure-clock", "p", 3, root="r").ghost("o")
    assert g.clock == "r" and g.trade == ("o", "clock:r", 3)
