from pathlib import Path

import pytest

from pastlogic.dsl import check_file, load, loads
from pastlogic.lang import Interference, faa, skip, write
from pastlogic.logic import (Checker, Hypothesis, OChoice, Outline, OutlineError, Step,
                             apply_temporal_interpolation, certify_soundness,
                             discharge_bounded, discharge_invariant)
from pastlogic.preds import TRUE_S, Now, Or, Past, WPast, pt, sp
from pastlogic.sepalg import UniverseConfig, enumerate_states

PROOFS = Path(__file__).resolve().parent.parent / "proofs"


@pytest.fixture(scope="module")
def A():
    return enumerate_states(UniverseConfig(addresses=("a",), values=(0, 1, 2, 3),
                                           heap_shape="full", denominator=1))


def at(n):
    return pt("a", n)


def test_bounded_discharge_matches_path_reasoning(A):
    inc = [Interference(TRUE_S, faa("a", 1, label="inc"))]
    jump = inc + [Interference(TRUE_S, write("a", 2, label="jump"))]
    h = Hypothesis(at(0), at(2), at(1))
    assert discharge_bounded(h, inc, 6, A).holds
    c = discharge_bounded(h, jump, 6, A)
    assert not c.holds and c.witness is not None


def test_invariant_discharge_agrees(A):
    inc = [Interference(TRUE_S, faa("a", 1, label="inc"))]
    h = Hypothesis(at(0), at(2), at(1))
    below = sp("a<2", lambda s: s.gheap.value("a") < 2)
    inv = Or(Now(below), WPast(at(1)))
    c = discharge_invariant(h, inv, inc, A)
    assert c.holds
    # a non-inductive guess is refused
    assert not discharge_invariant(h, Now(below), inc, A).holds


def test_ti_variants_generate_hypotheses():
    _, hs = apply_temporal_interpolation(Now(TRUE_S), at(0), at(2), at(1), "unordered")
    assert len(hs) == 2 and hs[0].p is hs[1].q
    with pytest.raises(OutlineError):
        apply_temporal_interpolation(Now(TRUE_S), at(0), at(2), at(1), "cf")


def test_step_rule_rejects_wrong_post(A):
    ck = Checker(A)
    good = Outline(Now(at(0)), [Step(faa("a", 1, label="i"), Now(at(1)))], "good")
    bad = Outline(Now(at(0)), [Step(faa("a", 1, label="i"), Now(at(2)))], "bad")
    assert ck.check(good).post is not None
    with pytest.raises(OutlineError):
        ck.check(bad)


def test_interference_freedom_detects_unstable_assertion(A):
    ck = Checker(A)
    I = [Interference(TRUE_S, faa("a", 1, label="inc"))]
    assert all(r.holds for _, _, r in ck.interference_freedom([Past(at(0))], I))
    assert not all(r.holds for _, _, r in ck.interference_freedom([Now(at(0))], I))


def test_choice_outline_collects_interferences(A):
    ck = Checker(A)
    tru = Now(TRUE_S)
    o = Outline(tru, [OChoice((Outline(tru, [Step(faa("a", 1, label="l"), tru)]),
                               Outline(tru, [Step(skip(label="r"), tru)])), tru)], "ch")
    j = ck.check(o)
    assert {i.command.label for i in j.I} >= {"l"}


def test_counter_proof_checks_end_to_end():
    rep = check_file(load(PROOFS / "counter.proof"))
    assert rep.ok, rep.error
    assert [j.name for j in rep.judgments] == ["read", "inc"]
    assert all({c.mode for c in cs} == {"invariant", "bounded"}
               for cs in rep.certificates.values())
    assert rep.agreement


def test_counter_mutation_is_rejected():
    text = (PROOFS / "counter.proof").read_text()
    bad = text.replace("(and (= x nl) (unset y) (>= (val r) nr2)",
                       "(and (= x (+ nl 1)) (unset y) (>= (val r) nr2)", 1)
    assert bad != text
    rep = check_file(loads(bad, "mutant", base=PROOFS), certify=False)
    assert not rep.accepted and "read_l" in rep.error


def test_failing_hypothesis_blocks_certification():
    pf = load(PROOFS / "lockmark_ordered.proof")
    assert pf.expect == "reject"
    rep = check_file(pf)
    assert rep.accepted and not rep.ok
    refused = dict(rep.soundness)["mark_check"]
    assert not refused.certified and "failed" in refused.reason


def test_certification_refuses_without_certificates():
    pf = load(PROOFS / "skip.proof")
    rep = check_file(pf)
    assert rep.ok
    j = rep.judgments[0]
    assert certify_soundness(j, {}, [], 2).certified == (not j.H)
