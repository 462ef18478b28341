import pytest

from pastlogic import lemmas
from pastlogic.lang import alloc, write
from pastlogic.sepalg import State, compose_state


@pytest.fixture(scope="module")
def universe():
    return lemmas.small_universe()


@pytest.mark.parametrize("suite", ["sl-operators", "intuitionism", "interplay", "loccom"])
def test_fast_suites_pass(universe, suite):
    rep = lemmas.run_lemma_suite(universe, 3, (suite,))
    assert rep.results and rep.ok, [(r.law, r.witness) for r in rep.failures()]
    assert all(r.checked > 0 for r in rep.results)


def test_algebra_detects_a_broken_composition():
    rep = lemmas.LemmaReport()
    states = [State.make({"a": v}, denom=1) for v in (0, 1)] + [State.make({}, denom=1)]

    def lopsided(x, y):
        # keep the left operand when the right one is not a unit
        return x if not y.is_unit() else compose_state(x, y)
    lemmas._algebra_laws(rep, "broken", [states], lopsided, lambda s: s.unit(),
                         lambda s: s.is_unit())
    failed = {r.law for r in rep.failures()}
    assert "commutativity" in failed


def test_loccom_separates_local_from_nonlocal(universe):
    states = lemmas._loccom_states(universe)
    assert lemmas.loccom_check(write("a", 0, label="w"), states) is None
    # picking the least free address depends on what the frame owns
    least = alloc("x", ("b", "c"), value=0, label="least")
    assert lemmas.loccom_check(least, states)
    assert lemmas.loccom_check(alloc("x", ("b", "c"), value=0, pick="any", label="any"),
                               states) is None


def test_report_shapes(universe):
    rep = lemmas.run_lemma_suite(universe, 2, ("interplay",))
    d = rep.as_dict()
    assert d["ok"] and d["bound"] == 2
    assert set(rep.groups()) == {r.group for r in rep.results}
