import random

import pytest

from pastlogic.lang import loop, seq, skip
from pastlogic.preds import (EMP_S, FALSE_S, TRUE_S, And, Exists, Hist, Not, Now, Or, Past, Star,
                             WPast, equivalent, image_includes, includes, includes_bruteforce,
                             is_frameable, is_intuitionistic, pt, sp, sp_star)
from pastlogic.sepalg import History, UniverseConfig, enumerate_histories, enumerate_states

C1 = skip(label="c1")
C2 = skip(label="c2")


@pytest.fixture(scope="module")
def S():
    return enumerate_states(UniverseConfig(addresses=("a", "b"), values=(0, 1), denominator=1))


def atoms():
    return [pt("a", 0), pt("a"), pt("b", 1), EMP_S, TRUE_S,
            sp("a=b", lambda s: s.gheap.value("a") is not None
               and s.gheap.value("a") == s.gheap.value("b"))]


def random_term(rng, depth):
    ps = atoms()
    if depth == 0:
        kind = rng.choice(["now", "past", "wpast", "hist"])
        p = rng.choice(ps)
        if kind == "now":
            return Now(p)
        if kind == "past":
            return Past(p)
        if kind == "wpast":
            return WPast(p)
        return Hist(p, rng.choice([seq(C1), loop(C1), seq(C1, C2)]))
    op = rng.choice(["and", "or", "not", "star"])
    a = random_term(rng, depth - 1)
    if op == "not":
        return Not(a)
    b = random_term(rng, depth - 1)
    return {"and": And, "or": Or, "star": Star}[op](a, b)


def test_member_agrees_with_oracle(S):
    rng = random.Random(7)
    hs = list(enumerate_histories(S[:5], ("c1", "c2"), 3))
    for _ in range(40):
        t = random_term(rng, rng.randint(0, 2))
        for h in hs[::7]:
            assert t.member(h) == t.oracle(h), (t, h)


def test_includes_agrees_with_bruteforce(S):
    rng = random.Random(11)
    sub = S[:6]
    for _ in range(60):
        A, B = random_term(rng, rng.randint(0, 2)), random_term(rng, rng.randint(0, 1))
        fast = includes(A, B, sub, 3, ("c1", "c2"))
        slow = includes_bruteforce(A, B, sub, 3, ("c1", "c2"))
        assert fast.holds == slow.holds, (A, B, fast.witness, slow.witness)
        if not fast.holds:
            h = fast.witness
            assert A.oracle(h) and not B.oracle(h)


def test_now_past_basics(S):
    a0 = pt("a", 0)
    assert includes(Now(a0), WPast(a0), S).holds
    assert includes(Past(a0), WPast(a0), S).holds
    assert not includes(WPast(a0), Now(a0), S).holds
    assert includes(Past(FALSE_S), Now(FALSE_S), S).holds
    # Past is stable under extension
    assert image_includes(Past(a0), lambda s: S, Past(a0), S).holds
    assert image_includes(Now(a0), lambda s: S, Past(a0), S).holds


def test_unbounded_matches_bounded_at_small_length(S):
    a0, b1 = pt("a", 0), pt("b", 1)
    A = And(Past(a0), Now(b1))
    B = Past(sp_star(a0, TRUE_S))
    assert includes(A, B, S).holds == includes_bruteforce(A, B, S, 4).holds


def test_hist_language(S):
    s = S[0]
    h = History((s, s, s), ("c1", "c1"))
    assert Hist(TRUE_S, loop(C1)).oracle(h)
    assert not Hist(EMP_S if not s.is_unit() else FALSE_S, seq(C1)).oracle(h)
    assert not Hist(TRUE_S, seq(C2)).oracle(History((s, s), ("c1",)))


def test_exists_over_domain(S):
    e = Exists(("v",), ((0, 1),), lambda env: Now(pt("a", env["v"])))
    assert equivalent(e, Now(pt("a")), S).holds


def test_intuitionism_and_frameability(S):
    assert is_intuitionistic(pt("a"), S)
    assert not is_intuitionistic(EMP_S, S)
    assert is_frameable(Past(pt("a", 0)), S)
    assert not is_frameable(Not(Past(pt("a", 0))), S)
