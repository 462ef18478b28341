import itertools

import pytest

from pastlogic.sepalg import (ABORT, RCT, SNAP, Computation, Ghost, Heap, History, State,
                              UniverseConfig, UniverseTooLarge, compose, compose_state,
                              enumerate_computations, enumerate_histories, enumerate_states,
                              split_state)


@pytest.fixture(scope="module")
def frac_states():
    u = UniverseConfig(addresses=("a", "b"), values=(0, 1), denominator=2, fractions=(1, 2))
    return enumerate_states(u)


def test_state_count_matches_hand_count(frac_states):
    # each address: absent, or one of 2 fractions x 2 values
    assert len(frac_states) == 5 * 5
    assert len(set(frac_states)) == len(frac_states)


def test_full_shape_count():
    u = UniverseConfig(addresses=("l", "r"), values=(0, 1, 2), heap_shape="full", denominator=1,
                       local_vars=("x",), var_values=(None, 0))
    assert len(enumerate_states(u)) == 3 * 3 * 2


def test_ceiling_guards_enumeration():
    u = UniverseConfig(addresses=tuple("abcdefgh"), values=tuple(range(6)), ceiling=1000)
    with pytest.raises(UniverseTooLarge):
        enumerate_states(u)


def test_fractions_add_up_and_values_must_agree():
    h1 = Heap({"a": (1, 0)}, 2)
    assert h1.compose(h1) == Heap.full({"a": 0}, 2)
    assert h1.compose(Heap({"a": (1, 1)}, 2)) is None
    assert Heap.full({"a": 0}, 2).compose(h1) is None


def test_fraction_out_of_range():
    with pytest.raises(ValueError):
        Heap({"a": (3, 0)}, 2)


def test_heap_splits_recompose(frac_states):
    for s in frac_states:
        for h1, h2 in s.gheap.splits():
            assert h1.compose(h2) == s.gheap


def test_split_state_is_exactly_the_inverse_of_compose(frac_states):
    # brute force: every pair that composes to s is found by split_state
    for s in frac_states[:8]:
        expected = {(x, y) for x, y in itertools.product(frac_states, repeat=2)
                    if compose_state(x, y) == s}
        assert expected <= set(split_state(s))
        assert all(compose_state(x, y) == s for x, y in split_state(s))


def test_abort_composes_with_nothing(frac_states):
    assert all(compose_state(ABORT, s) is None and compose_state(s, ABORT) is None
               for s in frac_states)
    assert split_state(ABORT) == ()


def test_vars_must_match():
    s = State.make({"a": 0}, denom=1, vars={"x": 1})
    t = State.make({}, denom=1, vars={"x": 2})
    assert compose_state(s, t) is None
    assert compose_state(s, s.unit()) == s


def test_receipts_exclusive_but_snapshots_duplicable():
    r = Ghost.make(receipts={1: (RCT, "v")})
    o = Ghost.make(receipts={1: (SNAP, "v")})
    assert r.compose(r) is None
    assert o.compose(o) == o
    assert r.compose(o) == r
    assert r.compose(Ghost.make(receipts={1: (SNAP, "w")})) is None


def test_obligations_are_a_multiset():
    g = Ghost.make(obligations=[("o", 1)])
    assert g.compose(g).obligations == (("o", 1), ("o", 1))


def test_clocks_disjoint():
    c = Ghost.make(clocks={"r": 0})
    assert c.compose(c) is None
    assert c.compose(Ghost.make(clocks={"q": 1})).clock("q") == 1


def test_ghost_splits_recompose():
    g = Ghost.make(obligations=["o"], receipts={1: (RCT, 0)}, clocks={"r": 2})
    splits = list(g.splits())
    assert splits
    assert all(a.compose(b) == g for a, b in splits)


def test_computations_compose_only_on_shared_prefix(frac_states):
    a, b = frac_states[1], frac_states[2]
    c1 = Computation((a, b))
    u = b.unit()
    assert compose(c1, Computation((a, u))) == c1
    assert compose(c1, Computation((b, u))) is None
    with pytest.raises(ValueError):
        Computation(())


def test_history_labels_align():
    s = State.make({}, denom=1)
    h = History((s,), ()).extend(s, "c").extend(s)
    assert h.labels == ("c", None)
    assert h.commands_since(0) == ("c",)
    assert compose(h, History((s, s, s), ("c", "d"))) is None
    with pytest.raises(ValueError):
        History((s, s), ())


def test_enumerators_count(frac_states):
    S = frac_states[:3]
    assert sum(1 for _ in enumerate_computations(S, 3)) == 3 + 9 + 27
    assert sum(1 for _ in enumerate_histories(S, ("c",), 2)) == 3 + 9 * 2


def test_universe_from_ini(tmp_path):
    p = tmp_path / "u.ini"
    p.write_text("[universe]\naddresses = a, b\nvalues = 0..2\ndenominator = 1\n"
                 "heap_shape = full\n")
    u = UniverseConfig.from_file(p)
    assert u.addresses == ("a", "b") and u.values == (0, 1, 2)
    assert len(enumerate_states(u)) == 9
