import itertools

import pytest

from pastlogic.lang import (Fn, GhostOp, Interference, V, alloc, apply_interference, assign,
                            assume, atomic, choice, cmpx, enrich, exec_command, faa,
                            ghost_only, governed, local_parts, lock, loop, read, seq, skip,
                            unlock, write)
from pastlogic.preds import TRUE_S, pt
from pastlogic.sepalg import ABORT, RCT, Ghost, Heap, State


def st(cells=None, vars=None, denom=1, **kw):
    return State.make(cells or {}, vars=vars, denom=denom, **kw)


def test_read_write_faa_cmpx():
    s = st({"a": 3}, {"x": None})
    assert exec_command(read("a", "x"), s) == [s.with_vars(x=3)]
    assert exec_command(read("b", "x"), s) == [ABORT]
    [t] = exec_command(write("a", 5), s)
    assert t.gheap.value("a") == 5
    [t] = exec_command(faa("a", 2, "x"), s)
    assert (t.gheap.value("a"), t.var("x")) == (5, 3)
    [t] = exec_command(cmpx("a", 3, 9, "x"), s)
    assert (t.gheap.value("a"), t.var("x")) == (9, 3)
    [t] = exec_command(cmpx("a", 0, 9, "x"), s)
    assert (t.gheap.value("a"), t.var("x")) == (3, 3)


def test_write_needs_full_permission():
    s = State(Heap({"a": (1, 0)}, 2))
    assert exec_command(write("a", 1), s) == [ABORT]
    assert exec_command(read("a", "x"), s) != [ABORT]


def test_expressions_read_locals():
    s = st({"a": 1, "b": 0}, {"p": "b"})
    [t] = exec_command(write(V("p"), Fn(lambda e: 7, "7")), s)
    assert t.gheap.value("b") == 7
    [t] = exec_command(assign("q", Fn(lambda e: e["p"] * 2, "p*2")), s)
    assert t.var("q") == "bb"


def test_assume_blocks():
    s = st({"a": 1})
    assert exec_command(assume(pt("a", 1)), s) == [s]
    assert exec_command(assume(pt("a", 0)), s) == []


def test_lock_blocks_and_unlock_of_free_lock_aborts():
    s = st({"l": 0})
    [t] = exec_command(lock("l", owner=2), s)
    assert t.gheap.value("l") == 2
    assert exec_command(lock("l"), t) == []
    assert exec_command(unlock("l"), s) == [ABORT]
    assert exec_command(unlock("l"), t) == [s]


def test_alloc_least_and_any():
    s = st({1: 0}, {"n": None})
    least = exec_command(alloc("n", (1, 2, 3), value=0), s)
    assert [t.var("n") for t in least] == [2]
    anyof = exec_command(alloc("n", (1, 2, 3), value=0, pick="any"), s)
    assert sorted(t.var("n") for t in anyof) == [2, 3]
    full = st({1: 0, 2: 0, 3: 0}, {"n": None})
    assert exec_command(alloc("n", (1, 2, 3), value=0), full) == []
    with pytest.raises(ValueError):
        alloc("n", (1,), pick="random")


def test_alloc_records():
    s = st({}, {"n": None})
    [t] = exec_command(alloc("n", ("x",), fields={"key": 4, "mark": 0}), s)
    assert t.gheap.value(("x", "key")) == 4 and t.gheap.value(("x", "mark")) == 0


def test_atomic_sequences_and_propagates_abort():
    s = st({"a": 0}, {"x": None})
    [t] = exec_command(atomic(faa("a", 1), read("a", "x")), s)
    assert t.var("x") == 1
    assert exec_command(atomic(read("zz", "x"), faa("a", 1)), s) == [ABORT]


def test_ghost_trade_consumes_obligation():
    s = st({"a": 0}, lghost=Ghost.make(obligations=["o"]))
    [t] = exec_command(ghost_only(GhostOp(trade=("o", "op", 5))), s)
    assert t.lghost.obligations == () and t.lghost.receipt("op") == (RCT, 5)
    # no obligation left: trading again aborts
    assert exec_command(ghost_only(GhostOp(trade=("o", "op", 5))), t) == [ABORT]


def test_clock_tick():
    s = st({}, gghost=Ghost.make(clocks={"r": 0}))
    [t] = exec_command(ghost_only(GhostOp(clock="r")), s)
    assert t.gghost.clock("r") == 1


def test_program_language_matches_brute_force():
    a, b = skip(label="a"), skip(label="b")
    p = seq(a, loop(choice(a, b)), b)
    for n in range(5):
        for w in itertools.product("ab", repeat=n):
            expected = len(w) >= 2 and w[0] == "a" and w[-1] == "b"
            assert p.accepts(w) == expected, w


def test_enrich_replaces_commands_by_their_interferences():
    c = faa("a", 1, label="inc")
    p = enrich(seq(c), [Interference(pt("a"), c)])
    assert p.labels() == ["inc"]
    from pastlogic.lang import IncompleteInterference
    with pytest.raises(IncompleteInterference):
        enrich(seq(skip(label="nope")), [])


def test_interference_keeps_local_state():
    c = faa("a", 1, label="inc")
    s = st({"a": 0}, {"x": 5})
    [t] = apply_interference(Interference(pt("a"), c), s, local_parts([s.with_vars(x=1)]))
    assert t.gheap.value("a") == 1 and t.var("x") == 5


def test_governed_enumeration_counts():
    c = faa("a", 1, label="inc")
    init = [st({"a": 0})]
    comps = list(governed([Interference(TRUE_S, c)], 3, init))
    # every step is either the environment's inc or our own inc
    assert [len(x) for x in comps].count(3) == 4
    assert all(x[-1].gheap.value("a") == len(x) - 1 for x in comps)
