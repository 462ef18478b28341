import itertools
import math

import pytest

from pastlogic import structures as st


@pytest.mark.parametrize("present", [(), (2,), (1, 3), (1, 2, 3)])
def test_initial_list_contents_and_invariants(present):
    s = st.lo_initial(present)
    assert st.logical_contents(s.gheap) == frozenset(present)
    assert st.check_structure_invariants(s.gheap).ok


def test_insets_of_a_sorted_list():
    # min -> 2 -> max: a search for k stops at the first node with key >= k
    s = st.lo_initial((2,))
    m = st.compute_insets(s.gheap)
    assert m.keyset[st.MIN] == frozenset({-math.inf})
    assert m.keyset[2] == frozenset({1, 2})
    assert m.keyset[st.MAX] == frozenset({3, math.inf})
    assert m.inset[st.MIN] >= {1, 2, 3}
    ks = [m.keyset[n] for n in m.keyset]
    for a, b in itertools.combinations(ks, 2):
        assert not a & b


def test_marked_unlinked_node_breaks_an_invariant():
    s = st.lo_initial((2,))
    h = s.gheap
    # unlink node 2 without marking it
    h = h.set((st.MIN, "succ"), st.MAX).set((st.MAX, "pred"), st.MIN)
    rep = st.check_structure_invariants(h)
    assert not rep.ok
    assert {c for c, *_ in rep.violations} & {"I1", "I3"}


def test_sentinels_never_marked():
    h = st.lo_initial(()).gheap.set((st.MIN, "mark"), 1)
    assert "I2" in {c for c, *_ in st.check_structure_invariants(h).violations}


def test_set_spec_against_python_sets():
    for C in map(frozenset, itertools.chain.from_iterable(
            itertools.combinations((1, 2, 3), r) for r in range(4))):
        for k in (1, 2, 3):
            assert st.sequential_apply("set", C, "insert", (k,)) == (C | {k}, k not in C)
            assert st.sequential_apply("set", C, "delete", (k,)) == (C - {k}, k in C)
            assert st.sequential_apply("set", C, "contains", (k,)) == (C, k in C)


def test_rdcss_spec():
    assert st.sequential_apply("rdcss", (0, 1), "rdcss", (0, 1, 1)) == ((1, 1), 0)
    assert st.sequential_apply("rdcss", (0, 0), "rdcss", (0, 1, 1)) == ((0, 0), 0)
    assert st.sequential_apply("rdcss", (1, 0), "rdcss", (0, 0, 1)) == ((1, 0), 1)
    assert st.sequential_apply("rdcss", (1, 0), "write", (1,)) == ((1, 1), None)
    with pytest.raises(ValueError):
        st.sequential_apply("counter", 0, "dec")


def test_counter_abstraction():
    assert st.abstract_of("counter", st.counter_initial(2, 1)) == 3


def test_snapshot_dump_lists_every_node():
    s = st.lo_initial((1, 3))
    lines = st.dump_snapshot(s.gheap).splitlines()
    assert len(lines) == 4 and "key=-inf" in lines[0]
    assert st.key_points((1, 2)) == (-math.inf, 1, 2, math.inf)


@pytest.mark.parametrize("variant", st.VARIANTS)
def test_programs_build_for_every_variant(variant):
    for op in ("insert", "delete", "contains"):
        p = st.program_for(op, (2,), variant, "lolist")
        assert p.labels()
