"""End-to-end acceptance checks.

Run with pytest (a summary line per criterion is printed at the end of the
session) or directly with ``python3 tests/test_acceptance.py``.
"""
import time
from pathlib import Path

import pytest

from pastlogic import explore as ex
from pastlogic import structures as st
from pastlogic.dsl import check_file, load
from pastlogic.explore import ThreadSpec
from pastlogic.lemmas import run_lemma_suite

PROOFS = Path(__file__).resolve().parent.parent / "proofs"
RESULTS: dict = {}


def counter_proof():
    t0 = time.perf_counter()
    pf = load(PROOFS / "counter.proof")
    rep = check_file(pf, "both")
    secs = time.perf_counter() - t0
    names = [j.name for j in rep.judgments]
    both = all({c.mode for c in cs} == {"invariant", "bounded"} and all(c.holds for c in cs)
               for cs in rep.certificates.values())
    depth = int(pf.discharge.get("depth", 0))
    ok = (rep.accepted and names == ["read", "inc"] and both and rep.agreement
          and depth >= 6 and pf.universe.values == (0, 1, 2, 3) and secs < 10)
    return ok, (f"{len(rep.certificates)} hypotheses, invariant and bounded (depth {depth}) "
                f"agree, {secs:.1f}s")


def counter_semantics():
    # no state merging, so every interleaving is a separate trace
    setup = ex.counter_setup()
    res = ex.run_interleavings(setup, dedup=False)
    spec = setup.spec()
    for o in res.outcomes:
        ops = o.history.operations()
        rd = next(op for op in ops if op[1] == "read")
        incs = [op for op in ops if op[1] == "inc"]
        if rd[5] != 1 or not all(i[3] < rd[4] and rd[3] < i[4] for i in incs):
            continue
        states, _ = ex.replay(setup, o.trace)
        if any(s.gheap.value("l") == 0 and s.gheap.value("r") == 1 for s in states):
            continue
        if ex.wing_gong_check(o.history, spec).linearizable:
            steps = " ".join(f"T{x.tid}:{x.labels[0]}" for x in o.trace)
            return True, f"read()=1 overlapping both incs, never l=0*r=1: {steps}"
    return False, "scenario not found"


def lemma_suites():
    rep = run_lemma_suite(bound=4)
    ok = rep.ok and rep.seconds < 60
    bad = ", ".join(f"{r.group}/{r.law}" for r in rep.failures())
    return ok, (f"{sum(r.passed for r in rep.results)}/{len(rep.results)} laws over "
                f"{rep.states} states, length <= 4, {rep.seconds:.1f}s" + (f"; failed: {bad}"
                                                                          if bad else ""))


def _bug(bug):
    out = {}
    for variant in st.VARIANTS:
        setup, shape = ex.bug_setup(bug, variant)
        out[variant] = ex.find_violation(setup, shape)
    return out


def bug1():
    r = _bug(1)
    o = r["original"]
    if not o.found:
        return False, "no violation on ORIGINAL"
    t1 = [x for x in o.verdict.history.operations() if x[0] == 1]
    shape = [x[5] for x in t1] == [True, True, False]
    every = o.verdict.complete and all(why for _, why in o.verdict.orders)
    ok = (shape and every and r["fixed"].status == "clean" and not r["fixed"].exhausted)
    return ok, (f"ORIGINAL: {len(o.verdict.orders)} orders, all violating; FELDMAN "
                f"{r['feldman'].status}; FIXED clean over {r['fixed'].histories} histories")


def bug2():
    r = _bug(2)
    o = r["original"]
    misses = o.found and any("contains(2) returns False" in (why or "")
                             for _, why in o.verdict.orders)
    ok = (misses and r["feldman"].found and r["fixed"].status == "clean")
    return ok, (f"ORIGINAL {r['original'].status}, FELDMAN {r['feldman'].status}, "
                f"FIXED {r['fixed'].status} over {r['fixed'].histories} histories")


def lolist_invariants():
    threads = [ThreadSpec(i + 1, (("any",),)) for i in range(3)]
    run = ex.check_invariants_on_reachables(
        ex.lolist_setup("fixed", threads, present=(2,), keys=(1, 2, 3), steps=8))
    faulty = ex.check_invariants_on_reachables(
        ex.lolist_setup("fixed", threads[:2], present=(2,), steps=8, fault="nomark"),
        first_only=True)
    witness = bool(faulty.violations and faulty.violations[0][2])
    clauses = sorted({c for _, rep, _ in faulty.violations for c, *_ in rep.violations})
    ok = run.ok and not run.exhausted and not faulty.ok and witness
    return ok, (f"FIXED: {run.states} states clean in {run.seconds:.0f}s; unlink without mark "
                f"violates {','.join(clauses)}")


def contains_hypotheses():
    setup = ex.lolist_setup("fixed", [ThreadSpec(1, (("any",),)), ThreadSpec(2, (("any",),))],
                            present=(2,), steps=8)
    res = ex.run_interleavings(setup, track_history=False, record=False)
    states, env = ex.transition_system(res)
    hyps = ex.lolist_hypotheses(st.LOUniverse().node_ids[:5], setup.keys)
    run = ex.discharge_structure_hypotheses(hyps, states, env, ("invariant", "bounded"), 5)
    fams = {f for f, _ in hyps}
    ok = run.ok and fams == {"pred-loop", "succ-loop", "key", "mark"}
    return ok, f"{len(run.results)} instances over {run.states} states, modes agree"


def rdcss():
    setup = ex.rdcss_setup()
    r = ex.find_violation(setup)
    res = ex.run_interleavings(setup, track_history=False, record=False)
    states, env = ex.transition_system(res)
    hy = ex.rdcss_hypotheses()
    run = ex.discharge_structure_hypotheses(hy, states, env, ("bounded",), 6)
    fams = {f for f, _ in hy}
    ok = (r.status == "clean" and run.ok
          and fams == {"clock", "contradiction", "descriptor"})
    return ok, (f"{r.histories} histories linearizable; {len(run.results)} hypotheses "
                f"discharged at depth 6")


def soundness():
    lines, ok = [], True
    for path in sorted(PROOFS.glob("*.proof")):
        pf = load(path)
        rep = check_file(pf)
        if pf.expect == "accept":
            good = rep.ok and rep.soundness and all(r.certified for _, r in rep.soundness)
        else:
            refused = [r for _, r in rep.soundness if not r.certified]
            good = (rep.accepted and not rep.ok and refused
                    and all("failed" in r.reason for r in refused))
        ok = ok and bool(good)
        lines.append(f"{path.stem}:{'ok' if good else 'FAIL'}")
    return ok, " ".join(lines)


CRITERIA = [
    (1, "counter proof", counter_proof),
    (2, "counter semantics", counter_semantics),
    (3, "lemma suites", lemma_suites),
    (4, "bug 1 reproduction", bug1),
    (5, "bug 2 reproduction", bug2),
    (6, "LO-list invariants", lolist_invariants),
    (7, "contains hypotheses", contains_hypotheses),
    (8, "RDCSS", rdcss),
    (9, "soundness cross-check", soundness),
]


def summary_lines():
    return [f"criterion {n} [{name}]: {'PASS' if RESULTS[n][0] else 'FAIL'} - {RESULTS[n][1]}"
            for n, name, _ in CRITERIA if n in RESULTS]


@pytest.mark.parametrize("n,name,check", CRITERIA, ids=[f"c{n}" for n, _, _ in CRITERIA])
def test_criterion(n, name, check):
    ok, detail = check()
    RESULTS[n] = (ok, detail)
    print(f"criterion {n} [{name}]: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, detail


if __name__ == "__main__":
    for n, name, check in CRITERIA:
        RESULTS[n] = check()
        print(summary_lines()[-1], flush=True)
