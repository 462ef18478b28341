"""Exhaustive interleaving exploration, operation histories and the
Wing-Gong linearizability check."""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Any, Callable

from .lang import Program, exec_command
from .lin import SeqSpec, counter_spec, rdcss_spec, set_spec
from .sepalg import ABORT, EMPTY_GHOST, Heap, State, _freeze_map
from . import structures as st


class ExplorationBudget(RuntimeError):
    pass


# ---------------------------------------------------------------- setup

@dataclass(frozen=True)
class ThreadSpec:
    """A thread running ``ops`` in order.  An op is ``(name, args)`` or
    ``("any",)`` for a nondeterministic pick from the setup's menu."""
    tid: int
    ops: tuple
    steps: int | None = None


@dataclass
class ThreadSetup:
    structure: str
    threads: list
    init: State
    variant: str = "fixed"
    keys: tuple = st.DEFAULT_KEYS
    pool: int = 5
    fault: str | None = None
    writers: list = field(default_factory=list)
    steps: int = 8
    max_states: int = 2_000_000
    max_threads: int = 3
    menu: tuple = ()
    symmetric: bool = False
    ids_in_vars: bool = True

    def __post_init__(self):
        if self.steps <= 0 or self.max_states <= 0:
            raise ValueError("bounds must be positive")
        if len(self.threads) > self.max_threads:
            raise ValueError(f"at most {self.max_threads} threads")
        self._progs = {}
        self._steps = {}

    @property
    def all_threads(self) -> list:
        return list(self.threads) + list(self.writers)

    def bound(self, t: ThreadSpec) -> int:
        return t.steps if t.steps is not None else self.steps

    def program(self, op, args) -> Program:
        key = (op, tuple(args))
        p = self._progs.get(key)
        if p is None:
            p = self._progs[key] = st.program_for(op, args, self.variant, self.structure,
                                                  self.keys, self.pool, self.fault)
        return p

    def expand(self, op) -> list:
        if op[0] == "any":
            return list(self.menu)
        return [(op[0], tuple(op[1]) if len(op) > 1 else ())]

    def spec(self) -> SeqSpec:
        init = st.abstract_of(self.structure, self.init, self.keys) \
            if self.structure == "lolist" else st.abstract_of(self.structure, self.init)
        return {"lolist": set_spec, "counter": counter_spec,
                "rdcss": rdcss_spec}[self.structure](init)


# ---------------------------------------------------------------- histories

@dataclass(frozen=True)
class Event:
    kind: str            # "inv" | "res"
    tid: int
    op: str
    args: tuple
    result: Any = None

    def __repr__(self):
        a = ",".join(map(str, self.args))
        if self.kind == "inv":
            return f"T{self.tid}:{self.op}({a})"
        return f"T{self.tid}:{self.op}({a})={self.result}"


@dataclass(frozen=True)
class OpHistory:
    events: tuple = ()

    def add(self, e: Event) -> "OpHistory":
        return OpHistory(self.events + (e,))

    def operations(self) -> list:
        """``[(tid, op, args, inv_index, res_index|None, result)]``."""
        open_ = {}
        out = []
        for i, e in enumerate(self.events):
            if e.kind == "inv":
                if e.tid in open_:
                    raise ValueError(f"thread {e.tid} invoked twice without response")
                open_[e.tid] = len(out)
                out.append([e.tid, e.op, e.args, i, None, None])
            else:
                j = open_.pop(e.tid)
                out[j][4] = i
                out[j][5] = e.result
        return [tuple(o) for o in out]

    def __repr__(self):
        return " ".join(map(repr, self.events))


# ---------------------------------------------------------------- configurations

@dataclass(frozen=True)
class ThreadState:
    opi: int = 0
    op: tuple | None = None      # (name, args) of the running op
    q: int | None = None         # program position; None = not started
    vars: tuple = ()
    lghost: Any = EMPTY_GHOST


@dataclass(frozen=True)
class Step:
    tid: int
    op: tuple
    positions: tuple             # program positions executed (locals included)
    labels: tuple


@dataclass
class Outcome:
    final: State
    history: OpHistory
    trace: tuple
    bounded: tuple               # threads stopped by the step bound
    blocked: tuple               # threads that could not move


@dataclass
class ExploreResult:
    outcomes: list
    states: int
    edges: int
    transitions: dict
    reachable: list
    aborts: list
    bound_hits: int
    budget_exhausted: bool
    seconds: float

    def histories(self) -> list:
        return list(dict.fromkeys(o.history for o in self.outcomes))


def _is_local(c) -> bool:
    return getattr(c, "local", False)


def _advance(prog: Program, q: int, s: State):
    """All ways to run local commands, exactly one shared command, and the
    local closure after it.  Yields ``(q', s', positions)``."""
    cmds = prog.positions()
    out = []
    seen = set()
    stack = [(q, s, (), False)]
    while stack:
        q, s, path, done = stack.pop()
        nxt = sorted(prog.next_positions(q))
        if done:
            if prog.is_final(q) or any(not _is_local(cmds[p]) for p in nxt):
                out.append((q, s, path))
                continue
        key = (q, s, done)
        if key in seen:
            continue
        seen.add(key)
        for p in reversed(nxt):
            c = cmds[p]
            if done and not _is_local(c):
                continue
            for t in exec_command(c, s):
                if t is ABORT:
                    out.append((p, ABORT, path + (p,)))
                else:
                    stack.append((p, t, path + (p,), done or not _is_local(c)))
    out.reverse()
    return out


class _Interner:
    def __init__(self):
        self.ids: dict = {}
        self.items: list = []

    def __call__(self, x) -> int:
        i = self.ids.get(x)
        if i is None:
            i = self.ids[x] = len(self.items)
            self.items.append(x)
        return i


def _thread_moves(setup: ThreadSetup, spec: ThreadSpec, g: tuple, ts: ThreadState):
    """Moves of one thread from global part ``g``: a list of
    ``(step, status, g', ts', events)``."""
    gheap, gghost = g
    if ts.q is None:
        v0 = _freeze_map({"me": spec.tid}) if setup.ids_in_vars else ()
        starts = [(op, Program.INIT, v0, True) for op in setup.expand(spec.ops[ts.opi])]
    else:
        starts = [(ts.op, ts.q, ts.vars, False)]
    out = []
    for op, q, vars_, fresh in starts:
        prog = setup.program(*op)
        s = State(gheap, gghost, Heap({}, gheap.denom), ts.lghost, vars_)
        inv = (Event("inv", spec.tid, op[0], op[1]),) if fresh else ()
        labels = prog.positions()
        for q2, t, path in _advance(prog, q, s):
            step = Step(spec.tid, op, path, tuple(labels[p].label for p in path))
            if t is ABORT:
                out.append((step, "abort", None, None, inv))
            elif prog.is_final(q2):
                out.append((step, "ok", (t.gheap, t.gghost),
                            ThreadState(ts.opi + 1, None, None, (), t.lghost),
                            inv + (Event("res", spec.tid, op[0], op[1], t.var("res")),)))
            else:
                out.append((step, "ok", (t.gheap, t.gghost),
                            ThreadState(ts.opi, op, q2, t.vars, t.lghost), inv))
    return out


def run_interleavings(setup: ThreadSetup, dedup: bool = True, track_history: bool = True,
                      record: bool = True, on_state: Callable | None = None
                      ) -> ExploreResult:
    """Depth-first exploration of every schedule up to the step bounds.

    With ``dedup`` configurations are hashed (including the operation
    history when ``track_history``), so each distinct outcome is reported
    once with one representative trace.  Without ``dedup`` every maximal
    schedule is enumerated.  ``on_state(gstate, trace_fn)`` is called once
    per distinct global state; returning true stops the exploration.
    """
    t0 = time.perf_counter()
    specs = setup.all_threads
    nthreads = len(specs)
    bounds = tuple(setup.bound(t) for t in specs)
    nops = tuple(len(t.ops) for t in specs)
    G, T = _Interner(), _Interner()
    moves: dict = {}
    sym = setup.symmetric and not track_history and not setup.writers
    g0 = G((setup.init.gheap, setup.init.gghost))
    t_init = T(ThreadState())
    root = (g0, (t_init,) * nthreads, (0,) * nthreads, OpHistory())

    def done(tsid, i):
        return T.items[tsid].opi >= nops[i]

    def key(c):
        g, ths, steps = c[0], c[1], c[2]
        steps = tuple(0 if done(t, i) else n for i, (t, n) in enumerate(zip(ths, steps)))
        if sym:
            pairs = sorted(zip(ths, steps))
            k = (g, tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))
        else:
            k = (g, ths, steps)
        return k + (c[3],) if track_history else k

    parent: dict = {}
    outcomes, aborts = [], []
    transitions: dict = {}
    gseen: dict = {}
    bound_hits = 0
    count = 0
    edges = 0
    exhausted = False
    stop = False

    def trace_of(k):
        out = []
        while parent.get(k) is not None:
            k, step = parent[k]
            out.append(step)
        return tuple(reversed(out))

    def gstate(gid):
        g = G.items[gid]
        return State(g[0], g[1])

    visited = set()
    stack = [(root, ())]
    if dedup:
        parent[key(root)] = None
    while stack:
        cfg, tr = stack.pop()
        gid, ths, steps, hist = cfg
        count += 1
        if count > setup.max_states:
            exhausted = True
            break
        ck = key(cfg) if dedup else None
        if gid not in gseen:
            gseen[gid] = ck
            if on_state is not None and on_state(
                    gstate(gid), (lambda k=ck: trace_of(k)) if dedup else (lambda tr=tr: tr)):
                stop = True
                break
        kids = []
        any_move = False
        for i in range(nthreads):
            tsid = ths[i]
            if done(tsid, i) or steps[i] >= bounds[i]:
                continue
            mk = (gid, tsid, i)
            mv = moves.get(mk)
            if mv is None:
                mv = []
                for step, status, g2, ts2, evs in _thread_moves(setup, specs[i],
                                                                 G.items[gid], T.items[tsid]):
                    mv.append((step, status, None if g2 is None else G(g2),
                               None if ts2 is None else T(ts2), evs))
                moves[mk] = mv
            for step, status, g2, ts2, evs in mv:
                any_move = True
                if status == "abort":
                    aborts.append((trace_of(ck) if dedup else tr) + (step,))
                    continue
                edges += 1
                if g2 != gid:
                    transitions.setdefault(gid, set()).add(g2)
                h2 = hist
                if track_history:
                    for e in evs:
                        h2 = h2.add(e)
                nxt = (g2, ths[:i] + (ts2,) + ths[i + 1:],
                       steps[:i] + (steps[i] + 1,) + steps[i + 1:], h2)
                if dedup:
                    k = key(nxt)
                    if k in parent:
                        continue
                    parent[k] = (ck, step)
                    kids.append((nxt, ()))
                else:
                    kids.append((nxt, tr + (step,)))
        if not any_move:
            bounded = tuple(specs[i].tid for i in range(nthreads)
                            if not done(ths[i], i) and steps[i] >= bounds[i])
            blocked = tuple(specs[i].tid for i in range(nthreads)
                            if not done(ths[i], i) and steps[i] < bounds[i])
            bound_hits += bool(bounded)
            if record:
                trace = trace_of(ck) if dedup else tr
                outcomes.append(Outcome(gstate(gid), hist, trace, bounded, blocked))
            continue
        stack.extend(reversed(kids))
    trans = {gstate(a): {gstate(b) for b in bs} for a, bs in transitions.items()}
    return ExploreResult(outcomes, count, edges, trans,
                         [gstate(g) for g in gseen], aborts, bound_hits,
                         exhausted, time.perf_counter() - t0)


def replay(setup: ThreadSetup, trace) -> tuple[list, OpHistory]:
    """Re-execute ``trace`` through ``exec_command``.  Returns the global
    states visited and the operation history.  Raises ``ValueError`` if a
    step is not executable."""
    g = setup.init
    local: dict = {}
    states = [State(g.gheap, g.gghost)]
    h = OpHistory()
    for step in trace:
        prog = setup.program(*step.op)
        cmds = prog.positions()
        if step.tid not in local:
            h = h.add(Event("inv", step.tid, step.op[0], step.op[1]))
            v0 = _freeze_map({"me": step.tid}) if setup.ids_in_vars else ()
            local[step.tid] = (Program.INIT, v0, g.lghost)
        q, vars_, lg = local[step.tid]
        cur = State(g.gheap, g.gghost, Heap({}, g.gheap.denom), lg, vars_)
        for p in step.positions:
            if p not in prog.next_positions(q):
                raise ValueError(f"position {p} does not follow {q}")
            nxt = exec_command(cmds[p], cur)
            if len(nxt) != 1:
                raise ValueError(f"step {cmds[p]!r} is blocked or not deterministic")
            cur, q = nxt[0], p
            if cur is ABORT:
                raise ValueError("replay aborted")
        g = cur
        if prog.is_final(q):
            h = h.add(Event("res", step.tid, step.op[0], step.op[1], cur.var("res")))
            del local[step.tid]
        else:
            local[step.tid] = (q, cur.vars, cur.lghost)
        states.append(State(g.gheap, g.gghost))
    return states, h


# ---------------------------------------------------------------- Wing-Gong

@dataclass
class LinVerdict:
    linearizable: bool
    witness: tuple | None = None
    history: OpHistory | None = None
    orders: list = field(default_factory=list)    # [(order, reason)]
    complete: bool = True
    note: str = ""

    def as_dict(self):
        def fmt(o):
            return [f"T{tid}:{op}({','.join(map(str, a))})" for tid, op, a, *_ in o]
        return {
            "linearizable": self.linearizable,
            "history": repr(self.history) if self.history else None,
            "witness": fmt(self.witness) if self.witness else None,
            "orders": [{"order": fmt(o), "reason": r} for o, r in self.orders],
            "complete": self.complete,
            "note": self.note,
        }


def _prec(ops):
    return {j: {i for i, a in enumerate(ops) if a[4] is not None and a[4] < b[3]}
            for j, b in enumerate(ops)}


def _simulate(order, ops, spec: SeqSpec):
    A = spec.init
    for j in order:
        tid, op, args, _, res_i, result = ops[j]
        A2, v = spec.apply(A, op, args)
        if res_i is not None and v != result:
            return (f"{op}({','.join(map(str, args))}) returns {result} "
                    f"but the specification gives {v} in state {_fmt_abs(A)}")
        A = A2
    return None


def _fmt_abs(A):
    if isinstance(A, frozenset):
        return "{" + ",".join(map(str, sorted(A))) + "}"
    return str(A)


def wing_gong_check(h: OpHistory, spec: SeqSpec, max_orders: int = 20_000,
                    budget: int = 1_000_000) -> LinVerdict:
    """Search for a precedence-respecting order consistent with ``spec``.

    Pending operations may be linearized (with any result) or dropped.  On
    a violation every candidate order is listed with the reason it fails
    (up to ``max_orders``).
    """
    ops = h.operations()
    prec = _prec(ops)
    n = len(ops)
    complete = frozenset(i for i, o in enumerate(ops) if o[4] is not None)
    seen = set()
    work = [0]

    def search(done: frozenset, A, order):
        if complete <= done:
            return order
        key = (done, A)
        if key in seen:
            return None
        seen.add(key)
        work[0] += 1
        if work[0] > budget:
            raise ExplorationBudget("Wing-Gong search budget exhausted")
        for j in range(n):
            if j in done or not prec[j] <= done:
                continue
            tid, op, args, _, res_i, result = ops[j]
            A2, v = spec.apply(A, op, args)
            if res_i is not None and v != result:
                continue
            r = search(done | {j}, A2, order + (j,))
            if r is not None:
                return r
        return None

    found = search(frozenset(), spec.init, ())
    if found is not None:
        return LinVerdict(True, tuple(ops[j] for j in found), h)
    orders = []
    truncated = False
    pending = [i for i in range(n) if i not in complete]
    for r in range(len(pending) + 1):
        for sub in itertools.combinations(pending, r):
            chosen = sorted(complete | set(sub))
            for order in _linear_extensions(chosen, prec):
                if len(orders) >= max_orders:
                    truncated = True
                    break
                orders.append((tuple(ops[j] for j in order), _simulate(order, ops, spec)))
    note = "pending operations tried both completed and removed" if pending else ""
    return LinVerdict(False, None, h, orders, not truncated, note)


def _linear_extensions(items, prec):
    items = list(items)
    chosen = set(items)

    def go(done, rest):
        if not rest:
            yield ()
            return
        for j in rest:
            if (prec[j] & chosen) <= done:
                for tail in go(done | {j}, [x for x in rest if x != j]):
                    yield (j,) + tail
    yield from go(frozenset(), items)


# ---------------------------------------------------------------- presets

def lolist_menu(keys) -> tuple:
    return tuple((op, (k,)) for op in ("insert", "delete", "contains") for k in keys)


def lolist_setup(variant="fixed", threads=None, present=(), keys=st.DEFAULT_KEYS,
                 steps=8, pool=5, fault=None, max_states=2_000_000) -> ThreadSetup:
    u = st.LOUniverse(tuple(keys), pool, variant)
    if threads is None:
        threads = [ThreadSpec(i + 1, (("any",),)) for i in range(3)]
    return ThreadSetup("lolist", threads, st.lo_initial(present, u), variant, tuple(keys),
                       pool, fault, steps=steps, max_states=max_states,
                       menu=lolist_menu(keys), ids_in_vars=False)


def counter_setup(threads=None, l=0, r=0, steps=8) -> ThreadSetup:
    if threads is None:
        threads = [ThreadSpec(1, (("read", ()),)), ThreadSpec(2, (("inc", ()),)),
                   ThreadSpec(3, (("inc", ()),))]
    return ThreadSetup("counter", threads, st.counter_initial(l, r), steps=steps)


def rdcss_menu(values=(0, 1)) -> tuple:
    return tuple(("rdcss", a) for a in itertools.product(values, repeat=3))


def rdcss_setup(rdcss_args=None, gets=1, writes=(1,), steps=12, values=(0, 1),
                max_states=2_000_000) -> ThreadSetup:
    """Two rdcss threads (every argument triple when ``rdcss_args`` is
    None), ``gets`` getters and one writer of ``ell``."""
    if rdcss_args is None:
        threads = [ThreadSpec(i + 1, (("any",),)) for i in range(2)]
    else:
        threads = [ThreadSpec(i + 1, (("rdcss", a),)) for i, a in enumerate(rdcss_args)]
    threads += [ThreadSpec(len(threads) + 1 + i, (("get", ()),)) for i in range(gets)]
    writers = [ThreadSpec(len(threads) + 1, tuple(("write", (v,)) for v in writes))]
    return ThreadSetup("rdcss", threads, st.rdcss_initial(), writers=writers, steps=steps,
                       max_states=max_states, max_threads=max(3, len(threads)),
                       menu=rdcss_menu(values))


def bug_setup(bug: int, variant: str, key: int = 2) -> tuple[ThreadSetup, Callable]:
    """Canned mixes.  Returns the setup and a history filter for the shape
    of interest.

    Bug 1: T1 runs contains; insert; contains while T2 deletes, starting
    from a list holding ``key``.  Bug 2: T1 inserts while T2 runs contains
    twice on the empty list.
    """
    k = key
    if bug == 1:
        threads = [ThreadSpec(1, (("contains", (k,)), ("insert", (k,)), ("contains", (k,))),
                              steps=24),
                   ThreadSpec(2, (("delete", (k,)),), steps=10)]
        setup = lolist_setup(variant, threads, present=(k,), keys=(1, k, 3) if k == 2 else (k,),
                             steps=24)

        def shape(h: OpHistory) -> bool:
            ops = h.operations()
            t1 = [o for o in ops if o[0] == 1]
            dl = [o for o in ops if o[0] == 2]
            if len(t1) != 3 or any(o[4] is None for o in t1) or len(dl) != 1:
                return False
            if [o[5] for o in t1] != [True, True, False]:
                return False
            d = dl[0]
            return (d[4] is not None and d[5] is True and d[3] > t1[0][4]
                    and d[4] > t1[2][3] and d[3] < t1[1][4])
        return setup, shape
    if bug == 2:
        threads = [ThreadSpec(1, (("insert", (k,)),), steps=10),
                   ThreadSpec(2, (("contains", (k,)), ("contains", (k,))), steps=16)]
        setup = lolist_setup(variant, threads, present=(), keys=(1, k, 3) if k == 2 else (k,),
                             steps=16)

        def shape(h: OpHistory) -> bool:
            return True
        return setup, shape
    raise ValueError(f"unknown bug id {bug}")


@dataclass
class ViolationReport:
    found: bool
    verdict: LinVerdict | None
    trace: tuple
    histories: int
    checked: int
    states: int
    exhausted: bool
    seconds: float
    setup: ThreadSetup | None = None

    @property
    def status(self) -> str:
        if self.found:
            return "violation"
        return "budget" if self.exhausted else "clean"

    def as_dict(self):
        return {
            "status": self.status,
            "verdict": self.verdict.as_dict() if self.verdict else None,
            "trace": [f"T{s.tid} {s.op[0]}{s.op[1]}: {' '.join(s.labels)}" for s in self.trace],
            "histories": self.histories,
            "states": self.states,
            "seconds": round(self.seconds, 3),
        }


def find_violation(setup: ThreadSetup, shape: Callable | None = None,
                   minimize: bool = True) -> ViolationReport:
    """Explore ``setup`` and check every distinct history.  Returns the
    first non-linearizable history (matching ``shape`` when given)."""
    t0 = time.perf_counter()
    res = run_interleavings(setup, dedup=True, track_history=True)
    spec = setup.spec()
    verdicts: dict = {}
    checked = 0
    for o in res.outcomes:
        h = o.history
        if h in verdicts:
            continue
        checked += 1
        v = verdicts[h] = wing_gong_check(h, spec)
        if not v.linearizable and (shape is None or shape(h)):
            trace = o.trace
            if minimize:
                trace = minimize_trace(setup, trace, spec, shape)
                v = wing_gong_check(replay(setup, trace)[1], spec)
            return ViolationReport(True, v, trace, len(verdicts), checked, res.states,
                                   res.budget_exhausted, time.perf_counter() - t0, setup)
    return ViolationReport(False, None, (), len(verdicts), checked, res.states,
                           res.budget_exhausted, time.perf_counter() - t0, setup)


def minimize_trace(setup: ThreadSetup, trace, spec: SeqSpec, shape=None):
    """Heuristic shrinking: drop trailing steps of threads while the
    replayed prefix still yields a violating history of the same shape."""
    best = tuple(trace)
    results = _results_along(setup, best)
    if results is None:
        return best
    changed = True
    while changed:
        changed = False
        for i in range(len(best) - 1, -1, -1):
            cand = best[:i] + best[i + 1:]
            r = _results_along(setup, cand)
            if r is None:
                continue
            if shape is not None and not shape(r):
                continue
            if not wing_gong_check(r, spec).linearizable:
                best = cand
                changed = True
                break
    return best


def _results_along(setup: ThreadSetup, trace):
    """History of a trace, or None if it does not replay."""
    try:
        return replay(setup, trace)[1]
    except (ValueError, KeyError, TypeError):
        return None


# ---------------------------------------------------------------- invariants

@dataclass
class InvariantsRun:
    ok: bool
    states: int
    violations: list          # [(state, report, trace)]
    exhausted: bool
    seconds: float

    def as_dict(self):
        return {
            "ok": self.ok, "states": self.states, "exhausted": self.exhausted,
            "seconds": round(self.seconds, 3),
            "violations": [{"clauses": r.as_dict()["violations"],
                            "snapshot": st.dump_snapshot(s.gheap),
                            "trace": [f"T{x.tid} {x.op[0]}{x.op[1]}: {' '.join(x.labels)}"
                                      for x in tr]}
                           for s, r, tr in self.violations],
        }


def check_invariants_on_reachables(setup: ThreadSetup, first_only: bool = False,
                                   symmetric: bool = True) -> InvariantsRun:
    """Check the structural invariants on every reachable state.

    Identical threads are explored up to permutation; the witness trace
    of a violation comes from a second, unreduced run that stops at the
    first violating state.
    """
    t0 = time.perf_counter()
    bad = []

    def visit(s, trace_fn):
        r = st.check_structure_invariants(s.gheap, setup.keys)
        if not r.ok:
            bad.append((s, r, None))
            return first_only
        return False
    sym = symmetric and len({(t.ops, t.steps) for t in setup.threads}) == 1
    setup.symmetric = sym
    try:
        res = run_interleavings(setup, dedup=True, track_history=False, record=False,
                                on_state=visit)
    finally:
        setup.symmetric = False
    if bad:
        targets = {s for s, _, _ in bad}
        found = {}

        def witness(s, trace_fn):
            if s in targets and s not in found:
                found[s] = trace_fn()
            return len(found) == len(targets)
        run_interleavings(setup, dedup=True, track_history=False, record=False,
                          on_state=witness)
        bad = [(s, r, found.get(s, ())) for s, r, _ in bad]
    return InvariantsRun(not bad and not res.budget_exhausted, len(res.reachable), bad,
                         res.budget_exhausted, time.perf_counter() - t0)


def trace_count_closed_form(steps_per_thread) -> int:
    """Number of interleavings of deterministic threads: a multinomial."""
    total = sum(steps_per_thread)
    out = math.factorial(total)
    for s in steps_per_thread:
        out //= math.factorial(s)
    return out


# ---------------------------------------------------------------- hypotheses

def transition_system(res: ExploreResult):
    """Reachable global states and the explorer's global step relation,
    usable as the interference relation of hypothesis discharge."""
    from .logic import TransitionEnv
    states = list(res.reachable)
    succ = {s: sorted(res.transitions.get(s, ()), key=repr) for s in states}
    return states, TransitionEnv(succ)


def lolist_hypotheses(nodes, keys=st.DEFAULT_KEYS) -> list:
    """Hypotheses of the contains proof as ``(family, Hypothesis)``.

    pred-loop: hyp<inset(v) != 0><pred(v) = u><p & q>
    succ-loop: hyp<k in inset(v)><succ(v) = u & key(v) < k><p & q>
    key:       hyp<inset(v) != 0><key(v) = t><p & q>
    mark:      hyp<inset(v) != 0><mark(v)><p & q>
    """
    from .logic import Hypothesis
    from .preds import StatePred, sp_and

    def sp(name, fn):
        return StatePred(name, fn, cache=True)

    def ins(s):
        return st.compute_insets(s.gheap, keys).inset

    def flow(v):
        return sp(f"inset({v})!=0", lambda s: bool(ins(s).get(v)))

    def flow_k(v, k):
        return sp(f"{k} in inset({v})", lambda s: k in ins(s).get(v, ()))

    def field_is(v, f, x):
        return sp(f"{f}({v})={x}", lambda s: s.gheap.value((v, f)) == x)

    def succ_lt(v, u, k):
        return sp(f"succ({v})={u} & key({v})<{k}",
                  lambda s: s.gheap.value((v, "succ")) == u
                  and s.gheap.value((v, "key"), math.inf) < k)

    out = []
    for v in nodes:
        for u in nodes:
            p, q = flow(v), field_is(v, "pred", u)
            out.append(("pred-loop", Hypothesis(p, q, sp_and(p, q), name=f"pred-loop[{v},{u}]",
                                                env={"v": v, "u": u})))
            for k in keys:
                p, q = flow_k(v, k), succ_lt(v, u, k)
                out.append(("succ-loop", Hypothesis(p, q, sp_and(p, q),
                                                    name=f"succ-loop[{v},{u},{k}]",
                                                    env={"v": v, "u": u, "k": k})))
        for t in st.key_points(keys):
            p, q = flow(v), field_is(v, "key", t)
            out.append(("key", Hypothesis(p, q, sp_and(p, q), name=f"key[{v},{t}]",
                                          env={"v": v, "t": t})))
        p, q = flow(v), field_is(v, "mark", 1)
        out.append(("mark", Hypothesis(p, q, sp_and(p, q), name=f"mark[{v}]", env={"v": v})))
    return out


def rdcss_hypotheses(values=(0, 1), pool=st.DESCR_POOL, max_clock: int = 4) -> list:
    """Clock monotonicity, the active-descriptor contradiction and the
    unordered descriptor equality, as ``(family, Hypothesis)``."""
    from .logic import Hypothesis
    from .preds import StatePred, sp_and
    FALSE = StatePred("false", lambda s: False)

    def clock(s):
        return s.gghost.clock(st.CLOCK)

    def sp(name, fn):
        return StatePred(name, fn, cache=True)

    out = []
    for c in range(max_clock):
        for c2 in range(max_clock):
            out.append(("clock", Hypothesis(
                sp(f"Clock({c})", lambda s, c=c: clock(s) == c),
                sp(f"Clock({c2})", lambda s, c2=c2: clock(s) == c2),
                StatePred(f"{c2}>={c}", lambda s, c=c, c2=c2: c2 >= c),
                name=f"clock[{c},{c2}]", env={"c": c, "c2": c2})))
    for d in pool:
        for c in range(max_clock):
            p = sp(f"r=A({d}) * Clock({c})",
                   lambda s, d=d, c=c: s.gheap.value(st.ROOT) == st.Act(d)
                   and isinstance(s.gheap.value(st.ROOT), st.Act) and clock(s) == c)

            def get_rct(s, c=c):
                r = s.gghost.receipt(c)
                return r is not None and r[1][0] == "get" and clock(s) > c
            q = sp(f"snap-get-at({c}) * Clock>{c}", get_rct)
            out.append(("contradiction", Hypothesis(p, q, FALSE, name=f"contra[{d},{c}]",
                                                    env={"d": d, "c": c})))
    for d in pool:
        for d2 in pool:
            for c in range(max_clock):
                def act(dd, c=c):
                    return sp(f"r=A({dd}) * Clock({c})",
                              lambda s: isinstance(s.gheap.value(st.ROOT), st.Act)
                              and s.gheap.value(st.ROOT).d == dd and clock(s) == c)
                o = StatePred(f"{d}={d2}", lambda s, d=d, d2=d2: d == d2)
                out.append(("descriptor", Hypothesis(act(d), act(d2), o,
                                                     name=f"same-d[{d},{d2},{c}]",
                                                     env={"d": d, "d2": d2, "c": c})))
    return out


@dataclass
class HypothesisRun:
    results: list            # [(family, name, {mode: holds}, agree)]
    states: int
    seconds: float

    @property
    def ok(self) -> bool:
        return all(all(m.values()) and a for _, _, m, a in self.results)

    def as_dict(self):
        return {"ok": self.ok, "states": self.states, "seconds": round(self.seconds, 3),
                "hypotheses": [{"family": f, "name": n, "modes": m, "agree": a}
                               for f, n, m, a in self.results]}


def discharge_structure_hypotheses(hyps, states, env, modes=("invariant", "bounded"),
                                   depth: int = 6) -> HypothesisRun:
    """Discharge each hypothesis over the explorer's transition system.
    Invariant mode uses ``Now(q) -> WPast(p & q)``."""
    from .logic import discharge_bounded, discharge_invariant
    from .preds import Implies, Now, WPast
    t0 = time.perf_counter()
    out = []
    for fam, h in hyps:
        verdicts = {}
        if "invariant" in modes:
            inv = Implies(Now(h.q), WPast(h.o))
            verdicts["invariant"] = discharge_invariant(h, inv, env, states).holds
        if "bounded" in modes:
            verdicts["bounded"] = discharge_bounded(h, env, depth, states, states).holds
        agree = len(set(verdicts.values())) <= 1
        out.append((fam, h.name, verdicts, agree))
    return HypothesisRun(out, len(states), time.perf_counter() - t0)
