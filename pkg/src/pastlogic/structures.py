"""Executable models of the case-study structures: the LO-list (logical
ordering layer of the LO-tree), RDCSS, and the two-cell counter.

Programs are plain ``lang`` programs; the explorer runs them thread by
thread.  LO-list nodes are records ``(id, field)`` with fields ``key``,
``mark``, ``lock``, ``pred``, ``succ`` and ``tree`` (tree-visible flag).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .lang import (Fn, GhostOp, V, F, alloc, assign, assume, atomic, choice, faa,
                   ghost_only, lock, loop, read, seq, unlock, write)
from .preds import StatePred
from .sepalg import Act, Descr, Ghost, Heap, Inact, State

NEG_INF = -math.inf
POS_INF = math.inf
MIN, MAX = 0, 1
FIELDS = ("key", "mark", "lock", "pred", "succ", "tree")
VARIANTS = ("original", "feldman", "fixed")
DEFAULT_KEYS = (1, 2, 3)


# ---------------------------------------------------------------- LO-list heap

@dataclass(frozen=True)
class LOUniverse:
    keys: tuple = DEFAULT_KEYS
    pool: int = 5
    variant: str = "fixed"

    @property
    def node_ids(self) -> tuple:
        return tuple(range(2 + self.pool))

    @property
    def alloc_pool(self) -> tuple:
        return tuple(range(2, 2 + self.pool))


def _node(cells, n, key, pred, succ, mark=0, tree=1):
    for f, v in zip(FIELDS, (key, mark, 0, pred, succ, tree)):
        cells[(n, f)] = v


def lo_initial(present=(), u: LOUniverse | None = None, denom: int = 1) -> State:
    """Sentinels min/max with the sorted ``present`` keys linked between."""
    u = u or LOUniverse()
    keys = sorted(present)
    if len(keys) > u.pool:
        raise ValueError("more preloaded keys than pool slots")
    order = [MIN] + [2 + i for i in range(len(keys))] + [MAX]
    key_of = {MIN: NEG_INF, MAX: POS_INF}
    key_of.update({2 + i: k for i, k in enumerate(keys)})
    cells = {}
    for i, n in enumerate(order):
        pred = order[i - 1] if i else MAX
        succ = order[i + 1] if i + 1 < len(order) else MIN
        _node(cells, n, key_of[n], pred, succ)
    return State(Heap.full(cells, denom))


def lo_nodes(h: Heap) -> list:
    return sorted({a[0] for a in h if isinstance(a, tuple) and a[1] == "key"})


def lo_snapshot(h: Heap) -> dict:
    """``{node: {field: value}}`` view of an LO-list heap."""
    out = {}
    for n in lo_nodes(h):
        out[n] = {f: h.value((n, f)) for f in FIELDS}
    return out


def dump_snapshot(h: Heap) -> str:
    lines = []
    for n, r in lo_snapshot(h).items():
        lines.append(f"{n}: key={r['key']} mark={r['mark']} lock={r['lock']} "
                     f"pred={r['pred']} succ={r['succ']} tree={r['tree']}")
    return "\n".join(lines)


# ---------------------------------------------------------------- insets

@dataclass(frozen=True)
class InsetMap:
    inset: dict
    keyset: dict
    contents: dict
    flow_preds: dict


def key_points(keys) -> tuple:
    return (NEG_INF,) + tuple(sorted(keys)) + (POS_INF,)


_inset_cache: dict = {}


def compute_insets(h: Heap, keys=DEFAULT_KEYS) -> InsetMap:
    """Least fixpoint of ``inset(y) = U_{succ(x)=y} inset(x) & (key(x), inf]``
    with ``inset(min)`` the full key range."""
    ck = (h, tuple(keys))
    hit = _inset_cache.get(ck)
    if hit is not None:
        return hit
    pts = key_points(keys)
    snap = lo_snapshot(h)
    ins = {n: frozenset() for n in snap}
    if MIN in ins:
        ins[MIN] = frozenset(pts)
    changed = True
    while changed:
        changed = False
        for x, r in snap.items():
            y = r["succ"]
            if y not in ins or y == MIN:
                continue
            flow = frozenset(k for k in ins[x] if k > r["key"])
            new = ins[y] | flow
            if new != ins[y]:
                ins[y] = new
                changed = True
    preds = {n: [] for n in snap}
    for x, r in snap.items():
        y = r["succ"]
        if y in preds and y != MIN and any(k > r["key"] for k in ins[x]):
            preds[y].append(x)
    keyset = {n: frozenset(k for k in ins[n] if k <= snap[n]["key"]) for n in snap}
    contents = {n: frozenset() if snap[n]["mark"] else frozenset({snap[n]["key"]})
                for n in snap}
    out = InsetMap(ins, keyset, contents, preds)
    if len(_inset_cache) > 200_000:
        _inset_cache.clear()
    _inset_cache[ck] = out
    return out


def logical_contents(h: Heap, keys=DEFAULT_KEYS) -> frozenset:
    """Keys ``k`` contained in the node whose keyset holds ``k``."""
    m = compute_insets(h, keys)
    out = set()
    for n, c in m.contents.items():
        out |= {k for k in c & m.keyset[n] if k not in (NEG_INF, POS_INF)}
    return frozenset(out)


@dataclass
class InvariantReport:
    ok: bool
    violations: list = field(default_factory=list)

    def as_dict(self):
        return {"ok": self.ok, "violations": [list(v) for v in self.violations]}


def check_structure_invariants(h: Heap, keys=DEFAULT_KEYS) -> InvariantReport:
    """Evaluate I1-I4, keyset disjointness, single flow predecessor and
    C within K.  Violations are ``(clause, node, detail)``."""
    snap = lo_snapshot(h)
    m = compute_insets(h, keys)
    bad = []
    for n, r in snap.items():
        if not m.contents[n] <= m.keyset[n]:
            bad.append(("I1", n, f"contents {set(m.contents[n])} not in keyset {set(m.keyset[n])}"))
        if n in (MIN, MAX) and r["mark"]:
            bad.append(("I2", n, "sentinel marked"))
        if not r["mark"] and not m.inset[n]:
            bad.append(("I3", n, "unmarked node with empty inset"))
        if not r["lock"] and not r["mark"]:
            z = r["succ"]
            if z in snap and snap[z]["mark"]:
                bad.append(("I4", n, f"unlocked unmarked node with marked successor {z}"))
        if len(m.flow_preds[n]) > 1:
            bad.append(("flow-path", n, f"flow from {m.flow_preds[n]}"))
    ns = list(snap)
    for i, a in enumerate(ns):
        for b in ns[i + 1:]:
            common = m.keyset[a] & m.keyset[b]
            if common:
                bad.append(("disjoint", (a, b), f"keysets share {sorted(common)}"))
    C = frozenset().union(*m.contents.values()) if snap else frozenset()
    K = frozenset().union(*m.keyset.values()) if snap else frozenset()
    if not C <= K:
        bad.append(("C<=K", None, f"{sorted(C - K)} outside keysets"))
    return InvariantReport(not bad, bad)


# ---------------------------------------------------------------- LO-list programs

def _pred(fn, name):
    return StatePred(name, fn)


def _visible(n):
    return _pred(lambda s, n=n: s.gheap.value((n, "tree")) == 1, f"tree({n})")


def _traverse(u: LOUniverse, tag: str):
    """Nondeterministic landing on any tree-visible node."""
    return choice(*[atomic(assume(_visible(n)), assign("y", n),
                           read(F(V("y"), "key"), "yk"), label=f"{tag}.trav{n}")
                    for n in u.node_ids])


def _fn(f, text):
    return Fn(f, text)


def contains_program(k, u: LOUniverse, fault=None):
    t = "contains"
    parts = [_traverse(u, t)]
    if u.variant == "fixed":
        parts += [
            read(F(V("y"), "mark"), "m", label=f"{t}.mark0"),
            loop(seq(assume(lambda e: e["m"], label=f"{t}.marked"),
                     atomic(read(F(V("y"), "pred"), "y"), read(F(V("y"), "key"), "yk"),
                            label=f"{t}.fixpred"),
                     read(F(V("y"), "mark"), "m", label=f"{t}.fixmark"))),
            assume(lambda e: not e["m"], label=f"{t}.unmarked"),
        ]
    parts += [
        loop(seq(assume(lambda e: k < e["yk"], label=f"{t}.lt"),
                 atomic(read(F(V("y"), "pred"), "y"), read(F(V("y"), "key"), "yk"),
                        label=f"{t}.pred"))),
        assume(lambda e: not k < e["yk"], label=f"{t}.ge"),
        loop(seq(assume(lambda e: e["yk"] < k, label=f"{t}.gt"),
                 atomic(read(F(V("y"), "succ"), "y"), read(F(V("y"), "key"), "yk"),
                        label=f"{t}.succ"))),
        assume(lambda e: not e["yk"] < k, label=f"{t}.le"),
        read(F(V("y"), "mark"), "m", label=f"{t}.check"),
        assign("res", _fn(lambda e: e["yk"] == k and not e["m"], "yk==k && !m"),
               label=f"{t}.ret"),
    ]
    return seq(*parts)


def _locate_attempt(k, u: LOUniverse, t: str):
    return seq(
        _traverse(u, t),
        choice(seq(assume(lambda e: e["yk"] < k, label=f"{t}.here"),
                   assign("x", V("y"), label=f"{t}.x=y"),
                   assign("xk", V("yk"), label=f"{t}.xk")),
               seq(assume(lambda e: not e["yk"] < k, label=f"{t}.back"),
                   atomic(read(F(V("y"), "pred"), "x"), read(F(V("x"), "key"), "xk"),
                          label=f"{t}.prev"))),
        atomic(lock(F(V("x"), "lock"), owner=1),
               read(F(V("x"), "succ"), "z"), read(F(V("z"), "key"), "zk"),
               read(F(V("x"), "mark"), "xm"), label=f"{t}.lock"),
    )


def _locate(k, u: LOUniverse, t: str):
    ok = lambda e: e["xk"] < k <= e["zk"] and not e["xm"]
    return seq(
        _locate_attempt(k, u, t),
        loop(seq(assume(lambda e: not ok(e), label=f"{t}.invalid"),
                 unlock(F(V("x"), "lock"), label=f"{t}.restart"),
                 _locate_attempt(k, u, t))),
        assume(ok, label=f"{t}.valid"),
    )


def insert_program(k, u: LOUniverse, fault=None):
    t = "insert"
    fields_ = lambda tree: {"key": k, "mark": 0, "lock": 0, "pred": V("x"),
                            "succ": V("z"), "tree": tree}
    nxt = lambda f: F(V("n"), f)
    if u.variant == "fixed":
        link = [atomic(alloc("n", u.alloc_pool, fields_(0)), write(F(V("x"), "succ"), V("n")),
                       label=f"{t}.linksucc"),
                write(F(V("z"), "pred"), V("n"), label=f"{t}.linkpred"),
                unlock(F(V("x"), "lock"), label=f"{t}.unlock"),
                write(nxt("tree"), 1, label=f"{t}.tree")]
    elif u.variant == "original":
        link = [atomic(alloc("n", u.alloc_pool, fields_(0)), write(F(V("z"), "pred"), V("n")),
                       label=f"{t}.linkpred"),
                write(F(V("x"), "succ"), V("n"), label=f"{t}.linksucc"),
                unlock(F(V("x"), "lock"), label=f"{t}.unlock"),
                write(nxt("tree"), 1, label=f"{t}.tree")]
    elif u.variant == "feldman":
        link = [alloc("n", u.alloc_pool, fields_(1), label=f"{t}.tree"),
                write(F(V("z"), "pred"), V("n"), label=f"{t}.linkpred"),
                write(F(V("x"), "succ"), V("n"), label=f"{t}.linksucc"),
                unlock(F(V("x"), "lock"), label=f"{t}.unlock")]
    else:
        raise ValueError(f"unknown variant {u.variant!r}")
    return seq(
        _locate(k, u, t),
        choice(seq(assume(lambda e: e["zk"] == k, label=f"{t}.present"),
                   unlock(F(V("x"), "lock"), label=f"{t}.unlock0"),
                   assign("res", False, label=f"{t}.ret")),
               seq(assume(lambda e: e["zk"] != k, label=f"{t}.absent"), *link,
                   assign("res", True, label=f"{t}.ret"))),
    )


def delete_program(k, u: LOUniverse, fault=None):
    """``fault="nomark"`` unlinks without marking first."""
    t = "delete"
    body = [atomic(lock(F(V("z"), "lock"), owner=1),
                   read(F(V("z"), "succ"), "w"), label=f"{t}.locky")]
    if fault != "nomark":
        body.append(write(F(V("z"), "mark"), 1, label=f"{t}.mark"))
    body += [write(F(V("w"), "pred"), V("x"), label=f"{t}.unlinkpred"),
             write(F(V("x"), "succ"), V("w"), label=f"{t}.unlinksucc"),
             atomic(unlock(F(V("z"), "lock")), unlock(F(V("x"), "lock")),
                    label=f"{t}.unlock"),
             write(F(V("z"), "tree"), 0, label=f"{t}.untree"),
             assign("res", True, label=f"{t}.ret")]
    return seq(
        _locate(k, u, t),
        choice(seq(assume(lambda e: e["zk"] != k, label=f"{t}.absent"),
                   unlock(F(V("x"), "lock"), label=f"{t}.unlock0"),
                   assign("res", False, label=f"{t}.ret")),
               seq(assume(lambda e: e["zk"] == k, label=f"{t}.present"), *body)),
    )


# ---------------------------------------------------------------- RDCSS

ROOT = "r"
ELL = "ell"
CLOCK = "r"
DESCR_POOL = ("d0", "d1")


@dataclass(frozen=True)
class RdcssUniverse:
    values: tuple = (0, 1)
    pool: tuple = DESCR_POOL
    r0: int = 0
    ell0: int = 0


def rdcss_initial(u: RdcssUniverse | None = None) -> State:
    u = u or RdcssUniverse()
    h = Heap.full({ROOT: Inact(u.r0), ELL: u.ell0}, 1)
    return State(h, Ghost.make(clocks={CLOCK: 0}))


def _is_act(v):
    return isinstance(v, Act)


def _is_inact(v):
    return isinstance(v, Inact)


def _complete(dvar: str, t: str):
    """Finish the operation of descriptor ``dvar``: read it and ``ell``,
    then swing the root from ``A(d)`` to ``I(n')``."""
    def newval(e):
        d = e["dsc"]
        return Inact(d.n2 if e["lm"] == d.m1 else d.n1)

    def stamp(e):
        d = e["dsc"]
        return ("rdcss", (d.n1, d.m1, d.n2), d.n1)
    return seq(
        atomic(read(V(dvar), "dsc"), read(ELL, "lm"), label=f"{t}.cread"),
        choice(
            atomic(read(ROOT, "cur"),
                   assume(lambda e: e["cur"] == Act(e[dvar]) and _is_act(e["cur"])),
                   write(ROOT, Fn(newval, "I(n')")),
                   ghost_only(GhostOp(clock=CLOCK, stamp=Fn(stamp, "rct"))),
                   label=f"{t}.cwin"),
            atomic(read(ROOT, "cur"),
                   assume(lambda e: not (_is_act(e["cur"]) and e["cur"].d == e[dvar])),
                   label=f"{t}.close")),
    )


def get_program(u: RdcssUniverse | None = None):
    t = "get"
    return seq(
        loop(seq(atomic(read(ROOT, "s"), assume(lambda e: _is_act(e["s"])),
                        assign("ad", Fn(lambda e: e["s"].d, "d")), label=f"{t}.active"),
                 _complete("ad", t))),
        atomic(read(ROOT, "s"), assume(lambda e: _is_inact(e["s"])),
               ghost_only(GhostOp(clock=CLOCK,
                                     stamp=Fn(lambda e: ("get", e["s"].n), "rct"))),
               label=f"{t}.read"),
        assign("res", Fn(lambda e: e["s"].n, "n"), label=f"{t}.ret"),
    )


def rdcss_program(n1, m1, n2, u: RdcssUniverse | None = None):
    """One descriptor per operation; it is only installed by this
    operation, so retries after helping reuse it."""
    u = u or RdcssUniverse()
    t = "rdcss"
    args = (n1, m1, n2)

    def attempt(first: bool):
        pre = [alloc("d", u.pool, value=Descr(ELL, n1, m1, n2))] if first else []
        sfx = "0" if first else ""
        win = seq(atomic(*pre, read(ROOT, "s"),
                         assume(lambda e: _is_inact(e["s"]) and e["s"].n == n1),
                         write(ROOT, Fn(lambda e: Act(e["d"]), "A(d)")),
                         label=f"{t}.install{sfx}"),
                  _complete("d", t),
                  assign("res", n1, label=f"{t}.ret"))
        fail = seq(atomic(*pre, read(ROOT, "s"),
                          assume(lambda e: _is_inact(e["s"]) and e["s"].n != n1),
                          ghost_only(GhostOp(clock=CLOCK, stamp=Fn(
                              lambda e: ("rdcss", args, e["s"].n), "rct"))),
                          label=f"{t}.fail{sfx}"),
                   assign("res", Fn(lambda e: e["s"].n, "n"), label=f"{t}.ret"))
        busy = seq(atomic(*pre, read(ROOT, "s"), assume(lambda e: _is_act(e["s"])),
                          assign("ad", Fn(lambda e: e["s"].d, "d")),
                          label=f"{t}.busy{sfx}"),
                   _complete("ad", t))
        return win, fail, busy

    w0, f0, b0 = attempt(True)
    w1, f1, b1 = attempt(False)
    return choice(w0, f0, seq(b0, loop(b1), choice(w1, f1)))


def ell_write_program(v, u: RdcssUniverse | None = None):
    return seq(write(ELL, v, label="write.ell"), assign("res", None, label="write.ret"))


# ---------------------------------------------------------------- counter

def counter_initial(l=0, r=0) -> State:
    return State(Heap.full({"l": l, "r": r}, 1))


def counter_read_program():
    return seq(read("l", "x", label="read.l"), read("r", "y", label="read.r"),
               assign("res", Fn(lambda e: e["x"] + e["y"], "x+y"), label="read.ret"))


def counter_inc_program(side=None):
    branches = []
    if side in (None, "l"):
        branches.append(faa("l", 1, label="inc.l"))
    if side in (None, "r"):
        branches.append(faa("r", 1, label="inc.r"))
    return seq(choice(*branches), assign("res", None, label="inc.ret"))


# ---------------------------------------------------------------- dispatch

STRUCTURES = ("counter", "lolist", "rdcss")


def program_for(op: str, args=(), variant: str = "fixed", structure: str | None = None,
                keys=DEFAULT_KEYS, pool: int = 5, fault=None):
    """Program of operation ``op`` (with ``args``) of the given variant."""
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    args = tuple(args)
    if op in ("insert", "delete", "contains"):
        u = LOUniverse(tuple(keys), pool, variant)
        return {"insert": insert_program, "delete": delete_program,
                "contains": contains_program}[op](args[0], u, fault)
    if op == "rdcss":
        return rdcss_program(*args)
    if op == "get":
        return get_program()
    if op == "write":
        return ell_write_program(*args)
    if op == "read":
        return counter_read_program()
    if op == "inc":
        return counter_inc_program(*args)
    raise ValueError(f"unknown operation {op!r}")


# ---------------------------------------------------------------- sequential specs

def sequential_apply(spec, abstract, op: str, args=()):
    """Reference sequential semantics; returns ``(abstract', result)``.

    ``spec`` is ``"set"``, ``"counter"`` or ``"rdcss"`` (or an object with a
    ``kind`` attribute naming one).  RDCSS abstract values are ``(n, m)``
    with ``m`` the value of ``ell``.
    """
    kind = getattr(spec, "kind", spec)
    args = tuple(args)
    if kind == "set":
        C = frozenset(abstract)
        k = args[0]
        if op == "insert":
            return (C | {k}, k not in C)
        if op == "delete":
            return (C - {k}, k in C)
        if op == "contains":
            return (C, k in C)
    elif kind == "counter":
        if op == "inc":
            return (abstract + 1, None)
        if op == "read":
            return (abstract, abstract)
    elif kind == "rdcss":
        n, m = abstract
        if op == "rdcss":
            n1, m1, n2 = args
            return ((n2 if (m == m1 and n == n1) else n, m), n)
        if op == "get":
            return ((n, m), n)
        if op == "write":
            return ((n, args[0]), None)
    raise ValueError(f"operation {op!r} not in spec {kind!r}")


def abstract_of(structure: str, s: State, keys=DEFAULT_KEYS):
    """Abstract value of a concrete state (the CSS map)."""
    h = s.gheap
    if structure == "lolist":
        return logical_contents(h, keys)
    if structure == "counter":
        return h.value("l") + h.value("r")
    if structure == "rdcss":
        v = h.value(ROOT)
        return (v.n if _is_inact(v) else None, h.value(ELL))
    raise ValueError(structure)
