"""The while-language: primitive commands, programs, interferences, and
governed computations."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

from .preds import (TRUE_S, Hist, Now, StatePred, TempPred, nf, sp_or,
                    sp_star)
from .sepalg import (ABORT, Computation, Ghost, Heap, History, RCT, SNAP,
                     State, _freeze_map)


# ---------------------------------------------------------------- expressions

@dataclass(frozen=True)
class V:
    """A local variable reference."""
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class F:
    """Field address ``(obj, field)`` where ``obj`` is an expression."""
    obj: Any
    fld: str

    def __repr__(self):
        return f"{self.obj!r}.{self.fld}"


class Fn:
    """An arbitrary function of the local environment."""

    def __init__(self, fn: Callable[[dict], Any], text: str = "<fn>"):
        self.fn = fn
        self.text = text

    def __repr__(self):
        return self.text


def ev(e, s: State):
    if isinstance(e, V):
        return s.var(e.name)
    if isinstance(e, F):
        return (ev(e.obj, s), e.fld)
    if isinstance(e, Fn):
        return e.fn(s.env)
    return e


# ---------------------------------------------------------------- commands

_label_counter = itertools.count()


def fresh_label(prefix="c") -> str:
    return f"{prefix}{next(_label_counter)}"


@dataclass(frozen=True)
class GhostOp:
    """Ghost decoration applied atomically after the base effect.

    ``trade`` is ``(obligation, slot, receipt_tag)``; ``slot`` may be the
    string ``"clock:<root>"`` to index the receipt by the current clock.
    ``tag`` entries may be ``Fn`` evaluated in the post state.
    ``stamp`` records a persistent snapshot receipt at the current clock
    index of ``clock`` without consuming an obligation (helping).
    """
    trade: tuple | None = None
    clock: Any = None
    snapshot: bool = True
    stamp: Any = None


@dataclass(frozen=True, eq=False)
class Command:
    kind: str
    args: tuple = ()
    label: str = ""
    ghost: GhostOp | None = None
    local: bool = False

    def __post_init__(self):
        if not self.label:
            object.__setattr__(self, "label", fresh_label(self.kind))

    def __repr__(self):
        a = ", ".join(map(repr, self.args))
        return f"{self.label}:{self.kind}({a})"


def skip(label="") -> Command:
    return Command("skip", (), label, local=True)


def read(addr, var, label="") -> Command:
    return Command("read", (addr, var), label)


def write(addr, value, label="", ghost=None) -> Command:
    return Command("write", (addr, value), label, ghost)


def faa(addr, delta, var=None, label="", ghost=None) -> Command:
    return Command("faa", (addr, delta, var), label, ghost)


def cmpx(addr, expected, new, var=None, label="", ghost=None) -> Command:
    return Command("cmpx", (addr, expected, new, var), label, ghost)


def assume(cond, label="", local=None) -> Command:
    """``cond`` is a StatePred or a function of the local environment."""
    if local is None:
        local = not isinstance(cond, StatePred)
    return Command("assume", (cond,), label, local=local)


def assign(var, expr, label="") -> Command:
    return Command("assign", (var, expr), label, local=True)


def alloc(var, pool: Sequence, fields: dict | None = None, value=None, where="g",
          label="", pick="least") -> Command:
    """Allocate a free address of ``pool``: the smallest one, or with
    ``pick="any"`` every free one nondeterministically.

    With ``fields`` the address is a record and one cell ``(addr, f)`` is
    created per field; otherwise a single cell holding ``value``.
    """
    if pick not in ("least", "any"):
        raise ValueError(pick)
    fl = tuple(sorted((fields or {}).items()))
    return Command("alloc", (var, tuple(pool), fl, value, where, pick), label)


def lock(addr, label="", owner=1) -> Command:
    """Test-and-set; blocks while held.  ``owner`` is the value stored."""
    return Command("lock", (addr, owner), label)


def unlock(addr, label="") -> Command:
    return Command("unlock", (addr,), label)


def ghost_only(g: GhostOp, label="") -> Command:
    return Command("ghost", (), label, g)


def atomic(*cmds: Command, label="") -> Command:
    return Command("atomic", tuple(cmds), label)


@dataclass(frozen=True, eq=False)
class Guarded:
    """Self-interference ``atomic{assume(a * true); c}``."""
    guard: StatePred
    cmd: Command

    @property
    def label(self):
        return self.cmd.label

    def __repr__(self):
        return f"com({self.guard.name}, {self.cmd!r})"


# ---------------------------------------------------------------- transformers

def _locate(s: State, addr):
    """Return ('g'|'l'|'gl', fraction, value) for the combined heaps."""
    g = s.gheap.get(addr)
    l = s.lheap.get(addr)
    if g is None and l is None:
        return None
    if g is None:
        return ("l", l[0], l[1])
    if l is None:
        return ("g", g[0], g[1])
    return ("gl", g[0] + l[0], g[1])


def _store(s: State, addr, value):
    """Write ``value`` at ``addr``; requires full permission."""
    loc = _locate(s, addr)
    if loc is None or loc[1] != s.gheap.denom:
        return ABORT
    where = loc[0]
    gh, lh = s.gheap, s.lheap
    if "g" in where:
        gh = gh.set(addr, value, gh.frac(addr))
    if "l" in where:
        lh = lh.set(addr, value, lh.frac(addr))
    return State(gh, s.gghost, lh, s.lghost, s.vars)


def _setvar(s: State, var, value) -> State:
    if var is None:
        return s
    return s.with_vars(**{var: value})


def _apply_ghost(g: GhostOp, s: State, pre: State):
    if g is None or s is ABORT:
        return s
    gg, lg = s.gghost, s.lghost
    env = s.env
    if g.trade is not None:
        obl, slot, tag = g.trade
        obl = obl.fn(pre.env) if isinstance(obl, Fn) else obl
        tag = tag.fn(env) if isinstance(tag, Fn) else tag
        if obl not in lg.obligations:
            return ABORT
        if isinstance(slot, str) and slot.startswith("clock:"):
            root = slot[len("clock:"):]
            slot = gg.clock(root)
            if slot is None:
                return ABORT
        elif isinstance(slot, Fn):
            slot = slot.fn(pre.env)
        obls = list(lg.obligations)
        obls.remove(obl)
        rec = dict(lg.receipts)
        if slot in rec:
            return ABORT
        rec[slot] = (RCT, tag)
        lg = Ghost(tuple(obls), _freeze_map(rec), lg.clocks, lg.contents)
        if g.snapshot:
            grec = dict(gg.receipts)
            if slot in grec and grec[slot] != (SNAP, tag):
                return ABORT
            grec[slot] = (SNAP, tag)
            gg = Ghost(gg.obligations, _freeze_map(grec), gg.clocks, gg.contents)
    if g.stamp is not None:
        tag = g.stamp.fn(pre.env) if isinstance(g.stamp, Fn) else g.stamp
        slot = gg.clock(g.clock)
        if slot is None:
            return ABORT
        grec = dict(gg.receipts)
        if slot in grec:
            return ABORT
        grec[slot] = (SNAP, tag)
        gg = Ghost(gg.obligations, _freeze_map(grec), gg.clocks, gg.contents)
    if g.clock is not None:
        clocks = dict(gg.clocks)
        if g.clock not in clocks:
            return ABORT
        clocks[g.clock] += 1
        gg = Ghost(gg.obligations, gg.receipts, _freeze_map(clocks), gg.contents)
    return State(s.gheap, gg, s.lheap, lg, s.vars)


def _exec_base(c: Command, s: State) -> list:
    k = c.kind
    if k == "skip" or k == "ghost":
        return [s]
    if k == "assign":
        var, e = c.args
        return [_setvar(s, var, ev(e, s))]
    if k == "assume":
        cond = c.args[0]
        ok = cond(s) if isinstance(cond, StatePred) else cond(s.env)
        return [s] if ok else []
    if k == "read":
        addr, var = ev(c.args[0], s), c.args[1]
        loc = _locate(s, addr)
        if loc is None:
            return [ABORT]
        return [_setvar(s, var, loc[2])]
    if k == "write":
        addr = ev(c.args[0], s)
        return [_store(s, addr, ev(c.args[1], s))]
    if k == "faa":
        addr, delta, var = ev(c.args[0], s), ev(c.args[1], s), c.args[2]
        loc = _locate(s, addr)
        if loc is None:
            return [ABORT]
        t = _store(s, addr, loc[2] + delta)
        return [t if t is ABORT else _setvar(t, var, loc[2])]
    if k == "cmpx":
        addr = ev(c.args[0], s)
        exp, new, var = ev(c.args[1], s), ev(c.args[2], s), c.args[3]
        loc = _locate(s, addr)
        if loc is None:
            return [ABORT]
        if loc[2] == exp:
            t = _store(s, addr, new)
            return [t if t is ABORT else _setvar(t, var, loc[2])]
        return [_setvar(s, var, loc[2])]
    if k == "lock":
        addr = ev(c.args[0], s)
        loc = _locate(s, addr)
        if loc is None:
            return [ABORT]
        if loc[2]:
            return []
        owner = ev(c.args[1], s) if len(c.args) > 1 else 1
        return [_store(s, addr, owner)]
    if k == "unlock":
        addr = ev(c.args[0], s)
        loc = _locate(s, addr)
        if loc is None or not loc[2]:
            return [ABORT]
        return [_store(s, addr, 0)]
    if k == "alloc":
        var, pool, fields, value, where, pick = c.args
        used = set()
        for h in (s.gheap, s.lheap):
            for a in h:
                used.add(a[0] if fields and isinstance(a, tuple) else a)
        free = [a for a in pool if a not in used]
        if pick == "least":
            free = free[:1]
        out = []
        for cand in free:
            cells = {}
            if fields:
                for f, e in fields:
                    cells[(cand, f)] = ev(e, s)
            else:
                cells[cand] = ev(value, s)
            gh, lh = s.gheap, s.lheap
            for a, v in cells.items():
                if where == "g":
                    gh = gh.set(a, v)
                else:
                    lh = lh.set(a, v)
            out.append(_setvar(State(gh, s.gghost, lh, s.lghost, s.vars), var, cand))
        return out
    if k == "atomic":
        cur = [s]
        for sub in c.args:
            nxt = []
            for t in cur:
                if t is ABORT:
                    nxt.append(t)
                else:
                    nxt.extend(exec_command(sub, t))
            cur = nxt
        return cur
    raise ValueError(f"unknown command kind {k}")


def exec_command(c, s) -> list:
    """All successor states of ``s`` under ``c``; ``ABORT`` marks failure."""
    if s is ABORT:
        return [ABORT]
    if isinstance(c, Guarded):
        if not c.guard(s):
            return []
        return exec_command(c.cmd, s)
    out = _exec_base(c, s)
    if c.ghost is not None:
        out = [_apply_ghost(c.ghost, t, s) for t in out]
    return out


def exec_on_history(c, h: History) -> list[History]:
    label = c.label
    return [h.extend(t, label) for t in exec_command(c, h.last)]


def exec_on_computation(c, x: Computation) -> list[Computation]:
    return [x.extend(t) for t in exec_command(c, x.last)]


# ---------------------------------------------------------------- programs

class Program:
    """Regular program over labelled commands (Glushkov construction)."""

    INIT = -1

    def seq(self, other):
        return Seq(self, other)

    # -- automaton ------------------------------------------------------
    def _build(self):
        if getattr(self, "_auto", None) is not None:
            return self._auto
        positions: list = []
        follow: dict[int, set] = {}

        def walk(p):
            if isinstance(p, Com):
                i = len(positions)
                positions.append(p.cmd)
                follow[i] = set()
                return (False, {i}, {i})
            if isinstance(p, Seq):
                n1, f1, l1 = walk(p.a)
                n2, f2, l2 = walk(p.b)
                for x in l1:
                    follow[x] |= f2
                return (n1 and n2, f1 | (f2 if n1 else set()), l2 | (l1 if n2 else set()))
            if isinstance(p, Choice):
                res = [walk(b) for b in p.branches]
                if not res:
                    return (False, set(), set())
                return (any(r[0] for r in res), set().union(*[r[1] for r in res]),
                        set().union(*[r[2] for r in res]))
            if isinstance(p, Loop):
                n, f, l = walk(p.body)
                for x in l:
                    follow[x] |= f
                return (True, f, l)
            if isinstance(p, Skip):
                return (True, set(), set())
            raise TypeError(p)

        nullable, first, last = walk(self)
        self._auto = (positions, follow, nullable, frozenset(first), frozenset(last))
        return self._auto

    def positions(self) -> list:
        return self._build()[0]

    def nullable(self) -> bool:
        return self._build()[2]

    def next_positions(self, q: int) -> frozenset:
        positions, follow, _, first, _ = self._build()
        return first if q == self.INIT else frozenset(follow[q])

    def is_final(self, q: int) -> bool:
        _, _, nullable, _, last = self._build()
        return nullable if q == self.INIT else q in last

    def delta(self, qs: frozenset, label) -> frozenset:
        positions = self._build()[0]
        out = set()
        for q in qs:
            for y in self.next_positions(q):
                if positions[y].label == label:
                    out.add(y)
        return frozenset(out)

    def accepting(self, qs: frozenset) -> bool:
        return any(self.is_final(q) for q in qs)

    def accepts(self, word: Sequence) -> bool:
        qs = frozenset([self.INIT])
        for l in word:
            qs = self.delta(qs, l)
            if not qs:
                return False
        return self.accepting(qs)

    def commands(self) -> list:
        return list(self.positions())

    def labels(self) -> list:
        return [c.label for c in self.positions()]


@dataclass(eq=False)
class Com(Program):
    cmd: Any

    def __repr__(self):
        return repr(self.cmd)


@dataclass(eq=False)
class Seq(Program):
    a: Program
    b: Program

    def __repr__(self):
        return f"{self.a!r}; {self.b!r}"


@dataclass(eq=False)
class Choice(Program):
    branches: tuple

    def __repr__(self):
        return "(" + " + ".join(map(repr, self.branches)) + ")"


@dataclass(eq=False)
class Loop(Program):
    body: Program

    def __repr__(self):
        return f"({self.body!r})*"


@dataclass(eq=False)
class Skip(Program):
    """The empty program (matches only the empty word)."""

    def __repr__(self):
        return "eps"


def seq(*parts) -> Program:
    parts = [p if isinstance(p, Program) else Com(p) for p in parts]
    if not parts:
        return Skip()
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Seq(p, out)
    return out


def choice(*parts) -> Program:
    return Choice(tuple(p if isinstance(p, Program) else Com(p) for p in parts))


def loop(body) -> Program:
    return Loop(body if isinstance(body, Program) else Com(body))


# ---------------------------------------------------------------- interference

def now_projection(g) -> StatePred:
    """State-level projection of a guard; past and history atoms are taken
    as satisfied."""
    if isinstance(g, StatePred):
        return g
    n = nf(g)
    p = sp_or(*[c.now for c in n.clauses])
    return StatePred(p.name, p.fn, p.abort_absorbing, cache=True)


@dataclass(eq=False)
class Interference:
    guard: Any
    command: Command
    intuitionistic: bool = False

    def __post_init__(self):
        self._sp = now_projection(self.guard)
        self._starred = None

    @property
    def guard_state(self) -> StatePred:
        return self._sp

    @property
    def guard_star_true(self) -> StatePred:
        if self._starred is None:
            self._starred = self._sp if self.intuitionistic else sp_star(self._sp, TRUE_S)
        return self._starred

    def __repr__(self):
        return f"({self._sp.name}, {self.command!r})"


def local_parts(states: Iterable[State]) -> list:
    return list(dict.fromkeys((s.lheap, s.lghost, s.vars) for s in states if s is not ABORT))


def apply_interference(i: Interference, s: State, locals_: Sequence) -> list[State]:
    """Interference from another thread: only the global part changes."""
    out = []
    seen = set()
    for lh, lg, vs in locals_:
        s1 = State(s.gheap, s.gghost, lh, lg, vs)
        if not i.guard_state(s1):
            continue
        for t in exec_command(i.command, s1):
            if t is ABORT:
                continue
            key = (t.gheap, t.gghost)
            if key in seen:
                continue
            seen.add(key)
            out.append(State(t.gheap, t.gghost, s.lheap, s.lghost, s.vars))
    return out


def self_interference(a, c: Command, intuitionistic=False) -> Guarded:
    i = Interference(a, c, intuitionistic)
    return Guarded(i.guard_star_true, c)


def stmt_of(I: Sequence[Interference]) -> Program:
    if not I:
        return Loop(Skip())
    return Loop(Choice(tuple(Com(Guarded(i.guard_star_true, i.command)) for i in I)))


class IncompleteInterference(KeyError):
    pass


def enrich(S: Program, I: Sequence[Interference]) -> Program:
    by_label: dict[str, list] = {}
    for i in I:
        by_label.setdefault(i.command.label, []).append(i)

    def go(p):
        if isinstance(p, Com):
            lab = p.cmd.label
            if lab not in by_label:
                raise IncompleteInterference(f"no interference recorded for command {lab}")
            return Choice(tuple(Com(Guarded(i.guard_star_true, i.command)) for i in by_label[lab]))
        if isinstance(p, Seq):
            return Seq(go(p.a), go(p.b))
        if isinstance(p, Choice):
            return Choice(tuple(go(b) for b in p.branches))
        if isinstance(p, Loop):
            return Loop(go(p.body))
        return p
    return go(S)


def project(label) -> str:
    """Histories record guarded commands under their plain label."""
    return label


class InterferenceEnv:
    """Environment steps (interferences) plus self-interference steps."""

    def __init__(self, I: Sequence[Interference], locals_: Sequence, include_self=True):
        self.I = list(I)
        self.locals = list(locals_)
        self.include_self = include_self
        self._env: dict = {}
        self._self: dict = {}

    def env_steps(self, s: State):
        # the result only depends on the global part
        key = (s.gheap, s.gghost)
        glob = self._env.get(key)
        if glob is None:
            glob = []
            for i in self.I:
                for t in apply_interference(i, s, self.locals):
                    glob.append((t.gheap, t.gghost))
            glob = self._env[key] = list(dict.fromkeys(glob))
        for gh, gg in glob:
            yield State(gh, gg, s.lheap, s.lghost, s.vars), None

    def self_steps(self, s: State):
        if not self.include_self:
            return
        out = self._self.get(s)
        if out is None:
            out = []
            for i in self.I:
                if not i.guard_star_true(s):
                    continue
                for t in exec_command(i.command, s):
                    if t is not ABORT:
                        out.append((t, i.command.label))
            self._self[s] = out
        yield from out

    def steps(self, s: State):
        yield from self.env_steps(s)
        yield from self.self_steps(s)


def governed(I: Sequence[Interference], depth: int, init: Iterable[State],
             record_commands: bool = False, locals_: Sequence | None = None,
             budget: int = 1_000_000):
    """All governed computations (or histories) of at most ``depth`` states
    starting in ``init``."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    init = list(init)
    env = InterferenceEnv(I, locals_ if locals_ is not None else local_parts(init))
    count = 0
    stack = [History((s,), ()) for s in reversed(init)]
    while stack:
        h = stack.pop()
        count += 1
        if count > budget:
            from .preds import BudgetExceeded
            raise BudgetExceeded("governed enumeration budget exhausted")
        yield h if record_commands else Computation(h.states)
        if len(h) >= depth:
            continue
        succ = list(dict.fromkeys(env.steps(h.last)))
        for t, lab in reversed(succ):
            stack.append(h.extend(t, lab))
