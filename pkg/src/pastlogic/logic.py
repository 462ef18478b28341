"""Proof-outline checking with temporal interpolation, interference freedom,
hypothesis discharge, and a bounded soundness cross-check."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

from .lang import (Choice, Com, Command, Guarded, Interference, InterferenceEnv,
                   Loop, Program, Skip, apply_interference, enrich, exec_command,
                   local_parts, seq, skip)
from .preds import (FF, TT, And, BudgetExceeded, Exists, Hist, InclusionReport,
                    Not, Now, Or, Past, StatePred, Star, TempPred, WPast,
                    image_includes, includes, is_frameable, is_intuitionistic)
from .sepalg import ABORT, Computation, History


class OutlineError(Exception):
    def __init__(self, point: str, rule: str, report: InclusionReport | None = None, msg=""):
        self.point = point
        self.rule = rule
        self.report = report
        detail = msg or (report.describe() if report is not None else "")
        super().__init__(f"{rule} failed at {point}: {detail}")


# ---------------------------------------------------------------- hypotheses

@dataclass(eq=False)
class Hypothesis:
    """``hyp<p><q><o>``, or ``prog-hyp<p>[S]<q><o>`` when ``program`` is set."""
    p: StatePred
    q: StatePred
    o: StatePred
    program: Program | None = None
    name: str = ""
    env: dict = field(default_factory=dict)

    def key(self):
        return (self.p.name, self.q.name, self.o.name,
                None if self.program is None else repr(self.program))

    def __repr__(self):
        if self.program is not None:
            return f"prog-hyp<{self.p.name}>[{self.program!r}]<{self.q.name}><{self.o.name}>"
        return f"hyp<{self.p.name}><{self.q.name}><{self.o.name}>"


@dataclass
class DischargeCertificate:
    hypothesis: Hypothesis
    mode: str
    holds: bool
    bound: Any = None
    invariant: TempPred | None = None
    checks: dict = field(default_factory=dict)
    witness: Any = None
    explored: int = 0
    seconds: float = 0.0

    def __bool__(self):
        return self.holds


# ---------------------------------------------------------------- outlines

@dataclass(eq=False)
class TI:
    """Temporal-interpolation annotation.

    ``inst(env)`` returns ``(a, p, q, o)`` for one valuation of ``names``;
    ``a`` is a temporal predicate, ``p, q, o`` state predicates.  With
    ``fused`` the rule is applied to the preceding command and concludes the
    weak past of ``o``; otherwise it is consumed at a skip and concludes the
    strict past.
    """
    names: tuple
    domains: tuple
    inst: Callable
    variant: str = "ordered"
    program: Program | None = None
    fused: bool = False
    label: str = "ti"

    def instances(self):
        import itertools
        for vals in itertools.product(*self.domains):
            env = dict(zip(self.names, vals))
            yield env, self.inst(env)


@dataclass(eq=False)
class Step:
    """A command step ``{cur} cmd {post}``; ``via`` lists intermediate
    assertions linked by consequence; ``ti`` fuses temporal interpolation."""
    cmd: Command
    post: TempPred
    via: tuple = ()
    ti: TI | None = None
    name: str = ""


@dataclass(eq=False)
class Conseq:
    post: TempPred
    name: str = ""


@dataclass(eq=False)
class TIStep:
    ti: TI
    post: TempPred
    name: str = ""
    cmd: Command | None = None


@dataclass(eq=False)
class OChoice:
    branches: tuple
    post: TempPred
    name: str = ""


@dataclass(eq=False)
class OLoop:
    body: "Outline"
    name: str = ""


@dataclass(eq=False)
class OFrame:
    frame: TempPred
    inner: "Outline"
    name: str = ""


@dataclass(eq=False)
class Outline:
    pre: TempPred
    items: list
    name: str = "outline"

    @property
    def post(self) -> TempPred:
        cur = self.pre
        for it in self.items:
            cur = _item_post(it, cur)
        return cur

    def program(self) -> Program:
        parts = []
        for it in self.items:
            if isinstance(it, Step):
                parts.append(Com(it.cmd))
            elif isinstance(it, TIStep):
                if it.cmd is None:
                    it.cmd = skip(label=f"{it.ti.label}_skip")
                parts.append(Com(it.cmd))
            elif isinstance(it, OChoice):
                parts.append(Choice(tuple(b.program() for b in it.branches)))
            elif isinstance(it, OLoop):
                parts.append(Loop(it.body.program()))
            elif isinstance(it, OFrame):
                parts.append(it.inner.program())
        return seq(*parts) if parts else Skip()


def _item_post(it, cur):
    if isinstance(it, (Step, Conseq, TIStep, OChoice)):
        return it.post
    if isinstance(it, OLoop):
        return cur
    if isinstance(it, OFrame):
        return Star(it.inner.post, it.frame)
    raise TypeError(it)


@dataclass
class Judgment:
    pre: TempPred
    program: Program
    post: TempPred
    P: list = field(default_factory=list)
    I: list = field(default_factory=list)
    H: list = field(default_factory=list)
    log: list = field(default_factory=list)
    bound: Any = None
    name: str = ""

    def add_hyp(self, h: Hypothesis):
        keys = {x.key() for x in self.H}
        if h.key() not in keys:
            self.H.append(h)


class Checker:
    """Checks outlines over a finite universe of states."""

    def __init__(self, states: Sequence, bound: int | None = None, labels: Sequence = (),
                 frames: Sequence | None = None, locals_: Sequence | None = None):
        self.states = list(states)
        self.bound = bound
        self.labels = tuple(labels)
        self.frames = list(frames) if frames is not None else self.states
        self.locals = locals_ if locals_ is not None else local_parts(self.states)
        self._intu: dict[int, bool] = {}

    # -- helpers ---------------------------------------------------------
    def _incl(self, a, b):
        return includes(a, b, self.states, self.bound, self.labels)

    def _img(self, a, cmd, b):
        return image_includes(a, lambda s: exec_command(cmd, s), b, self.states, self.bound,
                              self.labels, label=cmd.label)

    def intuitionistic(self, p: StatePred) -> bool:
        r = self._intu.get(id(p))
        if r is None:
            r = self._intu[id(p)] = is_intuitionistic(p, self.frames)
        return r

    # -- temporal interpolation ------------------------------------------
    def ti_premise(self, ti: TI):
        names = ti.names

        def pre(env):
            a, p, q, o = ti.inst(env)
            if ti.variant == "ordered":
                return And(a, And(WPast(p), Now(q)))
            if ti.variant == "unordered":
                return And(a, And(WPast(p), WPast(q)))
            if ti.variant == "cf":
                if ti.program is None:
                    raise OutlineError(ti.label, "temporal-interpolation-cf", msg="missing program")
                return And(a, And(Hist(p, ti.program), Now(q)))
            raise ValueError(ti.variant)

        def post(env):
            a, p, q, o = ti.inst(env)
            return And(a, WPast(o) if ti.fused else Past(o))

        return (Exists(names, ti.domains, pre, f"ti-pre[{ti.label}]"),
                Exists(names, ti.domains, post, f"ti-post[{ti.label}]"))

    def ti_hypotheses(self, ti: TI) -> list[Hypothesis]:
        hs = []
        for env, (a, p, q, o) in ti.instances():
            for x, role in ((p, "p"), (q, "q")):
                if not self.intuitionistic(x):
                    raise OutlineError(ti.label, "temporal-interpolation",
                                       msg=f"{role} = {x.name} is not intuitionistic")
            tag = ",".join(f"{k}={v}" for k, v in env.items())
            if ti.variant == "cf":
                hs.append(Hypothesis(p, q, o, ti.program, f"{ti.label}[{tag}]", env))
            else:
                hs.append(Hypothesis(p, q, o, None, f"{ti.label}[{tag}]", env))
                if ti.variant == "unordered":
                    hs.append(Hypothesis(q, p, o, None, f"{ti.label}'[{tag}]", env))
        return hs

    # -- outline walk ------------------------------------------------------
    def check(self, outline: Outline) -> Judgment:
        j = Judgment(outline.pre, outline.program(), outline.post, bound=self.bound,
                     name=outline.name)
        j.P.append(outline.pre)
        self._walk(outline, outline.pre, j, outline.name)
        j.P.append(j.post)
        return j

    def _walk(self, outline: Outline, cur, j: Judgment, path: str):
        for idx, it in enumerate(outline.items):
            point = f"{path}#{idx}" + (f"({it.name})" if getattr(it, "name", "") else "")
            if isinstance(it, Step):
                target = it.via[0] if it.via else it.post
                if it.ti is not None:
                    tpre, tpost = self.ti_premise(it.ti)
                    target = it.via[0] if it.via else tpre
                r = self._img(cur, it.cmd, target)
                if not r.holds:
                    raise OutlineError(point, "com-ti", r)
                chain = list(it.via)
                if it.ti is not None:
                    chain.append(tpre)
                    prev = chain[0]
                    for nxt in chain[1:]:
                        r = self._incl(prev, nxt)
                        if not r.holds:
                            raise OutlineError(point, "consequence-ti", r)
                        prev = nxt
                    for h in self.ti_hypotheses(it.ti):
                        j.add_hyp(h)
                    r = self._incl(tpost, it.post)
                    if not r.holds:
                        raise OutlineError(point, "temporal-interpolation", r)
                    j.log.append((point, "com-ti+temporal-interpolation"))
                else:
                    chain.append(it.post)
                    prev = chain[0]
                    for nxt in chain[1:]:
                        r = self._incl(prev, nxt)
                        if not r.holds:
                            raise OutlineError(point, "consequence-ti", r)
                        prev = nxt
                    j.log.append((point, "com-ti"))
                j.I.append(Interference(cur, it.cmd))
                j.P.append(it.post)
                cur = it.post
            elif isinstance(it, Conseq):
                r = self._incl(cur, it.post)
                if not r.holds:
                    raise OutlineError(point, "consequence-ti", r)
                j.log.append((point, "consequence-ti"))
                cur = it.post
            elif isinstance(it, TIStep):
                tpre, tpost = self.ti_premise(it.ti)
                r = self._incl(cur, tpre)
                if not r.holds:
                    raise OutlineError(point, "temporal-interpolation", r,
                                       msg="premise not implied: " + r.describe())
                for h in self.ti_hypotheses(it.ti):
                    j.add_hyp(h)
                if it.cmd is None:
                    it.cmd = skip(label=f"{it.ti.label}_skip")
                r = self._img(tpre, it.cmd, tpost)
                if not r.holds:
                    raise OutlineError(point, "temporal-interpolation", r)
                r = self._incl(tpost, it.post)
                if not r.holds:
                    raise OutlineError(point, "consequence-ti", r)
                j.I.append(Interference(cur, it.cmd))
                j.P.append(it.post)
                j.log.append((point, f"temporal-interpolation-{it.ti.variant}"))
                cur = it.post
            elif isinstance(it, OChoice):
                for bi, br in enumerate(it.branches):
                    r = self._incl(cur, br.pre)
                    if not r.holds:
                        raise OutlineError(f"{point}.{bi}", "choice-ti", r)
                    self._walk(br, br.pre, j, f"{point}.{bi}")
                    r = self._incl(br.post, it.post)
                    if not r.holds:
                        raise OutlineError(f"{point}.{bi}", "choice-ti", r)
                j.log.append((point, "choice-ti"))
                cur = it.post
            elif isinstance(it, OLoop):
                r = self._incl(cur, it.body.pre)
                if not r.holds:
                    raise OutlineError(point, "loop-ti", r)
                self._walk(it.body, it.body.pre, j, f"{point}.body")
                r = self._incl(it.body.post, it.body.pre)
                if not r.holds:
                    raise OutlineError(point, "loop-ti", r, msg="body does not restore invariant: "
                                       + r.describe())
                j.P.append(it.body.pre)
                j.log.append((point, "loop-ti"))
                cur = it.body.pre
            elif isinstance(it, OFrame):
                if not is_frameable(it.frame, self.states, self.bound or 3):
                    raise OutlineError(point, "frame-ti", msg="frame is not frameable")
                inner = Checker(self.states, self.bound, self.labels, self.frames, self.locals)
                sub = inner.check(it.inner)
                for a in sub.P:
                    j.P.append(Star(a, it.frame))
                for i in sub.I:
                    j.I.append(Interference(Star(i.guard, it.frame) if isinstance(i.guard, TempPred)
                                            else i.guard, i.command))
                for h in sub.H:
                    j.add_hyp(h)
                r = self._incl(cur, Star(it.inner.pre, it.frame))
                if not r.holds:
                    raise OutlineError(point, "frame-ti", r)
                j.log.append((point, "frame-ti"))
                cur = Star(it.inner.post, it.frame)
            else:
                raise TypeError(it)
        return cur

    # -- interference freedom ---------------------------------------------
    def interference_freedom(self, P: Sequence[TempPred], I: Sequence[Interference]) -> list:
        out = []
        envs = [(i, InterferenceEnv([i], self.locals, include_self=False)) for i in I]
        for a in P:
            for i, env in envs:
                r = image_includes(a, lambda s, env=env: [t for t, _ in env.env_steps(s)], a,
                                   self.states, self.bound, self.labels)
                out.append((a, i, r))
        return out


def check_outline(outline: Outline, states: Sequence, bound: int | None = None,
                  labels: Sequence = (), frames=None) -> Judgment:
    return Checker(states, bound, labels, frames).check(outline)


def apply_temporal_interpolation(a: TempPred, p: StatePred, q: StatePred, o: StatePred,
                                 variant: str = "ordered", S: Program | None = None,
                                 frames: Sequence = ()) -> tuple[TempPred, list]:
    """Conclusion and hypotheses of one temporal-interpolation step."""
    for x in (p, q):
        if frames and not is_intuitionistic(x, frames):
            raise OutlineError("ti", "temporal-interpolation", msg=f"{x.name} not intuitionistic")
    if variant == "cf" and S is None:
        raise OutlineError("ti", "temporal-interpolation-cf", msg="missing program")
    if variant == "ordered":
        hs = [Hypothesis(p, q, o)]
    elif variant == "unordered":
        hs = [Hypothesis(p, q, o), Hypothesis(q, p, o)]
    elif variant == "cf":
        hs = [Hypothesis(p, q, o, S)]
    else:
        raise ValueError(variant)
    return And(a, Past(o)), hs


def check_interference_freedom(P: Sequence[TempPred], I: Sequence[Interference],
                               states: Sequence, bound: int | None = None,
                               locals_: Sequence | None = None) -> list:
    return Checker(states, bound, locals_=locals_).interference_freedom(P, I)


# ---------------------------------------------------------------- environments

class TransitionEnv:
    """Environment given by an explicit global transition relation."""

    def __init__(self, succ: dict):
        self.succ = succ

    def env_steps(self, s):
        for t in self.succ.get(s, ()):
            yield t, None

    def self_steps(self, s):
        return iter(())

    def steps(self, s):
        return self.env_steps(s)


def _as_env(I, states, locals_=None):
    if isinstance(I, (InterferenceEnv, TransitionEnv)):
        return I
    return InterferenceEnv(list(I), local_parts(states) if locals_ is None else locals_)


# ---------------------------------------------------------------- discharge

def discharge_invariant(h: Hypothesis, inv: TempPred, I, states: Sequence,
                        bound: int | None = None, locals_: Sequence | None = None
                        ) -> DischargeCertificate:
    """Check that ``inv`` is an inductive invariant for ``I`` proving ``h``."""
    t0 = time.perf_counter()
    env = _as_env(I, states, locals_)
    checks = {}
    checks["pre"] = includes(Now(h.p), inv, states, bound)
    checks["post"] = includes(And(inv, Now(h.q)), WPast(h.o), states, bound)
    checks["ifree"] = image_includes(inv, lambda s: [t for t, _ in env.env_steps(s)], inv,
                                     states, bound)
    if isinstance(env, InterferenceEnv) and env.include_self:
        ok = InclusionReport(True, None, bound)
        for i in env.I:
            g = i.guard_star_true
            r = image_includes(inv, lambda s, i=i, g=g: exec_command(i.command, s) if g(s) else [],
                               inv, states, bound, abort_ok=True)
            if not r.holds:
                ok = r
                break
        checks["self"] = ok
    else:
        checks["self"] = InclusionReport(True, None, bound, note="no self-interference steps")
    holds = all(r.holds for r in checks.values())
    wit = next((r.witness for r in checks.values() if not r.holds), None)
    return DischargeCertificate(h, "invariant", holds, bound, inv, checks, wit,
                                sum(r.checked for r in checks.values()),
                                time.perf_counter() - t0)


def discharge_bounded(h: Hypothesis, I, depth: int, init: Iterable,
                      states: Sequence | None = None, budget: int = 5_000_000,
                      locals_: Sequence | None = None) -> DischargeCertificate:
    """Explore every governed computation from ``Now(p)`` states up to
    ``depth`` states and check ``Now(q) -> WPast(o)`` along the way.

    For a program hypothesis the thread runs ``enrich(S, I)`` and the check
    applies where the run of ``S`` is complete.
    """
    if depth < 2:
        raise ValueError("depth must be at least 2")
    t0 = time.perf_counter()
    init = list(init)
    env = _as_env(I, states if states is not None else init, locals_)
    prog = None
    if h.program is not None:
        prog = enrich(h.program, env.I)
    starts = [s for s in init if h.p(s)]
    seen = set()
    explored = 0
    for s0 in starts:
        ctrl0 = Program.INIT if prog is not None else None
        stack = [(s0, ctrl0, False, 1, (s0,))]
        while stack:
            s, ctrl, seen_o, n, path = stack.pop()
            key = (s, ctrl, seen_o, depth - n)
            if key in seen:
                continue
            seen.add(key)
            explored += 1
            if explored > budget:
                raise BudgetExceeded("bounded discharge budget exhausted")
            final = prog is None or prog.is_final(ctrl)
            if final and h.q(s) and not (seen_o or h.o(s)):
                return DischargeCertificate(h, "bounded", False, depth, witness=Computation(path),
                                            explored=explored, seconds=time.perf_counter() - t0)
            if n >= depth:
                continue
            nseen = seen_o or h.o(s)
            for t, _ in env.env_steps(s):
                stack.append((t, ctrl, nseen, n + 1, path + (t,)))
            if prog is None:
                for t, _ in env.self_steps(s):
                    stack.append((t, ctrl, nseen, n + 1, path + (t,)))
            else:
                positions = prog.positions()
                for y in prog.next_positions(ctrl):
                    for t in exec_command(positions[y], s):
                        if t is not ABORT:
                            stack.append((t, y, nseen, n + 1, path + (t,)))
    return DischargeCertificate(h, "bounded", True, depth, explored=explored,
                                seconds=time.perf_counter() - t0)


# ---------------------------------------------------------------- soundness

@dataclass
class SoundnessReport:
    certified: bool
    reason: str = ""
    checked: int = 0
    witness: Any = None
    depth: int = 0

    def __bool__(self):
        return self.certified


def certify_soundness(j: Judgment, certificates: dict, init: Iterable, depth: int,
                      states: Sequence | None = None, prefix: int = 1,
                      budget: int = 2_000_000, I: Sequence | None = None,
                      locals_: Sequence | None = None) -> SoundnessReport:
    """Bounded semantic check of the triple strengthened by the governed
    computations.

    ``certificates`` maps hypothesis keys to discharge certificates; any
    hypothesis without a passing certificate makes certification refuse.
    ``I`` defaults to the judgment's own interferences; pass the interferences
    of the whole proof when other outlines run concurrently.  Starting from
    governed prefixes of at most ``prefix`` states that satisfy
    the precondition, the thread runs the judgment's program under the
    collected interferences; every terminated run must satisfy the post.
    """
    for h in j.H:
        c = certificates.get(h.key())
        if c is None:
            return SoundnessReport(False, f"undischarged hypothesis {h!r}")
        if not c.holds:
            return SoundnessReport(False, f"hypothesis {h!r} failed in {c.mode} mode")
    init = list(init)
    I = list(j.I if I is None else I)
    if locals_ is None:
        locals_ = local_parts(states if states is not None else init)
    env = InterferenceEnv(I, locals_, include_self=True)
    thread_env = InterferenceEnv(I, env.locals, include_self=False)
    prog = j.program
    positions = prog.positions()
    # governed prefixes satisfying the precondition
    starts = []
    frontier = [History((s,), ()) for s in init]
    for k in range(prefix):
        nxt = []
        for hst in frontier:
            if j.pre.member(hst):
                starts.append(hst)
            if k + 1 < prefix:
                for t, lab in env.steps(hst.last):
                    nxt.append(hst.extend(t, lab))
        frontier = nxt
    checked = 0
    for h0 in starts:
        stack = [(h0, Program.INIT)]
        while stack:
            hst, ctrl = stack.pop()
            checked += 1
            if checked > budget:
                raise BudgetExceeded("soundness budget exhausted")
            if prog.is_final(ctrl) and not j.post.member(hst):
                return SoundnessReport(False, "post violated", checked, hst, depth)
            if len(hst) >= depth:
                continue
            for t, _ in thread_env.env_steps(hst.last):
                stack.append((hst.extend(t, None), ctrl))
            for y in prog.next_positions(ctrl):
                c = positions[y]
                for t in exec_command(c, hst.last):
                    if t is ABORT:
                        return SoundnessReport(False, f"abort executing {c!r}", checked, hst, depth)
                    stack.append((hst.extend(t, c.label), y))
    return SoundnessReport(True, f"{len(starts)} start prefixes", checked, None, depth)
