"""Linearizability tokens: sequential specifications, obligation/receipt
trading rules and decoration of interferences."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Sequence

from .lang import Command, Fn, GhostOp, Interference, exec_command
from .logic import (Checker, Conseq, OChoice, OFrame, OLoop, Outline, OutlineError, Step,
                    TIStep)
from .preds import (And, Exists, Now, StatePred, Star, TempPred, WPast, has_obligation,
                    image_includes, includes, sp_and)
from .sepalg import ABORT, RCT, Ghost, State
from .structures import abstract_of, sequential_apply


@dataclass(frozen=True)
class SeqSpec:
    """Sequential specification.  ``kind`` selects the built-in semantics
    (``set``, ``counter``, ``rdcss``); ``init`` is the starting abstract
    value and ``root`` names the concrete structure for the CSS map."""
    kind: str
    init: Any = None
    root: str = ""

    def apply(self, abstract, op, args=()):
        return sequential_apply(self.kind, abstract, op, args)

    def up(self, C, C2, op, args, v) -> bool:
        """The UP relation: ``op(args)`` may move ``C`` to ``C2`` returning ``v``."""
        try:
            return self.apply(C, op, args) == (C2, v)
        except ValueError:
            return False

    def css(self, state, keys=None):
        if keys is None:
            return abstract_of(self.root, state)
        return abstract_of(self.root, state, keys)


def set_spec(init=frozenset()) -> SeqSpec:
    return SeqSpec("set", frozenset(init), "lolist")


def counter_spec(init=0) -> SeqSpec:
    return SeqSpec("counter", init, "counter")


def rdcss_spec(init=(0, 0)) -> SeqSpec:
    return SeqSpec("rdcss", tuple(init), "rdcss")


# ---------------------------------------------------------------- token rules

RULES = ("lin-void", "lin-pure", "lin-impure", "lin-pure-clock", "lin-mixed")
TRADING = {"lin-pure", "lin-impure", "lin-pure-clock", "lin-mixed"}


@dataclass(eq=False)
class TokenRuleApplication:
    """One use of a token rule at the command labelled ``point``.

    ``result`` gives the return value the receipt records (a constant or an
    ``Fn`` of the post-state locals); ``values`` is the finite range it is
    drawn from when the rule needs a retrospective witness.  ``root`` names
    the clock for the clock-indexed rules.
    """
    rule: str
    point: str
    result: Any = None
    values: tuple = (None,)
    root: str | None = None
    witness: Any = None

    def __post_init__(self):
        if self.rule not in RULES:
            raise ValueError(f"unknown token rule {self.rule!r}")

    @property
    def trades(self) -> bool:
        return self.rule in TRADING

    def result_of(self, s):
        return self.result.fn(s.env) if isinstance(self.result, Fn) else self.result

    def ghost(self, obl) -> GhostOp:
        tag = self.result
        if self.rule in ("lin-pure-clock", "lin-mixed"):
            if self.root is None:
                raise ValueError(f"{self.rule} needs a clock root")
            return GhostOp(trade=(obl, f"clock:{self.root}", tag), clock=self.root)
        return GhostOp(trade=(obl, "op", tag))


def obligation_tag(op, args=()) -> tuple:
    return ("obl", op, tuple(args) if isinstance(args, (list, tuple)) else args)


def decorate_command(cmd: Command, g: GhostOp) -> Command:
    return replace(cmd, ghost=g)


def decorate_interference(i: Interference, obl, rct, slot="op", clock=None) -> Interference:
    """Attach an obligation-for-receipt trade to an interference: the guard
    gains the obligation and the command performs the trade."""
    guard = i.guard
    need = Now(has_obligation(obl))
    guard = And(guard, need) if isinstance(guard, TempPred) else sp_and(guard, has_obligation(obl))
    if clock is not None:
        g = GhostOp(trade=(obl, f"clock:{clock}", rct), clock=clock)
    else:
        g = GhostOp(trade=(obl, slot, rct))
    return Interference(guard, decorate_command(i.command, g), i.intuitionistic)


def has_receipt(expected) -> StatePred:
    """A receipt (of any slot) whose tag is ``expected`` (constant or ``Fn``)."""
    def fn(s):
        want = expected.fn(s.env) if isinstance(expected, Fn) else expected
        return any(k == RCT and t == want for _, (k, t) in s.lghost.receipts)
    return StatePred(f"RCT({expected!r})", fn)


def lin_states(states: Sequence, obl) -> list:
    """Give every state of a universe the operation's obligation."""
    g = Ghost.make(obligations=(obl,))
    return [State(s.gheap, s.gghost, s.lheap, g, s.vars) for s in states if s is not ABORT]


def _safe_css(spec: SeqSpec, s):
    try:
        return spec.css(s)
    except (KeyError, AttributeError, TypeError, ValueError):
        return _NOCSS


_NOCSS = object()


def _succ(cmd, s):
    return [t for t in exec_command(cmd, s) if t is not ABORT]


def void_condition(spec: SeqSpec, cmd: Command) -> StatePred:
    """The command never changes the abstract value."""
    def fn(s):
        c = _safe_css(spec, s)
        return all(_safe_css(spec, t) == c for t in _succ(cmd, s))
    return StatePred(f"void[{cmd.label}]", fn)


def impure_condition(spec: SeqSpec, cmd: Command, op, args, app: TokenRuleApplication,
                     allow_unchanged=False) -> StatePred:
    """Every effect of the command is one step of ``op`` returning the
    receipt's value."""
    def fn(s):
        c = _safe_css(spec, s)
        for t in _succ(cmd, s):
            c2 = _safe_css(spec, t)
            if allow_unchanged and c2 == c:
                continue
            if not spec.up(c, c2, op, args, app.result_of(t)):
                return False
        return True
    return StatePred(f"impure[{cmd.label}]", fn)


def pure_witness(spec: SeqSpec, op, args, app: TokenRuleApplication) -> TempPred:
    """Some earlier (or the current) state admits ``op`` without effect and
    with the receipt's value."""
    def body(env):
        v = env["v"]
        res = StatePred(f"result={v!r}", lambda s, v=v: app.result_of(s) == v)
        upd = StatePred(f"UP({op},{v!r})",
                        lambda s, v=v: spec.up(_safe_css(spec, s), _safe_css(spec, s), op, args, v))
        return And(Now(res), WPast(upd))
    return Exists(("v",), (tuple(app.values),), body, f"pure[{op}]")


def apply_lin_rule(app: TokenRuleApplication, pre: TempPred, cmd: Command, post: TempPred,
                   spec: SeqSpec, op, args, states: Sequence, bound=None, labels=()):
    """Check the side conditions of ``app`` for ``{pre} cmd {post}``.

    Returns a list of ``(condition, InclusionReport)`` pairs; the rule applies
    when every report holds.
    """
    out = []
    if app.rule == "lin-void":
        out.append(("void", includes(pre, Now(void_condition(spec, cmd)), states, bound, labels)))
    elif app.rule == "lin-impure":
        out.append(("impure", includes(pre, Now(impure_condition(spec, cmd, op, args, app)),
                                       states, bound, labels)))
    elif app.rule in ("lin-pure", "lin-pure-clock"):
        out.append(("void", includes(pre, Now(void_condition(spec, cmd)), states, bound, labels)))
        out.append(("witness", image_includes(pre, lambda s: exec_command(cmd, s),
                                              pure_witness(spec, op, args, app),
                                              states, bound, labels, label=cmd.label,
                                              abort_ok=True)))
    elif app.rule == "lin-mixed":
        out.append(("impure", includes(pre, Now(impure_condition(spec, cmd, op, args, app,
                                                                 allow_unchanged=True)),
                                       states, bound, labels)))

        def unchanged(s):
            c = _safe_css(spec, s)
            return [t for t in _succ(cmd, s) if _safe_css(spec, t) == c]
        out.append(("witness", image_includes(pre, unchanged, pure_witness(spec, op, args, app),
                                              states, bound, labels, label=cmd.label)))
    if app.witness is not None:
        out.append(("user-witness", image_includes(pre, lambda s: exec_command(cmd, s),
                                                   app.witness, states, bound, labels,
                                                   label=cmd.label, abort_ok=True)))
    return out


# ---------------------------------------------------------------- outlines

@dataclass
class LinJudgment:
    name: str
    holds: bool
    judgment: Any = None
    applications: list = field(default_factory=list)
    error: str = ""

    def as_dict(self) -> dict:
        return {"outline": self.name, "holds": self.holds, "error": self.error,
                "rules": [(p, r) for p, r in self.applications]}


class LinError(OutlineError):
    pass


def _count_trades(items, apps) -> int:
    n = 0
    for it in items:
        if isinstance(it, (Step, TIStep)) and it.cmd is not None:
            a = apps.get(it.cmd.label)
            n += bool(a and a.trades)
        elif isinstance(it, OChoice):
            counts = {_count_trades(b.items, apps) for b in it.branches}
            if len(counts) != 1:
                raise LinError(it.name or "choice", "token-conservation",
                               msg=f"branches trade different numbers of tokens {sorted(counts)}")
            n += counts.pop()
        elif isinstance(it, OLoop):
            if _count_trades(it.body.items, apps):
                raise LinError(it.name or "loop", "token-conservation",
                               msg="a trade inside a loop may fire more than once")
        elif isinstance(it, OFrame):
            n += _count_trades(it.inner.items, apps)
    return n


class _LinRewriter:
    def __init__(self, spec, op, args, apps, obl, receipt, states, bound, labels):
        self.spec, self.op, self.args = spec, op, args
        self.apps, self.obl, self.receipt = apps, obl, receipt
        self.states, self.bound, self.labels = states, bound, labels
        self.log: list = []
        self.used: set = set()

    def token(self, traded):
        return Now(self.receipt if traded else has_obligation(self.obl))

    def outline(self, o: Outline, traded=False) -> tuple[Outline, bool]:
        pre = And(o.pre, self.token(traded))
        cur, items = pre, []
        for it in o.items:
            it2, cur, traded = self.item(it, cur, traded)
            items.append(it2)
        return Outline(pre, items, o.name), traded

    def item(self, it, cur, traded):
        if isinstance(it, (Step, TIStep)):
            cmd = it.cmd
            app = self.apps.get(cmd.label) if cmd is not None else None
            if cmd is None:
                post = And(it.post, self.token(traded))
                return TIStep(self.ti(it.ti, traded), post, it.name), post, traded
            if app is None:
                app = TokenRuleApplication("lin-void", cmd.label)
            self.used.add(cmd.label)
            for what, r in apply_lin_rule(app, cur, cmd, it.post, self.spec, self.op,
                                          self.args, self.states, self.bound, self.labels):
                if not r.holds:
                    raise LinError(cmd.label, app.rule, r, msg=f"{what} condition: " + r.describe())
            self.log.append((cmd.label, app.rule))
            if app.trades:
                cmd = decorate_command(cmd, app.ghost(self.obl))
                traded = True
            post = And(it.post, self.token(traded))
            ti = self.ti(it.ti, traded)
            if isinstance(it, Step):
                return Step(cmd, post, it.via, ti, it.name), post, traded
            return TIStep(ti, post, it.name, cmd), post, traded
        if isinstance(it, Conseq):
            post = And(it.post, self.token(traded))
            return Conseq(post, it.name), post, traded
        if isinstance(it, OChoice):
            brs, after = [], set()
            for b in it.branches:
                b2, t2 = self.outline(b, traded)
                brs.append(b2)
                after.add(t2)
            traded = after.pop()
            post = And(it.post, self.token(traded))
            return OChoice(tuple(brs), post, it.name), post, traded
        if isinstance(it, OLoop):
            body, _ = self.outline(it.body, traded)
            return OLoop(body, it.name), body.pre, traded
        if isinstance(it, OFrame):
            inner, traded = self.outline(it.inner, traded)
            return OFrame(it.frame, inner, it.name), Star(inner.post, it.frame), traded
        raise TypeError(it)

    def ti(self, ti, traded):
        if ti is None:
            return None
        tok = self.token(traded)

        def inst(env, base=ti.inst):
            a, p, q, o = base(env)
            return And(a, tok), p, q, o
        return replace(ti, inst=inst)


def check_lin_outline(outline: Outline, spec: SeqSpec, op, args, apps: Sequence,
                      states: Sequence, bound=None, labels=(), result=None,
                      obl=None) -> LinJudgment:
    """Check a proof outline for one operation together with its token
    rules.

    The operation starts with its obligation; every command not named in
    ``apps`` must satisfy ``lin-void``; exactly one trade may happen along
    every path and the final assertion must hold the receipt for ``result``.
    """
    obl = obligation_tag(op, args) if obl is None else obl
    amap = {}
    for a in apps:
        if a.point in amap:
            raise ValueError(f"two rule applications at {a.point}")
        amap[a.point] = a
    if result is None:
        trading = [a for a in apps if a.trades]
        result = trading[0].result if trading else None
    lstates = lin_states(states, obl)
    try:
        n = _count_trades(outline.items, amap)
        if n != 1:
            raise LinError(outline.name, "token-conservation",
                           msg=f"expected exactly one trade, found {n}")
        rw = _LinRewriter(spec, op, args, amap, obl, has_receipt(result), lstates, bound, labels)
        lo, traded = rw.outline(outline)
        missing = set(amap) - rw.used
        if missing:
            raise LinError(outline.name, "token-rule", msg=f"no command labelled {sorted(missing)}")
        j = Checker(lstates, bound, labels).check(lo)
    except OutlineError as e:
        return LinJudgment(outline.name, False, error=str(e))
    return LinJudgment(outline.name, True, j, rw.log)
