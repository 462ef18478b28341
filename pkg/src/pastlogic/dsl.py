"""Proof files.

A proof file is a sequence of S-expressions::

    (universe (addresses l r) (values 0..3) (heap-shape full))
    (domain N 0..3)
    (def counter (n) (= (+ (val l) (val r)) n))
    (ti hyp :vars ((nl N) (nr2 N)) :a ... :p ... :q ... :o ...)
    (outline read (pre ...) (step (read l x) ...) ...)
    (invariant hyp ...)
    (discharge :depth 6 :states ...)
    (certify :depth 6 :init ...)

Logical variables are bound by ``exists``, ``def`` parameters and ``ti``
variables; they are substituted before a predicate is built, so every
predicate carries a concrete name.  Other symbols resolve to local program
variables (when declared in the universe) or stand for themselves
(addresses, tags).
"""
from __future__ import annotations

import itertools
import operator
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from . import lang
from .lang import V, F, Fn, Program
from .logic import (TI, Conseq, OChoice, OFrame, OLoop, Outline, Step, TIStep)
from .preds import (EMP_S, FALSE_S, FF, TRUE_S, TT, And, Exists, Hist, Implies,
                    Not, Now, Or, Past, StatePred, Star, WPast, sp_and, sp_not,
                    sp_or, sp_star)
from .sepalg import UniverseConfig, _parse_list


class DSLError(ValueError):
    pass


class Sym(str):
    pass


class Kw(str):
    pass


_TOKEN = re.compile(r'\s*(?:(;[^\n]*)|(\()|(\))|"((?:[^"\\]|\\.)*)"|([^\s()";]+))')


def parse(text: str) -> list:
    """Parse text into nested lists of ``int``, ``str``, ``Sym`` and ``Kw``."""
    stack: list[list] = [[]]
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise DSLError(f"unexpected character at offset {pos}: {text[pos:pos + 20]!r}")
        pos = m.end()
        comment, lp, rp, string, atom = m.groups()
        if comment is not None:
            continue
        if lp:
            stack.append([])
        elif rp:
            if len(stack) == 1:
                raise DSLError("unbalanced ')'")
            done = stack.pop()
            stack[-1].append(done)
        elif string is not None:
            stack[-1].append(string)
        elif atom is not None:
            stack[-1].append(_atom(atom))
    if len(stack) != 1:
        raise DSLError("unbalanced '('")
    return stack[0]


def _atom(tok: str):
    if tok.startswith(":") and len(tok) > 1:
        return Kw(tok[1:])
    if re.fullmatch(r"[+-]?\d+", tok):
        return int(tok)
    return Sym(tok)


def render(form, env: dict | None = None) -> str:
    env = env or {}
    if isinstance(form, list):
        return "(" + " ".join(render(f, env) for f in form) + ")"
    if isinstance(form, Sym) and form in env:
        return repr(env[form])
    if isinstance(form, Kw):
        return ":" + form
    return str(form)


def _split_kw(items: list) -> tuple[list, dict]:
    pos, kw = [], {}
    it = iter(items)
    for x in it:
        if isinstance(x, Kw):
            try:
                kw[str(x)] = next(it)
            except StopIteration:
                raise DSLError(f"keyword :{x} without a value") from None
        else:
            pos.append(x)
    return pos, kw


def _head(form):
    return form[0] if isinstance(form, list) and form and isinstance(form[0], Sym) else None


_CMP = {"=": operator.eq, "!=": operator.ne, "<": operator.lt, "<=": operator.le,
        ">": operator.gt, ">=": operator.ge}
_ARITH = {"+": operator.add, "-": operator.sub, "*": operator.mul}
_TEMPORAL_HEADS = {"now", "past", "wpast", "hist"}


@dataclass
class ProofFile:
    path: str
    universe: UniverseConfig
    domains: dict
    defs: dict
    tis: dict
    outlines: list
    invariants: dict
    discharge: dict = field(default_factory=dict)
    certify: dict = field(default_factory=dict)
    threads: dict = field(default_factory=dict)
    bound: int | None = None
    expect: str = "accept"
    ctx: Any = None


class Compiler:
    def __init__(self, universe: UniverseConfig, domains: dict, defs: dict):
        self.universe = universe
        self.local_vars = set(universe.local_vars) | set()
        self.domains = domains
        self.defs = defs
        self.programs: dict[str, Program] = {}

    # -- values ------------------------------------------------------------
    def domain(self, spec) -> tuple:
        if isinstance(spec, list):
            return tuple(self.const(x, {}) for x in spec)
        if isinstance(spec, int):
            return (spec,)
        if spec in self.domains:
            return self.domains[spec]
        if ".." in spec:
            return tuple(_parse_list(str(spec)))
        raise DSLError(f"unknown domain {spec}")

    def binders(self, spec) -> tuple[tuple, tuple]:
        names, doms = [], []
        for b in spec:
            if isinstance(b, list):
                names.append(str(b[0]))
                doms.append(self.domain(b[1]))
            else:
                if "default" not in self.domains:
                    raise DSLError(f"binder {b} has no domain and no default domain is declared")
                names.append(str(b))
                doms.append(self.domains["default"])
        return tuple(names), tuple(doms)

    def const(self, form, env):
        f = self.term(form, env)
        if callable(f):
            raise DSLError(f"{render(form, env)} depends on the state")
        return f[0]

    def term(self, form, env):
        """Either ``(value,)`` for a constant or a function of the state."""
        if isinstance(form, int) or (isinstance(form, str) and not isinstance(form, Sym)):
            return (form,)
        if isinstance(form, Sym):
            if form in env:
                return (env[form],)
            if form == "none":
                return (None,)
            if form in ("true", "false"):
                return (form == "true",)
            if form in self.local_vars:
                name = str(form)
                return lambda s: s.var(name)
            return (str(form),)
        h = _head(form)
        if h in _ARITH:
            parts = [self.term(x, env) for x in form[1:]]
            op = _ARITH[h]
            if all(not callable(p) for p in parts):
                vals = [p[0] for p in parts]
                return (_fold(op, vals),)
            fs = [p if callable(p) else (lambda s, v=p[0]: v) for p in parts]
            return lambda s: _fold(op, [f(s) for f in fs])
        if h == "val":
            a = self.term(form[1], env)
            where = str(form[2]) if len(form) > 2 else "any"
            return lambda s: _cell(s, a(s) if callable(a) else a[0], where)
        if h == "field":
            obj = self.term(form[1], env)
            fld = str(form[2])
            return lambda s: _cell(s, (obj(s) if callable(obj) else obj[0], fld), "any")
        if h == "tuple":
            parts = [self.term(x, env) for x in form[1:]]
            if all(not callable(p) for p in parts):
                return (tuple(p[0] for p in parts),)
            return lambda s: tuple(p(s) if callable(p) else p[0] for p in parts)
        if h == "clock":
            root = self.const(form[1], env)
            return lambda s: s.gghost.clock(root)
        raise DSLError(f"not a term: {render(form, env)}")

    # -- state predicates ---------------------------------------------------
    def spred(self, form, env) -> StatePred:
        name = render(form, env)
        if isinstance(form, Sym):
            if form == "true":
                return TRUE_S
            if form == "false":
                return FALSE_S
            if form == "emp":
                return EMP_S
            if form in self.defs:
                return self.spred([form], env)
            raise DSLError(f"unknown predicate {form}")
        h = _head(form)
        if h is None:
            raise DSLError(f"not a predicate: {name}")
        if h in self.defs:
            params, body = self.defs[h]
            if len(params) != len(form) - 1:
                raise DSLError(f"{h} expects {len(params)} arguments")
            inner = {**env, **{p: self.const(a, env) for p, a in zip(params, form[1:])}}
            p = self.spred(body, inner)
            return StatePred(name, p.fn, p.abort_absorbing, cache=p._cache is not None)
        if h in _CMP:
            a, b = self.term(form[1], env), self.term(form[2], env)
            op = _CMP[h]
            safe = h in ("=", "!=")
            if not callable(a) and not callable(b):
                r = _cmp(op, a[0], b[0], safe)
                return TRUE_S if r else FALSE_S
            fa = a if callable(a) else (lambda s, v=a[0]: v)
            fb = b if callable(b) else (lambda s, v=b[0]: v)
            return StatePred(name, lambda s: _cmp(op, fa(s), fb(s), safe))
        if h == "pts":
            pos, kw = _split_kw(form[1:])
            where = str(kw.get("where", "any"))
            frac = self.const(kw["frac"], env) if "frac" in kw else None
            preds = []
            for a, v in zip(pos[0::2], pos[1::2]):
                preds.append(self._pts(a, v, env, frac, where))
            p = sp_and(*preds)
            return StatePred(name, p.fn)
        if h == "and":
            return sp_and(*[self.spred(x, env) for x in form[1:]])
        if h == "or":
            return sp_or(*[self.spred(x, env) for x in form[1:]])
        if h == "not":
            return sp_not(self.spred(form[1], env))
        if h == "implies":
            return sp_or(sp_not(self.spred(form[1], env)), self.spred(form[2], env))
        if h == "star":
            parts = [self.spred(x, env) for x in form[1:]]
            out = parts[0]
            for p in parts[1:]:
                out = sp_star(out, p)
            return out
        if h == "exists":
            names, doms = self.binders(form[1])
            insts = [self.spred(form[2], {**env, **dict(zip(names, vals))})
                     for vals in itertools.product(*doms)]
            return StatePred(name, lambda s: any(p(s) for p in insts))
        if h == "forall":
            names, doms = self.binders(form[1])
            insts = [self.spred(form[2], {**env, **dict(zip(names, vals))})
                     for vals in itertools.product(*doms)]
            return StatePred(name, lambda s: all(p(s) for p in insts))
        if h == "obl":
            tag = self.const(form[1], env)
            return StatePred(name, lambda s: tag in s.lghost.obligations
                             or tag in s.gghost.obligations)
        if h == "rct":
            slot, tag = self.const(form[1], env), self.const(form[2], env)
            return StatePred(name, lambda s: s.lghost.receipt(slot) == ("rct", tag))
        if h == "snap":
            slot, tag = self.const(form[1], env), self.const(form[2], env)
            return StatePred(name, lambda s: s.gghost.receipt(slot) is not None
                             and s.gghost.receipt(slot)[1] == tag)
        if h == "unset":
            var = str(form[1])
            return StatePred(name, lambda s: s.var(var) is None)
        if h in _TEMPORAL_HEADS:
            raise DSLError(f"temporal operator inside a state predicate: {name}")
        raise DSLError(f"unknown predicate form {name}")

    def _pts(self, a, v, env, frac, where) -> StatePred:
        at = self.term(a, env)
        vt = None if v == "_" else self.term(v, env)

        def fn(s):
            addr = at(s) if callable(at) else at[0]
            c = _cellfull(s, addr, where)
            if c is None:
                return False
            if frac is not None and c[0] < frac:
                return False
            if vt is None:
                return True
            return c[1] == (vt(s) if callable(vt) else vt[0])
        return StatePred(f"{render(a, env)}|->{render(v, env)}", fn)

    # -- temporal predicates ------------------------------------------------
    def is_temporal(self, form) -> bool:
        h = _head(form)
        if h is None:
            if isinstance(form, Sym) and form in self.defs:
                return self.is_temporal(self.defs[form][1])
            return False
        if h in _TEMPORAL_HEADS:
            return True
        if h in self.defs:
            return self.is_temporal(self.defs[h][1])
        if h in ("and", "or", "not", "implies", "star", "exists"):
            return any(self.is_temporal(x) for x in form[1:])
        return False

    def tpred(self, form, env):
        if not self.is_temporal(form):
            if form == "true":
                return TT
            if form == "false":
                return FF
            return Now(self.spred(form, env))
        h = _head(form)
        if h is None:
            return self.tpred(self.defs[form][1], env)
        if h in self.defs:
            params, body = self.defs[h]
            inner = {**env, **{p: self.const(a, env) for p, a in zip(params, form[1:])}}
            return self.tpred(body, inner)
        if h == "now":
            return Now(self.spred(form[1], env))
        if h == "past":
            return Past(self.spred(form[1], env))
        if h == "wpast":
            return WPast(self.spred(form[1], env))
        if h == "hist":
            return Hist(self.spred(form[1], env), self.program(form[2]))
        if h in ("and", "or"):
            states = [x for x in form[1:] if not self.is_temporal(x)]
            temps = [self.tpred(x, env) for x in form[1:] if self.is_temporal(x)]
            if states:
                temps.insert(0, Now(self.spred([Sym(h)] + states, env)))
            out = temps[0]
            for t in temps[1:]:
                out = And(out, t) if h == "and" else Or(out, t)
            return out
        if h == "not":
            return Not(self.tpred(form[1], env))
        if h == "implies":
            return Implies(self.tpred(form[1], env), self.tpred(form[2], env))
        if h == "star":
            out = self.tpred(form[1], env)
            for x in form[2:]:
                out = Star(out, self.tpred(x, env))
            return out
        if h == "exists":
            names, doms = self.binders(form[1])
            body = form[2]
            return Exists(names, doms, lambda e: self.tpred(body, {**env, **e}),
                          render(form, env))
        raise DSLError(f"unknown temporal form {render(form, env)}")

    # -- programs -----------------------------------------------------------
    def cexpr(self, form):
        if isinstance(form, Sym):
            if form == "none":
                return None
            if form in ("true", "false"):
                return form == "true"
            if form in self.local_vars:
                return V(str(form))
            return str(form)
        if isinstance(form, (int, str)):
            return form
        h = _head(form)
        if h == "field":
            return F(self.cexpr(form[1]), str(form[2]))
        t = self.term(form, {})
        if not callable(t):
            return t[0]
        from .sepalg import State

        def fn(env, t=t):
            return t(State.make(vars=env))
        return Fn(fn, render(form))

    def command(self, form) -> lang.Command:
        pos, kw = _split_kw(form)
        h = str(pos[0])
        args = pos[1:]
        label = str(kw.get("label", ""))
        c = self.cexpr
        if h == "skip":
            return lang.skip(label)
        if h == "read":
            return lang.read(c(args[0]), str(args[1]), label)
        if h == "write":
            return lang.write(c(args[0]), c(args[1]), label)
        if h == "faa":
            return lang.faa(c(args[0]), c(args[1]), str(args[2]) if len(args) > 2 else None, label)
        if h == "cmpx":
            return lang.cmpx(c(args[0]), c(args[1]), c(args[2]),
                             str(args[3]) if len(args) > 3 else None, label)
        if h == "assign":
            return lang.assign(str(args[0]), c(args[1]), label)
        if h == "assume":
            return lang.assume(self.spred(args[0], {}), label,
                               local=bool(kw.get("local", False)))
        if h == "lock":
            return lang.lock(c(args[0]), label, c(kw["owner"]) if "owner" in kw else 1)
        if h == "unlock":
            return lang.unlock(c(args[0]), label)
        if h == "atomic":
            return lang.atomic(*[self.command(x) for x in args], label=label)
        raise DSLError(f"unknown command {h}")

    def program(self, form) -> Program:
        if isinstance(form, Sym):
            if form in self.programs:
                return self.programs[form]
            raise DSLError(f"unknown program {form}")
        h = _head(form)
        if h == "seq":
            return lang.seq(*[self.program(x) for x in form[1:]])
        if h == "choice":
            return lang.choice(*[self.program(x) for x in form[1:]])
        if h == "loop":
            return lang.loop(lang.seq(*[self.program(x) for x in form[1:]]))
        if h == "empty":
            return lang.Skip()
        return lang.Com(self.command(form))


def _fold(op, vals):
    if any(v is None for v in vals):
        return None
    out = vals[0]
    for v in vals[1:]:
        out = op(out, v)
    return out


def _cmp(op, a, b, safe):
    if not safe and (a is None or b is None):
        return False
    try:
        return op(a, b)
    except TypeError:
        return False


def _cellfull(s, addr, where):
    if where in ("any", "g"):
        c = s.gheap.get(addr)
        if c is not None:
            return c
    if where in ("any", "l"):
        return s.lheap.get(addr)
    return None


def _cell(s, addr, where):
    c = _cellfull(s, addr, where)
    return None if c is None else c[1]


# ---------------------------------------------------------------- loading

def load(path, universe_override: str | None = None) -> ProofFile:
    path = Path(path)
    return loads(path.read_text(), str(path), universe_override, path.parent)


def loads(text: str, name: str = "<string>", universe_override: str | None = None,
          base: Path | None = None) -> ProofFile:
    forms = parse(text)
    universe = None
    domains: dict = {}
    defs: dict = {}
    pf_kw: dict = {"discharge": {}, "certify": {}, "threads": {}, "bound": None,
                   "expect": "accept"}
    pending = []
    for f in forms:
        h = _head(f)
        if h == "universe":
            sec = {}
            for entry in f[1:]:
                key = str(entry[0]).replace("-", "_")
                sec[key] = ",".join(str(x) for x in entry[1:])
            universe = UniverseConfig.from_section(sec)
        elif h == "universe-file":
            universe = UniverseConfig.from_file((base or Path(".")) / str(f[1]))
        elif h == "domain":
            domains[str(f[1])] = None if len(f) < 3 else f[2:]
        elif h == "def":
            defs[Sym(f[1])] = ([Sym(p) for p in f[2]], f[3])
        elif h == "bound":
            pf_kw["bound"] = int(f[1])
        elif h == "expect":
            pf_kw["expect"] = str(f[1])
        elif h in ("discharge", "certify", "threads"):
            _, kw = _split_kw(f[1:])
            pf_kw[h] = kw
        else:
            pending.append(f)
    if universe_override:
        universe = UniverseConfig.from_file(universe_override)
    if universe is None:
        raise DSLError("proof file declares no universe")
    comp = Compiler(universe, {}, defs)
    comp.local_vars |= _targets(pending)
    for k, spec in domains.items():
        comp.domains[k] = _domain_values(comp, spec)
    tis: dict = {}
    outlines = []
    invariants = {}
    for f in pending:
        h = _head(f)
        if h == "program":
            comp.programs[str(f[1])] = comp.program(f[2])
        elif h == "ti":
            tis[str(f[1])] = _ti(comp, f)
        elif h == "outline":
            outlines.append(_outline(comp, f, tis))
        elif h == "invariant":
            invariants[str(f[1])] = f[2]
        else:
            raise DSLError(f"unknown declaration {render(f)}")
    return ProofFile(name, universe, comp.domains, defs, tis, outlines, invariants,
                     pf_kw["discharge"], pf_kw["certify"], pf_kw["threads"], pf_kw["bound"],
                     pf_kw["expect"], comp)


_TARGET_POS = {"read": 2, "faa": 3, "cmpx": 4, "assign": 1}


def _targets(forms) -> set:
    """Variables written by commands anywhere in ``forms``."""
    out = set()

    def walk(f):
        if not isinstance(f, list):
            return
        h = _head(f)
        pos = [x for x in f if not isinstance(x, Kw)]
        if h in _TARGET_POS and len(pos) > _TARGET_POS[h] and isinstance(pos[_TARGET_POS[h]], Sym):
            out.add(str(pos[_TARGET_POS[h]]))
        for x in f:
            walk(x)
    for f in forms:
        walk(f)
    return out


def _domain_values(comp: Compiler, spec) -> tuple:
    if spec is None:
        raise DSLError("empty domain")
    out = []
    for x in spec:
        if isinstance(x, Sym) and ".." in x:
            out.extend(_parse_list(str(x)))
        else:
            out.append(comp.const(x, {}))
    return tuple(out)


def _ti(comp: Compiler, form) -> TI:
    pos, kw = _split_kw(form[2:])
    label = str(form[1])
    names, doms = comp.binders(kw.get("vars", []))
    variant = str(kw.get("variant", "ordered"))
    prog = comp.program(kw["prog"]) if "prog" in kw else None
    for k in ("a", "p", "q", "o"):
        if k not in kw:
            raise DSLError(f"ti {label} lacks :{k}")
    a_f, p_f, q_f, o_f = kw["a"], kw["p"], kw["q"], kw["o"]

    def inst(env):
        e = {Sym(k): v for k, v in env.items()}
        return (comp.tpred(a_f, e), comp.spred(p_f, e), comp.spred(q_f, e), comp.spred(o_f, e))
    return TI(names, doms, inst, variant, prog, False, label)


def _outline(comp: Compiler, form, tis) -> Outline:
    name = str(form[1])
    body = form[2:]
    if not body or _head(body[0]) != "pre":
        raise DSLError(f"outline {name} must start with (pre ...)")
    pre = comp.tpred(body[0][1], {})
    return Outline(pre, [_item(comp, x, tis) for x in body[1:]], name)


def _sub_outline(comp, name, forms, tis, pre=None) -> Outline:
    if pre is None:
        if not forms or _head(forms[0]) not in ("pre", "inv"):
            raise DSLError(f"{name}: expected (pre ...)")
        pre = comp.tpred(forms[0][1], {})
        forms = forms[1:]
    return Outline(pre, [_item(comp, x, tis) for x in forms], name)


def _item(comp: Compiler, form, tis):
    h = _head(form)
    pos, kw = _split_kw(form[1:])
    nm = str(kw.get("name", ""))
    if h == "step":
        cmd = comp.command(pos[0])
        post = comp.tpred(pos[1], {})
        via = tuple(comp.tpred(x, {}) for x in kw.get("via", []))
        ti = None
        if "ti" in kw:
            base = tis[str(kw["ti"])]
            ti = TI(base.names, base.domains, base.inst, base.variant, base.program, True,
                    base.label)
        return Step(cmd, post, via, ti, nm)
    if h == "conseq":
        return Conseq(comp.tpred(pos[0], {}), nm)
    if h == "interpolate":
        ti = tis[str(pos[0])]
        cmd = comp.command(kw["cmd"]) if "cmd" in kw else None
        return TIStep(ti, comp.tpred(pos[1], {}), nm, cmd)
    if h == "choice":
        branches = []
        post = None
        for x in pos:
            if _head(x) == "branch":
                branches.append(_sub_outline(comp, f"branch{len(branches)}", x[1:], tis))
            elif _head(x) == "post":
                post = comp.tpred(x[1], {})
        if post is None:
            raise DSLError("choice needs (post ...)")
        return OChoice(tuple(branches), post, nm)
    if h == "loop":
        return OLoop(_sub_outline(comp, "loop", pos, tis), nm)
    if h == "frame":
        frame = comp.tpred(pos[0], {})
        return OFrame(frame, _sub_outline(comp, "frame", pos[1:], tis), nm)
    raise DSLError(f"unknown outline item {render(form)}")


# ---------------------------------------------------------------- running

@dataclass
class FileReport:
    name: str
    accepted: bool
    error: str = ""
    judgments: list = field(default_factory=list)
    interference: list = field(default_factory=list)
    ifree_failures: list = field(default_factory=list)
    certificates: dict = field(default_factory=dict)
    agreement: bool = True
    soundness: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return (self.accepted and not self.ifree_failures and self.agreement
                and all(c.holds for cs in self.certificates.values() for c in cs)
                and all(r.certified for _, r in self.soundness))

    def as_dict(self) -> dict:
        return {
            "file": self.name,
            "accepted": self.accepted,
            "error": self.error,
            "outlines": [j.name for j in self.judgments],
            "interferences": [repr(i) for i in self.interference],
            "hypotheses": len(self.certificates),
            "interference_freedom_failures": [f"{a!r} / {i!r}" for a, i in self.ifree_failures],
            "discharge": {k: {c.mode: c.holds for c in cs} for k, cs in self.certificates.items()},
            "modes_agree": self.agreement,
            "soundness": {n: {"certified": r.certified, "reason": r.reason,
                              "checked": r.checked} for n, r in self.soundness},
            "ok": self.ok,
            "seconds": round(self.seconds, 3),
        }


def hypothesis_label(h) -> str:
    return h.name.split("[", 1)[0].rstrip("'")


def check_file(pf: ProofFile, mode: str = "both", depth: int | None = None,
               certify: bool = True, bound: int | None = None) -> FileReport:
    """Check every outline, then discharge and certify as the file requests.

    ``mode`` is ``invariant``, ``bounded`` or ``both``; invariant mode needs
    an ``invariant`` declaration for the hypothesis label and is skipped
    otherwise.
    """
    import time
    from .lang import local_parts
    from .logic import (Checker, OutlineError, certify_soundness, discharge_bounded,
                        discharge_invariant)
    from .sepalg import enumerate_states

    t0 = time.perf_counter()
    comp = pf.ctx
    universe = enumerate_states(pf.universe)
    bound = bound if bound is not None else pf.bound
    rep = FileReport(pf.path, True)
    states, env_states = universe, universe
    if "self" in pf.threads:
        filt = comp.spred(pf.threads["self"], {})
        states = [s for s in universe if filt(s)]
    if "env" in pf.threads:
        filt = comp.spred(pf.threads["env"], {})
        env_states = [s for s in universe if filt(s)]
    locs = local_parts(env_states)
    checker = Checker(states, bound, locals_=locs)
    try:
        for o in pf.outlines:
            rep.judgments.append(checker.check(o))
    except OutlineError as e:
        rep.accepted = False
        rep.error = str(e)
        rep.seconds = time.perf_counter() - t0
        return rep
    I = [i for j in rep.judgments for i in j.I]
    rep.interference = I
    for j in rep.judgments:
        for a, i, r in checker.interference_freedom(j.P, [x for x in I]):
            if not r.holds:
                rep.ifree_failures.append((a, i))
    dstates = states
    if "states" in pf.discharge:
        filt = comp.spred(pf.discharge["states"], {})
        dstates = [s for s in states if filt(s)]
    ddepth = depth or int(pf.discharge.get("depth", 6))
    certs = {}
    for j in rep.judgments:
        for h in j.H:
            if h.key() in certs:
                continue
            cs = []
            label = hypothesis_label(h)
            if mode in ("both", "invariant") and label in pf.invariants:
                env = {Sym(k): v for k, v in h.env.items()}
                inv = comp.tpred(pf.invariants[label], env)
                cs.append(discharge_invariant(h, inv, I, dstates, bound, locs))
            if mode in ("both", "bounded") or not cs:
                cs.append(discharge_bounded(h, I, ddepth, dstates, dstates, locals_=locs))
            if len({c.holds for c in cs}) > 1:
                rep.agreement = False
            certs[h.key()] = cs
            rep.certificates[h.name or repr(h)] = cs
    if certify and pf.certify:
        passing = {k: _merge(cs) for k, cs in certs.items()}
        cdepth = int(pf.certify.get("depth", 6))
        prefix = int(pf.certify.get("prefix", 1))
        init_f = comp.spred(pf.certify["init"], {}) if "init" in pf.certify else TRUE_S
        for j in rep.judgments:
            init = [s for s in states if init_f(s) and j.pre.member(s)]
            r = certify_soundness(j, passing, init, cdepth, states, prefix, I=I,
                                  locals_=locs)
            rep.soundness.append((j.name, r))
    rep.seconds = time.perf_counter() - t0
    return rep


def _merge(cs):
    for c in cs:
        if not c.holds:
            return c
    return cs[-1]
