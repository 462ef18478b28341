"""Exhaustive property suites for the algebras and predicate laws.

Every law is evaluated with the brute-force oracles, never with the normal
form, over a small universe (two addresses, two values by default).
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .lang import (Com, GhostOp, Program, Skip, alloc, assign, assume, atomic, choice, cmpx,
                   exec_command, faa, ghost_only, lock, loop, read, seq, skip, unlock, write)
from .preds import (FALSE_S, FF, TRUE_S, TT, And, Hist, Not, Now, Or, Past, Star, StatePred,
                    Wand, exact_heap, pt, sp_and, sp_not, sp_or, sp_star, sp_wand)
from .sepalg import (ABORT, Computation, Ghost, History, State, UniverseConfig,
                     compose_computation, compose_history, compose_state, enumerate_states,
                     split_state)


@dataclass
class LawResult:
    group: str
    law: str
    passed: bool
    checked: int = 0
    witness: str = ""
    seconds: float = 0.0

    def as_dict(self) -> dict:
        return {"group": self.group, "law": self.law, "passed": self.passed,
                "checked": self.checked, "witness": self.witness,
                "seconds": round(self.seconds, 3)}


@dataclass
class LemmaReport:
    results: list = field(default_factory=list)
    bound: int = 4
    states: int = 0
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    def failures(self) -> list:
        return [r for r in self.results if not r.passed]

    def groups(self) -> dict:
        out: dict = {}
        for r in self.results:
            out.setdefault(r.group, []).append(r)
        return out

    def as_dict(self) -> dict:
        return {"ok": self.ok, "bound": self.bound, "states": self.states,
                "seconds": round(self.seconds, 3),
                "laws": [r.as_dict() for r in self.results]}


def small_universe(addresses=("a", "b"), values=(0, 1)) -> UniverseConfig:
    return UniverseConfig(addresses=tuple(addresses), values=tuple(values), denominator=1,
                          heap_shape="partial")


def state_family(u: UniverseConfig) -> dict:
    """Named state predicates used to instantiate the laws: intuitionistic
    and precise ones, constants and a negation."""
    a, b = u.addresses[0], u.addresses[-1]
    v0, v1 = u.values[0], u.values[-1]
    fam = {
        "true": TRUE_S,
        "false": FALSE_S,
        "emp": exact_heap({}),
        f"{a}->{v0}": pt(a, v0),
        f"{a}->_": pt(a),
        f"{b}->{v1}": pt(b, v1),
        f"exactly {a}->{v1}": exact_heap({a: v1}),
    }
    fam[f"not {a}->{v0}"] = sp_not(fam[f"{a}->{v0}"])
    return {k: StatePred(p.name, p.fn, p.abort_absorbing, cache=True) for k, p in fam.items()}


class _Law:
    def __init__(self, report: LemmaReport, group: str, law: str):
        self.report, self.group, self.law = report, group, law

    def __enter__(self):
        self.t0 = time.perf_counter()
        self.n = 0
        self.witness = ""
        return self

    def fail(self, witness):
        if not self.witness:
            self.witness = str(witness)

    def __exit__(self, *exc):
        self.report.results.append(LawResult(self.group, self.law, not self.witness, self.n,
                                             self.witness, time.perf_counter() - self.t0))
        return False


def _same(law: _Law, A, B, xs, what):
    for x in xs:
        law.n += 1
        if A.oracle(x) != B.oracle(x):
            law.fail(f"{what}: {x!r}")
            return


def _incl(law: _Law, A, B, xs, what):
    for x in xs:
        law.n += 1
        if A.oracle(x) and not B.oracle(x):
            law.fail(f"{what}: {x!r}")
            return


def _subset(p: StatePred, q: StatePred, states) -> bool:
    return all(q(s) for s in states if p(s))


def _intuitionistic_state(p: StatePred, states) -> bool:
    star = sp_star(p, TRUE_S)
    return _subset(star, p, states)


# ---------------------------------------------------------------- algebra laws

def _algebra_laws(rep: LemmaReport, group: str, elems_by_prefix: Iterable, compose: Callable,
                  unit: Callable, is_unit: Callable, reps: list | None = None):
    groups = [list(g) for g in elems_by_prefix]
    with _Law(rep, group, "commutativity") as law:
        for g in groups:
            for x, y in itertools.product(g, repeat=2):
                law.n += 1
                if compose(x, y) != compose(y, x):
                    law.fail(f"{x!r} * {y!r}")
    with _Law(rep, group, "associativity") as law:
        for g in groups:
            for x, y in itertools.product(g, repeat=2):
                xy = compose(x, y)
                for z in g:
                    law.n += 1
                    yz = compose(y, z)
                    lhs = None if xy is None else compose(xy, z)
                    rhs = None if yz is None else compose(x, yz)
                    if lhs != rhs:
                        law.fail(f"({x!r} * {y!r}) * {z!r}")
    with _Law(rep, group, "every element has a unit") as law:
        for g in groups:
            for x in g:
                law.n += 1
                u = unit(x)
                if not is_unit(u) or compose(x, u) != x:
                    law.fail(x)
    with _Law(rep, group, "distinct units never compose") as law:
        pool = reps if reps is not None else [x for g in groups for x in g]
        units = list(dict.fromkeys(unit(x) for x in pool))
        for u1, u2 in itertools.permutations(units, 2):
            law.n += 1
            if u1 != u2 and compose(u1, u2) is not None:
                law.fail(f"{u1!r} * {u2!r}")
    return groups


def _across_prefixes(rep: LemmaReport, group: str, reps: list, compose: Callable):
    """Elements with different prefixes never compose."""
    with _Law(rep, group, "different pasts never compose") as law:
        for x, y in itertools.permutations(reps, 2):
            if _past(x) == _past(y):
                continue
            law.n += 1
            if compose(x, y) is not None:
                law.fail(f"{x!r} * {y!r}")


def _past(x):
    h = History.of(x)
    return h.states[:-1], h.labels


def _comp_unit(c: Computation) -> Computation:
    return Computation(c.prefix + (c.last.unit(),))


def _hist_unit(h: History) -> History:
    return History(h.states[:-1] + (h.last.unit(),), h.labels)


def algebra_suite(rep: LemmaReport, states: list, bound: int, labels=("c",)):
    with_frac = enumerate_states(UniverseConfig(
        addresses=("a", "b"), values=(0, 1), denominator=2, fractions=(1, 2),
        heap_shape="partial", obligations=("o",), max_obligations=1, local_vars=("x",)))
    _algebra_laws(rep, "states", [with_frac], compose_state, lambda s: s.unit(),
                  lambda s: s.is_unit())

    short = [Computation(p) for n in (1, 2) for p in itertools.product(states[:3], repeat=n)]

    def comps():
        for n in range(bound):
            for pre in itertools.product(states, repeat=n):
                yield [Computation(pre + (s,)) for s in states]
    _algebra_laws(rep, "computations", comps(), compose_computation, _comp_unit,
                  lambda c: c.last.is_unit(), short)
    _across_prefixes(rep, "computations", short, compose_computation)

    steps = (None,) + tuple(labels)

    def hists():
        for n in range(bound - 1):
            for pre in itertools.product(states, repeat=n):
                for labs in itertools.product(steps, repeat=n):
                    yield [History(pre + (s,), labs) for s in states]
    short = [History(c.states, labs) for c in short
             for labs in itertools.product(steps, repeat=len(c) - 1)]
    _algebra_laws(rep, "histories", hists(), compose_history, _hist_unit,
                  lambda h: h.last.is_unit(), short)
    _across_prefixes(rep, "histories", short, compose_history)

    with _Law(rep, "states", "receipt algebra: snapshot * receipt = receipt") as law:
        from .sepalg import RCT, SNAP
        r, snap = Ghost.make(receipts={0: (RCT, "t")}), Ghost.make(receipts={0: (SNAP, "t")})
        law.n += 2
        if snap.compose(r) != r or r.compose(snap) != r:
            law.fail("snapshot * receipt")
    with _Law(rep, "states", "receipt algebra: receipt * receipt undefined") as law:
        law.n += 1
        if r.compose(r) is not None:
            law.fail("receipt * receipt")


# ---------------------------------------------------------------- predicate laws

# constants are covered by the unary clauses
BINARY_SKIP = ("false", "a->_")


def sl_operator_suite(rep: LemmaReport, fam: dict, states: list, comps: list):
    g = "SL operators"
    names = list(fam)
    pairs = list(itertools.product(names, repeat=2))
    core = [n for n in names if n not in BINARY_SKIP]
    cpairs = list(itertools.product(core, repeat=2))
    for op, sop, top in (("intersection", sp_and, And), ("union", sp_or, Or),
                         ("separating conjunction", sp_star, Star)):
        with _Law(rep, g, f"Now(p {op} q) = Now(p) {op} Now(q)") as law:
            for a, b in cpairs:
                _same(law, Now(sop(fam[a], fam[b])), top(Now(fam[a]), Now(fam[b])), comps,
                      f"p={a}, q={b}")
                if law.witness:
                    break
    with _Law(rep, g, "Now(p -* q) = Now(p) -* Now(q)") as law:
        for a, b in cpairs:
            _same(law, Now(sp_wand(fam[a], fam[b], states)),
                  Wand(Now(fam[a]), Now(fam[b]), tuple(states)), comps, f"p={a}, q={b}")
            if law.witness:
                break
    with _Law(rep, g, "Now(not p) = not Now(p)") as law:
        for a in names:
            _same(law, Now(sp_not(fam[a])), Not(Now(fam[a])), comps, f"p={a}")
    with _Law(rep, g, "false = Now(false)") as law:
        _same(law, FF, Now(FALSE_S), comps, "false")
    with _Law(rep, g, "true = Now(true)") as law:
        _same(law, TT, Now(TRUE_S), comps, "true")
    for lift in ("Now", "Past"):
        L = Now if lift == "Now" else Past
        with _Law(rep, g, f"{lift}(p) <= {lift}(q) iff p <= q") as law:
            for a, b in pairs:
                law.n += 1
                sem = all(L(fam[b]).oracle(c) for c in comps if L(fam[a]).oracle(c))
                if sem != _subset(fam[a], fam[b], states):
                    law.fail(f"p={a}, q={b}")
    with _Law(rep, g, "Past(p and q) <= Past(p) and Past(q)") as law:
        for a, b in cpairs:
            _incl(law, Past(sp_and(fam[a], fam[b])), And(Past(fam[a]), Past(fam[b])), comps,
                  f"p={a}, q={b}")
    with _Law(rep, g, "Past(p or q) = Past(p) or Past(q)") as law:
        for a, b in cpairs:
            _same(law, Past(sp_or(fam[a], fam[b])), Or(Past(fam[a]), Past(fam[b])), comps,
                  f"p={a}, q={b}")


def precise_intuitionistic_suite(rep: LemmaReport, fam: dict, states: list, comps: list):
    g = "intuitionism"
    with _Law(rep, g, "p intuitionistic implies Now(p) intuitionistic") as law:
        for a, p in fam.items():
            if _intuitionistic_state(p, states):
                _incl(law, Star(Now(p), TT), Now(p), comps, f"p={a}")
    with _Law(rep, g, "Past(p) is intuitionistic") as law:
        for a, p in fam.items():
            _incl(law, Star(Past(p), TT), Past(p), comps, f"p={a}")


def interplay_family(fam: dict) -> tuple[dict, dict, dict]:
    a0, b1, ea = fam["a->0"], fam["b->1"], fam["exactly a->1"]
    bs = {"Now(a->0)": Now(a0), "Now(exactly a->1)": Now(ea), "Past(b->1)": Past(b1),
          "Now(a->0) and Past(b->1)": And(Now(a0), Past(b1))}
    cs = {"Now(emp)": Now(fam["emp"]), "Now(a->_)": Now(fam["a->_"]), "true": TT}
    os_ = {k: fam[k] for k in ("a->0", "exactly a->1")}
    return bs, cs, os_


def interplay_suite(rep: LemmaReport, fam: dict, comps: list):
    bs, cs, os_ = interplay_family(fam)
    with _Law(rep, "interplay", "(b * c) and Past(o) = (b and Past(o)) * c") as law:
        for (bn, b), (cn, c), (on, o) in itertools.product(bs.items(), cs.items(), os_.items()):
            _same(law, And(Star(b, c), Past(o)), Star(And(b, Past(o)), c), comps,
                  f"b={bn}, c={cn}, o={on}")
            if law.witness:
                break


# ---------------------------------------------------------------- LocCom

def primitive_commands(u: UniverseConfig) -> list:
    a, b = u.addresses[0], u.addresses[-1]
    v0, v1 = u.values[0], u.values[-1]
    return [
        skip(label="skip"),
        read(a, "x", label="read"),
        write(a, v1, label="write"),
        faa(a, 1, label="faa"),
        cmpx(a, v0, v1, "x", label="cmpx"),
        assume(pt(b, v1), label="assume"),
        assume(lambda env: env.get("x") == v0, label="assume-local"),
        assign("x", v1, label="assign"),
        alloc("x", (a, b), value=v0, pick="any", label="alloc"),
        lock(a, label="lock"),
        unlock(a, label="unlock"),
        ghost_only(GhostOp(trade=("o", "op", None), snapshot=False), label="trade"),
        atomic(read(a, "x"), write(b, v0), label="atomic"),
    ]


def _loccom_states(u: UniverseConfig) -> list:
    base = enumerate_states(UniverseConfig(addresses=u.addresses, values=u.values,
                                           denominator=1, heap_shape="partial",
                                           local_vars=("x",), var_values=u.values))
    g = Ghost.make(obligations=("o",))
    return base + [State(s.gheap, s.gghost, s.lheap, g, s.vars) for s in base]


def _with_vars(s: State, vars_) -> State:
    return State(s.gheap, s.gghost, s.lheap, s.lghost, vars_)


def loccom_check(cmd, states: list, law: _Law | None = None):
    """Pointwise locality: if ``cmd`` is enabled and safe on ``s1`` then each
    effect on ``s1 * s2`` is an effect on ``s1`` composed with the stuttering
    frame ``s2``.  Returns a witness or ``None``."""
    for s in states:
        for s1, s2 in split_state(s):
            small = exec_command(cmd, s1)
            if not small or ABORT in small:
                continue
            if law is not None:
                law.n += 1
            for t in exec_command(cmd, s):
                if t is ABORT:
                    return f"{cmd.label}: {s1!r} safe but {s!r} aborts"
                if not any(compose_state(t1, _with_vars(s2, t1.vars)) == t for t1 in small):
                    return f"{cmd.label}: {s!r} -> {t!r} not framed from {s1!r}"
    return None


def loccom_suite(rep: LemmaReport, u: UniverseConfig):
    states = _loccom_states(u)
    for cmd in primitive_commands(u):
        with _Law(rep, "LocCom", f"locality of {cmd.label}") as law:
            w = loccom_check(cmd, states, law)
            if w:
                law.fail(w)


# ---------------------------------------------------------------- history predicate

def _lang_leq(S1: Program, S2: Program, labels, n=4) -> bool:
    for k in range(n + 1):
        for w in itertools.product(labels, repeat=k):
            if S1.accepts(w) and not S2.accepts(w):
                return False
    return True


def _histories(states, labels, max_len):
    steps = (None,) + tuple(labels)
    return [History(tuple(ss), labs) for n in range(1, max_len + 1)
            for ss in itertools.product(states, repeat=n)
            for labs in itertools.product(steps, repeat=n - 1)]


def history_suite(rep: LemmaReport, fam: dict, states: list, bound: int):
    """Properties (i), (iii) and (v) range over histories of length at most
    ``bound`` recording ``c1``; (ii) appends a command, so it uses histories
    one shorter over both ``c1`` and ``c2``."""
    g = "history predicate"
    c1, c2 = write("a", 1, label="c1"), write("b", 0, label="c2")
    progs = {"eps": Skip(), "c1": Com(c1), "c1;c1": seq(c1, c1), "(c1)*": loop(c1),
             "c1;(c1)*": seq(c1, loop(c1))}
    hists = _histories(states, ("c1",), bound)
    short = _histories(states, ("c1", "c2"), bound - 1)
    pnames = ["a->0", "a->_", "true", "exactly a->1", "emp"]

    with _Law(rep, g, "(i) monotone in both arguments") as law:
        ppairs = [("a->0", "a->_"), ("exactly a->1", "a->_"), ("a->_", "true")]
        spairs = [("eps", "(c1)*"), ("c1;c1", "c1;(c1)*"), ("c1;(c1)*", "(c1)*")]
        for (p1n, p2n), (s1n, s2n) in itertools.product(ppairs, spairs):
            if not (_subset(fam[p1n], fam[p2n], states)
                    and _lang_leq(progs[s1n], progs[s2n], ("c1",))):
                law.fail(f"instance is not ordered: {p1n}, {s1n}, {p2n}, {s2n}")
                break
            _incl(law, Hist(fam[p1n], progs[s1n]), Hist(fam[p2n], progs[s2n]), hists,
                  f"p1={p1n} S1={s1n} p2={p2n} S2={s2n}")
            if law.witness:
                break
    with _Law(rep, g, "(ii) exec(c)(Hist(p, S)) <= Hist(p, S;c)") as law:
        sprogs = dict(progs, **{"c1+c2": choice(c1, c2), "(c1+c2)*": loop(choice(c1, c2))})
        for pn, (sn, S), c in itertools.product(pnames, sprogs.items(), (c1, c2)):
            H, H2 = Hist(fam[pn], S), Hist(fam[pn], seq(S, c))
            for h in short:
                if not H.oracle(h):
                    continue
                for t in exec_command(c, h.last):
                    if t is ABORT:
                        continue
                    law.n += 1
                    if not H2.oracle(h.extend(t, c.label)):
                        law.fail(f"p={pn} S={sn} c={c.label}: {h!r}")
    with _Law(rep, g, "(iii) interference-free") as law:
        hshort = [h for h in hists if len(h) < bound]
        for pn, (sn, S) in itertools.product(pnames, progs.items()):
            H = Hist(fam[pn], S)
            for h in hshort:
                if not H.oracle(h):
                    continue
                for t in states:
                    law.n += 1
                    if not H.oracle(h.extend(t, None)):
                        law.fail(f"p={pn} S={sn}: {h!r} -> {t!r}")
    with _Law(rep, g, "(iv) not frameable") as law:
        H = Hist(fam["a->0"], progs["c1"])
        found = False
        for h in hists:
            if len(h) >= bound:
                continue
            law.n += 1
            if H.oracle(h) and not H.oracle(h.extend(h.last, "c1")):
                found = True
                break
        if not found:
            law.fail("no history loses membership under a recorded stutter")
    with _Law(rep, g, "(v) p intuitionistic implies Hist(p, S) intuitionistic") as law:
        for pn, sn in itertools.product(pnames, ("c1", "(c1)*")):
            if not _intuitionistic_state(fam[pn], states):
                continue
            _incl(law, Star(Hist(fam[pn], progs[sn]), TT), Hist(fam[pn], progs[sn]), hists,
                  f"p={pn} S={sn}")


# ---------------------------------------------------------------- driver

SUITES = ("algebra", "sl-operators", "intuitionism", "interplay", "loccom", "history")


def run_lemma_suite(universe: UniverseConfig | None = None, bound: int = 4,
                    suites: Iterable[str] = SUITES, history_bound: int | None = None) -> LemmaReport:
    """Run the property suites exhaustively over ``universe`` with
    computations of length at most ``bound``."""
    t0 = time.perf_counter()
    u = universe or small_universe()
    states = enumerate_states(u)
    fam = state_family(u)
    rep = LemmaReport(bound=bound, states=len(states))
    comps = [History(c, (None,) * (n - 1)) for n in range(1, bound + 1)
             for c in itertools.product(states, repeat=n)]
    suites = tuple(suites)
    if "algebra" in suites:
        algebra_suite(rep, states, bound)
    if "sl-operators" in suites:
        sl_operator_suite(rep, fam, states, comps)
    if "intuitionism" in suites:
        precise_intuitionistic_suite(rep, fam, states, comps)
    if "interplay" in suites:
        interplay_suite(rep, fam, comps)
    if "loccom" in suites:
        loccom_suite(rep, u)
    if "history" in suites:
        history_suite(rep, fam, states, history_bound or bound)
    rep.seconds = time.perf_counter() - t0
    return rep
