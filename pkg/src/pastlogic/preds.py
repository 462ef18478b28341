"""State predicates and temporal (computation/history) predicates.

Every temporal predicate has two evaluators:

* ``oracle(x)`` follows the set-theoretic definitions literally, enumerating
  splittings and extensions where needed.
* ``nf(A)`` computes a disjunctive normal form whose atoms other than the
  current-state test only depend on the shared past, so that separating
  conjunction distributes clause-wise.

``includes`` decides inclusions at a bound with a profile abstraction of the
past (which past atoms have fired, which history automata are running).  The
abstraction is exact, so it agrees with brute-force enumeration; the test
suite checks that it does.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .sepalg import (ABORT, Computation, History, State, compose_state,
                     split_state)


class BudgetExceeded(RuntimeError):
    pass


# ---------------------------------------------------------------- state level

class StatePred:
    """A named total predicate on states."""

    __slots__ = ("name", "fn", "abort_absorbing", "_cache")

    def __init__(self, name: str, fn: Callable[[State], bool], abort_absorbing=False,
                 cache=False):
        self.name = name
        self.fn = fn
        self.abort_absorbing = abort_absorbing
        self._cache = {} if cache else None

    def __call__(self, s) -> bool:
        if s is ABORT:
            return self.abort_absorbing
        c = self._cache
        if c is None:
            return bool(self.fn(s))
        r = c.get(s)
        if r is None:
            r = c[s] = bool(self.fn(s))
        return r

    def __and__(self, other):
        return sp_and(self, other)

    def __or__(self, other):
        return sp_or(self, other)

    def __invert__(self):
        return sp_not(self)

    def __mul__(self, other):
        return sp_star(self, other)

    def __repr__(self):
        return self.name


TRUE_S = StatePred("true", lambda s: True, abort_absorbing=True)
FALSE_S = StatePred("false", lambda s: False)
EMP_S = StatePred("emp", lambda s: s.is_unit())


def sp(name: str, fn) -> StatePred:
    return StatePred(name, fn)


def sp_and(*ps: StatePred) -> StatePred:
    ps = tuple(p for p in ps if p is not TRUE_S)
    if not ps:
        return TRUE_S
    if len(ps) == 1:
        return ps[0]
    if any(p is FALSE_S for p in ps):
        return FALSE_S
    return StatePred("(" + " & ".join(p.name for p in ps) + ")",
                     lambda s: all(p(s) for p in ps),
                     all(p.abort_absorbing for p in ps))


def sp_or(*ps: StatePred) -> StatePred:
    ps = tuple(p for p in ps if p is not FALSE_S)
    if not ps:
        return FALSE_S
    if len(ps) == 1:
        return ps[0]
    return StatePred("(" + " | ".join(p.name for p in ps) + ")",
                     lambda s: any(p(s) for p in ps),
                     any(p.abort_absorbing for p in ps))


def sp_not(p: StatePred) -> StatePred:
    if p is TRUE_S:
        return FALSE_S
    if p is FALSE_S:
        return StatePred("true", lambda s: True)
    return StatePred(f"~{p.name}", lambda s: not p(s), not p.abort_absorbing)


def sp_star(p: StatePred, q: StatePred) -> StatePred:
    """Separating conjunction by enumerating splittings of the state."""
    if p is EMP_S:
        return q
    if q is EMP_S:
        return p

    def fn(s):
        return any(p(a) and q(b) for a, b in split_state(s))
    return StatePred(f"({p.name} * {q.name})", fn, cache=True)


def sp_wand(p: StatePred, q: StatePred, universe: Sequence[State]) -> StatePred:
    """Separating implication relative to a finite universe of frames."""
    def fn(s):
        for t in universe:
            st = compose_state(s, t)
            if st is not None and p(t) and not q(st):
                return False
        return True
    return StatePred(f"({p.name} -* {q.name})", fn, cache=True)


def sp_exists(name: str, domain: Iterable, body: Callable) -> StatePred:
    preds = [body(v) for v in domain]
    return StatePred(name, lambda s: any(p(s) for p in preds))


# builtin state predicates

def _heap(s, where):
    return s.gheap if where == "g" else s.lheap


def pt(addr, value=None, frac=None, where="g") -> StatePred:
    """Points-to: ``addr`` holds ``value`` with at least ``frac`` permission.

    This form is intuitionistic; ``exact_heap`` gives the precise variant.
    """
    def fn(s):
        c = _heap(s, where).get(addr)
        if c is None:
            return False
        if frac is not None and c[0] < frac:
            return False
        return value is None or c[1] == value
    shown = "_" if value is None else repr(value)
    tag = "" if frac is None else f"[{frac}]"
    return StatePred(f"{addr}{tag}|->{shown}", fn)


def exact_heap(cells: dict, where="g") -> StatePred:
    """The heap is exactly the given full-permission cells, ghost empty."""
    def fn(s):
        h = _heap(s, where)
        other = s.lheap if where == "g" else s.gheap
        if len(other) or not s.gghost.is_empty() or not s.lghost.is_empty():
            return False
        return len(h) == len(cells) and all(
            a in h and h[a] == (h.denom, v) for a, v in cells.items())
    return StatePred("exactly{" + ",".join(f"{a}->{v}" for a, v in cells.items()) + "}", fn)


def var_is(name, value) -> StatePred:
    return StatePred(f"{name}={value!r}", lambda s: s.var(name) == value)


def clock_is(root, value) -> StatePred:
    return StatePred(f"Clock({root})={value}", lambda s: s.gghost.clock(root) == value
                     or s.lghost.clock(root) == value)


def has_obligation(tag) -> StatePred:
    return StatePred(f"OBL{tag!r}", lambda s: tag in s.lghost.obligations
                     or tag in s.gghost.obligations)


# ---------------------------------------------------------------- temporal level

class TempPred:
    """Base class of temporal predicate terms."""

    def oracle(self, x) -> bool:
        raise NotImplementedError

    def member(self, x) -> bool:
        return nf(self).member(History.of(x))

    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __invert__(self):
        return Not(self)

    def __mul__(self, other):
        return Star(self, other)


@dataclass(frozen=True, eq=False)
class TrueT(TempPred):
    def oracle(self, x):
        return True

    def __repr__(self):
        return "TRUE"


@dataclass(frozen=True, eq=False)
class FalseT(TempPred):
    def oracle(self, x):
        return False

    def __repr__(self):
        return "FALSE"


TT = TrueT()
FF = FalseT()


@dataclass(frozen=True, eq=False)
class Now(TempPred):
    p: StatePred

    def oracle(self, x):
        return self.p(History.of(x).last)

    def __repr__(self):
        return f"Now({self.p.name})"


@dataclass(frozen=True, eq=False)
class Past(TempPred):
    p: StatePred

    def oracle(self, x):
        h = History.of(x)
        return any(self.p(s) for s in h.states[:-1])

    def __repr__(self):
        return f"Past({self.p.name})"


@dataclass(frozen=True, eq=False)
class Hist(TempPred):
    """Some suffix starts in ``p`` and the commands recorded since form a word
    of the regular language of ``prog``."""
    p: StatePred
    prog: object

    def oracle(self, x):
        h = History.of(x)
        return any(self.p(h.states[i]) and self.prog.accepts(h.commands_since(i))
                   for i in range(len(h)))

    def __repr__(self):
        return f"Hist({self.p.name}, {self.prog})"


def WPast(p: StatePred) -> TempPred:
    return Or(Now(p), Past(p))


@dataclass(frozen=True, eq=False)
class And(TempPred):
    a: TempPred
    b: TempPred

    def oracle(self, x):
        return self.a.oracle(x) and self.b.oracle(x)

    def __repr__(self):
        return f"({self.a!r} & {self.b!r})"


@dataclass(frozen=True, eq=False)
class Or(TempPred):
    a: TempPred
    b: TempPred

    def oracle(self, x):
        return self.a.oracle(x) or self.b.oracle(x)

    def __repr__(self):
        return f"({self.a!r} | {self.b!r})"


@dataclass(frozen=True, eq=False)
class Not(TempPred):
    a: TempPred

    def oracle(self, x):
        return not self.a.oracle(x)

    def __repr__(self):
        return f"~{self.a!r}"


def Implies(a: TempPred, b: TempPred) -> TempPred:
    return Or(Not(a), b)


def _replace_last(h: History, s) -> History:
    out = object.__new__(History)
    object.__setattr__(out, "states", h.states[:-1] + (s,))
    object.__setattr__(out, "labels", h.labels)
    return out


@dataclass(frozen=True, eq=False)
class Star(TempPred):
    a: TempPred
    b: TempPred

    def oracle(self, x):
        h = History.of(x)
        return any(self.a.oracle(_replace_last(h, s1)) and self.b.oracle(_replace_last(h, s2))
                   for s1, s2 in split_state(h.last))

    def __repr__(self):
        return f"({self.a!r} * {self.b!r})"


@dataclass(frozen=True, eq=False)
class Wand(TempPred):
    """Separating implication; frames range over ``universe``."""
    a: TempPred
    b: TempPred
    universe: tuple = ()

    def oracle(self, x):
        h = History.of(x)
        for t in self.universe:
            st = compose_state(h.last, t)
            if st is None:
                continue
            if self.a.oracle(_replace_last(h, t)) and not self.b.oracle(_replace_last(h, st)):
                return False
        return True

    def __repr__(self):
        return f"({self.a!r} -* {self.b!r})"


class Exists(TempPred):
    """Existential closure over logical variables with finite domains."""

    def __init__(self, names: Sequence[str], domains: Sequence[Iterable], body: Callable,
                 label: str | None = None):
        self.names = tuple(names)
        self.domains = tuple(tuple(d) for d in domains)
        self.body = body
        self.label = label
        self._inst = None

    def instances(self) -> list[TempPred]:
        if self._inst is None:
            self._inst = [self.body(dict(zip(self.names, vals)))
                          for vals in itertools.product(*self.domains)]
        return self._inst

    def oracle(self, x):
        return any(a.oracle(x) for a in self.instances())

    def __repr__(self):
        return self.label or f"(exists {' '.join(self.names)}. ...)"


class Named(TempPred):
    """A temporal predicate with a display name."""

    def __init__(self, name: str, body: TempPred):
        self.name = name
        self.body = body

    def oracle(self, x):
        return self.body.oracle(x)

    def __repr__(self):
        return self.name


# ---------------------------------------------------------------- normal form

@dataclass(frozen=True)
class Atom:
    """A past-determined atom; ``kind`` is past, hist or opaque."""
    kind: str
    p: StatePred | None = None
    prog: object = None
    term: TempPred | None = None
    neg: bool = False

    def negate(self) -> "Atom":
        return Atom(self.kind, self.p, self.prog, self.term, not self.neg)


@dataclass(frozen=True)
class Clause:
    now: StatePred
    atoms: frozenset = frozenset()

    @property
    def opaque(self) -> bool:
        return any(a.kind == "opaque" for a in self.atoms)


_NF_LIMIT = 4096


class NF:
    """A disjunction of clauses."""

    def __init__(self, clauses: list[Clause]):
        self.clauses = clauses

    @property
    def opaque(self) -> bool:
        return any(c.opaque for c in self.clauses)

    def atoms(self) -> set:
        return {a for c in self.clauses for a in c.atoms}

    def member(self, h: History) -> bool:
        last = h.last
        for c in self.clauses:
            if not c.now(last):
                continue
            if all(_atom_eval(a, h) for a in c.atoms):
                return True
        return False

    def eval_profile(self, s, prof: "Profile") -> bool:
        for c in self.clauses:
            if c.now(s) and all(prof.atom(a) for a in c.atoms):
                return True
        return False

    def __repr__(self):
        return " | ".join(f"{c.now.name}" + "".join(f" & {'~' if a.neg else ''}{a.kind}({a.p or a.term})"
                                                     for a in c.atoms) for c in self.clauses)


def _atom_eval(a: Atom, h: History) -> bool:
    if a.kind == "past":
        r = any(a.p(s) for s in h.states[:-1])
    elif a.kind == "hist":
        r = any(a.p(h.states[i]) and a.prog.accepts(h.commands_since(i))
                for i in range(len(h) - 1))
    else:
        r = a.term.oracle(h)
    return r != a.neg


def _opaque(term: TempPred) -> NF:
    return NF([Clause(TRUE_S, frozenset([Atom("opaque", term=term)]))])


def _conj(c1: Clause, c2: Clause) -> Clause | None:
    now = sp_and(c1.now, c2.now)
    atoms = c1.atoms | c2.atoms
    for a in atoms:
        if a.negate() in atoms:
            return None
    return Clause(now, atoms)


def _nf_and(n1: NF, n2: NF) -> NF:
    out = []
    for c1 in n1.clauses:
        for c2 in n2.clauses:
            c = _conj(c1, c2)
            if c is not None and c.now is not FALSE_S:
                out.append(c)
    return NF(out)


def _nf_not(n: NF, term: TempPred) -> NF:
    if n.opaque:
        return _opaque(Not(term))
    result = NF([Clause(TRUE_S)])
    for c in n.clauses:
        neg = [Clause(sp_not(c.now))] + [Clause(TRUE_S, frozenset([a.negate()])) for a in c.atoms]
        result = _nf_and(result, NF(neg))
        if len(result.clauses) > _NF_LIMIT:
            return _opaque(Not(term))
    return result


_NF_CACHE: dict[int, tuple[TempPred, NF]] = {}


def nf(t: TempPred) -> NF:
    """Normal form of ``t`` (memoised per term object)."""
    hit = _NF_CACHE.get(id(t))
    if hit is not None and hit[0] is t:
        return hit[1]
    r = _nf(t)
    _NF_CACHE[id(t)] = (t, r)
    return r


def _nf(t: TempPred) -> NF:
    if isinstance(t, TrueT):
        return NF([Clause(TRUE_S)])
    if isinstance(t, FalseT):
        return NF([])
    if isinstance(t, Now):
        return NF([Clause(t.p)])
    if isinstance(t, Past):
        return NF([Clause(TRUE_S, frozenset([Atom("past", t.p)]))])
    if isinstance(t, Hist):
        cl = [Clause(TRUE_S, frozenset([Atom("hist", t.p, t.prog)]))]
        if t.prog.nullable():
            cl.append(Clause(t.p))
        return NF(cl)
    if isinstance(t, And):
        return _nf_and(nf(t.a), nf(t.b))
    if isinstance(t, Or):
        return NF(nf(t.a).clauses + nf(t.b).clauses)
    if isinstance(t, Not):
        return _nf_not(nf(t.a), t.a)
    if isinstance(t, Star):
        na, nb = nf(t.a), nf(t.b)
        if na.opaque or nb.opaque:
            return _opaque(t)
        out = []
        for c1 in na.clauses:
            for c2 in nb.clauses:
                c = _conj(Clause(TRUE_S, c1.atoms), Clause(TRUE_S, c2.atoms))
                if c is not None:
                    out.append(Clause(sp_star(c1.now, c2.now), c.atoms))
        return NF(out)
    if isinstance(t, Wand):
        return _opaque(t)
    if isinstance(t, Exists):
        out = []
        for inst in t.instances():
            out.extend(nf(inst).clauses)
        return NF(out)
    if isinstance(t, Named):
        return nf(t.body)
    raise TypeError(f"no normal form for {t!r}")


# ---------------------------------------------------------------- profiles

class Profile:
    """Abstraction of a strict prefix: which past atoms have fired and which
    positions the history automata are in."""

    __slots__ = ("past", "hist", "_key")

    def __init__(self, past: frozenset, hist: tuple):
        self.past = past
        self.hist = hist
        self._key = (past, hist)

    def atom(self, a: Atom) -> bool:
        if a.kind == "past":
            r = a.p in self.past
        elif a.kind == "hist":
            r = False
            for (p, prog), q in self.hist:
                if p is a.p and prog is a.prog:
                    r = prog.accepting(q)
                    break
        else:
            raise ValueError("opaque atoms have no profile semantics")
        return r != a.neg

    def __eq__(self, other):
        return self._key == other._key

    def __hash__(self):
        return hash(self._key)


class ProfileSpace:
    """Profiles over a fixed set of past predicates and history atoms."""

    def __init__(self, past_preds: Iterable[StatePred], hist_atoms: Iterable[tuple]):
        self.past_preds = tuple(dict.fromkeys(past_preds))
        self.hist_atoms = tuple(dict.fromkeys(hist_atoms))
        self.empty = Profile(frozenset(), tuple((h, frozenset()) for h in self.hist_atoms))

    @classmethod
    def for_preds(cls, *nfs: NF) -> "ProfileSpace":
        past, hist = [], []
        for n in nfs:
            for a in n.atoms():
                if a.kind == "past":
                    past.append(a.p)
                elif a.kind == "hist":
                    hist.append((a.p, a.prog))
        return cls(past, hist)

    def step(self, prof: Profile, s, label=None) -> Profile:
        """Profile after appending state ``s`` to the prefix then taking a
        transition labelled ``label``."""
        past = prof.past | frozenset(p for p in self.past_preds if p(s))
        hist = []
        for (p, prog), q in prof.hist:
            if p(s):
                q = q | {prog.INIT}
            if label is not None:
                q = prog.delta(q, label)
            hist.append(((p, prog), q))
        return Profile(past, tuple(hist))

    def of_history(self, h: History) -> Profile:
        prof = self.empty
        for s, l in zip(h.states[:-1], h.labels):
            prof = self.step(prof, s, l)
        return prof

    def reachable(self, states: Sequence, labels: Sequence, bound: int | None,
                  budget: int = 2_000_000) -> dict:
        """Realizable profiles of strict prefixes of length < bound, with a
        witness prefix for each."""
        wit = {self.empty: ((), ())}
        frontier = [self.empty]
        steps = [None] + [l for l in labels]
        if not self.hist_atoms:
            steps = [None]
        depth = 0
        # group states by their effect on profiles to keep this cheap
        reps = {}
        for s in states:
            key = (tuple(p(s) for p in self.past_preds),
                   tuple(p(s) for (p, _) in self.hist_atoms))
            reps.setdefault(key, s)
        reps = list(reps.values())
        work = 0
        while frontier and (bound is None or depth < bound - 1):
            nxt = []
            for prof in frontier:
                ws, wl = wit[prof]
                for s in reps:
                    for l in steps:
                        work += 1
                        if work > budget:
                            raise BudgetExceeded("profile enumeration budget exhausted")
                        np = self.step(prof, s, l)
                        if np not in wit:
                            wit[np] = (ws + (s,), wl + (l,))
                            nxt.append(np)
            frontier = nxt
            depth += 1
        return wit


# ---------------------------------------------------------------- inclusion

@dataclass
class InclusionReport:
    holds: bool
    witness: object = None
    bound: int | None = None
    method: str = "profile"
    checked: int = 0
    note: str = ""

    def __bool__(self):
        return self.holds

    def describe(self) -> str:
        b = "unbounded" if self.bound is None else f"length<={self.bound}"
        if self.holds:
            return f"holds ({b}, {self.method}, {self.checked} checks)"
        return f"fails ({b}, {self.method}): {self.witness!r}" + (f" [{self.note}]" if self.note else "")


def _witness_history(prefix: tuple, s) -> History:
    ws, wl = prefix
    return History(ws + (s,), wl)


class _Profiles:
    """Caches realizable prefix profiles per atom set."""

    def __init__(self, states, labels, bound, budget):
        self.states = states
        self.labels = labels
        self.bound = bound
        self.budget = budget
        self.cache = {}

    def get(self, atoms: frozenset):
        past = tuple(sorted({a.p for a in atoms if a.kind == "past"}, key=id))
        hist = tuple(sorted({(a.p, a.prog) for a in atoms if a.kind == "hist"},
                            key=lambda t: (id(t[0]), id(t[1]))))
        key = (past, hist)
        hit = self.cache.get(key)
        if hit is None:
            space = ProfileSpace(past, hist)
            hit = (space, space.reachable(self.states, self.labels, self.bound, self.budget))
            self.cache[key] = hit
        return hit


def _atoms_of(clauses) -> frozenset:
    return frozenset(a for c in clauses for a in c.atoms)


def _holds(clauses, prof) -> bool:
    return any(all(prof.atom(a) for a in c.atoms) for c in clauses)


def includes(A: TempPred, B: TempPred, states: Sequence, bound: int | None = None,
             labels: Sequence = (), budget: int = 2_000_000) -> InclusionReport:
    """Decide ``A ⊆ B`` over all computations (histories, when ``labels`` is
    non-empty) of length at most ``bound`` (any length when ``None``) whose
    states come from ``states``."""
    na, nb = nf(A), nf(B)
    if na.opaque or nb.opaque:
        return includes_bruteforce(A, B, states, bound or 3, labels, budget)
    pc = _Profiles(states, labels, bound, budget)
    n = 0
    for s in states:
        la = [c for c in na.clauses if c.now(s)]
        if not la:
            continue
        lb = [c for c in nb.clauses if c.now(s)]
        space, profs = pc.get(_atoms_of(la) | _atoms_of(lb))
        for prof, pre in profs.items():
            n += 1
            if _holds(la, prof) and not _holds(lb, prof):
                return InclusionReport(False, _witness_history(pre, s), bound, "profile", n)
    return InclusionReport(True, None, bound, "profile", n)


def includes_bruteforce(A: TempPred, B: TempPred, states: Sequence, bound: int,
                        labels: Sequence = (), budget: int = 5_000_000,
                        use_oracle: bool = True) -> InclusionReport:
    """Literal enumeration; the reference against which ``includes`` is tested."""
    from .sepalg import enumerate_histories
    n = 0
    for h in enumerate_histories(states, labels, bound):
        n += 1
        if n > budget:
            raise BudgetExceeded("enumeration budget exhausted")
        a = A.oracle(h) if use_oracle else A.member(h)
        if a and not (B.oracle(h) if use_oracle else B.member(h)):
            return InclusionReport(False, h, bound, "enumeration", n)
    return InclusionReport(True, None, bound, "enumeration", n)


def equivalent(A: TempPred, B: TempPred, states, bound=None, labels=()) -> InclusionReport:
    r = includes(A, B, states, bound, labels)
    if not r.holds:
        return r
    return includes(B, A, states, bound, labels)


def image_includes(A: TempPred, succ: Callable, B: TempPred, states: Sequence,
                   bound: int | None = None, labels: Sequence = (), label=None,
                   abort_ok: bool = False, budget: int = 2_000_000) -> InclusionReport:
    """Check that every one-step extension of a member of ``A`` lies in ``B``.

    ``succ(s)`` yields successor states (``ABORT`` included).  The appended
    transition carries ``label``.  ``A`` ranges over computations of length
    below ``bound``.
    """
    na, nb = nf(A), nf(B)
    if na.opaque or nb.opaque:
        from .sepalg import enumerate_histories
        n = 0
        for h in enumerate_histories(states, labels, (bound or 4) - 1):
            if not A.oracle(h):
                continue
            for t in succ(h.last):
                n += 1
                if t is ABORT:
                    if abort_ok:
                        continue
                    return InclusionReport(False, h.extend(t, label), bound, "enumeration", n,
                                           note="abort")
                h2 = h.extend(t, label)
                if not B.oracle(h2):
                    return InclusionReport(False, h2, bound, "enumeration", n)
        return InclusionReport(True, None, bound, "enumeration", n)
    pc = _Profiles(states, labels, None if bound is None else bound - 1, budget)
    n = 0
    for s in states:
        la = [c for c in na.clauses if c.now(s)]
        if not la:
            continue
        succs = list(succ(s))
        for t in succs:
            if t is ABORT:
                if abort_ok:
                    continue
                space, profs = pc.get(_atoms_of(la))
                for prof, pre in profs.items():
                    if _holds(la, prof):
                        return InclusionReport(False, _witness_history(pre, s).extend(t, label),
                                               bound, "profile", n, note="abort")
                continue
            lb = [c for c in nb.clauses if c.now(t)]
            space, profs = pc.get(_atoms_of(la) | _atoms_of(lb))
            for prof, pre in profs.items():
                n += 1
                if not _holds(la, prof):
                    continue
                nprof = space.step(prof, s, label)
                if not _holds(lb, nprof):
                    return InclusionReport(False, _witness_history(pre, s).extend(t, label),
                                           bound, "profile", n)
    return InclusionReport(True, None, bound, "profile", n)


def sep_conj(A: TempPred, B: TempPred) -> TempPred:
    return Star(A, B)


def is_intuitionistic(p, states: Sequence, bound: int = 3) -> bool:
    """``p * true ⊆ p`` over the universe."""
    if isinstance(p, StatePred):
        for s in states:
            if not p(s):
                continue
            for t in states:
                st = compose_state(s, t)
                if st is not None and not p(st):
                    return False
        return True
    return includes(Star(p, Now(TRUE_S)), p, states, bound).holds


def is_frameable(A: TempPred, states: Sequence, bound: int = 3, labels=()) -> bool:
    """``σ.s ∈ A`` implies ``σ.s.s ∈ A`` (stuttering)."""
    return image_includes(A, lambda s: (s,), A, states, bound, labels).holds


def run_lemma_suite(*args, **kw):
    """Exhaustive property suites; see :mod:`pastlogic.lemmas`."""
    from .lemmas import run_lemma_suite as run
    return run(*args, **kw)
