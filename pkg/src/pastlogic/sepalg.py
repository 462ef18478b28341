"""Finite separation algebras: fractional heaps, ghost resources, states,
computations and histories.

Fractions are integer numerators over a shared denominator (24 by default).
Every composition returns ``None`` when undefined.
"""
from __future__ import annotations

import configparser
import functools
import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Hashable, Iterable, Iterator, NamedTuple

D_DEFAULT = 24
NEG_INF = -math.inf
POS_INF = math.inf


class Act(NamedTuple):
    """RDCSS root value A(d): an operation with descriptor ``d`` is active."""
    d: Any

    def __repr__(self):
        return f"A({self.d!r})"


class Inact(NamedTuple):
    """RDCSS root value I(n): the root is inactive and holds ``n``."""
    n: Any

    def __repr__(self):
        return f"I({self.n!r})"


class Descr(NamedTuple):
    loc: Any
    n1: Any
    m1: Any
    n2: Any

    def __repr__(self):
        return f"D({self.loc!r},{self.n1!r},{self.m1!r},{self.n2!r})"


def _sortkey(x):
    return (type(x).__name__, repr(x))


class Heap:
    """Immutable finite map ``addr -> (numerator, value)``."""

    __slots__ = ("_cells", "_hash", "denom")

    def __init__(self, cells=None, denom: int = D_DEFAULT):
        d = dict(cells or {})
        for a, (f, _) in d.items():
            if not 0 < f <= denom:
                raise ValueError(f"fraction {f}/{denom} out of range at {a!r}")
        self._cells = d
        self._hash = None
        self.denom = denom

    @classmethod
    def full(cls, cells: dict, denom: int = D_DEFAULT) -> "Heap":
        return cls({a: (denom, v) for a, v in cells.items()}, denom)

    def __getitem__(self, addr):
        return self._cells[addr]

    def get(self, addr, default=None):
        return self._cells.get(addr, default)

    def __contains__(self, addr):
        return addr in self._cells

    def __iter__(self):
        return iter(self._cells)

    def __len__(self):
        return len(self._cells)

    def items(self):
        return self._cells.items()

    def value(self, addr, default=None):
        c = self._cells.get(addr)
        return default if c is None else c[1]

    def frac(self, addr) -> int:
        c = self._cells.get(addr)
        return 0 if c is None else c[0]

    def owns(self, addr) -> bool:
        return self.frac(addr) == self.denom

    def set(self, addr, value, frac: int | None = None) -> "Heap":
        d = dict(self._cells)
        d[addr] = (self.denom if frac is None else frac, value)
        return Heap(d, self.denom)

    def remove(self, addr) -> "Heap":
        d = dict(self._cells)
        d.pop(addr, None)
        return Heap(d, self.denom)

    def compose(self, other: "Heap") -> "Heap | None":
        if self.denom != other.denom:
            return None
        if not other._cells:
            return self
        if not self._cells:
            return other
        d = dict(self._cells)
        for a, (f, v) in other._cells.items():
            mine = d.get(a)
            if mine is None:
                d[a] = (f, v)
            else:
                if mine[1] != v or mine[0] + f > self.denom:
                    return None
                d[a] = (mine[0] + f, v)
        return Heap(d, self.denom)

    def splits(self) -> Iterator[tuple["Heap", "Heap"]]:
        """All pairs ``(h1, h2)`` with ``h1 * h2 == self``."""
        cells = sorted(self._cells.items(), key=lambda kv: _sortkey(kv[0]))
        options = [range(f + 1) for _, (f, _) in cells]
        for pick in itertools.product(*options):
            left, right = {}, {}
            for (a, (f, v)), k in zip(cells, pick):
                if k:
                    left[a] = (k, v)
                if f - k:
                    right[a] = (f - k, v)
            yield Heap(left, self.denom), Heap(right, self.denom)

    def __eq__(self, other):
        return isinstance(other, Heap) and self.denom == other.denom and self._cells == other._cells

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.denom, frozenset(self._cells.items())))
        return self._hash

    def __repr__(self):
        parts = []
        for a, (f, v) in sorted(self._cells.items(), key=lambda kv: _sortkey(kv[0])):
            frac = "" if f == self.denom else f"[{f}/{self.denom}]"
            parts.append(f"{a}{frac}->{v!r}")
        return "{" + ", ".join(parts) + "}"


def _freeze_map(m) -> tuple:
    return tuple(sorted(dict(m).items(), key=lambda kv: _sortkey(kv[0])))


def _disjoint_union(a: tuple, b: tuple):
    da = dict(a)
    for k, v in b:
        if k in da:
            return None
        da[k] = v
    return _freeze_map(da)


def _map_splits(items: tuple) -> Iterator[tuple[tuple, tuple]]:
    for mask in itertools.product((0, 1), repeat=len(items)):
        yield (tuple(kv for kv, m in zip(items, mask) if m),
               tuple(kv for kv, m in zip(items, mask) if not m))


RCT = "rct"
SNAP = "snap"


@dataclass(frozen=True)
class Ghost:
    """Ghost resources.

    ``obligations`` is a sorted tuple (multiset) of tags.  ``receipts`` maps a
    slot (clock index or operation id) to ``(kind, tag)`` where kind is
    ``"rct"`` or the persistent ``"snap"``.  ``clocks`` and ``contents`` map a
    root id to a value and compose by disjoint union.
    """
    obligations: tuple = ()
    receipts: tuple = ()
    clocks: tuple = ()
    contents: tuple = ()

    @classmethod
    def make(cls, obligations=(), receipts=None, clocks=None, contents=None) -> "Ghost":
        return cls(tuple(sorted(obligations, key=_sortkey)), _freeze_map(receipts or {}),
                   _freeze_map(clocks or {}), _freeze_map(contents or {}))

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.obligations, self.receipts, self.clocks, self.contents))
            object.__setattr__(self, "_hash", h)
        return h

    def is_empty(self) -> bool:
        return not (self.obligations or self.receipts or self.clocks or self.contents)

    def clock(self, root, default=None):
        return dict(self.clocks).get(root, default)

    def receipt(self, slot):
        return dict(self.receipts).get(slot)

    def compose(self, other: "Ghost") -> "Ghost | None":
        if other.is_empty():
            return self
        if self.is_empty():
            return other
        rec = dict(self.receipts)
        for slot, (kind, tag) in other.receipts:
            mine = rec.get(slot)
            if mine is None:
                rec[slot] = (kind, tag)
                continue
            if mine[1] != tag or (mine[0] == RCT and kind == RCT):
                return None
            rec[slot] = (RCT if RCT in (mine[0], kind) else SNAP, tag)
        clocks = _disjoint_union(self.clocks, other.clocks)
        contents = _disjoint_union(self.contents, other.contents)
        if clocks is None or contents is None:
            return None
        obl = tuple(sorted(self.obligations + other.obligations, key=_sortkey))
        return Ghost(obl, _freeze_map(rec), clocks, contents)

    def splits(self) -> Iterator[tuple["Ghost", "Ghost"]]:
        obl_splits = set()
        for mask in itertools.product((0, 1), repeat=len(self.obligations)):
            left = tuple(o for o, m in zip(self.obligations, mask) if m)
            right = tuple(o for o, m in zip(self.obligations, mask) if not m)
            obl_splits.add((left, right))
        rec_opts = []
        for slot, (kind, tag) in self.receipts:
            if kind == SNAP:
                opts = [(SNAP, None), (None, SNAP), (SNAP, SNAP)]
            else:
                opts = [(RCT, None), (None, RCT), (RCT, SNAP), (SNAP, RCT)]
            rec_opts.append([(slot, tag, a, b) for a, b in opts])
        for (ol, orr), recs, (cl, cr), (nl, nr) in itertools.product(
                sorted(obl_splits), itertools.product(*rec_opts),
                list(_map_splits(self.clocks)), list(_map_splits(self.contents))):
            rl = {s: (a, t) for s, t, a, _ in recs if a}
            rr = {s: (b, t) for s, t, _, b in recs if b}
            yield (Ghost(ol, _freeze_map(rl), cl, nl), Ghost(orr, _freeze_map(rr), cr, nr))

    def __repr__(self):
        parts = []
        if self.obligations:
            parts.append("obl=" + ",".join(map(repr, self.obligations)))
        for slot, (kind, tag) in self.receipts:
            parts.append(f"{'o' if kind == SNAP else ''}rct[{slot}]={tag!r}")
        for r, c in self.clocks:
            parts.append(f"clock[{r}]={c}")
        for r, c in self.contents:
            parts.append(f"C[{r}]={c!r}")
        return "<" + " ".join(parts) + ">"


EMPTY_GHOST = Ghost()


class _Abort:
    """The abort sentinel; composes with nothing."""
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "ABORT"

    def __reduce__(self):
        return (_Abort, ())


ABORT = _Abort()


@dataclass(frozen=True)
class State:
    """A pair of global ``(heap, ghost)`` and local ``(heap, ghost, vars)``."""
    gheap: Heap
    gghost: Ghost = EMPTY_GHOST
    lheap: Heap = None
    lghost: Ghost = EMPTY_GHOST
    vars: tuple = ()

    def __post_init__(self):
        if self.lheap is None:
            object.__setattr__(self, "lheap", Heap({}, self.gheap.denom))

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.gheap, self.gghost, self.lheap, self.lghost, self.vars))
            object.__setattr__(self, "_hash", h)
        return h

    @classmethod
    def make(cls, gheap=None, gghost=EMPTY_GHOST, lheap=None, lghost=EMPTY_GHOST,
             vars=None, denom: int = D_DEFAULT) -> "State":
        if gheap is None or isinstance(gheap, dict):
            gheap = Heap.full(gheap or {}, denom)
        if lheap is None or isinstance(lheap, dict):
            lheap = Heap.full(lheap or {}, gheap.denom)
        return cls(gheap, gghost, lheap, lghost, _freeze_map(vars or {}))

    @property
    def env(self) -> dict:
        return dict(self.vars)

    def var(self, name, default=None):
        for k, v in self.vars:
            if k == name:
                return v
        return default

    def with_vars(self, **updates) -> "State":
        d = dict(self.vars)
        d.update(updates)
        return State(self.gheap, self.gghost, self.lheap, self.lghost, _freeze_map(d))

    def replace(self, **kw) -> "State":
        fields_ = dict(gheap=self.gheap, gghost=self.gghost, lheap=self.lheap,
                       lghost=self.lghost, vars=self.vars)
        fields_.update(kw)
        return State(**fields_)

    @property
    def glob(self):
        return (self.gheap, self.gghost)

    @property
    def loc(self):
        return (self.lheap, self.lghost, self.vars)

    def unit(self) -> "State":
        return State(Heap({}, self.gheap.denom), EMPTY_GHOST, Heap({}, self.gheap.denom),
                     EMPTY_GHOST, self.vars)

    def is_unit(self) -> bool:
        return (not len(self.gheap) and self.gghost.is_empty() and not len(self.lheap)
                and self.lghost.is_empty())

    def __repr__(self):
        s = f"G{self.gheap!r}"
        if not self.gghost.is_empty():
            s += f"{self.gghost!r}"
        if len(self.lheap) or not self.lghost.is_empty():
            s += f" L{self.lheap!r}" + ("" if self.lghost.is_empty() else repr(self.lghost))
        if self.vars:
            s += " " + ",".join(f"{k}={v!r}" for k, v in self.vars)
        return s


@functools.lru_cache(maxsize=1 << 18)
def compose_state(s1, s2):
    """Elementwise composition of two states; ``None`` when undefined."""
    if s1 is ABORT or s2 is ABORT:
        return None
    if s1.vars != s2.vars:
        return None
    gh = s1.gheap.compose(s2.gheap)
    if gh is None:
        return None
    gg = s1.gghost.compose(s2.gghost)
    if gg is None:
        return None
    lh = s1.lheap.compose(s2.lheap)
    if lh is None:
        return None
    lg = s1.lghost.compose(s2.lghost)
    if lg is None:
        return None
    return State(gh, gg, lh, lg, s1.vars)


@functools.lru_cache(maxsize=1 << 16)
def split_state(s: State) -> tuple[tuple[State, State], ...]:
    """All ``(s1, s2)`` with ``compose_state(s1, s2) == s``."""
    if s is ABORT:
        return ()
    return tuple(
        (State(gh1, gg1, lh1, lg1, s.vars), State(gh2, gg2, lh2, lg2, s.vars))
        for (gh1, gh2), (gg1, gg2), (lh1, lh2), (lg1, lg2) in itertools.product(
            list(s.gheap.splits()), list(s.gghost.splits()),
            list(s.lheap.splits()), list(s.lghost.splits())))


class Computation(tuple):
    """Non-empty sequence of states."""

    def __new__(cls, states: Iterable):
        t = super().__new__(cls, states)
        if not t:
            raise ValueError("computation must be non-empty")
        return t

    @property
    def last(self):
        return self[-1]

    @property
    def prefix(self):
        return tuple(self[:-1])

    @property
    def states(self):
        return tuple(self)

    def extend(self, s) -> "Computation":
        return Computation(tuple(self) + (s,))

    def __repr__(self):
        return "[" + " . ".join(map(repr, self)) + "]"


def compose_computation(c1: Computation, c2: Computation):
    if len(c1) != len(c2) or c1.prefix != c2.prefix:
        return None
    last = compose_state(c1.last, c2.last)
    if last is None:
        return None
    return Computation(c1.prefix + (last,))


@dataclass(frozen=True)
class History:
    """States interleaved with recorded commands.

    ``labels[i]`` is the label of the command recorded between ``states[i]``
    and ``states[i+1]``, or ``None`` for an unrecorded (environment) step.
    """
    states: tuple
    labels: tuple = ()

    def __post_init__(self):
        if not self.states:
            raise ValueError("history must be non-empty")
        if len(self.labels) != len(self.states) - 1:
            raise ValueError("labels must align with transitions")

    @classmethod
    def of(cls, x) -> "History":
        if isinstance(x, History):
            return x
        if isinstance(x, State) or x is ABORT:
            return cls((x,), ())
        return cls(tuple(x), (None,) * (len(x) - 1))

    @property
    def last(self):
        return self.states[-1]

    def __len__(self):
        return len(self.states)

    def extend(self, s, label=None) -> "History":
        return History(self.states + (s,), self.labels + (label,))

    def commands_since(self, i: int) -> tuple:
        return tuple(l for l in self.labels[i:] if l is not None)

    def __repr__(self):
        out = [repr(self.states[0])]
        for l, s in zip(self.labels, self.states[1:]):
            out.append(f"-{l}->" if l is not None else "->")
            out.append(repr(s))
        return "[" + " ".join(out) + "]"


def compose_history(h1: History, h2: History):
    if h1.states[:-1] != h2.states[:-1] or h1.labels != h2.labels:
        return None
    last = compose_state(h1.last, h2.last)
    if last is None:
        return None
    return History(h1.states[:-1] + (last,), h1.labels)


def compose(x, y):
    """Dispatch on the element type."""
    if isinstance(x, History):
        return compose_history(x, y)
    if isinstance(x, Computation):
        return compose_computation(x, y)
    return compose_state(x, y)


class UniverseTooLarge(RuntimeError):
    pass


def _parse_list(text: str) -> list:
    out = []
    for tok in (t.strip() for t in text.split(",")):
        if not tok:
            continue
        if ".." in tok:
            lo, hi = tok.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(_parse_scalar(tok))
    return out


def _parse_scalar(tok: str):
    low = tok.lower()
    if low in ("true", "false"):
        return low == "true"
    if low == "none":
        return None
    if low in ("-inf", "+inf", "inf"):
        return NEG_INF if low == "-inf" else POS_INF
    try:
        return int(tok)
    except ValueError:
        return tok


@dataclass(frozen=True)
class UniverseConfig:
    """A finite universe of states.

    ``heap_shape`` is ``"partial"`` (each address absent or present at any
    allowed fraction) or ``"full"`` (every global address present at full
    permission).
    """
    addresses: tuple = ()
    values: tuple = (0, 1)
    value_domains: tuple = ()
    denominator: int = D_DEFAULT
    fractions: tuple | None = None
    heap_shape: str = "partial"
    local_addresses: tuple = ()
    obligations: tuple = ()
    max_obligations: int = 1
    receipt_slots: tuple = ()
    receipt_tags: tuple = ()
    clock_roots: tuple = ()
    clock_values: tuple = (0, 1)
    local_vars: tuple = ()
    var_values: tuple = (0, 1)
    ceiling: int = 200_000

    def domain(self, addr) -> tuple:
        return dict(self.value_domains).get(addr, self.values)

    def allowed_fractions(self) -> tuple:
        return tuple(self.fractions) if self.fractions else (self.denominator,)

    def _cell_options(self, addr, shape):
        opts = [] if shape == "full" else [None]
        fracs = (self.denominator,) if shape == "full" else self.allowed_fractions()
        for f in fracs:
            for v in self.domain(addr):
                opts.append((f, v))
        return opts

    def _heaps(self, addrs, shape):
        addrs = tuple(addrs)
        per = [self._cell_options(a, shape) for a in addrs]
        for pick in itertools.product(*per):
            yield Heap({a: c for a, c in zip(addrs, pick) if c is not None}, self.denominator)

    def _ghosts(self):
        obl_sets = [()]
        for k in range(1, self.max_obligations + 1):
            obl_sets.extend(itertools.combinations_with_replacement(self.obligations, k))
        rec_opts = [[None] + [(kind, t) for t in self.receipt_tags for kind in (SNAP, RCT)]
                    for _ in self.receipt_slots]
        clock_opts = [[None] + list(self.clock_values) for _ in self.clock_roots]
        for obl, recs, clocks in itertools.product(obl_sets, itertools.product(*rec_opts),
                                                   itertools.product(*clock_opts)):
            yield Ghost.make(obl, {s: r for s, r in zip(self.receipt_slots, recs) if r},
                             {c: v for c, v in zip(self.clock_roots, clocks) if v is not None})

    def _varmaps(self):
        for pick in itertools.product(self.var_values, repeat=len(self.local_vars)):
            yield _freeze_map(dict(zip(self.local_vars, pick)))

    def count(self) -> int:
        n_g = 1
        for a in self.addresses:
            n_g *= len(self._cell_options(a, self.heap_shape))
        n_l = 1
        for a in self.local_addresses:
            n_l *= len(self._cell_options(a, "partial"))
        obl = sum(math.comb(len(self.obligations) + k - 1, k)
                  for k in range(self.max_obligations + 1)) if self.obligations else 1
        rec = (1 + 2 * len(self.receipt_tags)) ** len(self.receipt_slots)
        clk = (1 + len(self.clock_values)) ** len(self.clock_roots)
        vars_ = len(self.var_values) ** len(self.local_vars)
        return n_g * n_l * obl * rec * clk * vars_

    def global_ghosts(self):
        return list(self._ghosts())

    @classmethod
    def from_file(cls, path) -> "UniverseConfig":
        cp = configparser.ConfigParser()
        with open(path) as fh:
            cp.read_file(fh)
        return cls.from_section(cp["universe"] if cp.has_section("universe") else cp[cp.sections()[0]])

    @classmethod
    def from_section(cls, sec) -> "UniverseConfig":
        kw: dict[str, Any] = {}
        tuples = ("addresses", "values", "fractions", "local_addresses", "obligations",
                  "receipt_slots", "receipt_tags", "clock_roots", "clock_values",
                  "local_vars", "var_values")
        for key in tuples:
            if key in sec:
                kw[key] = tuple(_parse_list(sec[key]))
        for key in ("denominator", "max_obligations", "ceiling"):
            if key in sec:
                kw[key] = int(sec[key])
        if "heap_shape" in sec:
            kw["heap_shape"] = sec["heap_shape"].strip()
        doms = []
        for key in sec:
            if key.startswith("domain."):
                doms.append((_parse_scalar(key[len("domain."):]), tuple(_parse_list(sec[key]))))
        if doms:
            kw["value_domains"] = tuple(doms)
        return cls(**kw)


def enumerate_states(u: UniverseConfig) -> list[State]:
    """Every state of the universe exactly once, in a deterministic order."""
    n = u.count()
    if n > u.ceiling:
        raise UniverseTooLarge(f"universe has {n} states, ceiling is {u.ceiling}")
    gheaps = list(u._heaps(u.addresses, u.heap_shape))
    lheaps = list(u._heaps(u.local_addresses, "partial"))
    ghosts = list(u._ghosts())
    varmaps = list(u._varmaps())
    out = []
    for gh, gg, lh, vs in itertools.product(gheaps, ghosts, lheaps, varmaps):
        out.append(State(gh, gg, lh, EMPTY_GHOST, vs))
    return out


def enumerate_computations(states, max_len: int) -> Iterator[Computation]:
    for n in range(1, max_len + 1):
        for seq in itertools.product(states, repeat=n):
            yield Computation(seq)


def enumerate_histories(states, labels, max_len: int) -> Iterator[History]:
    """Histories with every transition either unrecorded or labelled."""
    steps = (None,) + tuple(labels)
    for n in range(1, max_len + 1):
        for seq in itertools.product(states, repeat=n):
            for labs in itertools.product(steps, repeat=n - 1):
                yield History(tuple(seq), labs)
