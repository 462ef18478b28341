"""Command-line front end.

Exit codes: 0 when everything checked passes, 1 on any violation or failed
check, 2 when a budget ran out before a verdict.
"""
from __future__ import annotations

import json
import sys

import click

from . import explore as ex
from . import structures as st

OK, VIOLATION, BUDGET = 0, 1, 2


class Out:
    """Collects rows and prints them tab-separated, or as one JSON document."""

    def __init__(self, ctx: click.Context):
        self.json = ctx.obj["json"]
        self.plot_dir = ctx.obj["plot_dir"]
        self.doc: dict = {"seed": ctx.obj["seed"]}
        self.figures: list = []

    def table(self, name, header, rows):
        if self.json:
            self.doc[name] = [dict(zip(header, r)) for r in rows]
            return
        click.echo("\t".join(header))
        for r in rows:
            click.echo("\t".join("" if x is None else str(x) for x in r))

    def note(self, key, text, value=None):
        if self.json:
            self.doc[key] = text if value is None else value
        else:
            click.echo(text)

    def figure(self, fn, *args, **kw):
        if self.plot_dir:
            self.figures.append(fn(*args, self.plot_dir, **kw))

    def finish(self, code: int):
        if self.figures and not self.json:
            for f in self.figures:
                click.echo(f"figure\t{f}")
        if self.json:
            self.doc["figures"] = self.figures
            self.doc["exit"] = code
            click.echo(json.dumps(self.doc, indent=2, default=str))
        sys.exit(code)


def _plots():
    from . import plots
    return plots


def _universe(ctx):
    path = ctx.obj["universe"]
    if not path:
        return None
    from .sepalg import UniverseConfig
    return UniverseConfig.from_file(path)


@click.group()
@click.option("--json", "as_json", is_flag=True, help="Emit one JSON document.")
@click.option("--seed", type=int, default=0, show_default=True,
              help="Seed for randomized sampling; exhaustive modes ignore it.")
@click.option("--universe", type=click.Path(exists=True, dir_okay=False),
              help="INI file with a [universe] section.")
@click.option("--bound", type=int, help="Computation length bound for inclusion checks.")
@click.option("--plot-dir", type=click.Path(file_okay=False), help="Write figures here.")
@click.pass_context
def main(ctx, as_json, seed, universe, bound, plot_dir):
    """Check proof outlines, discharge hypotheses and explore concurrent
    data structures."""
    ctx.ensure_object(dict)
    ctx.obj.update(json=as_json, seed=seed, universe=universe, bound=bound, plot_dir=plot_dir)


# ---------------------------------------------------------------- lemmas

@main.command()
@click.option("--suite", "suites", multiple=True,
              type=click.Choice(["algebra", "sl-operators", "intuitionism", "interplay",
                                 "loccom", "history"]),
              help="Run only these suites (repeatable).")
@click.pass_context
def lemmas(ctx, suites):
    """Algebra laws and predicate lemmas over a small universe."""
    from .lemmas import SUITES, run_lemma_suite
    out = Out(ctx)
    bound = ctx.obj["bound"] or 4
    rep = run_lemma_suite(_universe(ctx), bound, suites or SUITES)
    out.table("laws", ["group", "law", "passed", "checked", "seconds", "witness"],
              [(r.group, r.law, r.passed, r.checked, round(r.seconds, 2), r.witness)
               for r in rep.results])
    out.note("summary", f"{sum(r.passed for r in rep.results)}/{len(rep.results)} laws hold "
             f"over {rep.states} states, length <= {bound}, {rep.seconds:.1f}s",
             {"ok": rep.ok, "states": rep.states, "bound": bound,
              "seconds": round(rep.seconds, 2)})
    out.figure(_plots().lemma_figure, rep)
    out.finish(OK if rep.ok else VIOLATION)


# ---------------------------------------------------------------- proof files

def _load(ctx, path):
    from .dsl import DSLError, load
    try:
        return load(path, ctx.obj["universe"])
    except (DSLError, OSError) as e:
        raise click.ClickException(str(e))


@main.command("check-proof")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--no-certify", is_flag=True, help="Skip the soundness cross-check.")
@click.pass_context
def check_proof(ctx, file, no_certify):
    """Check every outline of FILE, discharge its hypotheses and certify."""
    from .dsl import check_file
    out = Out(ctx)
    pf = _load(ctx, file)
    rep = check_file(pf, "both", certify=not no_certify, bound=ctx.obj["bound"])
    _file_report(out, rep)
    expected = pf.expect == "accept"
    out.note("expectation", f"expected\t{pf.expect}", pf.expect)
    out.finish(OK if rep.ok == expected else VIOLATION)


def _file_report(out: Out, rep):
    d = rep.as_dict()
    out.table("outlines", ["outline", "status"],
              [(j.name, "accepted") for j in rep.judgments]
              + ([("-", f"rejected: {rep.error}")] if not rep.accepted else []))
    out.table("hypotheses", ["hypothesis", "mode", "holds", "explored", "seconds"],
              [(name, c.mode, c.holds, c.explored, round(c.seconds, 2))
               for name, cs in rep.certificates.items() for c in cs])
    if rep.soundness:
        out.table("soundness", ["outline", "certified", "checked", "reason"],
                  [(n, r.certified, r.checked, r.reason) for n, r in rep.soundness])
    out.note("summary", f"ok={rep.ok}\tinterference-free={not rep.ifree_failures}\t"
             f"modes-agree={rep.agreement}\t{rep.seconds:.2f}s", d)


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--mode", type=click.Choice(["invariant", "bounded", "both"]), default="both",
              show_default=True)
@click.option("--depth", type=int, help="Depth for bounded mode (default from the file).")
@click.pass_context
def discharge(ctx, file, mode, depth):
    """Discharge the hypotheses collected from FILE's outlines."""
    from .dsl import check_file
    out = Out(ctx)
    pf = _load(ctx, file)
    rep = check_file(pf, mode, depth=depth, certify=False, bound=ctx.obj["bound"])
    if not rep.accepted:
        out.note("error", f"outline rejected: {rep.error}")
        out.finish(VIOLATION)
    rows = []
    for name, cs in rep.certificates.items():
        for c in cs:
            rows.append((name, c.mode, c.holds, c.explored, c.bound, round(c.seconds, 2),
                         "" if c.witness is None else repr(c.witness)))
    out.table("hypotheses", ["hypothesis", "mode", "holds", "explored", "bound", "seconds",
                             "witness"], rows)
    ok = all(c.holds for cs in rep.certificates.values() for c in cs) and rep.agreement
    out.note("summary", f"ok={ok}\tmodes-agree={rep.agreement}", {"ok": ok,
                                                                  "agree": rep.agreement})
    out.finish(OK if ok else VIOLATION)


# ---------------------------------------------------------------- exploration

def _keys(k):
    return tuple(range(1, k + 1))


def _structure_setup(structure, variant, threads, steps, keys, present=()):
    if structure == "counter":
        specs = [ex.ThreadSpec(1, (("read", ()),))]
        specs += [ex.ThreadSpec(i + 2, (("inc", ()),)) for i in range(max(threads - 1, 0))]
        return ex.counter_setup(specs, steps=steps)
    if structure == "lolist":
        specs = [ex.ThreadSpec(i + 1, (("any",),)) for i in range(threads)]
        return ex.lolist_setup(variant, specs, present=present, keys=_keys(keys), steps=steps)
    if structure == "rdcss":
        # two rdcss threads, the rest are getters, plus the writer of ell
        return ex.rdcss_setup(gets=max(threads - 2, 0), steps=max(steps, 12))
    raise click.BadParameter(structure)


def _violation_rows(name, r):
    return (name, r.status, r.states, r.histories, r.checked, round(r.seconds, 2))


@main.command("explore")
@click.option("--structure", type=click.Choice(["counter", "lolist", "rdcss"]), required=True)
@click.option("--variant", type=click.Choice(list(st.VARIANTS)), default="fixed",
              show_default=True)
@click.option("--threads", type=int, default=2, show_default=True)
@click.option("--steps", type=int, default=8, show_default=True,
              help="Shared-memory steps per thread.")
@click.option("--keys", type=int, default=3, show_default=True)
@click.option("--present", default="", help="Comma-separated keys initially in the list.")
@click.option("--hypotheses", is_flag=True,
              help="Also discharge the structure's hypotheses over the reachable states.")
@click.option("--depth", type=int, default=6, show_default=True)
@click.option("--max-states", type=int, default=2_000_000, show_default=True,
              help="State budget; running out exits with status 2.")
@click.pass_context
def explore_cmd(ctx, structure, variant, threads, steps, keys, present, hypotheses, depth,
                max_states):
    """Explore every interleaving and check linearizability."""
    out = Out(ctx)
    pres = tuple(int(x) for x in present.split(",") if x)
    try:
        setup = _structure_setup(structure, variant, threads, steps, keys, pres)
    except ValueError as e:
        raise click.UsageError(str(e))
    setup.max_states = max_states
    r = ex.find_violation(setup)
    out.table("runs", ["run", "status", "states", "histories", "checked", "seconds"],
              [_violation_rows(f"{structure}/{variant}", r)])
    code = {"clean": OK, "violation": VIOLATION, "budget": BUDGET}[r.status]
    if r.found:
        _verdict(out, r.verdict)
        out.figure(_plots().history_figure, r.verdict.history, name="violation.png",
                   title=f"{structure}/{variant}: not linearizable")
    if hypotheses:
        run = _hypotheses(structure, setup, depth)
        out.table("hypotheses", ["family", "hypothesis", "modes", "agree"],
                  [(f, n, " ".join(f"{k}={v}" for k, v in m.items()), a)
                   for f, n, m, a in run.results])
        out.note("hypotheses_summary", f"hypotheses ok={run.ok} over {run.states} states",
                 run.ok)
        out.figure(_plots().hypotheses_figure, run, title=f"{structure} hypotheses")
        if not run.ok and code == OK:
            code = VIOLATION
    out.finish(code)


def _hypotheses(structure, setup, depth):
    res = ex.run_interleavings(setup, track_history=False, record=False)
    states, env = ex.transition_system(res)
    if structure == "lolist":
        u = st.LOUniverse(setup.keys, setup.pool, setup.variant)
        hyps = ex.lolist_hypotheses(u.node_ids[:5], setup.keys)
        modes = ("invariant", "bounded")
    elif structure == "rdcss":
        hyps = ex.rdcss_hypotheses()
        modes = ("bounded",)
    else:
        raise click.UsageError("no hypothesis families for the counter; use discharge FILE")
    return ex.discharge_structure_hypotheses(hyps, states, env, modes, depth)


def _op(op):
    return f"{op[0]}({','.join(map(str, op[1]))})"


def _verdict(out: Out, v):
    out.note("history", f"history\t{v.history!r}", repr(v.history))
    out.table("orders", ["order", "reason"],
              [(" < ".join(f"T{o[0]}:{o[1]}({','.join(map(str, o[2]))})" for o in order), why)
               for order, why in v.orders])


@main.command()
@click.option("--variant", type=click.Choice(list(st.VARIANTS)), default="fixed",
              show_default=True, help="LO-list variant for the list presets.")
@click.pass_context
def lincheck(ctx, variant):
    """Run the canned linearizability presets."""
    out = Out(ctx)
    presets = [
        ("counter read|inc|inc", ex.counter_setup()),
        (f"lolist/{variant} 2 threads", ex.lolist_setup(
            variant, [ex.ThreadSpec(1, (("any",),)), ex.ThreadSpec(2, (("any",),))],
            present=(2,), steps=8)),
        (f"bug1 mix/{variant}", ex.bug_setup(1, variant)[0]),
        (f"bug2 mix/{variant}", ex.bug_setup(2, variant)[0]),
        ("rdcss 2 rdcss|get|writer", ex.rdcss_setup()),
    ]
    rows, code = [], OK
    for name, setup in presets:
        r = ex.find_violation(setup)
        rows.append(dict(name=name, status=r.status, states=r.states, histories=r.histories,
                         checked=r.checked, seconds=round(r.seconds, 2)))
        if r.status == "violation":
            code = VIOLATION
        elif r.status == "budget" and code == OK:
            code = BUDGET
    out.table("runs", ["run", "status", "states", "histories", "checked", "seconds"],
              [tuple(r.values()) for r in rows])
    out.figure(_plots().runs_figure, rows, title="linearizability presets")
    out.finish(code)


@main.command()
@click.option("--variant", type=click.Choice(list(st.VARIANTS)), default="fixed",
              show_default=True)
@click.option("--threads", type=int, default=3, show_default=True)
@click.option("--steps", type=int, default=8, show_default=True)
@click.option("--keys", type=int, default=3, show_default=True)
@click.option("--present", default="2", show_default=True)
@click.option("--fault", type=click.Choice(["nomark"]), help="Inject a fault into delete.")
@click.pass_context
def invariants(ctx, variant, threads, steps, keys, present, fault):
    """Check the LO-list structural invariants on every reachable state."""
    out = Out(ctx)
    pres = tuple(int(x) for x in present.split(",") if x)
    setup = ex.lolist_setup(variant, [ex.ThreadSpec(i + 1, (("any",),)) for i in range(threads)],
                            present=pres, keys=_keys(keys), steps=steps, fault=fault)
    run = ex.check_invariants_on_reachables(setup, first_only=bool(fault))
    out.table("summary", ["variant", "fault", "ok", "states", "violations", "seconds"],
              [(variant, fault or "-", run.ok, run.states, len(run.violations),
                round(run.seconds, 2))])
    for s, rep, trace in run.violations[:1]:
        out.table("witness", ["clause", "node", "detail"],
                  [(c, n, d) for c, n, d in rep.violations])
        out.note("snapshot", f"snapshot\t{st.dump_snapshot(s.gheap)}")
        out.table("trace", ["thread", "op", "commands"],
                  [(f"T{x.tid}", _op(x.op), " ".join(x.labels)) for x in trace])
    out.figure(_plots().invariants_figure, run,
               title=f"{variant}{'/' + fault if fault else ''}: {run.states} states")
    code = OK if run.ok else VIOLATION
    if run.exhausted and run.ok:
        code = BUDGET
    out.finish(code)


@main.command()
@click.option("--id", "bug_ids", type=click.Choice(["1", "2"]), multiple=True,
              help="Bug to reproduce (repeatable; default both).")
@click.option("--key", type=int, default=2, show_default=True)
@click.pass_context
def bugs(ctx, bug_ids, key):
    """Reproduce the two linking bugs and check the fix.

    Passes (exit 0) when ORIGINAL and FELDMAN yield a violation of the
    expected shape and FIXED explores clean.
    """
    out = Out(ctx)
    rows, code = [], OK
    for b in map(int, bug_ids or ("1", "2")):
        for variant in st.VARIANTS:
            setup, shape = ex.bug_setup(b, variant, key)
            r = ex.find_violation(setup, shape)
            expected = "clean" if variant == "fixed" else "violation"
            rows.append(dict(name=f"bug{b}/{variant}", status=r.status, states=r.states,
                             histories=r.histories, expected=expected,
                             seconds=round(r.seconds, 2)))
            if r.status != expected:
                code = BUDGET if r.status == "budget" else VIOLATION
            if r.found:
                if not out.json:
                    click.echo(f"# bug {b}, {variant}")
                _verdict(out, r.verdict)
                if out.json:
                    out.doc[f"bug{b}/{variant}"] = r.as_dict()
                    del out.doc["orders"], out.doc["history"]
                out.figure(_plots().history_figure, r.verdict.history,
                           name=f"bug{b}_{variant}.png",
                           title=f"bug {b}, {variant}: not linearizable")
    out.table("runs", ["run", "status", "states", "histories", "expected", "seconds"],
              [tuple(r.values()) for r in rows])
    out.figure(_plots().runs_figure, rows, name="bugs.png", title="bug reproductions")
    out.finish(code)


if __name__ == "__main__":
    main()
