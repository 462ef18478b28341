"""Figures for the CLI reports.  Everything renders off-screen to files."""
from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

PASS, FAIL = "#4c72b0", "#c44e52"

plt.rcParams.update({
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.bbox": "tight",
    "savefig.dpi": 120,
})


def _save(fig, plot_dir, name) -> str:
    os.makedirs(plot_dir, exist_ok=True)
    path = os.path.join(plot_dir, name)
    fig.savefig(path)
    plt.close(fig)
    return path


def lemma_figure(report, plot_dir) -> str:
    rows = report.results
    fig, ax = plt.subplots(figsize=(7, 0.22 * len(rows) + 1))
    y = range(len(rows))
    ax.barh(list(y), [max(r.checked, 1) for r in rows],
            color=[PASS if r.passed else FAIL for r in rows])
    ax.set_yticks(list(y))
    ax.set_yticklabels([f"{r.group}: {r.law}" for r in rows], fontsize=6)
    ax.invert_yaxis()
    ax.set_xscale("log")
    ax.set_xlabel("instances checked")
    ax.set_title(f"property suites, length <= {report.bound}")
    return _save(fig, plot_dir, "lemmas.png")


def history_figure(history, plot_dir, name="history.png", title="") -> str:
    """Operations as intervals between invocation and response, one row
    per thread."""
    ops = history.operations()
    n = len(history.events)
    tids = sorted({o[0] for o in ops})
    fig, ax = plt.subplots(figsize=(7, 0.6 * len(tids) + 1))
    for tid, op, args, i, j, res in ops:
        row = tids.index(tid)
        end = j if j is not None else n
        ax.barh(row, end - i, left=i, height=0.5, color="#a6c8e8" if j is not None else "#dddddd",
                edgecolor="black", linewidth=0.5)
        a = ",".join(map(str, args))
        label = f"{op}({a})" + (f"={res}" if j is not None else " ...")
        ax.text(i + (end - i) / 2, row, label, ha="center", va="center", fontsize=7)
    ax.set_yticks(range(len(tids)))
    ax.set_yticklabels([f"T{t}" for t in tids])
    ax.invert_yaxis()
    ax.set_xlabel("event index")
    ax.set_xlim(-0.5, n + 0.5)
    if title:
        ax.set_title(title)
    return _save(fig, plot_dir, name)


def runs_figure(rows, plot_dir, name="runs.png", title="") -> str:
    """``rows`` are dicts with ``name``, ``states``, ``histories`` and ``status``."""
    fig, axes = plt.subplots(1, 2, figsize=(8, 0.4 * len(rows) + 1.5), sharey=True)
    names = [r["name"] for r in rows]
    colors = [FAIL if r["status"] == "violation" else PASS for r in rows]
    for ax, key in zip(axes, ("states", "histories")):
        ax.barh(names, [max(r.get(key) or 0, 1) for r in rows], color=colors)
        ax.set_xscale("log")
        ax.set_xlabel(key)
    axes[0].invert_yaxis()
    if title:
        fig.suptitle(title)
    return _save(fig, plot_dir, name)


def hypotheses_figure(run, plot_dir, name="hypotheses.png", title="") -> str:
    fams: dict = {}
    for fam, _, modes, agree in run.results:
        ok = all(modes.values()) and agree
        c = fams.setdefault(fam, [0, 0])
        c[0 if ok else 1] += 1
    names = list(fams)
    fig, ax = plt.subplots(figsize=(5, 0.4 * len(names) + 1))
    ax.barh(names, [fams[f][0] for f in names], color=PASS, label="discharged")
    ax.barh(names, [fams[f][1] for f in names], left=[fams[f][0] for f in names], color=FAIL,
            label="failed")
    ax.invert_yaxis()
    ax.set_xlabel("instances")
    ax.legend(frameon=False, fontsize=7)
    if title:
        ax.set_title(title)
    return _save(fig, plot_dir, name)


def invariants_figure(run, plot_dir, name="invariants.png", title="") -> str:
    counts: dict = {}
    for _, rep, _ in run.violations:
        for clause, *_ in rep.violations:
            counts[clause] = counts.get(clause, 0) + 1
    clauses = ["I1", "I2", "I3", "I4", "flow-path", "disjoint", "C<=K"]
    for c in counts:
        if c not in clauses:
            clauses.append(c)
    fig, ax = plt.subplots(figsize=(5, 2.5))
    ax.bar(clauses, [counts.get(c, 0) for c in clauses],
           color=[FAIL if counts.get(c) else PASS for c in clauses])
    ax.set_ylabel("violating states")
    ax.set_title(title or f"{run.states} reachable states")
    return _save(fig, plot_dir, name)
