"""Desk-scale measurements written as CSV tables plus PNG figures."""

import csv
import math
import os
import time

import numpy as np

from .certs.model import Model, check_model, model_size
from .certs.refutation import check_refutation, refutation_size
from .certs.termproof import naive_term_prover
from .families import gen_iff_family, random_corpus
from .preprocess import PrepConfig, preprocess_fixpoint
from .reconstruct import reconstruct
from .solve import dp_solve


def loglog_slope(xs, ys):
    """Least-squares slope of log(y) against log(x)."""
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def family_scaling(sizes, techniques=("bce", "ve")):
    rows = []
    for tech in techniques:
        for n in sizes:
            f = gen_iff_family(n)
            t = time.perf_counter()
            res = preprocess_fixpoint(f, PrepConfig((tech,)))
            secs = time.perf_counter() - t
            rows.append(dict(technique=tech, n=n, steps=len(res.trace),
                             clauses_left=len(res.formula.clauses), seconds=round(secs, 6)))
    return rows


def term_vs_model(ns=range(1, 9)):
    rows = []
    for n in ns:
        f = gen_iff_family(n)
        proof = naive_term_prover(f)
        res = preprocess_fixpoint(f)
        m = reconstruct(f, res.trace, Model())
        rows.append(dict(n=n, term_leaves=len(proof.leaves()), term_nodes=len(proof.nodes),
                         model_gates=model_size(m)))
    return rows


def corpus_rows(count, seed):
    rows = []
    for i, (params, f) in enumerate(random_corpus(count, seed=seed)):
        t0 = time.perf_counter()
        res = preprocess_fixpoint(f)
        t1 = time.perf_counter()
        if res.verdict is None:
            verdict, cert = dp_solve(res.formula)
        elif res.verdict:
            verdict, cert = True, Model()
        else:
            verdict, cert = False, res.refutation
        t2 = time.perf_counter()
        full = reconstruct(f, res.trace, cert)
        t3 = time.perf_counter()
        chk = check_model(f, full) if verdict else check_refutation(f, full)
        size = model_size if verdict else refutation_size
        rows.append(dict(
            index=i, seed=params["seed"], vars=params["num_vars"], clauses=params["num_clauses"],
            universal_ratio=params["universal_ratio"], verdict=int(verdict),
            early=int(res.verdict is not None), trace_steps=len(res.trace),
            kind="model" if verdict else "refutation",
            size_simplified=size(cert), size_original=size(full),
            prep_s=round(t1 - t0, 6), solve_s=round(t2 - t1, 6),
            reconstruct_s=round(t3 - t2, 6), check=chk.describe()))
    return rows


def _csv(path, rows):
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)
    return path


def _pyplot():
    # imported lazily so the rest of the package works without a display stack
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def _plot_scaling(path, rows):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 4))
    for tech, marker in (("bce", "o"), ("ve", "s")):
        pts = [(r["n"], r["steps"]) for r in rows if r["technique"] == tech]
        if not pts:
            continue
        xs, ys = zip(*pts)
        label = tech
        if len(pts) >= 2:
            label += " (slope %.2f)" % loglog_slope(xs, ys)
        ax.loglog(xs, ys, marker=marker, label=label)
    ax.set_xlabel("n (quantifier pairs)")
    ax.set_ylabel("trace steps to empty matrix")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def _plot_term_vs_model(path, rows):
    plt = _pyplot()
    ns = [r["n"] for r in rows]
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.semilogy(ns, [r["term_leaves"] for r in rows], "o-", label="term proof leaves")
    ax.semilogy(ns, [max(r["model_gates"], 1) for r in rows], "s-", label="model and-gates (min 1)")
    ax.set_xlabel("n")
    ax.set_ylabel("size")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def _plot_sizes(path, rows):
    plt = _pyplot()
    fig, axes = plt.subplots(1, 2, figsize=(9, 4))
    for ax, kind in zip(axes, ("model", "refutation")):
        sub = [r for r in rows if r["kind"] == kind]
        if sub:
            x = [r["size_simplified"] + 1 for r in sub]
            y = [r["size_original"] + 1 for r in sub]
            ax.scatter(x, y, s=10, alpha=0.6)
            top = max(x + y)
            ax.plot([1, top], [1, top], "k--", lw=0.8)
            ax.set_xscale("log")
            ax.set_yscale("log")
        ax.set_title("%s (%d instances)" % (kind, len(sub)))
        ax.set_xlabel("size for simplified formula + 1")
        ax.set_ylabel("size for original formula + 1")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def write_report(outdir, count=200, seed=0, sizes=(1, 10, 100, 1000)):
    """Run the measurements and return the written file paths."""
    os.makedirs(outdir, exist_ok=True)
    out = []
    scaling = family_scaling(sizes)
    out.append(_csv(os.path.join(outdir, "family_scaling.csv"), scaling))
    out.append(_plot_scaling(os.path.join(outdir, "family_scaling.png"), scaling))
    tvm = term_vs_model()
    out.append(_csv(os.path.join(outdir, "term_vs_model.csv"), tvm))
    out.append(_plot_term_vs_model(os.path.join(outdir, "term_vs_model.png"), tvm))
    if count > 0:
        rows = corpus_rows(count, seed)
        out.append(_csv(os.path.join(outdir, "corpus.csv"), rows))
        out.append(_plot_sizes(os.path.join(outdir, "cert_sizes.png"), rows))
    return out


def fit_is_linear(rows, technique, tol=0.1):
    pts = [(r["n"], r["steps"]) for r in rows if r["technique"] == technique]
    xs, ys = zip(*pts)
    return math.isclose(loglog_slope(xs, ys), 1.0, abs_tol=tol)
