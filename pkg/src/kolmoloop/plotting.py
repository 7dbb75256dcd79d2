"""Figure rendering for the CLI report path.

Each report subcommand can render a matplotlib figure next to its delimited
output.  The figures are diagnostic, not publication-grade: they exist so a
run leaves something you can eyeball without a separate plotting step.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["render_figure"]


def _new_axes(title: str):
    fig, ax = plt.subplots(figsize=(6.4, 4.2), constrained_layout=True)
    ax.set_title(title, fontsize=11)
    return fig, ax


def render_figure(kind: str, header: list[str], rows: list[list], outfile: str, meta: dict) -> None:
    if kind == "kernel-grid":
        _kernel_grid(header, rows, outfile, meta)
    elif kind == "decorr":
        _decorr(rows, outfile, meta)
    elif kind == "fluctuation":
        _fluctuation(rows, outfile)
    elif kind == "asymptotics":
        _asymptotics(header, rows, outfile)
    elif kind == "sample":
        _sample(rows, outfile, meta)
    else:
        raise ValueError(f"no figure renderer for {kind!r}")


def _kernel_grid(header, rows, outfile, meta):
    if header[0] == "x" and header[1] == "value":
        xs = np.array([r[0] for r in rows])
        vals = np.array([r[1] for r in rows])
        fig, ax = _new_axes(f"diagonal kernel, N={meta.get('N')}")
        ax.plot(xs, vals, lw=1.2, label="S_N")
        ax.plot(xs, np.sqrt(np.maximum(1 - xs**2, 0)) / math.pi, "k--", lw=0.9,
                label="semicircle")
        ax.set_xlabel("x")
        ax.legend(frameon=False)
    else:
        n = int(math.isqrt(len(rows)))
        grid = np.array([r[2] for r in rows]).reshape(n, n)
        fig, ax = _new_axes(f"{header[2]} grid, N={meta.get('N')}")
        lo = float(rows[0][0])
        hi = float(rows[-1][0])
        im = ax.imshow(grid, origin="lower", extent=(lo, hi, lo, hi), cmap="viridis")
        fig.colorbar(im, ax=ax, shrink=0.85)
        ax.set_xlabel(header[1])
        ax.set_ylabel(header[0])
    fig.savefig(outfile, dpi=150)
    plt.close(fig)


def _decorr(rows, outfile, meta):
    ns = [r[0] for r in rows]
    vals = [abs(r[1]) for r in rows]
    fig, ax = _new_axes(f"decorrelation scan, s={meta.get('s')}, beta={meta.get('beta')}")
    ax.loglog(ns, vals, "o-", lw=1.0)
    ax.set_xlabel("N")
    ax.set_ylabel("|N C_N(s, s + N^-beta t)|")
    fig.savefig(outfile, dpi=150)
    plt.close(fig)


def _fluctuation(rows, outfile):
    fig, ax = _new_axes("fluctuation variances")
    by_n: dict[int, list] = {}
    for r in rows:
        by_n.setdefault(int(r[0]), []).append(r)
    for n, group in sorted(by_n.items()):
        ts = [g[1] for g in group]
        ax.plot(ts, [g[2] for g in group], "o", ms=4, label=f"empirical, N={n}")
        ax.plot(ts, [g[3] for g in group], "-", lw=0.9, label=f"N C_N, N={n}")
    ts = sorted({r[1] for r in rows})
    ax.plot(ts, [math.sqrt(t * (1 - t)) / math.pi for t in ts], "k--", lw=1.0,
            label="semicircle limit")
    ax.set_xlabel("t")
    ax.set_ylabel("Var(sqrt(N) L_t)")
    ax.legend(frameon=False, fontsize=8)
    fig.savefig(outfile, dpi=150)
    plt.close(fig)


def _asymptotics(header, rows, outfile):
    fig, ax = _new_axes("scaled main-term error")
    fam_idx = header.index("family")
    n_idx = header.index("n")
    keys = sorted({(r[fam_idx], r[n_idx]) for r in rows})
    for fam, n in keys:
        pts = [r for r in rows if r[fam_idx] == fam and r[n_idx] == n]
        ax.plot([p[header.index("theta")] for p in pts],
                [p[header.index("scaled_error")] for p in pts],
                lw=0.9, label=f"{fam}, n={n}")
    ax.set_xlabel("theta")
    ax.set_ylabel("n^{3/2} |exact - main term|")
    ax.legend(frameon=False, fontsize=8)
    fig.savefig(outfile, dpi=150)
    plt.close(fig)


def _sample(rows, outfile, meta, max_paths: int = 40):
    fig, ax = _new_axes(f"loop paths, N={meta.get('N')}")
    by_path: dict[int, list] = {}
    for r in rows:
        by_path.setdefault(int(r[0]), []).append((r[1], r[2]))
        if len(by_path) > max_paths:
            break
    for pid, pts in list(by_path.items())[:max_paths]:
        ax.plot([p[0] for p in pts], [p[1] for p in pts], lw=0.6, alpha=0.7)
    ax.set_xlabel("t")
    ax.set_ylabel("path value")
    fig.savefig(outfile, dpi=150)
    plt.close(fig)
