"""Command-line interface.

One binary, subcommand style.  Every run echoes its full resolved
configuration (including the seed where one applies) into the output
metadata; `--no-timestamp` makes output byte-reproducible.  Configuration
precedence is flags > environment > defaults, with environment variables
prefixed KOLMO_ (KOLMO_FORMAT, KOLMO_THREADS, KOLMO_SEED).

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction

import click
import numpy as np

from . import __version__, hankel, kernels, moments, sampler, verify
from .legendre import darboux_approximant, darboux_main_term, legendre_all
from .report import build_meta, format_fraction, render_csv, render_json, write_text

FORMAT_OPT = click.option(
    "--format",
    "fmt",
    type=click.Choice(["csv", "json"]),
    default=None,
    envvar="KOLMO_FORMAT",
    help="Output format (default csv for tables, json for single records).",
)
OUT_OPT = click.option("--out", default="-", show_default=True, help="Output path or - for stdout.")
NOTS_OPT = click.option(
    "--no-timestamp", is_flag=True, help="Suppress the timestamp field for byte-stable output."
)
PLOT_OPT = click.option(
    "--plot", default=None, metavar="FILE", help="Also render a figure (png/pdf) of the report."
)
THREADS_OPT = click.option(
    "--threads", type=int, default=1, envvar="KOLMO_THREADS", show_default=True,
    help="Worker cap for parallel sections.",
)


def _emit(subcommand, params, header, rows, fmt, out, no_timestamp, plot=None):
    meta = build_meta(subcommand, params, timestamp=not no_timestamp)
    text = render_json(meta, header, rows) if fmt == "json" else render_csv(meta, header, rows)
    write_text(out, text)
    if plot:
        from .plotting import render_figure

        render_figure(subcommand, header, rows, plot, meta)


def _parse_list(raw: str, conv):
    try:
        return [conv(tok) for tok in raw.split(",") if tok.strip()]
    except ValueError as exc:
        raise click.BadParameter(str(exc))


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name="kolmoloop")
def main():
    """Iterated Kolmogorov loops: exact identities, kernels, and samplers."""


@main.command()
@click.option("--a", "a", type=int, required=True, help="Band offset.")
@click.option("--k", "k", type=int, required=True, help="Moment order.")
@click.option("--verify", "do_verify", is_flag=True, help="Cross-check against the exact solve.")
@FORMAT_OPT
@OUT_OPT
@NOTS_OPT
def coeffs(a, k, do_verify, fmt, out, no_timestamp):
    """Print one exact partial-fraction coefficient row."""
    if k < 0 or a < 0:
        raise click.BadParameter("a and k must be nonnegative")
    row = moments.pfd_row(a, k)
    payload = {
        "schema_version": 1,
        "meta": build_meta("coeffs", {"a": a, "k": k}, timestamp=not no_timestamp),
        "a": a,
        "k": k,
        "coeffs": [format_fraction(c) for c in row],
        "weighted_sum": format_fraction(moments.weighted_row_sum(a, k)),
    }
    if do_verify:
        payload["oracle_match"] = moments.pfd_row_from_moments(a, k) == row
    if fmt == "csv":
        header = ["a", "k"] + [f"b{l}" for l in range(k + 1)]
        _emit("coeffs", {"a": a, "k": k}, header, [[a, k] + list(row)], "csv", out, no_timestamp)
    else:
        write_text(out, json.dumps(payload, indent=2) + "\n")
    if do_verify and not payload.get("oracle_match", True):
        raise SystemExit(1)


@main.command("moments")
@click.option("--p", "p", type=int, required=True)
@click.option("--q", "q", type=int, required=True)
@click.option("--k", "k", type=int, required=True)
@click.option("--verify", "do_verify", is_flag=True, help="Cross-check against an independent route.")
@FORMAT_OPT
@OUT_OPT
@NOTS_OPT
def moments_cmd(p, q, k, do_verify, fmt, out, no_timestamp):
    """Print one exact moment value."""
    try:
        moments.MomentKey(p, q, k)  # cap validation
    except Exception as exc:
        raise click.BadParameter(str(exc))
    val = moments.moment_exact(p, q, k)
    params = {"p": p, "q": q, "k": k}
    payload = {
        "schema_version": 1,
        "meta": build_meta("moments", params, timestamp=not no_timestamp),
        "p": p,
        "q": q,
        "k": k,
        "re": format_fraction(val.re),
        "im": format_fraction(val.im),
    }
    if do_verify:
        if (p + q) % 2 == 0 and (q - p) % 2 == 0:
            a, n = (q - p) // 2, (p + q) // 2
            payload["verified"] = val.is_real and moments.pfd_moment(a, k, n) == val.re
            payload["verify_route"] = "partial-fractions"
        elif k >= 1:
            try:
                payload["verified"] = moments.moment_recursed(p, q, k) == val
                payload["verify_route"] = "recursion"
            except Exception as exc:
                payload["verified"] = None
                payload["verify_route"] = f"recursion unavailable: {exc}"
        else:
            payload["verified"] = True
            payload["verify_route"] = "k=0 is the oracle base case"
    if fmt == "csv":
        header = ["p", "q", "k", "re", "im"]
        _emit("moments", params, header, [[p, q, k, val.re, val.im]], "csv", out, no_timestamp)
    else:
        write_text(out, json.dumps(payload, indent=2) + "\n")
    if do_verify and payload.get("verified") is False:
        raise SystemExit(1)


@main.command("kernel-grid")
@click.option("--N", "n_step", type=int, required=True, help="Truncation step.")
@click.option("--grid", "grid_pts", type=int, default=101, show_default=True,
              help="Inclusive equispaced point count (endpoints included).")
@click.option("--what", type=click.Choice(["C", "R", "S"]), default="S", show_default=True)
@FORMAT_OPT
@OUT_OPT
@NOTS_OPT
@PLOT_OPT
def kernel_grid(n_step, grid_pts, what, fmt, out, no_timestamp, plot):
    """Evaluate a kernel on an equispaced grid."""
    if n_step < 1:
        raise click.BadParameter("N must be positive")
    header, rows = kernels.kernel_grid_rows(what, n_step, grid_pts)
    params = {"N": n_step, "grid": grid_pts, "what": what}
    _emit("kernel-grid", params, header, rows, fmt or "csv", out, no_timestamp, plot)


@main.command()
@click.option("--s", type=float, default=0.5, show_default=True)
@click.option("--beta", type=float, default=0.5, show_default=True)
@click.option("--t", "t_offsets", default="1.0", show_default=True,
              help="Comma-separated offset scales.")
@click.option("--N-list", "n_list", default="100,400,1600", show_default=True)
@FORMAT_OPT
@OUT_OPT
@NOTS_OPT
@PLOT_OPT
def decorr(s, beta, t_offsets, n_list, fmt, out, no_timestamp, plot):
    """Scan N * C_N(s, s + N^-beta t) over N."""
    offsets = _parse_list(t_offsets, float)
    ns = _parse_list(n_list, int)
    table = kernels.decorrelation_scan(s, offsets, beta, ns)
    rows = [[r["N"], r["value"]] for r in table]
    params = {"s": s, "beta": beta, "t": t_offsets, "N_list": n_list}
    _emit("decorr", params, ["N", "value"], rows, fmt or "csv", out, no_timestamp, plot)


@main.command()
@click.option("--N", "n_step", type=int, required=True)
@click.option("--M", "m_intervals", type=int, default=64, show_default=True)
@click.option("--R", "r_paths", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=0, envvar="KOLMO_SEED", show_default=True)
@click.option("--method", type=click.Choice(["spectral", "pathwise"]), default="spectral",
              show_default=True)
@FORMAT_OPT
@OUT_OPT
@NOTS_OPT
@PLOT_OPT
@THREADS_OPT
def sample(n_step, m_intervals, r_paths, seed, method, fmt, out, no_timestamp, plot, threads):
    """Sample loop paths; rows are (path_id, t, value)."""
    grid = sampler.PathGrid.regular(m_intervals)
    if method == "spectral":
        ens = sampler.sample_spectral(n_step, grid, r_paths, seed, threads=threads)
    else:
        ens = sampler.sample_pathwise(n_step, grid, r_paths, seed, threads=threads)
    rows = [
        [pid, t, float(ens.paths[pid, i])]
        for pid in range(r_paths)
        for i, t in enumerate(grid.times)
    ]
    params = {"N": n_step, "M": m_intervals, "R": r_paths, "seed": seed, "method": method}
    _emit("sample", params, ["path_id", "t", "value"], rows, fmt or "csv", out, no_timestamp, plot)


@main.command()
@click.option("--N-list", "n_list", default="16,64,256", show_default=True)
@click.option("--t-list", "t_list", default="0.25,0.5,0.75", show_default=True)
@click.option("--R", "r_paths", type=int, default=10000, show_default=True)
@click.option("--seed", type=int, default=0, envvar="KOLMO_SEED", show_default=True)
@FORMAT_OPT
@OUT_OPT
@NOTS_OPT
@PLOT_OPT
@THREADS_OPT
def fluctuation(n_list, t_list, r_paths, seed, fmt, out, no_timestamp, plot, threads):
    """Empirical fluctuation variances vs the analytic kernel and its limit."""
    ns = _parse_list(n_list, int)
    ts = _parse_list(t_list, float)
    for t in ts:
        if not 0.0 <= t <= 1.0:
            raise click.BadParameter(f"t={t} outside [0, 1]")
    times = tuple(sorted({0.0, 1.0, *ts}))
    grid = sampler.PathGrid(times)
    rows = []
    for n_step in ns:
        ens = sampler.sample_spectral(n_step, grid, r_paths, seed, threads=threads)
        for stat in sampler.fluctuation_rows(ens):
            if stat["t"] in ts:
                rows.append(
                    [n_step, stat["t"], stat["emp_var"], stat["analytic_NCn"], stat["semicircle"]]
                )
    params = {"N_list": n_list, "t_list": t_list, "R": r_paths, "seed": seed}
    header = ["N", "t", "emp_var", "analytic_NCn", "semicircle"]
    _emit("fluctuation", params, header, rows, fmt or "csv", out, no_timestamp, plot)


@main.command("hankel-check")
@click.option("--N", "n_size", type=int, required=True)
@FORMAT_OPT
@OUT_OPT
@NOTS_OPT
def hankel_check(n_size, fmt, out, no_timestamp):
    """Verify the exact Hankel system invariants and dump the polynomials."""
    checks = []
    polys_json = []
    try:
        sys_ = hankel.build_hankel_system(n_size)
        checks.append(("inverse-identity", True))
        two_route = all(
            hankel.cond_poly_from_inverse(sys_, l) == sys_.cond_polys[l - 1]
            for l in range(1, n_size + 1)
        )
        checks.append(("alpha-two-routes", two_route))
        eighth = Fraction(1, 8)
        equiv = all(
            hankel.hankel_covariance(n_size, i * eighth, j * eighth)
            == kernels.loop_covariance_exact(n_size, i * eighth, j * eighth)
            for i in range(9)
            for j in range(i, 9)
        ) if n_size <= 8 else None
        if equiv is not None:
            checks.append(("covariance-equivalence", equiv))
        boundary = all(
            hankel.hankel_covariance(n_size, Fraction(i, 4), Fraction(1)) == 0 for i in range(5)
        )
        checks.append(("endpoint-pinned", boundary))
        polys_json = [
            [format_fraction(c) for c in p.coeffs] for p in sys_.cond_polys
        ]
    except Exception as exc:  # noqa: BLE001 - report, then fail
        checks.append(("build", False))
        click.echo(f"build failed: {exc}", err=True)
    ok = all(flag for _, flag in checks)
    if fmt == "csv":
        _emit("hankel-check", {"N": n_size}, ["check", "status"],
              [[name, "PASS" if flag else "FAIL"] for name, flag in checks],
              "csv", out, no_timestamp)
    else:
        for name, flag in checks:
            click.echo(f"[{'PASS' if flag else 'FAIL'}] {name}")
        payload = {
            "schema_version": 1,
            "meta": build_meta("hankel-check", {"N": n_size}, timestamp=not no_timestamp),
            "checks": [{"check": n, "pass": f} for n, f in checks],
            "cond_polys": polys_json,
        }
        write_text(out, json.dumps(payload, indent=2) + "\n")
    if not ok:
        raise SystemExit(1)


@main.command()
@click.option("--n-list", "n_list", default="50,100,200,400", show_default=True)
@click.option("--grid", "grid_pts", type=int, default=65, show_default=True)
@click.option("--family", type=click.Choice(["legendre", "integral", "both"]), default="both",
              show_default=True)
@FORMAT_OPT
@OUT_OPT
@NOTS_OPT
@PLOT_OPT
def asymptotics(n_list, grid_pts, family, fmt, out, no_timestamp, plot):
    """Main-term approximation errors on a theta grid.

    Rows carry the reference value, the cosine main term, and the
    n^{3/2}-scaled absolute error for each (family, n, theta).
    """
    ns = _parse_list(n_list, int)
    thetas = np.linspace(math.pi / 6, 5 * math.pi / 6, grid_pts)
    families = ["legendre", "integral"] if family == "both" else [family]
    rows = []
    for fam in families:
        for n in ns:
            p = legendre_all(n + 1, np.cos(thetas))
            if fam == "legendre":
                exact = p[n]
                apx = darboux_approximant(0, 0, n)
            else:
                exact = ((n - 1) / 2.0) * (p[n] - p[n - 2]) / (2 * n - 1)
                apx = darboux_approximant(-1, -1, n)
            for i, th in enumerate(thetas):
                approx = darboux_main_term(apx, float(th))
                rows.append(
                    [fam, n, float(th), float(exact[i]), approx,
                     n**1.5 * abs(float(exact[i]) - approx)]
                )
    params = {"n_list": n_list, "grid": grid_pts, "family": family}
    header = ["family", "n", "theta", "exact", "approx", "scaled_error"]
    _emit("asymptotics", params, header, rows, fmt or "csv", out, no_timestamp, plot)


@main.command("verify-all")
@click.option("--level", type=click.Choice(list(verify.LEVELS)), default="exact",
              show_default=True)
@FORMAT_OPT
@OUT_OPT
@NOTS_OPT
def verify_all(level, fmt, out, no_timestamp):
    """Run the self-verification suites; exit 0 iff every check passes."""
    results = verify.run_checks(level)
    rows = [[r["check"], r["level"], r["status"], r["detail"], r["seconds"]] for r in results]
    header = ["check", "level", "status", "detail", "seconds"]
    if fmt == "json":
        _emit("verify-all", {"level": level}, header, rows, "json", out, no_timestamp)
    else:
        width = max(len(r["check"]) for r in results)
        for r in results:
            click.echo(f"[{r['status']}] {r['check']:<{width}}  {r['detail']} ({r['seconds']}s)")
        if out != "-":
            _emit("verify-all", {"level": level}, header, rows, "csv", out, no_timestamp)
    failed = [r for r in results if r["status"] != "PASS"]
    click.echo(f"{len(results) - len(failed)}/{len(results)} checks passed")
    if failed:
        raise SystemExit(1)


if __name__ == "__main__":
    main()
