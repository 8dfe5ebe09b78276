"""Command-line front end.

Subcommands::

    pmf           adaptive pmf/cdf table for one lambda
    stein-check   coefficient, residual, sup-norm, and Abel suites
    sb-check      size-bias identity cross-checks over a lambda grid
    queue-sim     seeded busy-period simulation with bound columns
    queue-bounds  bound columns only (no simulation)
    tails         exact tails vs lower/upper bounds
    report        every verification suite; CSVs plus a JSON summary

Every command is deterministic given its flags and ``--seed``; floats are
printed with 17 significant digits so output round-trips exactly.  Exit
codes: 0 all checks pass, 1 an assertion failed, 2 usage error, 3 numeric
failure (window overflow, quadrature, or series divergence).
``BOREL_STEIN_THREADS`` caps suite parallelism in ``report``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import acceptance, borel, concentration, mg1, sizebias, stein
from .borel import BorelParams
from .errors import (
    BorelSteinError,
    InsufficientWindow,
    QuadratureFailure,
    SumDivergenceGuard,
    WindowOverflow,
)
from .lawkit import moments, tv_distance

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3

_NUMERIC_ERRORS = (WindowOverflow, QuadratureFailure, SumDivergenceGuard, InsufficientWindow)

SUITE_SLUGS = {
    "1": "borel_validity",
    "2": "sizebias_mixture",
    "3": "sizebias_geometric",
    "4": "stein_envelope",
    "5": "abel_identity",
    "6": "stein_residual",
    "7": "stein_supnorm",
    "8": "tv_bound_domination",
    "9": "md1_exactness",
    "10": "queue_bounds",
    "11": "tail_bounds",
    "12": "aux_facts",
}


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if x is None:
        return "NA"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def _write_table(columns, rows, out: str | None, fmt: str) -> None:
    if fmt == "json":
        payload = {"columns": columns, "rows": [[_fmt(v) for v in r] for r in rows]}
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        lines = [",".join(columns)]
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        text = "\n".join(lines) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _parse_lambda_grid(args, parser, default_grid=None):
    if args.lam is not None and args.lambda_grid:
        parser.error("give either --lambda or --lambda-grid, not both")
    if args.lam is not None:
        grid = [args.lam]
    elif args.lambda_grid:
        try:
            grid = [float(tok) for tok in args.lambda_grid.split(",") if tok.strip()]
        except ValueError:
            parser.error(f"cannot parse --lambda-grid {args.lambda_grid!r}")
    else:
        grid = list(default_grid) if default_grid else None
        if grid is None:
            parser.error("one of --lambda or --lambda-grid is required")
    for lam in grid:
        if not 0.0 < lam < 1.0:
            parser.error(f"lambda must lie strictly in (0, 1), got {lam}")
    return grid


def _parse_service(spec: str, parser) -> mg1.ServiceModel:
    kind, _, rest = spec.partition(":")
    try:
        if kind == "deterministic":
            return mg1.deterministic()
        if kind == "exponential":
            return mg1.exponential()
        if kind == "gamma":
            return mg1.gamma_service(float(rest))
        if kind == "uniform":
            return mg1.uniform_symmetric(float(rest))
        if kind == "twopoint":
            low, prob = rest.split(":")
            return mg1.two_point(float(low), float(prob))
    except (ValueError, BorelSteinError) as exc:
        parser.error(f"bad service spec {spec!r}: {exc}")
    parser.error(
        f"unknown service {spec!r}; use deterministic, exponential, gamma:A, "
        "uniform:A, or twopoint:L:P"
    )


def _services_from(args, parser):
    if args.service == "all":
        return [
            mg1.deterministic(),
            mg1.exponential(),
            mg1.gamma_service(4.0),
            mg1.uniform_symmetric(0.5),
            mg1.two_point(0.5, 0.5),
        ]
    return [_parse_service(tok, parser) for tok in args.service.split(";")]


def _service_fields(s: mg1.ServiceModel):
    if s.kind == "gamma":
        return s.kind, _fmt(s.alpha)
    if s.kind == "uniform":
        return s.kind, _fmt(s.half_width)
    if s.kind == "two_point":
        return s.kind, f"{s.low:g}:{s.low_prob:g}"
    return s.kind, ""


def cmd_pmf(args, parser) -> int:
    grid = _parse_lambda_grid(args, parser)
    if len(grid) != 1:
        parser.error("pmf expects a single --lambda")
    p = BorelParams(grid[0])
    L = borel.law(p, args.eps, cap=args.cap)
    cdf = np.cumsum(L.probs)
    rows = [[j, L.probs[j - 1], cdf[j - 1]] for j in range(1, L.end + 1)]
    _write_table(["j", "pmf", "cdf"], rows, args.out, args.format)
    return EXIT_OK


def cmd_stein_check(args, parser) -> int:
    grid = _parse_lambda_grid(args, parser, default_grid=acceptance.LAMBDA_GRID)
    M = args.table_size
    if M < 3:
        parser.error("--table-size must be at least 3")
    if args.out and len(grid) != 1:
        parser.error("--out exports one coefficient table; give a single --lambda")
    failures = []
    for lam in grid:
        p = BorelParams(lam)
        table = stein.build_table(p, M)
        q = borel.pmf_values(p, M)
        for k in range(2, M + 1):
            if abs(table.a[k, k] - 1.0 / (k - 1)) > 1e-15:
                failures.append(f"diagonal(lambda={lam},k={k})")
                break
        for k in range(2, M + 1):
            j = np.arange(1, M + 1 - k)
            if j.size == 0:
                continue
            envelope = j * lam * q[j - 1] / (k - 1)
            bad = np.abs(table.a[k, k + 1 : M + 1]) > envelope + 1e-12
            if bad.any():
                m = k + 1 + int(np.argmax(bad))
                failures.append(f"envelope(lambda={lam},k={k},m={m})")
                break
        rng = acceptance.task_rng(args.seed, 101, int(lam * 1000))
        for rep in range(5):
            h = rng.uniform(-1.0, 1.0, size=M)
            sol = stein.solve_f(h, table)
            for k in range(2, min(31, M)):
                if stein.stein_residual(sol, h, k).residual > 1e-7:
                    failures.append(f"residual(lambda={lam},rep={rep},k={k})")
                    break
        cap = 1.0 / (1.0 - lam) ** 2
        for rep in range(20):
            h = rng.random(M)
            sol = stein.solve_f(h, table)
            overshoot = np.abs(sol.f[2:]) - (cap + sol.trunc_error[2:] + 1e-12)
            if (overshoot > 0).any():
                failures.append(f"supnorm(lambda={lam},rep={rep})")
                break
        if args.out:
            rows = []
            for k in range(2, M + 1):
                for m in range(k, M + 1):
                    bound = (
                        1.0 / (k - 1)
                        if m == k
                        else (m - k) * lam * q[m - k - 1] / (k - 1)
                    )
                    rows.append([k, m, table.a[k, m], bound])
            _write_table(["k", "m", "a_km", "lemma1_bound"], rows, args.out, args.format)
    for j in range(1, 61):
        if stein.abel_sum(j) != j**j:
            failures.append(f"abel(j={j})")
    if failures:
        print(f"FAIL: {failures[0]}" + (f" (+{len(failures) - 1} more)" if len(failures) > 1 else ""), file=sys.stderr)
        return EXIT_ASSERTION
    print(f"stein-check: all checks passed (lambda grid {grid}, M={M})")
    return EXIT_OK


def cmd_sb_check(args, parser) -> int:
    grid = _parse_lambda_grid(args, parser, default_grid=acceptance.LAMBDA_GRID)
    rows, ok = [], True
    for lam in grid:
        p = BorelParams(lam)
        L = borel.law(p, args.eps)
        star = sizebias.size_bias(L)
        rhs = sizebias.mixture_rhs(L, star, p, args.eps)
        eq4 = tv_distance(star, rhs)
        eq4_budget = 10.0 * (
            L.tail_mass + rhs.tail_mass + sizebias.size_bias_tail_estimate(L)
        )
        ref = sizebias.size_bias(borel.law(p, acceptance.REFERENCE_EPS))
        geo = sizebias.geometric_sum_law(p, args.eps)
        rem1 = tv_distance(ref, geo)
        rem1_budget = 10.0 * (
            geo.tail_mass
            + sizebias.size_bias_tail_estimate(borel.law(p, acceptance.REFERENCE_EPS))
            + args.eps
        )
        gap = moments(star).mean - moments(L).mean
        x_rel = abs(gap - sizebias.x_mean(p)) / sizebias.x_mean(p)
        order_ok = sizebias.check_stochastic_order(p, 500)
        ok &= (
            eq4.upper <= eq4_budget
            and rem1.upper <= rem1_budget
            and x_rel <= 1e-5
            and order_ok
        )
        rows.append(
            [lam, eq4.upper, eq4_budget, rem1.upper, rem1_budget, x_rel, int(order_ok)]
        )
    _write_table(
        [
            "lambda",
            "eq_mixture_upper",
            "eq_mixture_budget",
            "geometric_upper",
            "geometric_budget",
            "x_mean_rel_err",
            "order_ok",
        ],
        rows,
        args.out,
        args.format,
    )
    return EXIT_OK if ok else EXIT_ASSERTION


QUEUE_COLUMNS = [
    "lambda",
    "service_kind",
    "service_params",
    "n",
    "censored",
    "tv_lower",
    "tv_upper",
    "qbd1",
    "qbd2_or_NA",
    "var_s",
    "e_abs_s",
]


def _queue_row(lam, service, n, censored, tv_lo, tv_hi):
    kind, params = _service_fields(service)
    qbd2 = mg1.bound_qbd2(lam, service) if lam < 0.5 else None
    return [
        lam,
        kind,
        params,
        n,
        censored,
        tv_lo,
        tv_hi,
        mg1.bound_qbd1(lam, service),
        qbd2,
        mg1.service_variance(service),
        mg1.service_abs_moment(service),
    ]


def cmd_queue_sim(args, parser) -> int:
    grid = _parse_lambda_grid(args, parser, default_grid=acceptance.QUEUE_LAMBDAS)
    services = _services_from(args, parser)
    rows = []
    cell = 0
    for lam in sorted(grid):
        exact = borel.law(BorelParams(lam), 1e-10, cap=args.cap)
        for service in services:
            run_seed = int(
                acceptance.task_rng(args.seed, 20, cell).integers(0, 2**63 - 1)
            )
            cell += 1
            summary = mg1.simulate(
                lam, service, args.n, seed=run_seed, cap=args.cap, window=exact.end
            )
            iv = tv_distance(summary.empirical, exact)
            rows.append(
                _queue_row(
                    lam, service, args.n, summary.censored_count, iv.lower, iv.upper
                )
            )
    _write_table(QUEUE_COLUMNS, rows, args.out, args.format)
    return EXIT_OK


def cmd_queue_bounds(args, parser) -> int:
    grid = _parse_lambda_grid(args, parser, default_grid=acceptance.QUEUE_LAMBDAS)
    services = _services_from(args, parser)
    rows = []
    for lam in sorted(grid):
        for service in services:
            rows.append(_queue_row(lam, service, 0, 0, None, None))
            if lam >= 0.5:
                print(
                    f"note: qbd2 is NA at lambda={lam:g} (needs lambda < 1/2)",
                    file=sys.stderr,
                )
    _write_table(QUEUE_COLUMNS, rows, args.out, args.format)
    return EXIT_OK


def cmd_tails(args, parser) -> int:
    grid = _parse_lambda_grid(args, parser, default_grid=acceptance.LAMBDA_GRID)
    rows, ok = [], True
    for lam in sorted(grid):
        p = BorelParams(lam)
        for t in acceptance.T_GRID:
            low = concentration.exact_tail(p, t, "lower")
            lb = concentration.lower_tail_bound(t)
            ok &= low.value <= lb
            rows.append([lam, t, "lower", low.value, low.error_bar, lb, None, None, None])
            choice = concentration.optimize_delta(lam, t)
            params = concentration.make_params(lam, choice.delta)
            up = concentration.exact_tail(p, t, "upper")
            ok &= up.value <= choice.bound + up.error_bar
            rows.append(
                [
                    lam,
                    t,
                    "upper",
                    up.value,
                    up.error_bar,
                    choice.bound,
                    choice.delta,
                    params.gamma,
                    params.K,
                ]
            )
    _write_table(
        ["lambda", "t", "side", "exact", "exact_err", "bound", "delta_used", "gamma", "K"],
        rows,
        args.out,
        args.format,
    )
    return EXIT_OK if ok else EXIT_ASSERTION


def cmd_report(args, parser) -> int:
    out_dir = Path(args.out or "report_out")
    out_dir.mkdir(parents=True, exist_ok=True)
    workers = int(os.environ.get("BOREL_STEIN_THREADS", "1") or "1")
    results = acceptance.run_all(seed=args.seed, quick=args.quick, max_workers=max(workers, 1))
    summary = {
        "seed": args.seed,
        "quick": bool(args.quick),
        "criteria": [
            {
                "criterion_id": r.criterion_id,
                "status": r.status,
                "observed": r.observed,
                "threshold": r.threshold,
            }
            for r in results
        ],
    }
    for r in results:
        slug = SUITE_SLUGS[r.criterion_id]
        path = out_dir / f"crit_{int(r.criterion_id):02d}_{slug}.csv"
        lines = [",".join(r.columns)]
        lines += [",".join(_fmt(v) for v in row) for row in r.rows]
        path.write_text("\n".join(lines) + "\n")
    (out_dir / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n"
    )
    all_pass = all(r.passed for r in results)
    for r in results:
        print(
            f"[{r.status.upper():4s}] criterion {r.criterion_id:>2s}: {r.title} "
            f"(observed {_fmt(r.observed)}, threshold {_fmt(r.threshold)})"
        )
    print(f"report written to {out_dir}")
    return EXIT_OK if all_pass else EXIT_ASSERTION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="borelstein",
        description="Borel-distribution toolkit: laws, identities, bounds, checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, *, n_default=100_000):
        sp.add_argument("--lambda", dest="lam", type=float, default=None,
                        help="single offspring/arrival rate in (0,1)")
        sp.add_argument("--lambda-grid", default=None,
                        help="comma-separated rates, e.g. 0.1,0.3,0.5")
        sp.add_argument("--eps", type=float, default=1e-10,
                        help="truncation target for adaptive windows")
        sp.add_argument("--n", type=int, default=n_default, help="sample count")
        sp.add_argument("--seed", type=int, default=42, help="64-bit master seed")
        sp.add_argument("--cap", type=int, default=borel.DEFAULT_WINDOW_CAP,
                        help="censoring cap / window cap")
        sp.add_argument("--table-size", type=int, default=60,
                        help="coefficient-table window M")
        sp.add_argument("--out", default=None, help="output file (or report directory)")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--quick", action="store_true",
                        help="reduced sample sizes for fast runs")
        return sp

    common(sub.add_parser("pmf", help="pmf/cdf table"))
    common(sub.add_parser("stein-check", help="coefficient and equation suites"))
    common(sub.add_parser("sb-check", help="size-bias identity cross-checks"))
    qs = common(sub.add_parser("queue-sim", help="busy-period simulation"))
    qb = common(sub.add_parser("queue-bounds", help="bound columns only"))
    for sp in (qs, qb):
        sp.add_argument(
            "--service",
            default="all",
            help="deterministic | exponential | gamma:A | uniform:A | twopoint:L:P "
            "(semicolon-separated list, or 'all')",
        )
    common(sub.add_parser("tails", help="exact tails vs bounds"))
    common(sub.add_parser("report", help="run every suite, write CSVs + summary"))
    return parser


_DISPATCH = {
    "pmf": cmd_pmf,
    "stein-check": cmd_stein_check,
    "sb-check": cmd_sb_check,
    "queue-sim": cmd_queue_sim,
    "queue-bounds": cmd_queue_bounds,
    "tails": cmd_tails,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.eps is not None and not 0.0 < args.eps < 1.0:
        parser.error(f"--eps must lie in (0, 1), got {args.eps}")
    if args.n is not None and args.n < 1:
        parser.error("--n must be >= 1")
    try:
        return _DISPATCH[args.command](args, parser)
    except _NUMERIC_ERRORS as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except BorelSteinError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ASSERTION


if __name__ == "__main__":
    sys.exit(main())
