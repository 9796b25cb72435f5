"""Command-line harness: run one problem, run the suite, or dump a trace.

Everything is deterministic; the only varying output field is wall time.
Suite rows execute independently (optionally in parallel) and are assembled
in a fixed order.

Outputs: a CSV with the columns
  problem,n,variant,x0,iterations,gradient_evals,value_evals,final_f,gap,status,seconds
a JSON file with the full configuration next to the suite CSV, and
line-delimited JSON trace records.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, replace

from .benchmarks import benchmark_names, get_benchmark, run_benchmark
from .bundle import InnerBudgetExhausted, SegmentSearchFailed
from .core import (
    STATUS_BUDGET,
    STATUS_SEGMENT_FAILED,
    Control,
    Controls,
    InvalidConfig,
    Params,
    RadiusReset,
    Trace,
)

CSV_HEADER = ["problem", "n", "variant", "x0", "iterations", "gradient_evals",
              "value_evals", "final_f", "gap", "status", "seconds"]

_PARAM_KEYS = set(Params.__dataclass_fields__)
_CONTROL_KEYS = {"t1_scale", "t2_factor", "g_family", "g_constant"}


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        cfg = json.load(fh)
    unknown = set(cfg) - _PARAM_KEYS - _CONTROL_KEYS
    if unknown:
        raise InvalidConfig([f"unknown config key {k!r}" for k in sorted(unknown)])
    return cfg


def _apply_overrides(bench, args, config: dict):
    """Registry defaults <- config file <- CLI flags."""
    params = bench.params
    controls = bench.controls

    merged = dict(config)
    for key, attr in (("variant", "variant"), ("eps0", "eps0"), ("delta", "delta"),
                      ("delta_prime", "delta_prime"), ("gap_tol", "gap_tol"),
                      ("f_target", "f_target"),
                      ("line_search_policy", "line_search"),
                      ("max_gradient_evals", "max_grads")):
        flag = getattr(args, attr, None)
        if flag is not None:
            merged[key] = flag
    param_over = {k: v for k, v in merged.items() if k in _PARAM_KEYS}
    if param_over:
        params = replace(params, **param_over)

    t1_scale = merged.get("t1_scale", getattr(args, "t1_scale", None))
    t2_factor = merged.get("t2_factor", getattr(args, "t2_factor", None))
    g_family = merged.get("g_family", getattr(args, "g_family", None))
    g_constant = merged.get("g_constant", 0.0)
    if params.variant == "B":
        controls = Controls(t1=Control("linear", 0.5), t2=controls.t2,
                            g=RadiusReset("first"))
    if t1_scale is not None or t2_factor is not None or g_family is not None:
        controls = Controls(
            t1=Control("linear", t1_scale) if t1_scale is not None else controls.t1,
            t2=Control("linear", t2_factor) if t2_factor is not None else controls.t2,
            g=RadiusReset(g_family, g_constant) if g_family is not None else controls.g,
        )
    return params, controls


def _run_one(name: str, n, mode, x0, params: Params | None, controls,
             variant: str | None):
    """Solve one problem; returns (row dict, trace or None)."""
    bench = get_benchmark(name, n=n, mode=mode)
    start_name = x0 or bench.default_start
    t0 = time.perf_counter()
    status = None
    trace: Trace | None = None
    try:
        trace = run_benchmark(bench, x0=start_name, variant=variant,
                              params=params, controls=controls)
        status = trace.status
    except SegmentSearchFailed as exc:
        trace, status = exc.trace, STATUS_SEGMENT_FAILED
    except InnerBudgetExhausted as exc:
        trace, status = exc.trace, STATUS_BUDGET
    seconds = time.perf_counter() - t0
    final_f = trace.final_f if trace else float("nan")
    gap = "" if bench.best_value is None else repr(final_f - bench.best_value)
    row = {
        "problem": bench.name,
        "n": bench.dimension,
        "variant": variant or (params.variant if params else bench.params.variant),
        "x0": start_name,
        "iterations": trace.iterations if trace else 0,
        "gradient_evals": trace.gradient_evals if trace else 0,
        "value_evals": trace.value_evals if trace else 0,
        "final_f": repr(final_f),
        "gap": gap,
        "status": status,
        "seconds": f"{seconds:.3f}",
    }
    return row, trace


def _trace_json_records(trace: Trace):
    for rec in trace.records:
        yield {
            "k": rec.k,
            "x": [float(v) for v in rec.x],
            "f": rec.f,
            "eps_k": rec.eps_entry,
            "eps_ki": list(rec.eps_inner),
            "branches": list(rec.branches),
            "a_norms": list(rec.a_norms),
            "sigma": rec.sigma,
            "metric_cond": rec.metric_cond,
            "grad_evals": rec.grad_evals,
            "value_evals": rec.value_evals,
        }


def cmd_run(args) -> int:
    try:
        bench = get_benchmark(args.problem, n=args.n, mode=args.mode)
    except KeyError:
        print(f"unknown problem {args.problem!r}; choices: {', '.join(benchmark_names())}",
              file=sys.stderr)
        return 2
    try:
        config = _load_config(args.config)
        params, controls = _apply_overrides(bench, args, config)
        row, trace = _run_one(args.problem, args.n, args.mode, args.x0,
                              params, controls, args.variant)
    except (InvalidConfig, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(" ".join(f"{k}={row[k]}" for k in CSV_HEADER))
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            w = csv.DictWriter(fh, fieldnames=CSV_HEADER)
            w.writeheader()
            w.writerow(row)
    if args.trace_out and trace is not None:
        with open(args.trace_out, "w", encoding="utf-8") as fh:
            for rec in _trace_json_records(trace):
                fh.write(json.dumps(rec) + "\n")
    return 0 if row["status"].startswith("converged") else 1


def suite_jobs(nesterov_max_n: int = 4) -> list[dict]:
    """The registered (benchmark, variant, x0) combinations, in fixed order."""
    jobs: list[dict] = []

    def add(name, n=None, mode=None, x0=None, variant="A", **over):
        jobs.append({"name": name, "n": n, "mode": mode, "x0": x0,
                     "variant": variant, "overrides": over})

    add("wolfe")
    for x0 in ("u+", "u+-", "v"):
        add("qmax", n=20, x0=x0)
    add("qmax", n=50, x0="u+")
    add("rosenbrock")
    add("rosenbrock", variant="B", gap_tol=1e-12)
    add("hilbert", n=10)
    add("hilbert", n=40)
    add("nesterov_smooth", n=4, variant="B", gap_tol=1e-12)
    for n in range(2, max(2, nesterov_max_n) + 1):
        add("nesterov_nonsmooth", n=n)
    add("nesterov_abs", n=2)
    for m in (1, 2):
        add("cheb_exp", n=2 * m, mode="perturbed-start")
        add("cheb_exp", n=2 * m, mode="perturbed-function")
    for variant in ("A", "B"):
        for x0 in ("zero", "ones"):
            add("regression", x0=x0, variant=variant)
    return jobs


def _suite_worker(job: dict):
    bench = get_benchmark(job["name"], n=job["n"], mode=job["mode"])
    params = bench.params
    if job["overrides"]:
        params = replace(params, **job["overrides"])
    row, _ = _run_one(job["name"], job["n"], job["mode"], job["x0"],
                      params, None, job["variant"])
    return row


def cmd_suite(args) -> int:
    jobs = suite_jobs(args.nesterov_max_n)
    if args.filter:
        wanted = {f.strip() for f in args.filter.split(",") if f.strip()}
        jobs = [j for j in jobs if j["name"] in wanted]
    if not jobs:
        print("no suite rows match the filter", file=sys.stderr)
        return 2

    if args.parallel:
        with ProcessPoolExecutor() as pool:
            rows = list(pool.map(_suite_worker, jobs))
    else:
        rows = [_suite_worker(j) for j in jobs]

    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_HEADER)
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        fh.write(buf.getvalue())

    config_path = args.out.rsplit(".", 1)[0] + ".json" if "." in args.out else args.out + ".json"
    configs = []
    for job in jobs:
        bench = get_benchmark(job["name"], n=job["n"], mode=job["mode"])
        params = replace(bench.params, **job["overrides"]) if job["overrides"] else bench.params
        configs.append({
            "problem": job["name"], "n": bench.dimension, "mode": job["mode"],
            "x0": job["x0"] or bench.default_start, "variant": job["variant"],
            "params": asdict(params),
            "controls": {
                "t1": asdict(bench.controls.t1),
                "t2": asdict(bench.controls.t2),
                "g": asdict(bench.controls.g),
            },
        })
    with open(config_path, "w", encoding="utf-8") as fh:
        json.dump(configs, fh, indent=2, sort_keys=True)
        fh.write("\n")

    bad = [r for r in rows if not r["status"].startswith("converged")]
    return 1 if bad else 0


def cmd_trace(args) -> int:
    try:
        bench = get_benchmark(args.problem, n=args.n, mode=args.mode)
    except KeyError:
        print(f"unknown problem {args.problem!r}", file=sys.stderr)
        return 2
    try:
        config = _load_config(args.config)
        params, controls = _apply_overrides(bench, args, config)
        _row, trace = _run_one(args.problem, args.n, args.mode, args.x0,
                               params, controls, args.variant)
    except (InvalidConfig, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if trace is None:
        return 1
    out = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        for rec in _trace_json_records(trace):
            out.write(json.dumps(rec) + "\n")
    finally:
        if args.out:
            out.close()
    return 0


def _add_problem_flags(p: argparse.ArgumentParser):
    p.add_argument("--problem", required=True, help="benchmark name")
    p.add_argument("--n", type=int, default=None, help="problem dimension")
    p.add_argument("--mode", default=None,
                   help="family mode (cheb_exp: perturbed-start / perturbed-function)")
    p.add_argument("--x0", default=None, help="named starting point")
    p.add_argument("--variant", choices=("A", "B"), default=None)
    p.add_argument("--eps0", type=float, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--delta-prime", dest="delta_prime", type=float, default=None)
    p.add_argument("--t1-scale", dest="t1_scale", type=float, default=None)
    p.add_argument("--t2-factor", dest="t2_factor", type=float, default=None)
    p.add_argument("--g-family", dest="g_family", default=None,
                   choices=("second", "first", "max", "min", "const"))
    p.add_argument("--line-search", dest="line_search", default=None,
                   choices=("armijo-expand", "first-non-decrease"))
    p.add_argument("--max-grads", dest="max_grads", type=int, default=None)
    p.add_argument("--f-target", dest="f_target", type=float, default=None)
    p.add_argument("--gap-tol", dest="gap_tol", type=float, default=None)
    p.add_argument("--config", default=None, help="JSON config file")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ballstep",
        description="Benchmark harness for the ball-bundle descent solver.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="solve one problem and print a summary line")
    _add_problem_flags(p_run)
    p_run.add_argument("--out", default=None, help="write the summary row as CSV")
    p_run.add_argument("--trace-out", dest="trace_out", default=None,
                       help="also write the full trace as JSON lines")
    p_run.set_defaults(func=cmd_run)

    p_suite = sub.add_parser("suite", help="run the registered benchmark suite")
    p_suite.add_argument("--out", required=True, help="CSV output path")
    p_suite.add_argument("--filter", default=None,
                         help="comma-separated problem names to keep")
    p_suite.add_argument("--parallel", action="store_true",
                         help="run rows in parallel processes")
    p_suite.add_argument("--nesterov-max-n", dest="nesterov_max_n", type=int, default=4,
                         help="largest chained nonsmooth dimension to include")
    p_suite.set_defaults(func=cmd_suite)

    p_trace = sub.add_parser("trace", help="solve one problem and dump its trace")
    _add_problem_flags(p_trace)
    p_trace.add_argument("--out", default=None, help="JSONL output path (default stdout)")
    p_trace.set_defaults(func=cmd_trace)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
