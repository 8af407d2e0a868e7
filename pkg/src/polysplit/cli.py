"""``polysplit`` command-line interface.

Exit codes: 0 ok, 1 bad experiment setup, 2 scheme validation failure, 3 all runs diverged.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import bench
from .integrator import DivergenceError, integrate
from .liepoly import format_table, verify_vanishing
from .order import OrderWindowError, convergence_study, design_class_guard, omega
from .schemes import BUILTIN_NAMES, SchemeError, builtin_scheme, load_scheme_file, validate
from .systems import PROBLEMS, make_problem

EXIT_OK, EXIT_SPEC, EXIT_VALIDATION, EXIT_DIVERGED = 0, 1, 2, 3

COMPARATORS = ("NA14_6", "NB18_8", "SS19_8", "SS35_10", "CA6_6", "RKN17_12")


def _geometric(text: str) -> list[float]:
    try:
        lo, hi, count = text.split(":")
        lo, hi, count = float(lo), float(hi), int(count)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected MIN:MAX:COUNT, got {text!r}") from None
    if lo <= 0 or hi < lo or count < 1:
        raise argparse.ArgumentTypeError(f"bad range {text!r}")
    if count == 1:
        return [lo]
    ratio = (hi / lo) ** (1.0 / (count - 1))
    return [lo * ratio**i for i in range(count)]


def _linear(text: str) -> list[float]:
    try:
        lo, hi, count = text.split(":")
        return bench.alpha_grid(float(lo), float(hi), int(count))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected MIN:MAX:COUNT, got {text!r}") from None


def _schemes(args, default=("strang",)):
    names = list(args.scheme or [])
    files = list(getattr(args, "scheme_file", None) or [])
    if not names and not files:
        names = list(default)
    out = [builtin_scheme(n) for n in names]
    out += [load_scheme_file(p) for p in files]
    return out


def _add_scheme_args(p, repeat=True):
    p.add_argument("--scheme", action="append" if repeat else "store",
                   help=f"built-in scheme ({', '.join(BUILTIN_NAMES)})")
    p.add_argument("--scheme-file", action="append", metavar="PATH",
                   help="JSON coefficient file (repeatable)")


def _add_problem_args(p):
    p.add_argument("--problem", default="henon_heiles", choices=PROBLEMS)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--alpha", type=float, default=None, help="Hénon–Heiles initial-condition scale")


def _write(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_validate(args) -> int:
    try:
        schemes = _schemes(args, default=BUILTIN_NAMES)
    except SchemeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    ok = True
    rows = []
    for s in schemes:
        rep = validate(s)
        accepted = rep.accepted
        ok &= accepted
        rows.append({
            "scheme": s.name, "kind": s.kind, "order": s.order, "stages": s.stages,
            "symmetry_ok": rep.symmetry_ok, "sum_a": rep.sum_a, "sum_b": rep.sum_b,
            "l1": rep.l1_computed, "l1_declared": s.l1_declared, "l1_matches": rep.l1_matches,
            "accepted": accepted, "messages": rep.messages,
        })
    if args.format == "json":
        _write(json.dumps(rows, indent=2) + "\n", args.output)
    else:
        lines = ["scheme,kind,order,stages,symmetry_ok,sum_a,sum_b,l1,l1_declared,accepted"]
        for r in rows:
            lines.append(",".join(str(r[k]) for k in
                                  ("scheme", "kind", "order", "stages", "symmetry_ok", "sum_a",
                                   "sum_b", "l1", "l1_declared", "accepted")))
        _write("\n".join(lines) + "\n", args.output)
        for r in rows:
            for m in r["messages"]:
                print(f"{r['scheme']}: {m}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_VALIDATION


def cmd_order(args) -> int:
    schemes = _schemes(args)
    system, x0 = make_problem(args.problem, args.dim, args.seed or 0, args.alpha)
    hs = args.h_range or args.h
    out = []
    for s in schemes:
        entry = {"scheme": s.name, "omega": omega(s).as_dict(),
                 "design_class": design_class_guard(s, system)}
        if hs:
            try:
                est = convergence_study(s, system, x0, hs, args.tf)
                entry.update(slope=est.slope, h=est.h, errors=est.errors)
            except OrderWindowError as exc:
                print(f"error: {exc}", file=sys.stderr)
                return EXIT_SPEC
        out.append(entry)
    _write(json.dumps(out if len(out) > 1 else out[0], indent=2) + "\n", args.output)
    return EXIT_OK


def cmd_run(args) -> int:
    (scheme,) = _schemes(args)[:1]
    system, x0 = make_problem(args.problem, args.dim, args.seed or 0, args.alpha)
    design_class_guard(scheme, system)
    try:
        traj = integrate(scheme, system, x0, args.h, args.tf, sample_every=args.sample_every)
    except DivergenceError as exc:
        print(f"diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    if args.output:
        traj.to_csv(args.output)
    else:
        print("t,E,rel_energy_error")
        for t, e, r in zip(traj.times, traj.energies, traj.rel_energy_error):
            print(f"{float(t)!r},{float(e)!r},{float(r)!r}")
    print(json.dumps({"steps": traj.counter.steps, "force_evals": traj.counter.force_evals,
                      "h_requested": args.h, "h_actual": traj.h,
                      "max_rel_energy_error": traj.max_rel_energy_error}), file=sys.stderr)
    return EXIT_OK


def _emit_results(results, args, header, with_alpha=False, metadata=None):
    timing = not args.no_timing
    if args.format == "json":
        payload = {"results": [r.as_dict(timing) for r in results]}
        if metadata:
            payload["metadata"] = metadata
        _write(json.dumps(payload, indent=2) + "\n", args.output)
    else:
        lines = [header] + [r.csv_row(timing, with_alpha) for r in results]
        _write("\n".join(lines) + "\n", args.output)
        if metadata and args.output:
            Path(args.output + ".meta.json").write_text(json.dumps(metadata, indent=2) + "\n")


def _comparator_notice(schemes):
    names = {s.name for s in schemes}
    missing = [c for c in COMPARATORS if c not in names]
    if missing:
        print("note: comparison methods not loaded (supply --scheme-file): "
              + ", ".join(missing), file=sys.stderr)


def cmd_bench(args) -> int:
    schemes = _schemes(args)
    seeds = tuple(args.seed) if args.seed else (0,)
    spec = bench.ExperimentSpec(
        schemes=tuple(schemes), problem=args.problem, t_final=args.tf,
        h_values=tuple((args.h or []) + (args.h_range or [])),
        cost_rates=tuple(args.cost_range or []), seeds=seeds, dim=args.dim,
        alpha=args.alpha, metric=args.metric,
    )
    try:
        spec.check()
    except bench.SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    _comparator_notice(schemes)
    results = bench.run_efficiency(spec, jobs=args.jobs)
    _emit_results(results, args, bench.CSV_HEADER)
    if args.summary:
        lines = [bench.SUMMARY_HEADER] + [s.csv_row() for s in bench.summarize(results)]
        Path(args.summary).write_text("\n".join(lines) + "\n")
    if results and all(r.diverged for r in results):
        return EXIT_DIVERGED
    return EXIT_OK


def cmd_sweep(args) -> int:
    schemes = _schemes(args)
    alphas = (args.alpha or []) + (args.alpha_range or [])
    if not alphas:
        alphas = bench.alpha_grid(0.1, 1.2, 12)
    try:
        results = bench.run_alpha_sweep(schemes, alphas, args.tf, args.cost_rate, args.jobs)
    except bench.SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    meta = dict(bench.SWEEP_METADATA, cost_rate=args.cost_rate,
                cost_rule="force evaluations per unit time = stages / h")
    _emit_results(results, args, bench.SWEEP_HEADER, with_alpha=True, metadata=meta)
    if results and all(r.diverged for r in results):
        return EXIT_DIVERGED
    return EXIT_OK


def cmd_longrun(args) -> int:
    schemes = _schemes(args, default=("CA22_10",))
    lines = [bench.LONGRUN_HEADER]
    summary = []
    for s in schemes:
        try:
            rep = bench.run_longrun(s, bench.ProblemSpec("henon_heiles", alpha=args.alpha or 0.5),
                                    args.tf, args.cost_rate)
        except bench.SpecError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_SPEC
        except DivergenceError as exc:
            print(f"{s.name} diverged: {exc}", file=sys.stderr)
            continue
        for end, dec, run in rep.decades:
            lines.append(f"{s.name},{end!r},{dec!r},{run!r}")
        summary.append({"scheme": s.name, "h_actual": rep.h, "steps": rep.steps,
                        "force_evals": rep.force_evals, "t_final": rep.t_final,
                        "max_rel_energy_error": rep.max_rel_energy_error,
                        "drift_statistic": rep.drift_statistic})
    if not summary:
        return EXIT_DIVERGED
    _write("\n".join(lines) + "\n", args.output)
    text = json.dumps(summary, indent=2) + "\n"
    if args.output:
        Path(args.output + ".json").write_text(text)
    else:
        sys.stderr.write(text)
    return EXIT_OK


def cmd_schrodinger(args) -> int:
    from .schrodinger import build_grid, gaussian_initial, propagate

    (scheme,) = _schemes(args, default=("QA19_8",))[:1]
    try:
        grid = build_grid(args.n_points, args.xmin, args.xmax)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    try:
        res = propagate(scheme, grid, gaussian_initial(grid), args.h, args.tf,
                        sample_every=args.sample_every, swap_roles=args.swap_roles)
    except DivergenceError as exc:
        print(f"diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    if args.output:
        res.to_csv(args.output)
    else:
        print("t,energy,norm")
        for t, e, n in zip(res.times, res.energies, res.norms):
            print(f"{float(t)!r},{float(e)!r},{float(n)!r}")
    print(json.dumps({"scheme": scheme.name, "steps": res.steps, "h_actual": res.h,
                      "energy_error": res.energy_error, "max_norm_drift": res.max_norm_drift}),
          file=sys.stderr)
    return EXIT_OK


def cmd_lie_check(args) -> int:
    rows = []
    for n in args.degree or [2, 3]:
        for d in args.dim or [1, 2]:
            rows += verify_vanishing(n, d, args.trials, seed=args.seed)
    print(format_table(rows))
    return EXIT_OK if all(r.passed and r.below_threshold_nonzero for r in rows) else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polysplit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common_out(p, formats=True):
        p.add_argument("--output", "-o", default=None)
        if formats:
            p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("validate", help="check coefficient sets")
    _add_scheme_args(p)
    common_out(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("order", help="omega conditions and empirical order")
    _add_scheme_args(p)
    _add_problem_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--h", type=float, action="append")
    p.add_argument("--h-range", type=_geometric, metavar="MIN:MAX:COUNT")
    p.add_argument("--tf", type=float, default=10.0)
    common_out(p, formats=False)
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("run", help="integrate one trajectory")
    _add_scheme_args(p)
    _add_problem_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--tf", type=float, default=1000.0)
    p.add_argument("--sample-every", type=int, default=1)
    common_out(p, formats=False)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("bench", help="efficiency grid (cost vs error)")
    _add_scheme_args(p)
    _add_problem_args(p)
    p.add_argument("--seed", type=int, action="append")
    p.add_argument("--h", type=float, action="append")
    p.add_argument("--h-range", type=_geometric, metavar="MIN:MAX:COUNT")
    p.add_argument("--cost-range", type=_geometric, metavar="MIN:MAX:COUNT",
                   help="force evaluations per unit time; h = stages / rate")
    p.add_argument("--tf", type=float, default=1000.0)
    p.add_argument("--metric", choices=bench.METRICS, default="max_rel_energy_error")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--summary", metavar="PATH", help="write per-(scheme, h) ensemble means")
    p.add_argument("--no-timing", action="store_true", help="write 0.0 wall times (byte-stable output)")
    common_out(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("sweep-alpha", help="energy error vs Hénon–Heiles initial condition at fixed cost")
    _add_scheme_args(p)
    p.add_argument("--alpha", type=float, action="append")
    p.add_argument("--alpha-range", type=_linear, metavar="MIN:MAX:COUNT")
    p.add_argument("--tf", type=float, default=1000.0)
    p.add_argument("--cost-rate", type=float, default=bench.DEFAULT_COST_RATE,
                   help="force evaluations per unit time (stages / h)")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--no-timing", action="store_true")
    common_out(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("longrun", help="long-time energy error per decade")
    _add_scheme_args(p)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--tf", type=float, default=1e5)
    p.add_argument("--cost-rate", type=float, default=bench.DEFAULT_COST_RATE)
    common_out(p, formats=False)
    p.set_defaults(func=cmd_longrun)

    p = sub.add_parser("schrodinger", help="split-step Fourier propagation with the quartic potential")
    _add_scheme_args(p, repeat=False)
    p.add_argument("--n-points", type=int, default=256)
    p.add_argument("--xmin", type=float, default=-10.0)
    p.add_argument("--xmax", type=float, default=10.0)
    p.add_argument("--h", type=float, default=0.1)
    p.add_argument("--tf", type=float, default=100.0)
    p.add_argument("--sample-every", type=int, default=1)
    p.add_argument("--swap-roles", action="store_true",
                   help="potential takes the a-coefficients, kinetic the b-coefficients")
    common_out(p, formats=False)
    p.set_defaults(func=cmd_schrodinger)

    p = sub.add_parser("lie-check", help="exact commutator-vanishing checks")
    p.add_argument("--degree", type=int, action="append", help="force degree n (1-3)")
    p.add_argument("--dim", type=int, action="append", help="dimension (1-3)")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_lie_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "scheme", None) is not None and isinstance(args.scheme, str):
        args.scheme = [args.scheme]
    try:
        return args.func(args)
    except SchemeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC


if __name__ == "__main__":
    sys.exit(main())
