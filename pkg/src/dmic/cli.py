"""``dmic`` command-line front end.

Exit codes: 0 success, 2 input error, 3 not applicable, 4 budget exceeded,
5 counterexample search exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import channel as chm
from . import classify as cl
from . import outer_bound as ob
from . import sumcap as sc
from .errors import BudgetExceeded, InputError, NotApplicable

SCHEMA = 1
EXIT_OK, EXIT_INPUT, EXIT_NA, EXIT_BUDGET, EXIT_EXHAUSTED = 0, 2, 3, 4, 5


class CliExit(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        super().__init__(message)


def _load(path: str) -> chm.ChannelTensor:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliExit(EXIT_INPUT, f"{path}: cannot read: {exc.strerror}") from exc
    try:
        return chm.loads_channel(text)
    except json.JSONDecodeError as exc:
        raise CliExit(EXIT_INPUT, f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from exc
    except InputError as exc:
        raise CliExit(EXIT_INPUT, f"{path}: {type(exc).__name__}: {exc}") from exc


def _fmt(v) -> str:
    return "null" if v is None else (str(v).lower() if isinstance(v, bool) else f"{v:.12g}")


def _emit(args, report: dict, lines: list[str]) -> None:
    if getattr(args, "json", False):
        print(json.dumps(report, indent=2))
    else:
        print("\n".join(lines))
    if getattr(args, "report", None):
        Path(args.report).write_text(json.dumps(report, indent=2) + "\n")


def _gap_config(args) -> cl.GapConfig:
    return cl.GapConfig(grid_step=args.grid_step, seed=args.seed, budget=args.budget, workers=args.workers)


def classify_report(ch: chm.ChannelTensor, tol: float, gap_cfg: cl.GapConfig) -> dict:
    one_sided = cl.is_one_sided(ch, tol)
    report: dict = {"one_sided": one_sided, "physically_degraded": None, "stochastically_degraded": None,
                    "witness": None, "weak_mi_condition": None, "weak_mi_gap": None}
    if one_sided:
        try:
            w = cl.is_physically_degraded_zic(ch, tol)
            report["physically_degraded"] = True
            report["witness"] = w.to_dict()
        except cl.NotFactorizable:
            report["physically_degraded"] = False
        try:
            ws = cl.is_stochastically_degraded(ch, max(tol, cl.FEAS_TOL))
            report["stochastically_degraded"] = True
            if report["witness"] is None:
                report["witness"] = ws.to_dict()
        except cl.Infeasible:
            report["stochastically_degraded"] = False
        gap = cl.weak_mi_gap(ch, gap_cfg)
        report["weak_mi_condition"] = gap.min_gap >= -tol
        report["weak_mi_gap"] = gap.to_dict()
    mixed = cl.is_mixed(ch, tol, gap_cfg)
    report["mixed"] = mixed.mixed
    report["mixed_evidence"] = mixed.to_dict()
    return report


def cmd_classify(args) -> int:
    ch = _load(args.file)
    body = classify_report(ch, args.tol, _gap_config(args))
    report = {"schema": SCHEMA, "command": "classify", "shape": list(ch.shape), **body}
    lines = [
        f"channel: |X1|={ch.n_x1} |X2|={ch.n_x2} |Y1|={ch.n_y1} |Y2|={ch.n_y2}",
        f"one_sided: {_fmt(body['one_sided'])}",
        f"physically_degraded: {_fmt(body['physically_degraded'])}",
        f"stochastically_degraded: {_fmt(body['stochastically_degraded'])}",
        f"weak_mi_condition: {_fmt(body['weak_mi_condition'])}"
        + (f" (min gap {_fmt(body['weak_mi_gap']['min_gap'])})" if body["weak_mi_gap"] else ""),
        f"mixed: {_fmt(body['mixed'])} (markov physical={_fmt(body['mixed_evidence']['markov_physical'])}, "
        f"stochastic={_fmt(body['mixed_evidence']['markov_stochastic'])}, "
        f"mixed MI condition min gap {_fmt(body['mixed_evidence']['min_gap'])})",
    ]
    if body["witness"] is not None:
        lines.append(f"witness ({body['witness']['kind']}): p(y1|x1,y2) = {body['witness']['p_y1_given_x1y2']}")
    _emit(args, report, lines)
    return EXIT_OK


def cmd_sumcap(args) -> int:
    ch = _load(args.file)
    cfg = sc.SumCapConfig(grid_step=args.grid_step, starts=args.starts, seed=args.seed, tol=args.tol,
                          budget=args.budget, workers=args.workers)
    solver = sc.sum_capacity_weak if args.theorem == "weak" else sc.sum_capacity_mixed
    res = solver(ch, cfg, force=args.force)
    report = {"schema": SCHEMA, "command": "sumcap", "theorem": args.theorem, **res.to_dict()}
    lines = [
        f"sum capacity ({args.theorem}): {res.value:.12f} bits",
        f"regime: {res.regime}",
        f"argmax p(x1): {[round(v, 12) for v in res.argmax.p1.tolist()]}",
        f"argmax p(x2): {[round(v, 12) for v in res.argmax.p2.tolist()]}",
        f"method: {res.method} ({res.evaluations} evaluations, grid step {args.grid_step})",
    ]
    lines += [f"  {k} = {v:.12f}" for k, v in res.objective_terms.items()]
    lines += [f"bound {k} = {v:.12f}" for k, v in res.bounds.items()]
    if args.oracle:
        orc = sc.grid_oracle(ch, args.theorem, args.oracle_step, budget=args.budget, workers=args.workers)
        delta = res.value - orc.value
        report["oracle"] = {"step": args.oracle_step, "value_bits": orc.value, "delta": delta}
        lines.append(f"grid oracle (step {args.oracle_step}): {orc.value:.12f} bits, delta {delta:.3e}")
    _emit(args, report, lines)
    return EXIT_OK


def cmd_outer_bound(args) -> int:
    ch = _load(args.file)
    if args.method == "basic":
        region = ob.basic_outer_bound(ch, step=args.grid_step or 0.02, budget=args.budget)
    else:
        dc = ob.construct_y2prime(ch, collapse=not args.bijection)
        if args.method == "dbc":
            region = ob.dbc_region(dc, u_size=args.u_size, step=args.grid_step or 0.1,
                                   refine_step=args.refine_step, budget=args.budget, workers=args.workers)
        else:
            region = ob.analytic_outer_bound(dc, n_points=args.points)
    csv = region.to_csv()
    summary = region.summary()
    report = {"schema": SCHEMA, "command": "outer-bound", "method": args.method, **summary,
              "provenance": region.provenance}
    lines = [f"method: {args.method}", f"R1 intercept: {summary['r1_intercept']:.12g}",
             f"R2 intercept: {summary['r2_intercept']:.12g}", f"max sum rate: {summary['max_sum']:.12g}",
             f"frontier points: {summary['points']}"]
    if args.out:
        Path(args.out).write_text(csv)
        lines.append(f"wrote {args.out}")
        _emit(args, report, lines)
    else:
        sys.stdout.write(csv)
        print("\n".join(lines), file=sys.stderr)
    return EXIT_OK


def cmd_counterexample(args) -> int:
    try:
        sizes = tuple(int(s) for s in args.sizes.split(","))
    except ValueError as exc:
        raise CliExit(EXIT_INPUT, f"--sizes must be four comma-separated integers: {args.sizes}") from exc
    if len(sizes) != 4 or min(sizes) < 2:
        raise CliExit(EXIT_INPUT, "--sizes needs four alphabet sizes, each at least 2")
    cfg = cl.GapConfig(grid_step=args.grid_step, seed=args.seed, budget=args.budget, workers=args.workers)
    found = cl.counterexample_search(args.seed, args.trials, sizes, cfg, tol=args.tol)
    if found is None:
        report = {"schema": SCHEMA, "command": "counterexample", "found": False, "trials": args.trials,
                  "seed": args.seed}
        _emit(args, report, [f"no counterexample in {args.trials} trials (seed {args.seed})"])
        return EXIT_EXHAUSTED
    check = classify_report(found, args.tol, cfg)
    report = {"schema": SCHEMA, "command": "counterexample", "found": True, "seed": args.seed,
              "verification": {"weak_mi_condition": check["weak_mi_condition"],
                               "stochastically_degraded": check["stochastically_degraded"],
                               "min_gap": check["weak_mi_gap"]["min_gap"]},
              "channel": chm.channel_to_dict(found)}
    lines = ["counterexample found: the weak-interference MI condition holds, channel is not stochastically degraded",
             f"weak_mi_condition: {_fmt(check['weak_mi_condition'])} "
             f"(min gap {_fmt(check['weak_mi_gap']['min_gap'])})",
             f"stochastically_degraded: {_fmt(check['stochastically_degraded'])}"]
    if args.out:
        chm.save_channel(found, args.out)
        lines.append(f"wrote {args.out}")
    else:
        lines.append(chm.dumps_channel(found).rstrip())
    _emit(args, report, lines)
    return EXIT_OK


def cmd_gaussian(args) -> int:
    vals = list(args.params)
    names = ["p1", "p2", "a", "b"]
    for i, v in enumerate(vals):
        if getattr(args, names[i]) is None:
            setattr(args, names[i], v)
    if args.p1 is None or args.p2 is None or args.a is None:
        raise CliExit(EXIT_INPUT, "P1, P2 and a are required")
    try:
        if args.zic:
            value = sc.gaussian_zic_sum_capacity(args.p1, args.p2, args.a)
        else:
            if args.b is None:
                raise CliExit(EXIT_INPUT, "--mixed needs b")
            value = sc.gaussian_mixed_sum_capacity(args.p1, args.p2, args.a, args.b)
    except InputError as exc:
        raise CliExit(EXIT_INPUT, f"{type(exc).__name__}: {exc}") from exc
    kind = "zic" if args.zic else "mixed"
    report = {"schema": SCHEMA, "command": "gaussian", "kind": kind, "P1": args.p1, "P2": args.p2,
              "a": args.a, "b": args.b, "value_bits": value}
    _emit(args, report, [f"{value:.12g}"])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dmic", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, grid_step=0.05):
        p.add_argument("--grid-step", type=float, default=grid_step)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=1e-9)
        p.add_argument("--budget", type=int, default=10**8)
        p.add_argument("--workers", type=int, default=1, help="threads for grid evaluation")
        p.add_argument("--json", action="store_true", help="print the JSON report instead of text")
        p.add_argument("--report", help="also write the JSON report to this path")

    p = sub.add_parser("classify", help="interference class of a channel")
    p.add_argument("file")
    common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("sumcap", help="sum capacity under weak or mixed interference")
    p.add_argument("file")
    p.add_argument("--theorem", choices=("weak", "mixed"), required=True)
    p.add_argument("--oracle", action="store_true", help="also run the exhaustive grid oracle")
    p.add_argument("--oracle-step", type=float, default=0.01)
    p.add_argument("--starts", type=int, default=64)
    p.add_argument("--force", action="store_true", help="evaluate outside the proven regime")
    common(p)
    p.set_defaults(func=cmd_sumcap)

    p = sub.add_parser("outer-bound", help="outer-bound region as CSV")
    p.add_argument("file")
    p.add_argument("--method", choices=("dbc", "analytic", "basic"), required=True)
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--out")
    p.add_argument("--bijection", action="store_true", help="use Y2' = (X1, Y2) instead of the collapsed label")
    p.add_argument("--u-size", type=int)
    p.add_argument("--refine-step", type=float, default=0.02)
    common(p, grid_step=None)
    p.set_defaults(func=cmd_outer_bound)

    p = sub.add_parser("counterexample", help="search for MI-condition channels that are not degraded")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--sizes", default="2,2,2,2")
    p.add_argument("--out")
    common(p)
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("gaussian", help="Gaussian sum-capacity formulas")
    kind = p.add_mutually_exclusive_group(required=True)
    kind.add_argument("--zic", action="store_true")
    kind.add_argument("--mixed", action="store_true")
    p.add_argument("params", nargs="*", type=float, help="P1 P2 a [b]")
    for name in ("p1", "p2", "a", "b"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--json", action="store_true")
    p.add_argument("--report")
    p.set_defaults(func=cmd_gaussian)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliExit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except InputError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NotApplicable as exc:
        print(f"not applicable: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NA
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
