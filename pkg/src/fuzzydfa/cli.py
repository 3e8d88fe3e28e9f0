"""Batch front-end: parse problem files, dispatch to the solver, the lazy
code motion pipeline or the ANFIS tools, and emit JSON reports.

Exit codes: 0 success, 1 malformed/invalid input, 2 analysis did not
converge (the report is still printed).  Diagnostics go to stderr; reports
go to stdout with floats at 17 significant digits, so identical invocations
are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any

from . import _jsonio, anfis, flowgraph, lcm
from ._jsonio import FileFormatError
from .solver import SolverConfig, solve, solve_interval
from .truth import LogicFamily, TruthInterval

__all__ = ["main"]


def _emit(obj: Any) -> None:
    sys.stdout.write(_jsonio.dumps(obj) + "\n")


def _solver_config(args, file_logic, file_epsilon, file_max_iters) -> SolverConfig:
    family = LogicFamily.parse(args.logic) if args.logic else (file_logic or LogicFamily.minmax())
    epsilon = args.epsilon if args.epsilon is not None else (file_epsilon or 1e-6)
    max_iters = args.max_iters if args.max_iters is not None else (file_max_iters or 100_000)
    return SolverConfig(family=family, epsilon=epsilon, max_iters=max_iters)


def _fmt3(value) -> str:
    if isinstance(value, TruthInterval):
        return f"[{value.lo:.3f}, {value.hi:.3f}]"
    return f"{value:.3f}"


def _cmd_solve(args) -> int:
    graph, settings = flowgraph.load_graph_file(args.file)
    report = flowgraph.validate(graph)
    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    if not report.ok:
        for error in report.errors:
            print(f"error: {error}", file=sys.stderr)
        return 1
    cfg = _solver_config(args, settings.logic, settings.epsilon, settings.max_iters)
    runner = solve_interval if settings.mode == "interval" else solve
    result = runner(graph, cfg)
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as handle:
            handle.write(_jsonio.dumps(result.residual_trace) + "\n")
    if args.pretty:
        for node, valuation in result.final.items():
            values = ", ".join(f"{p}={_fmt3(v)}" for p, v in valuation.items())
            print(f"{node}: {values}")
        print(f"converged={result.converged} iterations={result.iterations}")
    else:
        _emit(result.to_json_dict())
    if args.seed_trace:
        _emit(result.residual_trace)
    return 0 if result.converged else 2


def _cmd_lcm(args) -> int:
    problem, settings = lcm.load_problem_file(args.file)
    mode = args.mode or settings.mode
    errors = lcm.validate_problem(problem, mode)
    if errors:
        for error in errors:
            print(f"error: {error}", file=sys.stderr)
        return 1
    family = LogicFamily.parse(args.logic) if args.logic else (settings.logic or LogicFamily.minmax())
    cfg = SolverConfig(
        family=family,
        epsilon=args.epsilon if args.epsilon is not None else (settings.epsilon or 1e-6),
        max_iters=args.max_iters if args.max_iters is not None else (settings.max_iters or 100_000),
    )
    result = lcm.lcm_pipeline(problem, mode, family, cfg, jobs=args.jobs)
    if args.pretty:
        _print_lcm_pretty(problem, result, args.motion_threshold)
    else:
        _emit(result.to_json_dict())
    return 0 if result.converged else 2


def _print_lcm_pretty(problem: lcm.LcmProblem, result: lcm.LcmResult, threshold: float) -> None:
    def exceeds(value) -> bool:
        lo = value.lo if isinstance(value, TruthInterval) else value
        return lo >= threshold

    print(f"mode={result.mode} exprs={len(result.exprs)} converged={result.converged}")
    print("Insert:")
    for (src, dst), row in result.insert.items():
        cells = "  ".join(_fmt3(v) for v in row)
        print(f"  {src}->{dst}: {cells}")
    print("Delete:")
    for block, row in result.delete.items():
        cells = "  ".join(_fmt3(v) for v in row)
        print(f"  {block}: {cells}")
    moves = []
    for (src, dst), row in result.insert.items():
        for k, v in enumerate(row):
            if exceeds(v):
                moves.append(f"insert {result.exprs[k]!r} on {src}->{dst} ({_fmt3(v)})")
    for block, row in result.delete.items():
        for k, v in enumerate(row):
            if exceeds(v):
                moves.append(f"delete {result.exprs[k]!r} from {block} ({_fmt3(v)})")
    if moves:
        print(f"plausible motions (>= {threshold}):")
        for move in moves:
            print(f"  {move}")


def _cmd_validate(args) -> int:
    with open(args.file, "r", encoding="utf-8") as handle:
        try:
            data = json.load(handle)
        except json.JSONDecodeError as exc:
            print(f"error: {args.file}:{exc.lineno}:{exc.colno}: {exc.msg}", file=sys.stderr)
            return 1
    if isinstance(data, dict) and "blocks" in data:
        problem, settings = lcm.problem_from_json_dict(data)
        errors = lcm.validate_problem(problem, settings.mode)
        warnings: list[str] = []
    elif isinstance(data, dict) and "rules" in data:
        anfis.model_from_json_dict(data)
        errors, warnings = [], []
    else:
        graph, _ = flowgraph.graph_from_json_dict(data)
        report = flowgraph.validate(graph)
        errors, warnings = report.errors, report.warnings
    for warning in warnings:
        print(f"warning: {warning}", file=sys.stderr)
    if errors:
        for error in errors:
            print(f"error: {error}", file=sys.stderr)
        return 1
    print("ok")
    return 0


def _cmd_anfis_predict(args) -> int:
    model = anfis.load_model_file(args.model)
    try:
        x = [float(part) for part in args.input.split(",") if part.strip()]
    except ValueError:
        print(f"error: bad input vector {args.input!r}", file=sys.stderr)
        return 1
    prediction = anfis.predict(model, x)
    if args.pretty:
        print(f"output: {prediction.output:.6f}")
        for i, (w, nw, f) in enumerate(
            zip(prediction.firing, prediction.normalized, prediction.rule_outputs), start=1
        ):
            print(f"rule {i}: w={w:.3f} w_norm={nw:.3f} f={f:.6f}")
    else:
        _emit(
            {
                "output": prediction.output,
                "firing": prediction.firing,
                "normalized": prediction.normalized,
                "rule_outputs": prediction.rule_outputs,
            }
        )
    return 0


def _cmd_anfis_train(args) -> int:
    with open(args.models, "r", encoding="utf-8") as handle:
        try:
            data = json.load(handle)
        except json.JSONDecodeError as exc:
            print(f"error: {args.models}:{exc.lineno}:{exc.colno}: {exc.msg}", file=sys.stderr)
            return 1
    _jsonio.check_keys(data, "models", ["update", "leave"])
    update_model = anfis.model_from_json_dict(data["update"])
    leave_model = anfis.model_from_json_dict(data["leave"])
    X, labels = anfis.read_samples_csv(args.data)
    periods, period_labels = anfis.split_periods(X, labels, args.period_length)
    tc = anfis.TrainConfig(mu=args.mu, retrain_error_threshold=args.threshold)
    result = anfis.run_harness(update_model, leave_model, periods, period_labels, tc)
    if args.csv_out:
        with open(args.csv_out, "w", encoding="utf-8") as handle:
            handle.write("period,error_rate\n")
            for i, rate in enumerate(result.error_rates):
                handle.write(f"{i},{format(rate, '.17g')}\n")
    if args.save_models:
        payload = {
            "update": anfis.model_to_json_dict(result.update_model),
            "leave": anfis.model_to_json_dict(result.leave_model),
        }
        with open(args.save_models, "w", encoding="utf-8") as handle:
            handle.write(_jsonio.dumps(payload) + "\n")
    _emit({"error_rates": result.error_rates})
    return 0


class _Parser(argparse.ArgumentParser):
    # Usage errors exit 1; exit 2 is reserved for non-convergence.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"error: {message}\n")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fuzzydfa", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--epsilon", type=float, default=None, help="solution tolerance (default 1e-6)")
        p.add_argument("--max-iters", type=int, default=None, help="iteration cap (default 100000)")
        p.add_argument("--logic", default=None,
                       help="minmax | product | lukasiewicz | nilpotent | frank:<s>")
        p.add_argument("--pretty", action="store_true", help="human-readable output")

    p = sub.add_parser("solve", help="solve a flow-graph problem to a fixed point")
    p.add_argument("file")
    common(p)
    p.add_argument("--trace", default=None, help="write the residual trace to this path")
    p.add_argument("--seed-trace", action="store_true",
                   help="also print the residual trace to stdout")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("lcm", help="run the four-stage lazy code motion pipeline")
    p.add_argument("file")
    common(p)
    p.add_argument("--mode", choices=list(lcm.MODES), default=None,
                   help="crisp | fuzzy | interval (default: from the file)")
    p.add_argument("--jobs", type=int, default=1, help="per-expression parallelism")
    p.add_argument("--motion-threshold", type=float, default=0.95,
                   help="degree above which --pretty reports a motion as plausible")
    p.set_defaults(func=_cmd_lcm)

    p = sub.add_parser("validate", help="validate a problem or model file")
    p.add_argument("file")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("anfis-predict", help="evaluate an ANFIS model on one input")
    p.add_argument("model")
    p.add_argument("--input", required=True, help="comma-separated input vector")
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(func=_cmd_anfis_predict)

    p = sub.add_parser("anfis-train", help="run the update/leave decision harness")
    p.add_argument("models", help="JSON file with 'update' and 'leave' models")
    p.add_argument("data", help="CSV with columns x1..xn,label")
    p.add_argument("--mu", type=float, required=True, help="LMS step size")
    p.add_argument("--threshold", type=float, default=0.8,
                   help="period error rate that triggers a least-squares refit")
    p.add_argument("--period-length", type=int, default=25)
    p.add_argument("--csv-out", default=None, help="write per-period error rates as CSV")
    p.add_argument("--save-models", default=None, help="write the adapted models as JSON")
    p.set_defaults(func=_cmd_anfis_train)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, anfis.NoRuleFiresError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
