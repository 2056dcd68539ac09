"""Command line entry point: ``coordesc {gen,solve,bench,prox-check}``."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ..errors import ConfigurationError, CoordescError, FileError
from ..schemes import SCHEMES, SchemeConfig
from .instances import save_instance
from .proxcheck import run_prox_checks
from .records import aggregate, export_records
from .runner import PROBLEM_KINDS, ExperimentConfig, build_problem, reference_point, run_experiment

DEFAULT_BENCH_RULES = ("cyclic", "shuffled", "random", "GS_s", "GS_r", "GS_q")

# option key -> type; config files use the same keys as the long flags
_FLAG_TYPES = {
    "problem": str, "rule": str, "scheme": str, "epochs": int, "seed": int, "trials": int,
    "tol": float, "out": str, "lambda": float, "C": float, "rank": int, "continuation": float,
    "rules": str,
}


def read_config(path) -> dict:
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FileError(f"cannot read config {path}: {exc}") from exc
    out = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{n}: expected key=value, got {raw!r}")
        key, value = (t.strip() for t in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key not in _FLAG_TYPES:
            raise ConfigurationError(f"{path}:{n}: unknown key {key!r}")
        try:
            out[key] = _FLAG_TYPES[key](value)
        except ValueError as exc:
            raise ConfigurationError(f"{path}:{n}: bad value for {key}: {value!r}") from exc
    return out


def _add_common(p: argparse.ArgumentParser) -> None:
    # defaults are None so that a config file value survives unless the flag is given
    p.add_argument("--config", help="flat key=value file; explicit flags override it")
    p.add_argument("--problem", choices=PROBLEM_KINDS)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--lambda", dest="lambda", type=float, help="LASSO data-fit weight")
    p.add_argument("--C", dest="C", type=float, help="logistic / SVM penalty")
    p.add_argument("--rank", type=int, help="NMF rank")


def _add_run(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scheme", choices=SCHEMES)
    p.add_argument("--epochs", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--continuation", type=float, metavar="ETA",
                   help="LASSO continuation ratio; stages start at lambda0=1")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coordesc", description="Coordinate descent experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a generated instance to a file")
    _add_common(g)

    s = sub.add_parser("solve", help="run one rule/scheme configuration")
    _add_common(s)
    _add_run(s)
    s.add_argument("--rule")

    b = sub.add_parser("bench", help="compare several index rules on one instance")
    _add_common(b)
    _add_run(b)
    b.add_argument("--rules", help="comma-separated rule list (default: %s)" % ",".join(DEFAULT_BENCH_RULES))

    pc = sub.add_parser("prox-check", help="check composed proxes against a grid oracle")
    pc.add_argument("--seed", type=int, default=0)
    pc.add_argument("--trials", type=int, default=500, help="random inputs per pair and check")
    return parser


def merged_options(args: argparse.Namespace) -> dict:
    opts = read_config(args.config) if getattr(args, "config", None) else {}
    for key, value in vars(args).items():
        if key in ("command", "config") or value is None:
            continue
        opts[key] = value
    return opts


def problem_params(opts: dict) -> dict:
    kind = opts.get("problem", "lasso")
    params = {}
    if "lambda" in opts:
        if kind != "lasso":
            raise ConfigurationError("--lambda applies to the lasso problem only")
        params["lam"] = opts["lambda"]
    if "C" in opts:
        if kind not in ("logistic", "svm"):
            raise ConfigurationError("--C applies to logistic and svm only")
        params["C"] = opts["C"]
    if "rank" in opts:
        if kind != "nmf":
            raise ConfigurationError("--rank applies to nmf only")
        params["r"] = opts["rank"]
    return params


def _experiment(opts: dict, rule: str, out: str | None) -> ExperimentConfig:
    return ExperimentConfig(
        problem=opts.get("problem", "lasso"),
        params=problem_params(opts),
        rule=rule,
        scheme=SchemeConfig(scheme=opts.get("scheme", "prox_linear")),
        epochs=opts.get("epochs", 100),
        seed=opts.get("seed", 0),
        tolerance=opts.get("tol", 1e-10),
        trials=opts.get("trials", 1),
        output_path=out,
        continuation=opts.get("continuation"),
    )


def _summary(rule: str, records) -> str:
    agg = aggregate(records)
    epoch, obj, gmap, dist = agg.final[:4]
    return f"{rule:>10s}  epochs={epoch:5d}  objective={obj:.10g}  grad_map={gmap:.3e}  dist={dist:.3e}"


def cmd_gen(opts: dict) -> int:
    if "out" not in opts:
        raise ConfigurationError("gen needs --out")
    kind = opts.get("problem", "lasso")
    if kind not in ("lasso", "nmf", "logistic", "svm"):
        raise ConfigurationError(f"gen supports lasso, nmf, logistic and svm, not {kind}")
    problem = build_problem(kind, problem_params(opts), opts.get("seed", 0))
    path = save_instance(problem, opts["out"])
    print(f"wrote {kind} instance to {path}")
    return 0


def cmd_solve(opts: dict) -> int:
    rule = opts.get("rule", "cyclic")
    config = _experiment(opts, rule, opts.get("out"))
    records = run_experiment(config)
    print(_summary(rule, records))
    if config.output_path:
        print(f"wrote {config.output_path}")
    return 0


def cmd_bench(opts: dict) -> int:
    rules = [r.strip() for r in opts.get("rules", ",".join(DEFAULT_BENCH_RULES)).split(",") if r.strip()]
    out_dir = Path(opts["out"]) if "out" in opts else None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
    base = _experiment(opts, rules[0], None)
    # one reference shared by every rule
    ref = reference_point(build_problem(base.problem, base.params, base.seed), base.tolerance)
    for rule in rules:
        config = _experiment(opts, rule, None)
        records = run_experiment(config, reference=ref)
        if out_dir is not None:
            export_records(records, out_dir / f"{config.problem}_{rule}.csv")
        print(_summary(rule, records))
    return 0


def cmd_prox_check(opts: dict) -> int:
    n = opts.get("trials", 500)
    results = run_prox_checks(n_grid=n, n_inclusion=n, seed=opts.get("seed", 0))
    ok = True
    for r in results:
        good = r.oracle_error <= 1e-5 and r.inclusion_residual <= 1e-8
        ok &= good
        print(f"{'PASS' if good else 'FAIL'}  {r.name:<14s} oracle_err={r.oracle_error:.2e} "
              f"inclusion={r.inclusion_residual:.2e} ({r.grid_cases}+{r.inclusion_cases} inputs)")
    return 0 if ok else 1


COMMANDS = {"gen": cmd_gen, "solve": cmd_solve, "bench": cmd_bench, "prox-check": cmd_prox_check}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        opts = merged_options(args) if args.command != "prox-check" else vars(args)
        return COMMANDS[args.command](opts)
    except CoordescError as exc:
        print(f"coordesc: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
