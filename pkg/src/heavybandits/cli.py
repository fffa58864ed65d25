"""Command-line entry point: ``heavybandits <subcommand> [--config PATH] ...``."""
from __future__ import annotations

import argparse
import json
import sys

from . import engine
from .engine import ConfigError

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="heavybandits",
                                 description="Heavy-tailed bandit experiments and numerical checks.")
    sub = ap.add_subparsers(dest="command", required=True)
    helps = {
        "estimators": "error of mean estimators on a heavy-tailed stream",
        "bandit": "time-averaged regret of bandit policies",
        "grid": "grid search over policy or estimator hyperparameters",
        "check": "anti-concentration checks for perturbation families",
        "bounds": "leading-order regret rates over a (K, T) grid",
    }
    for name, text in helps.items():
        sp = sub.add_parser(name, help=text)
        sp.add_argument("--config", help="JSON experiment description")
        sp.add_argument("--out", help="CSV output path (default: config 'output' or stdout)")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--runs", type=int)
        sp.add_argument("--horizon", type=int)
        sp.add_argument("--workers", type=int, help="worker processes for independent trials")
        if name == "grid":
            sp.add_argument("--evaluate", action="store_true",
                            help="after tuning, run the full experiment with the best values")
    return ap


def _load(args) -> engine.ExperimentConfig:
    raw = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{args.config}: invalid JSON ({exc})") from exc
    if args.command == "grid":
        raw.setdefault("mode", "grid")
    else:
        raw["mode"] = args.command
    if raw.get("mode") not in engine.MODES:
        raise ConfigError(f"unsupported mode {raw.get('mode')!r}")
    if args.horizon is not None:
        raw["horizon"] = args.horizon  # counterexample instances depend on T
    cfg = engine.config_from_dict(raw)
    return cfg.with_overrides(seed=args.seed, runs=args.runs, horizon=args.horizon, workers=args.workers)


def _emit(rows, path, columns=None):
    text = engine.write_table(rows, path, columns)
    if not path:
        sys.stdout.write(text)


def run(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _load(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = args.out or cfg.output
    try:
        if args.command == "check":
            _emit(engine.check_rows(cfg), out)
        elif args.command == "bounds":
            _emit(engine.bounds_rows(cfg), out)
        elif args.command == "grid":
            res = engine.grid_search(cfg, cfg.grid or None)
            _emit(engine.grid_rows(res), out)
            for label, (v, score) in res.best.items():
                print(f"best {label}: {v!r} (score {score!r})", file=sys.stderr)
            if args.evaluate:
                best = res.best_config(cfg)
                rows = engine.run_experiment(best)
                _emit(rows, out + ".eval.csv" if out else None)
        else:
            _emit(engine.run_experiment(cfg), out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (RuntimeError, ValueError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
