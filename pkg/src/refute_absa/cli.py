"""Command line interface.

Subcommands:

* ``refute-absa run``    — estimate + refute the full grid from CSV inputs
* ``refute-absa synth``  — generate synthetic panels with known truths
* ``refute-absa report`` — re-emit tables and plots from a stored grid.json

The run config file is a flat JSON document; every key is optional and CLI
flags win over file values. See the README for the schema.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from .errors import ConfigError, RefuteAbsaError
from .ingest import FILL_POLICIES, load_prices, load_sentiment
from .pipeline import (
    SCALES,
    GridResult,
    RunConfig,
    compare_correlation,
    emit_matrix,
    load_grid,
    run_grid,
    save_grid,
)
from .refuter import RefutationConfig
from .signals import build_panels, dump_signals_csv
from .synthgen import (
    BUILTIN_SCENARIOS,
    generate,
    generate_builtin,
    load_scenario,
    write_synth,
)

_RUN_KEYS = (
    "lags",
    "tickers",
    "aspects",
    "top_k_aspects",
    "scale",
    "workers",
    "control_lagged_return",
    "control_activity",
    "comparison_r_threshold",
    "fill_policy",
)


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    unknown = set(doc) - set(_RUN_KEYS) - {"refutation"}
    if unknown:
        raise ConfigError(f"{path}: unknown config keys {sorted(unknown)}")
    return doc


def _build_run_config(doc: dict, args: argparse.Namespace) -> RunConfig:
    ref_doc = dict(doc.get("refutation", {}))
    if args.seed is not None:
        ref_doc["master_seed"] = args.seed
    refutation = RefutationConfig(**ref_doc)

    kwargs = {k: doc[k] for k in _RUN_KEYS if k in doc}
    for key in ("lags", "tickers", "aspects"):
        if kwargs.get(key) is not None and key in kwargs:
            kwargs[key] = tuple(kwargs[key])
    if args.workers is not None:
        kwargs["workers"] = args.workers
    if args.scale is not None:
        kwargs["scale"] = args.scale
    if args.fill_policy is not None:
        kwargs["fill_policy"] = args.fill_policy
    if getattr(args, "top_k", None) is not None:
        kwargs["top_k_aspects"] = args.top_k
    return RunConfig(refutation=refutation, **kwargs)


def write_outputs(result: GridResult, out_dir: Path, scale: str, threshold: float) -> None:
    from .plots import emit_plots

    out_dir.mkdir(parents=True, exist_ok=True)
    save_grid(result, out_dir / "grid.json")
    emit_matrix(result, out_dir / "matrix.csv", scale)
    compare_correlation(result, out_dir / "comparison.csv", scale, threshold)
    emit_plots(result, out_dir / "plots", scale)
    if result.elapsed_seconds is not None:
        info = {"elapsed_seconds": result.elapsed_seconds, "n_specs": result.run["n_specs"]}
        with open(out_dir / "run_info.json", "w", encoding="utf-8") as fh:
            json.dump(info, fh, indent=2)
            fh.write("\n")


def _cmd_run(args: argparse.Namespace) -> int:
    doc = _load_config_file(args.config)
    config = _build_run_config(doc, args)
    panels, calendar = load_prices(args.prices)
    raw = load_sentiment(args.sentiment, calendar, config.fill_policy)
    signals = build_panels(raw)
    if args.dump_signals:
        dump_signals_csv(args.dump_signals, signals, calendar)
    result = run_grid(panels, calendar, signals, config)
    out_dir = Path(args.out)
    write_outputs(result, out_dir, config.scale, config.comparison_r_threshold)
    n_ok = sum(1 for r in result.rows if r.status == "ok")
    n_validated = sum(1 for r in result.rows if r.validated)
    print(
        f"{result.run['n_specs']} specs ({n_ok} estimated, {n_validated} validated) "
        f"in {result.elapsed_seconds:.1f}s -> {out_dir}"
    )
    return 0


def _cmd_synth(args: argparse.Namespace) -> int:
    if args.scenario.startswith("builtin:"):
        name = args.scenario.split(":", 1)[1]
        if name not in BUILTIN_SCENARIOS:
            raise ConfigError(
                f"unknown builtin scenario {name!r}; expected one of {BUILTIN_SCENARIOS}"
            )
        data = generate_builtin(name, seed=args.seed)
    else:
        data = generate(load_scenario(args.scenario))
    paths = write_synth(data, args.out)
    print(
        f"{len(data.prices)} tickers x {len(data.counts)} aspects x "
        f"{len(data.calendar)} days -> {paths['prices'].parent}"
    )
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    in_dir = Path(args.in_dir)
    result = load_grid(in_dir / "grid.json")
    out_dir = Path(args.out) if args.out else in_dir
    scale = args.scale or result.run["config"].get("scale", "raw")
    threshold = result.run["config"].get("comparison_r_threshold", 0.4)
    out_dir.mkdir(parents=True, exist_ok=True)
    emit_matrix(result, out_dir / "matrix.csv", scale)
    compare_correlation(result, out_dir / "comparison.csv", scale, threshold)
    from .plots import emit_plots

    emit_plots(result, out_dir / "plots", scale)
    print(f"re-emitted tables and plots for {result.run['n_specs']} specs -> {out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="refute-absa",
        description="Refutation-validated sentiment/return association analysis",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="estimate and refute the full grid")
    run.add_argument("--prices", required=True, help="prices CSV (date,ticker,adj_close)")
    run.add_argument("--sentiment", required=True, help="sentiment CSV (date,aspect,pos,neg,neu)")
    run.add_argument("--config", help="JSON run config (flags override file values)")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--seed", type=int, help="master seed for all refutation streams")
    run.add_argument("--workers", type=int, help="parallel worker processes")
    run.add_argument("--scale", choices=SCALES, help="reported magnitudes: raw or bps")
    run.add_argument("--fill-policy", choices=FILL_POLICIES, dest="fill_policy",
                     help="non-trading-day sentiment handling")
    run.add_argument("--dump-signals", dest="dump_signals",
                     help="write the derived per-aspect signal CSV here")
    run.add_argument("--top-k", dest="top_k", type=int,
                     help="number of most-active aspects to analyse")
    run.set_defaults(func=_cmd_run)

    synth = sub.add_parser("synth", help="generate synthetic panels with known truths")
    synth.add_argument(
        "--scenario", required=True,
        help="scenario JSON path or builtin:{null,power,confounded,table1}",
    )
    synth.add_argument("--out", required=True, help="output directory")
    synth.add_argument("--seed", type=int, default=42, help="generation seed")
    synth.set_defaults(func=_cmd_synth)

    report = sub.add_parser("report", help="re-emit tables/plots from a stored grid")
    report.add_argument("--in", dest="in_dir", required=True, help="directory holding grid.json")
    report.add_argument("--out", help="output directory (default: same as --in)")
    report.add_argument("--scale", choices=SCALES, help="override the stored report scale")
    report.set_defaults(func=_cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except RefuteAbsaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
