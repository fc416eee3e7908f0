"""Command-line interface.

Commands: select (full three-stage run), score (metrics only, no
selection), report (regenerate report.txt), inspect (one record's scores),
validate-config. Exit codes: 0 success, 2 configuration/validation error,
3 backend failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import signal
import sys
from pathlib import Path

from . import __version__
from .errors import BackendError, ConfigError, DatasetFormatError, PipelineError
from .pipeline import (
    SCORE_METRICS,
    PipelineConfig,
    run_pipeline,
    score_dataset,
)
from .records import load_dataset, write_scored
from .reporting import inspect_record, load_manifest, render_report

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BACKEND = 3
EXIT_IO = 4


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="path to the run configuration file")
    common.add_argument("--run-dir", help="run directory (overrides config)")
    common.add_argument("--seed", type=int, help="seed override")
    common.add_argument(
        "--offline", action="store_true",
        help="use deterministic stub backends; touches no network",
    )
    common.add_argument("--verbose", action="store_true", help="debug logging")

    parser = argparse.ArgumentParser(
        prog="thtb",
        description="Score instruction-tuning records by cognitive hardness "
        "and select a small high-hardness subset.",
    )
    parser.add_argument("--version", action="version", version=f"thtb {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_select = sub.add_parser(
        "select", parents=[common], help="run the full three-stage selection"
    )
    p_select.add_argument("input", help="dataset file (one JSON record per line)")
    p_select.set_defaults(func=cmd_select)

    p_score = sub.add_parser(
        "score", parents=[common], help="compute metrics for every record; no selection"
    )
    p_score.add_argument("input", help="dataset file (one JSON record per line)")
    p_score.add_argument(
        "--metrics", default="all",
        help=f"comma-separated subset of: {', '.join(SCORE_METRICS)} (or 'all')",
    )
    p_score.set_defaults(func=cmd_score)

    p_report = sub.add_parser(
        "report", parents=[common], help="regenerate report.txt from a run directory"
    )
    p_report.set_defaults(func=cmd_report)

    p_inspect = sub.add_parser(
        "inspect", parents=[common], help="print one record's full score card"
    )
    p_inspect.add_argument("index", type=int, help="record index")
    p_inspect.set_defaults(func=cmd_inspect)

    p_validate = sub.add_parser(
        "validate-config", parents=[common], help="check a configuration file"
    )
    p_validate.set_defaults(func=cmd_validate_config)

    return parser


def _load_config(args, required: bool = True) -> PipelineConfig:
    if args.config:
        config = PipelineConfig.from_file(args.config)
    elif required:
        raise ConfigError("--config is required for this command")
    else:
        config = PipelineConfig()
    if args.run_dir:
        config.run_dir = args.run_dir
    if args.seed is not None:
        config.seed = args.seed
    if args.offline:
        config.offline = True
    return config


def _require_run_dir(config: PipelineConfig) -> Path:
    if not config.run_dir:
        raise ConfigError("a run directory is required (--run-dir or config run_dir)")
    return Path(config.run_dir)


def _print_stage_table(manifest: dict) -> None:
    print(f"{'stage':<7}{'score':<12}{'in':>9}{'out':>9}")
    for entry in manifest.get("stages", []):
        print(
            f"{entry['stage']:<7}{entry['score']:<12}"
            f"{entry['population_in']:>9}{entry['population_out']:>9}"
        )


def cmd_select(args) -> int:
    config = _load_config(args, required=True)
    run_dir = _require_run_dir(config)
    dataset = load_dataset(args.input)
    try:
        result = run_pipeline(dataset, config)
    except Exception:
        _print_abort_notice(run_dir)
        raise
    manifest = result.manifest.to_json_dict()
    _print_stage_table(manifest)
    print(f"selected {manifest['selected_count']} of {len(dataset)} record(s) -> {run_dir / 'selected'}")
    print(f"dataset THTB score (selected): {manifest['thtb_score']:.4f}")
    return EXIT_OK


def _print_abort_notice(run_dir: Path) -> None:
    try:
        manifest = load_manifest(run_dir)
        stage = manifest.get("aborted_stage")
        if stage:
            print(f"run aborted at {stage}; partial manifest in {run_dir}", file=sys.stderr)
    except Exception:
        pass


def cmd_score(args) -> int:
    config = _load_config(args, required=False)
    run_dir = _require_run_dir(config)
    requested = [m.strip() for m in args.metrics.split(",") if m.strip()]
    if requested == ["all"]:
        metrics = list(SCORE_METRICS)
    else:
        unknown = [m for m in requested if m not in SCORE_METRICS]
        if unknown:
            raise ConfigError(
                f"unknown metric(s): {', '.join(unknown)}; "
                f"valid names: {', '.join(SCORE_METRICS)}"
            )
        metrics = requested
    dataset = load_dataset(args.input)
    cards = score_dataset(dataset, config, metrics=metrics)
    run_dir.mkdir(parents=True, exist_ok=True)
    out_path = run_dir / "scored_full"
    count = write_scored(out_path, dataset, cards)
    print(f"scored {count} record(s) ({', '.join(metrics)}) -> {out_path}")
    return EXIT_OK


def cmd_report(args) -> int:
    config = _load_config(args, required=False)
    run_dir = _require_run_dir(config)
    manifest = load_manifest(run_dir)
    scored_path = run_dir / "scored_full"
    cards = []
    if scored_path.exists():
        from .records import load_scored

        _, cards = load_scored(scored_path)
    top_terms_path = run_dir / "clusters" / "top_terms.txt"
    top_terms = top_terms_path.read_text(encoding="utf-8") if top_terms_path.exists() else None
    text = render_report(manifest, cards, top_terms)
    (run_dir / "report.txt").write_text(text, encoding="utf-8")
    print(text)
    return EXIT_OK


def cmd_inspect(args) -> int:
    config = _load_config(args, required=False)
    run_dir = _require_run_dir(config)
    print(inspect_record(run_dir, args.index))
    return EXIT_OK


def cmd_validate_config(args) -> int:
    if not args.config:
        raise ConfigError("--config is required for validate-config")
    config = PipelineConfig.from_file(args.config)
    print("config ok")
    print(json.dumps(config.snapshot(), indent=2))
    return EXIT_OK


def _sigterm_handler(signum, frame):  # noqa: ARG001 - signature fixed by signal API
    raise KeyboardInterrupt


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        signal.signal(signal.SIGTERM, _sigterm_handler)
    except ValueError:
        pass  # not in the main thread; graceful abort still covers SIGINT
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (PipelineError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BackendError as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except DatasetFormatError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return 130


if __name__ == "__main__":
    sys.exit(main())
