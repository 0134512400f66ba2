"""Command-line front end: driftpp run | generate | report.

Configs are flat key=value text files, one pair per line, with # comments.
Paths inside a config resolve relative to the config file. The DRIFTPP_LOG
environment variable (error|warn|info|debug) sets the log level.

Exit codes: 0 success, 1 error, 2 success with at least one drift alarm.
"""
from __future__ import annotations

import argparse
import glob as globlib
import hashlib
import json
import logging
import math
import os
import sys
from dataclasses import asdict
from pathlib import Path

from .adaptive import ChunkReport, RunConfig, drift_alarm, run_experiment
from .core import PredictionRecord
from .data import DriftSpec, StreamSpec, generate_stream, read_chunk_csv, write_chunk_csv
from .errors import ConfigError, DriftppError
from .knn import KnnConfig
from .learnpp import LearnPPConfig
from .metrics import auc, confusion, f1, fnr

__all__ = ["main", "cmd_generate", "cmd_run", "cmd_report"]

logger = logging.getLogger(__name__)

_LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}

_GENERATE_KEYS = {
    "n_chunks": True,
    "chunk_size": True,
    "dimensionality": True,
    "class_balance": False,
    "noise": False,
    "seed": False,
    "drift_kind": False,
    "drift_at_chunk": False,
    "drift_magnitude": False,
    "drift_gradual_span": False,
}

_RUN_KEYS = {
    "initial_chunk": True,
    "chunks": True,
    "pc_count": False,
    "n_estimators": False,
    "window_size": False,
    "error_threshold": False,
    "max_retries": False,
    "max_window_ensembles": False,
    "knn_k": False,
    "knn_p": False,
    "seed": False,
    "drift_f1_drop": False,
    "drift_baseline_window": False,
    "has_header": False,
}

REPORT_COLUMNS = ["id", "f1", "auc", "fnr", "correct", "incorrect", "percent_correct", "drift_alarm"]


def _load_config(path: Path, known: dict[str, bool]) -> dict[str, str]:
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    values: dict[str, str] = {}
    for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{line_no}: expected key=value, got {stripped!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key not in known:
            raise ConfigError(f"{path}:{line_no}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{path}:{line_no}: duplicate key {key!r}")
        values[key] = value.strip()
    for key, required in known.items():
        if required and key not in values:
            raise ConfigError(f"{path}: missing required key {key!r}")
    return values


def _parse_typed(values: dict[str, str], key: str, kind, default):
    if key not in values:
        return default
    raw = values[key]
    try:
        if kind is bool:
            if raw.lower() in ("true", "1", "yes"):
                return True
            if raw.lower() in ("false", "0", "no"):
                return False
            raise ValueError(raw)
        return kind(raw)
    except ValueError:
        raise ConfigError(f"key {key!r}: cannot parse {raw!r} as {kind.__name__}") from None


def _parse_stream_spec(values: dict[str, str]) -> StreamSpec:
    drift = DriftSpec(
        kind=values.get("drift_kind", "none"),
        at_chunk=_parse_typed(values, "drift_at_chunk", int, 1),
        magnitude=_parse_typed(values, "drift_magnitude", float, 1.0),
        gradual_span=_parse_typed(values, "drift_gradual_span", int, 1),
    )
    return StreamSpec(
        n_chunks=_parse_typed(values, "n_chunks", int, None),
        chunk_size=_parse_typed(values, "chunk_size", int, None),
        dimensionality=_parse_typed(values, "dimensionality", int, None),
        class_balance=_parse_typed(values, "class_balance", float, 0.5),
        noise=_parse_typed(values, "noise", float, 0.0),
        seed=_parse_typed(values, "seed", int, 0),
        drift=drift,
    )


def _parse_run_config(values: dict[str, str], seed_override: int | None) -> RunConfig:
    window_size: int | None
    raw_window = values.get("window_size", "chunk")
    window_size = None if raw_window == "chunk" else _parse_typed(values, "window_size", int, None)
    raw_cap = values.get("max_window_ensembles", "unbounded")
    cap = None if raw_cap == "unbounded" else _parse_typed(values, "max_window_ensembles", int, None)
    seed = seed_override if seed_override is not None else _parse_typed(values, "seed", int, 0)
    learnpp = LearnPPConfig(
        n_estimators=_parse_typed(values, "n_estimators", int, 3),
        window_size=window_size,
        error_threshold=_parse_typed(values, "error_threshold", float, 0.5),
        max_retries=_parse_typed(values, "max_retries", int, 10),
        max_window_ensembles=cap,
        knn=KnnConfig(
            k=_parse_typed(values, "knn_k", int, 3),
            p=_parse_typed(values, "knn_p", float, 2.0),
        ),
        seed=seed,
    )
    return RunConfig(
        learnpp=learnpp,
        pc_count=_parse_typed(values, "pc_count", int, 75),
        drift_f1_drop=_parse_typed(values, "drift_f1_drop", float, 0.2),
        drift_baseline_window=_parse_typed(values, "drift_baseline_window", int, 3),
    )


def _resolve_chunk_paths(raw: str, base: Path) -> list[Path]:
    paths: list[Path] = []
    for part in raw.split(","):
        part = part.strip()
        if not part:
            continue
        candidate = Path(part)
        if not candidate.is_absolute():
            candidate = base / candidate
        if any(ch in part for ch in "*?["):
            matches = sorted(globlib.glob(str(candidate)))
            if not matches:
                raise ConfigError(f"chunk pattern matched nothing: {candidate}")
            paths.extend(Path(m) for m in matches)
        else:
            paths.append(candidate)
    if not paths:
        raise ConfigError("key 'chunks' resolved to an empty list")
    return paths


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_reports_csv(reports: list[ChunkReport], path: Path) -> None:
    lines = [",".join(REPORT_COLUMNS)]
    for report in reports:
        lines.append(
            ",".join(
                [
                    report.chunk_id,
                    _format_value(report.f1),
                    _format_value(report.auc),
                    _format_value(report.fnr),
                    str(report.correct_count),
                    str(report.incorrect_count),
                    _format_value(report.percent_correct),
                    _format_value(report.drift_alarm),
                ]
            )
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _print_report_table(rows: list[list[str]]) -> None:
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    for row in rows:
        print("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip())


def cmd_generate(args: argparse.Namespace) -> int:
    config_path = Path(args.config)
    values = _load_config(config_path, _GENERATE_KEYS)
    spec = _parse_stream_spec(values)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    chunks = generate_stream(spec)
    manifest = {"spec": asdict(spec), "chunks": []}
    for chunk in chunks:
        file_name = f"{chunk.id}.csv"
        file_path = out_dir / file_name
        write_chunk_csv(chunk, file_path)
        digest = hashlib.sha256(file_path.read_bytes()).hexdigest()
        manifest["chunks"].append({"file": file_name, "rows": len(chunk), "sha256": digest})
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    logger.info("wrote %d chunks to %s", len(chunks), out_dir)
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    config_path = Path(args.config)
    values = _load_config(config_path, _RUN_KEYS)
    config = _parse_run_config(values, args.seed)
    base = config_path.parent
    has_header = _parse_typed(values, "has_header", bool, True)

    initial_path = Path(values["initial_chunk"])
    if not initial_path.is_absolute():
        initial_path = base / initial_path
    if not initial_path.is_file():
        raise ConfigError(f"initial chunk file not found: {initial_path}")
    chunk_paths = _resolve_chunk_paths(values["chunks"], base)
    for path in chunk_paths:
        if not path.is_file():
            raise ConfigError(f"chunk file not found: {path}")

    initial = read_chunk_csv(initial_path, has_header)
    chunks = [read_chunk_csv(path, has_header) for path in chunk_paths]

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    records_path = out_dir / "records.jsonl"
    with records_path.open("w", encoding="utf-8", newline="\n") as records_file:

        def sink(record: PredictionRecord) -> None:
            records_file.write(
                json.dumps(
                    {
                        "chunk_id": record.chunk_id,
                        "index": record.index,
                        "truth": int(record.truth),
                        "predicted": int(record.predicted),
                        "score": record.score,
                    }
                )
                + "\n"
            )

        reports = run_experiment(initial, chunks, config, record_sink=sink)

    _write_reports_csv(reports, out_dir / "reports.csv")
    for report in reports:
        logger.info(
            "chunk %s: f1=%.4f auc=%.4f fnr=%.4f alarm=%s",
            report.chunk_id, report.f1, report.auc, report.fnr, report.drift_alarm,
        )
    return 2 if any(report.drift_alarm for report in reports) else 0


def cmd_report(args: argparse.Namespace) -> int:
    records_path = Path(args.records)
    if not records_path.is_file():
        raise ConfigError(f"records file not found: {records_path}")
    grouped: dict[str, list[PredictionRecord]] = {}
    with records_path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                payload = json.loads(line)
                record = PredictionRecord(
                    chunk_id=payload["chunk_id"],
                    index=payload["index"],
                    truth=payload["truth"],
                    predicted=payload["predicted"],
                    score=payload["score"],
                )
            except (ValueError, KeyError, TypeError) as exc:
                raise ConfigError(f"{records_path}: line {line_no}: {exc}") from None
            grouped.setdefault(record.chunk_id, []).append(record)
    if not grouped:
        print("no records")
        return 0

    config = RunConfig(
        drift_f1_drop=args.drift_f1_drop, drift_baseline_window=args.drift_baseline_window
    )
    rows = [REPORT_COLUMNS]
    baseline: list[float] = []
    for chunk_id, records in grouped.items():
        counts = confusion(records)
        try:
            auc_value = auc(records)
        except DriftppError:
            auc_value = math.nan
        f1_value = f1(counts)
        correct = counts.tp + counts.tn
        incorrect = counts.fp + counts.fn
        alarm = bool(baseline) and drift_alarm(f1_value, baseline, config)
        rows.append(
            [
                chunk_id,
                _format_value(f1_value),
                _format_value(auc_value),
                _format_value(fnr(counts)),
                str(correct),
                str(incorrect),
                _format_value(correct / (correct + incorrect)),
                _format_value(alarm),
            ]
        )
        baseline.append(f1_value)
    _print_report_table(rows)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="driftpp",
        description="Incremental ensemble classification over drifting chunked streams.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the adaptive pipeline over chunk files")
    run.add_argument("--config", required=True, help="key=value run config file")
    run.add_argument("--out", required=True, help="output directory for reports.csv and records.jsonl")
    run.add_argument("--seed", type=int, default=None, help="override the config seed")
    run.set_defaults(func=cmd_run)

    gen = sub.add_parser("generate", help="generate a synthetic chunked stream")
    gen.add_argument("--config", required=True, help="key=value stream config file")
    gen.add_argument("--out", required=True, help="output directory for chunk CSVs and manifest.json")
    gen.set_defaults(func=cmd_generate)

    rep = sub.add_parser("report", help="recompute per-chunk metrics from a records file")
    rep.add_argument("records", help="records.jsonl produced by a run")
    rep.add_argument("--drift-f1-drop", type=float, default=0.2, dest="drift_f1_drop")
    rep.add_argument(
        "--drift-baseline-window", type=int, default=3, dest="drift_baseline_window"
    )
    rep.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    level = _LOG_LEVELS.get(os.environ.get("DRIFTPP_LOG", "warn").lower(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DriftppError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
