"""Command-line entry point: validate | mine | render | analyze | synth.

Exit codes: 0 success, 1 domain error, 2 I/O or usage error.  Options win
over the optional ``vpr.config.json`` config file, which wins over
built-in defaults.  ``VPR_ASSET_DIR`` is the asset-directory fallback.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import evalstats, figures
from .errors import VprError
from .event_log import parse_log, serialize_log, synth_log, validate_log
from .pattern_miner import (
    DEFAULT_MAX_LEN,
    compute_variants,
    default_min_support,
    mine_patterns,
    sectionize,
    sequence_from_steps,
)
from .renderer import FORMATS, RenderConfig, render, stub_runtime_js
from .step_mapper import attach_context, default_rules, load_rules, map_steps
from .vpr_model import build_document, deserialize_document, serialize_document

# 1x1 gray PNG used for synthetic screenshot assets.
PLACEHOLDER_PNG = bytes.fromhex(
    "89504e470d0a1a0a0000000d4948445200000001000000010802000000907753de"
    "0000000c4944415478da633871e2040004b4025928d352ec"
    "0000000049454e44ae426082"
)

CONFIG_FILENAME = "vpr.config.json"

_CONFIG_DEFAULTS = {
    "rules_path": None,
    "asset_dir": None,
    "coalesce_gap_ms": None,
    "min_support": None,
    "max_len": DEFAULT_MAX_LEN,
    "render": {"format": "P1", "palette": "km4", "section_colors": True,
               "embed_assets": True},
    "stats": {"threshold_sec": 30.0},
}


class ConfigError(VprError):
    pass


def load_config(path: str | None) -> dict:
    """Merge the optional config file over built-in defaults."""
    config = json.loads(json.dumps(_CONFIG_DEFAULTS))  # deep copy
    file_path = Path(path) if path else Path(CONFIG_FILENAME)
    if path is None and not file_path.is_file():
        return config
    with open(file_path, encoding="utf-8") as fh:
        loaded = json.load(fh)
    for key, value in loaded.items():
        if key not in config:
            raise ConfigError(f"unknown config key {key!r}")
        if isinstance(config[key], dict):
            for sub, subvalue in value.items():
                if sub not in config[key]:
                    raise ConfigError(f"unknown config key {key}.{sub}")
                config[key][sub] = subvalue
        else:
            config[key] = value
    return config


def _resolve_asset_dir(flag_value: str | None, config: dict) -> str | None:
    return flag_value or config.get("asset_dir") or os.environ.get("VPR_ASSET_DIR")


def _load_rules(flag_value: str | None, config: dict):
    rules_path = flag_value or config.get("rules_path")
    rules = load_rules(rules_path) if rules_path else default_rules()
    gap = config.get("coalesce_gap_ms")
    if gap is not None:
        rules = type(rules)(rules=rules.rules, coalesce_gap_ms=int(gap))
    return rules


def cmd_validate(args: argparse.Namespace, config: dict) -> int:
    with open(args.log, "rb") as fh:
        log = parse_log(fh)
    if log.capture_notes:
        print(f"note: {log.capture_notes}")
    asset_dir = _resolve_asset_dir(args.asset_dir, config)
    for diag in validate_log(log, asset_dir=asset_dir):
        print(f"warning [{diag.code}] {diag.message}")
    print(f"ok: {len(log.events)} events from {log.actor_id}")
    return 0


def cmd_synth(args: argparse.Namespace, config: dict) -> int:
    log = synth_log(args.seed, args.n, args.profile)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(serialize_log(log))
    asset_dir = Path(args.asset_dir) if args.asset_dir else out.parent / "assets"
    asset_dir.mkdir(parents=True, exist_ok=True)
    shots = sorted({e.screenshot_ref for e in log.events if e.screenshot_ref})
    for shot in shots:
        (asset_dir / shot).write_bytes(PLACEHOLDER_PNG)
    print(f"wrote {out} ({len(log.events)} events"
          + (f", {len(shots)} assets in {asset_dir}" if shots else "") + ")")
    return 0


def cmd_mine(args: argparse.Namespace, config: dict) -> int:
    rules = _load_rules(args.rules, config)
    asset_dir = _resolve_asset_dir(args.asset_dir, config)

    logs = []
    for path in args.logs:
        with open(path, "rb") as fh:
            logs.append(parse_log(fh))

    steps_per_log = [map_steps(log, rules) for log in logs]
    db = [sequence_from_steps(f"trace-{i}", steps)
          for i, steps in enumerate(steps_per_log)]

    primary_log, primary_steps = logs[0], steps_per_log[0]
    if asset_dir:
        primary_steps = attach_context(primary_steps, primary_log, asset_dir)

    min_support = args.min_support or config.get("min_support") or default_min_support(len(db))
    max_len = args.max_len or config.get("max_len") or DEFAULT_MAX_LEN
    patterns = mine_patterns(db, min_support, max_len)
    variants = compute_variants(db)
    sections = sectionize(primary_steps)

    title = args.title or primary_log.task_title or f"Workflow of {primary_log.actor_id}"
    doc = build_document(primary_steps, sections, patterns, variants, title,
                         asset_dir, actor_id=primary_log.actor_id)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(serialize_document(doc))
    print(f"wrote {out} ({len(doc.steps)} steps, {len(doc.sections)} sections, "
          f"{len(doc.patterns)} patterns, {len(doc.variants)} variants)")
    return 0


def cmd_render(args: argparse.Namespace, config: dict) -> int:
    doc = deserialize_document(Path(args.model).read_bytes())
    render_defaults = config["render"]
    cfg = RenderConfig(
        format=(args.format or render_defaults["format"]).upper(),
        embed_assets=(not args.no_embed) and render_defaults["embed_assets"],
        color_scheme=args.palette or render_defaults["palette"],
        section_colors=(not args.no_section_colors) and render_defaults["section_colors"],
        output_kind="StaticVector" if args.static else "InteractiveDocument",
        asset_dir=_resolve_asset_dir(args.asset_dir, config),
    )
    runtime_js = None
    if args.runtime == "stub":
        runtime_js = stub_runtime_js()
    elif args.runtime:
        runtime_js = Path(args.runtime).read_text(encoding="utf-8")
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(render(doc, cfg, runtime_js=runtime_js))
    print(f"wrote {out}")
    return 0


def cmd_analyze(args: argparse.Namespace, config: dict) -> int:
    records = evalstats.read_responses(args.responses)
    key = evalstats.read_answer_key(args.answers)
    likert = evalstats.read_likert(args.likert) if args.likert else None

    rows = evalstats.score_responses(records, key)
    threshold = args.threshold if args.threshold is not None \
        else config["stats"]["threshold_sec"]
    report = evalstats.build_report(rows, likert_ratings=likert,
                                    threshold_sec=threshold)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report_json = out_dir / "report.json"
    report_json.write_text(
        json.dumps(evalstats.report_to_dict(report), indent=2) + "\n",
        encoding="utf-8")
    report_txt = out_dir / "report.txt"
    report_txt.write_text(evalstats.format_report_text(report), encoding="utf-8")
    written = [report_json, report_txt]
    if not args.no_figures:
        kept, _ = evalstats.exclude_fast(rows, threshold)
        written.extend(figures.emit_figures(report, kept, out_dir))
    for path in written:
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vpr",
        description="Visual process representations from browser interaction logs.",
        epilog="Exit codes: 0 success, 1 domain error, 2 I/O or usage error.",
    )
    parser.add_argument("--config", help=f"config file (default: ./{CONFIG_FILENAME})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse a log and print diagnostics")
    p.add_argument("log")
    p.add_argument("--asset-dir")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("synth", help="generate a synthetic capture")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n", type=int, required=True, help="number of events")
    p.add_argument("--profile", required=True,
                   choices=["marking_correction", "poll_creation"])
    p.add_argument("--out", required=True)
    p.add_argument("--asset-dir", help="where to write placeholder screenshots")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("mine", help="map logs to steps and build a model file")
    p.add_argument("logs", nargs="+",
                   help="event logs; the first provides the rendered trace")
    p.add_argument("--out", required=True)
    p.add_argument("--title")
    p.add_argument("--rules")
    p.add_argument("--asset-dir")
    p.add_argument("--min-support", type=int)
    p.add_argument("--max-len", type=int)
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("render", help="render a model file to an artifact")
    p.add_argument("model")
    p.add_argument("--format", choices=[f.lower() for f in FORMATS] + list(FORMATS))
    p.add_argument("--static", action="store_true", help="emit SVG instead of HTML")
    p.add_argument("--out", required=True)
    p.add_argument("--asset-dir")
    p.add_argument("--palette")
    p.add_argument("--no-section-colors", action="store_true")
    p.add_argument("--no-embed", action="store_true")
    p.add_argument("--runtime",
                   help="viewer runtime JS to inline ('stub' for the placeholder)")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("analyze", help="prototype comparison report from CSVs")
    p.add_argument("responses")
    p.add_argument("answers")
    p.add_argument("--likert")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--threshold", type=float,
                   help="fast-responder exclusion threshold in seconds")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_analyze)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
        return args.func(args, config)
    except VprError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
