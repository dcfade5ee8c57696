"""Batch front door: run the full pipeline on a file and emit a JSON report
(optionally a static HTML report) without the HTTP service.

Exit codes: 0 success, 2 input problems (unreadable file, unknown or
non-open-ended question, bad filter), 3 provider failures when --offline is
not set.  Reports are deterministic for a fixed (input, seed, config): no
timestamps, stable key order, seeded sampling and layout.
"""

from __future__ import annotations

import argparse
import html
import json
import sys
from pathlib import Path

from . import __version__
from .analysis import AUTO_GROUPING, CallCounter, build_providers, run_analysis
from .config import AppConfig, load_config
from .embed import HttpEmbeddingProvider
from .errors import (
    EmptyInput,
    MalformedLine,
    NonCategoricalColumn,
    NonCategoricalFilter,
    NonOpenEndedQuestion,
    ProviderUnavailable,
    UnknownColumn,
    UnparsableCsv,
)
from .ingest import SamplingPolicy, parse_csv, parse_jsonl, sample_rows
from .schema import ColumnKind, FilterSpec, profile_columns
from .summarize import HttpLmProvider

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PROVIDER = 3

# Cluster fill colors for the static SVG scatter; noise is gray.
_SVG_PALETTE = [
    "#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#b07aa1",
    "#76b7b2", "#edc948", "#ff9da7", "#9c755f", "#bab0ac",
]
_NOISE_COLOR = "#c8c8c8"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="surveyscope", description="Analyze open-ended survey responses from a file"
    )
    parser.add_argument("--input", required=True, help="path to the survey export")
    parser.add_argument("--format", choices=["csv", "jsonl", "auto"], default="auto")
    parser.add_argument(
        "--question",
        action="append",
        default=None,
        help="open-ended column to analyze (repeatable; default: all inferred)",
    )
    parser.add_argument(
        "--filter",
        action="append",
        default=[],
        metavar="COL=VAL",
        help="keep only rows matching (repeatable; same column accumulates values)",
    )
    parser.add_argument("--group-by", default=AUTO_GROUPING, help="categorical column or 'auto'")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--config", help="path to JSON config file")
    parser.add_argument(
        "--offline",
        action="store_true",
        help="force the reference embedding and extractive summaries (no network)",
    )
    parser.add_argument("--out", help="report path (default: stdout)")
    parser.add_argument("--html", help="also write a static HTML report here")
    return parser


def _parse_filters(pairs: list[str]) -> FilterSpec:
    constraints: dict[str, set[str]] = {}
    for pair in pairs:
        if "=" not in pair:
            raise ValueError(f"--filter expects COL=VAL, got {pair!r}")
        col, value = pair.split("=", 1)
        constraints.setdefault(col, set()).add(value)
    return FilterSpec({col: frozenset(vals) for col, vals in constraints.items()})


def _read_table(path: Path, fmt: str):
    data = path.read_bytes()
    if fmt == "auto":
        if path.suffix.lower() in (".jsonl", ".ndjson", ".json"):
            fmt = "jsonl"
        elif path.suffix.lower() == ".csv":
            fmt = "csv"
        else:
            fmt = "jsonl" if data.lstrip()[:1] == b"{" else "csv"
    return (parse_csv(data) if fmt == "csv" else parse_jsonl(data)), fmt


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    config = load_config(args.config) if args.config else AppConfig()

    path = Path(args.input)
    if not path.is_file():
        print(f"error: input file not found: {path}", file=sys.stderr)
        return EXIT_INPUT
    try:
        table, fmt = _read_table(path, args.format)
    except (EmptyInput, UnparsableCsv, MalformedLine) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT

    sampled = sample_rows(table, SamplingPolicy(max_rows=config.sampling.max_rows, seed=args.seed))
    profiles = profile_columns(sampled, config.schema_thresholds)

    try:
        filter_spec = _parse_filters(args.filter)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    if args.question:
        questions = args.question
        by_name = {p.name: p for p in profiles}
        for q in questions:
            prof = by_name.get(q)
            if prof is None:
                print(f"error: unknown column {q!r}", file=sys.stderr)
                return EXIT_INPUT
            if prof.kind is not ColumnKind.OPEN_ENDED:
                print(f"error: column {q!r} is {prof.kind.value}, not open-ended", file=sys.stderr)
                return EXIT_INPUT
    else:
        questions = [p.name for p in profiles if p.kind is ColumnKind.OPEN_ENDED]
        if not questions:
            print("error: no open-ended columns inferred; pass --question", file=sys.stderr)
            return EXIT_INPUT

    providers = build_providers(config, offline=args.offline)
    counter = CallCounter()
    remote = isinstance(providers.embedding, HttpEmbeddingProvider) or isinstance(
        providers.lm, HttpLmProvider
    )
    counted = counter.wrap(providers) if remote else providers

    analyses: dict[str, dict] = {}
    try:
        for question in questions:
            result = run_analysis(
                table=sampled,
                profiles=profiles,
                question=question,
                filter_spec=filter_spec,
                grouping=args.group_by,
                seed=args.seed,
                providers=counted,
                config=config,
            )
            analyses[question] = result.payload
    except (UnknownColumn, NonOpenEndedQuestion, NonCategoricalColumn, NonCategoricalFilter) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ProviderUnavailable as exc:
        print(f"error: provider unavailable: {exc}", file=sys.stderr)
        return EXIT_PROVIDER

    report = {
        "tool": {"name": "surveyscope", "version": __version__},
        "seed": args.seed,
        "offline": args.offline,
        "source": {
            "path": str(args.input),
            "format": fmt,
            "original_rows": table.source_meta.original_row_count,
            "analyzed_rows": len(sampled),
            "sampled": len(sampled) < len(table),
        },
        "config": config.echo(),
        "filters": filter_spec.canonical(),
        "grouping": args.group_by,
        "provider_calls": {"embedding": counter.embed_calls, "lm": counter.lm_calls},
        "schema": [p.to_json_dict() for p in profiles],
        "questions": analyses,
    }

    text = json.dumps(report, ensure_ascii=False, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)

    if args.html:
        Path(args.html).write_text(render_html_report(report), encoding="utf-8")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Static HTML report
# ---------------------------------------------------------------------------

def _svg_scatter(points: list[dict], size: int = 420) -> str:
    if not points:
        return "<p>(no plottable responses)</p>"
    xs = [p["x"] for p in points]
    ys = [p["y"] for p in points]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    span_x = (x1 - x0) or 1.0
    span_y = (y1 - y0) or 1.0
    pad = 12
    circles = []
    for p in points:
        cx = pad + (p["x"] - x0) / span_x * (size - 2 * pad)
        cy = pad + (1.0 - (p["y"] - y0) / span_y) * (size - 2 * pad)
        cluster = p["cluster"]
        color = _NOISE_COLOR if cluster < 0 else _SVG_PALETTE[cluster % len(_SVG_PALETTE)]
        title = html.escape(p["text"][:200])
        circles.append(
            f'<circle cx="{cx:.1f}" cy="{cy:.1f}" r="3" fill="{color}" fill-opacity="0.75">'
            f"<title>{title}</title></circle>"
        )
    return (
        f'<svg width="{size}" height="{size}" viewBox="0 0 {size} {size}" '
        f'xmlns="http://www.w3.org/2000/svg">{"".join(circles)}</svg>'
    )


def _html_term_table(term_table: dict, limit: int = 20) -> str:
    groups = term_table["groups"]
    head = "".join(f"<th>{html.escape(str(g))}</th>" for g in groups)
    rows = []
    for ti, term in enumerate(term_table["terms"][:limit]):
        cells = "".join(
            f"<td>{term_table['counts'][ti][gi]} ({term_table['pmi'][ti][gi]:+.2f})</td>"
            for gi in range(len(groups))
        )
        rows.append(
            f"<tr><td>{html.escape(term['surface'])}</td><td>{term['doc_count']}</td>{cells}</tr>"
        )
    return (
        "<table><thead><tr><th>term</th><th>responses</th>"
        + head
        + "</tr></thead><tbody>"
        + "".join(rows)
        + "</tbody></table>"
    )


def render_html_report(report: dict) -> str:
    sections = []
    for question, payload in report["questions"].items():
        legend = "".join(
            '<li><span style="color:{color}">&#9632;</span> cluster {cid} ({size}): {terms}</li>'.format(
                color=_SVG_PALETTE[lab["cluster_id"] % len(_SVG_PALETTE)],
                cid=lab["cluster_id"],
                size=lab["size"],
                terms=html.escape(", ".join(lab["top_terms"]) or "(no terms)"),
            )
            for lab in payload["cluster_labels"]
        )
        summaries = "".join(
            "<li><b>cluster {cid}</b>: {text}</li>".format(
                cid=cid, text=html.escape(res["text"])
            )
            for cid, res in payload["cluster_summaries"].items()
        )
        examples = "".join(
            '<li>{badge} "{quote}" &mdash; {why}</li>'.format(
                badge="&#10003;" if ex["verified"] else "&#9888; unverified:",
                quote=html.escape(ex["quoted_text"]),
                why=html.escape(ex["rationale"]),
            )
            for ex in payload["interesting_examples"]["items"]
        ) or "<li>(none)</li>"
        sections.append(
            f"""
<section>
  <h2>{html.escape(question)}</h2>
  <h3>Summary</h3>
  <p>{html.escape(payload["summary"]["text"])}</p>
  <h3>Topic map</h3>
  {_svg_scatter(payload["scatter"]["points"])}
  <ul>{legend}</ul>
  <h3>Cluster summaries</h3>
  <ul>{summaries}</ul>
  <h3>Notable examples</h3>
  <ul>{examples}</ul>
  <h3>Top words and phrases</h3>
  {_html_term_table(payload["term_table"])}
</section>
"""
        )
    source = report["source"]
    return f"""<!DOCTYPE html>
<html lang="en">
<head>
<meta charset="utf-8">
<title>Survey report</title>
<style>
 body {{ font-family: system-ui, sans-serif; margin: 2rem auto; max-width: 60rem; }}
 table {{ border-collapse: collapse; font-size: 0.85rem; }}
 td, th {{ border: 1px solid #ccc; padding: 2px 8px; text-align: left; }}
 section {{ margin-bottom: 3rem; }}
</style>
</head>
<body>
<h1>Survey report</h1>
<p>{html.escape(str(source["path"]))} &middot; {source["analyzed_rows"]} of {source["original_rows"]} rows analyzed
 &middot; seed {report["seed"]}</p>
{"".join(sections)}
</body>
</html>
"""


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
