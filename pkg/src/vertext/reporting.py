"""Report bundle: delta tables, confusion matrices, sweep charts.

Consumes the summary.json files written by run/sweep cells and emits a
markdown report, a delimited table, a machine-readable summary, and SVG
figures (sweep line charts, and bar charts for externally produced
attention reports). Output ordering is deterministic so bundles diff
cleanly across runs.
"""

from __future__ import annotations

import csv
import json
import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

logger = logging.getLogger(__name__)

MISSING = "—"
ATTENTION_SCHEMA_VERSION = 1


def format_pct(fraction: float) -> str:
    return f"{fraction * 100:.2f}"


def format_delta(original: float, vertical: float) -> str:
    """Signed change in percentage points, Table-1 style: (↓28.00)."""
    delta = round(vertical * 100 - original * 100, 2)
    if delta > 0:
        return f"(↑{delta:.2f})"
    if delta < 0:
        return f"(↓{abs(delta):.2f})"
    return "(0.00)"


def load_cell_summaries(runs_dir: str | Path) -> list[dict]:
    cells = []
    for path in sorted(Path(runs_dir).glob("*/summary.json")):
        cells.append(json.loads(path.read_text("utf-8")))
    return cells


def load_sweeps(sweeps_dir: str | Path) -> list[dict]:
    out = []
    sweeps_dir = Path(sweeps_dir)
    if sweeps_dir.is_dir():
        for path in sorted(sweeps_dir.glob("*.json")):
            out.append(json.loads(path.read_text("utf-8")))
    return out


def load_attention_report(path: str | Path) -> dict:
    """Read and validate an attention report produced by an external probe."""
    rec = json.loads(Path(path).read_text("utf-8"))
    for field in ("model", "input_text", "probe", "condition", "layer", "tokens", "weights"):
        if field not in rec:
            raise ValueError(f"attention report {path}: missing field {field!r}")
    tokens, weights = rec["tokens"], rec["weights"]
    if len(tokens) != len(weights):
        raise ValueError(
            f"attention report {path}: {len(tokens)} tokens vs {len(weights)} weights"
        )
    if any(w < 0 for w in weights):
        raise ValueError(f"attention report {path}: negative weight")
    if sum(weights) > 1.0 + 1e-4:
        raise ValueError(f"attention report {path}: weights sum to {sum(weights):.6f} > 1")
    return rec


def _table_rows(cells: list[dict]) -> tuple[list[dict], bool]:
    """Pair original/vertical cells into table rows; flag incomplete pairs."""
    originals = {}
    verticals = {}
    for c in cells:
        group = (c["model"], c["dataset"], c["strategy"])
        if c["condition"] == "original":
            originals[group] = c
        else:
            verticals.setdefault(group, []).append(c)

    rows = []
    incomplete = False
    for group in sorted(set(originals) | set(verticals)):
        model, dataset, strategy = group
        orig = originals.get(group)
        verts = sorted(verticals.get(group, []), key=lambda c: c["k"])
        if not verts:
            incomplete = True
            rows.append({
                "model": model, "dataset": dataset, "strategy": strategy,
                "k": None,
                "original": orig["accuracy"], "vertical": None, "delta": None,
            })
            continue
        for vert in verts:
            if orig is None:
                incomplete = True
            rows.append({
                "model": model, "dataset": dataset, "strategy": strategy,
                "k": vert["k"],
                "original": None if orig is None else orig["accuracy"],
                "vertical": vert["accuracy"],
                "delta": None if orig is None
                else round((vert["accuracy"] - orig["accuracy"]) * 100, 2),
            })
    return rows, incomplete


def _cell_display(row: dict) -> tuple[str, str, str]:
    orig = MISSING if row["original"] is None else format_pct(row["original"])
    vert = MISSING if row["vertical"] is None else format_pct(row["vertical"])
    if row["original"] is None or row["vertical"] is None:
        delta = MISSING
    else:
        delta = format_delta(row["original"], row["vertical"])
    return orig, vert, delta


def _confusion_markdown(cell: dict) -> str:
    counts = cell.get("confusion", {})
    golds = sorted({key.split("|", 1)[0] for key in counts})
    preds = sorted({key.split("|", 1)[1] for key in counts})
    lines = ["| gold \\ predicted | " + " | ".join(preds) + " |",
             "|---" * (len(preds) + 1) + "|"]
    for g in golds:
        vals = [str(counts.get(f"{g}|{p}", 0)) for p in preds]
        lines.append(f"| {g} | " + " | ".join(vals) + " |")
    return "\n".join(lines)


def _plot_sweep(sweep: dict, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.plot(sweep["k"], [a * 100 for a in sweep["accuracy"]], marker="o")
    ax.set_xlabel("vertically inputted words (k)")
    ax.set_ylabel("accuracy (%)")
    ax.set_title(f"{sweep['model']} on {sweep['dataset']}")
    ax.set_xticks(sweep["k"])
    ax.set_ylim(0, 105)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def _plot_attention(report: dict, path: Path) -> None:
    tokens, weights = report["tokens"], report["weights"]
    fig, ax = plt.subplots(figsize=(max(5, 0.38 * len(tokens)), 3.2))
    ax.bar(range(len(tokens)), weights)
    ax.set_xticks(range(len(tokens)))
    ax.set_xticklabels([t.replace("\n", "\\n") for t in tokens],
                       rotation=60, ha="right", fontsize=7)
    ax.set_ylabel(f"attention toward {report['probe']!r}")
    head = report.get("head", "mean")
    ax.set_title(
        f"{report['model']} · {report['condition']} · layer {report['layer']} · head {head}"
    )
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def build_report(runs_dir: str | Path, out_dir: str | Path,
                 sweeps_dir: str | Path | None = None,
                 attention_paths: list[str | Path] | None = None) -> dict:
    """Assemble the full bundle under out_dir; returns the summary dict."""
    cells = load_cell_summaries(runs_dir)
    if not cells:
        raise ValueError(f"no completed cells under {runs_dir}")
    out_dir = Path(out_dir)
    plots_dir = out_dir / "plots"
    plots_dir.mkdir(parents=True, exist_ok=True)

    rows, incomplete = _table_rows(cells)
    sweeps = load_sweeps(sweeps_dir) if sweeps_dir else []
    attention = [load_attention_report(p) for p in (attention_paths or [])]

    # --- delimited table ---
    with (out_dir / "table.csv").open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["model", "dataset", "strategy", "k",
                         "original_pct", "vertical_pct", "delta_pp"])
        for row in rows:
            writer.writerow([
                row["model"], row["dataset"], row["strategy"],
                "" if row["k"] is None else row["k"],
                "" if row["original"] is None else format_pct(row["original"]),
                "" if row["vertical"] is None else format_pct(row["vertical"]),
                "" if row["delta"] is None else f"{row['delta']:.2f}",
            ])

    # --- figures ---
    plot_files = []
    for sweep in sweeps:
        name = f"sweep_{sweep['model']}_{sweep['dataset']}.svg".replace("/", "_")
        _plot_sweep(sweep, plots_dir / name)
        plot_files.append(f"plots/{name}")
    for i, rep in enumerate(attention):
        name = f"attention_{i}_{rep['condition']}.svg"
        _plot_attention(rep, plots_dir / name)
        plot_files.append(f"plots/{name}")

    # --- markdown ---
    md = ["# Vertical-input evaluation report", ""]
    md.append("## Accuracy before and after vertical input")
    md.append("")
    md.append("| Model | Dataset | Strategy | k | Original | Vertical | Change |")
    md.append("|---|---|---|---|---|---|---|")
    for row in rows:
        orig, vert, delta = _cell_display(row)
        k = MISSING if row["k"] is None else str(row["k"])
        md.append(
            f"| {row['model']} | {row['dataset']} | {row['strategy']} "
            f"| {k} | {orig} | {vert} | {delta} |"
        )
    if incomplete:
        md.append("")
        md.append("Some condition pairs are incomplete; missing cells shown as —.")

    md.append("")
    md.append("## Confusion matrices")
    for cell in sorted(cells, key=lambda c: (c["model"], c["dataset"], c["strategy"], c["condition"], c["k"])):
        md.append("")
        md.append(
            f"### {cell['model']} · {cell['dataset']} · {cell['strategy']} "
            f"· {cell['condition']} (k={cell['k']}, n={cell['n']})"
        )
        md.append("")
        md.append(_confusion_markdown(cell))

    if sweeps:
        md.append("")
        md.append("## Vertical word-count sweeps")
        for sweep in sweeps:
            name = f"sweep_{sweep['model']}_{sweep['dataset']}.svg".replace("/", "_")
            md.append("")
            md.append(f"![sweep]({ 'plots/' + name })")
            pairs = ", ".join(
                f"k={k}: {format_pct(a)}" for k, a in zip(sweep["k"], sweep["accuracy"])
            )
            md.append(f"{sweep['model']} on {sweep['dataset']}: {pairs}")

    if attention:
        md.append("")
        md.append("## Attention toward the label token")
        for i, rep in enumerate(attention):
            md.append("")
            md.append(f"![attention](plots/attention_{i}_{rep['condition']}.svg)")
            md.append(
                f"{rep['model']}, {rep['condition']} input, layer {rep['layer']}, "
                f"probe {rep['probe']!r}."
            )

    (out_dir / "report.md").write_text("\n".join(md) + "\n", "utf-8")

    summary = {
        "cells": sorted(
            cells, key=lambda c: (c["model"], c["dataset"], c["strategy"],
                                  c["condition"], c["k"])
        ),
        "rows": rows,
        "sweeps": sweeps,
        "attention": [
            {k: v for k, v in rep.items() if k != "weights"} | {"weights": rep["weights"]}
            for rep in attention
        ],
        "plots": plot_files,
        "incomplete": incomplete,
    }
    (out_dir / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True, ensure_ascii=False) + "\n", "utf-8"
    )
    return summary
