"""Command-line entry point.

Subcommands: transform, select, prompts render, data load, run, sweep,
tokens inflate, report. Exit codes: 0 success, 1 usage error, 2 run
failure. Diagnostics go to stderr; data goes to stdout or files.
"""

from __future__ import annotations

import json
import sys
from importlib import metadata, resources
from pathlib import Path

import click

from . import datasets as ds
from . import evaluation as ev
from . import llm_client as lc
from . import prompts as pr
from . import reporting as rp
from . import tokshift as tk
from . import transform as tf
from .errors import VertextError
from .select import (
    MODE_HEURISTIC,
    MODE_LLM,
    SelectionCache,
    SelectionRequest,
    resolve_word,
    select_heuristic,
    select_llm,
)

try:
    __version__ = metadata.version("vertext")
except metadata.PackageNotFoundError:  # pragma: no cover
    __version__ = "0.0.0"

VENDORED_TOKENIZER = resources.files("vertext").joinpath("data/tokenizer")


def _echo_json(payload: dict) -> None:
    click.echo(json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False))


@click.group()
@click.version_option(__version__, prog_name="vertext")
@click.option("--seed", type=int, default=None, help="Override split seeds everywhere.")
@click.option("--out-dir", type=click.Path(), default=None, help="Override output directories.")
@click.pass_context
def cli(ctx, seed, out_dir):
    """Vertical-text perturbation harness."""
    ctx.obj = {"seed": seed, "out_dir": out_dir}


# --- transform ---

@cli.command("transform")
@click.option("--text", required=True, help="Sentence to lay out.")
@click.option("--indices", default="", help="Comma-separated 0-based word positions.")
@click.option("--words", default="", help="Comma-separated words (first occurrence wins).")
@click.option("--pad-char", default=" ", help="Padding character (single char).")
@click.option("--json", "as_json", is_flag=True, help="Emit {rendered, height, placements}.")
def transform_cmd(text, indices, words, pad_char, as_json):
    """Render a sentence with selected words verticalized."""
    sentence = tf.decompose(text)
    picked: set[int] = set()
    if indices:
        try:
            picked.update(int(p) for p in indices.split(",") if p.strip() != "")
        except ValueError:
            raise click.UsageError(f"--indices must be integers, got {indices!r}")
    if words:
        for w in words.split(","):
            if w.strip():
                picked.add(resolve_word(sentence, w.strip()))
    grid, rendered = tf.verticalize(
        sentence, tf.TransformSpec(vertical_indices=frozenset(picked), pad_char=pad_char)
    )
    if as_json:
        _echo_json({
            "rendered": rendered,
            "height": grid.height,
            "placements": {
                str(i): {"row": p.row, "col": p.col, "orientation": p.orientation}
                for i, p in sorted(grid.placements.items())
            },
        })
    else:
        click.echo(rendered)


# --- select ---

@cli.command("select")
@click.option("--text", required=True)
@click.option("-k", "k", type=int, required=True)
@click.option("--mode", type=click.Choice([MODE_HEURISTIC, MODE_LLM]), default=MODE_HEURISTIC)
@click.option("--model", default=None, help="Evaluator model id (llm mode).")
@click.option("--endpoint", default=None, help="Chat endpoint URL (llm mode).")
@click.option("--api-key-env", default="VERTEXT_API_KEY")
@click.option("--task", default="classification", help="Task name templated into the prompt.")
@click.option("--cache", "cache_path", type=click.Path(), default=None,
              help="JSON-lines selection cache file.")
@click.option("--json", "as_json", is_flag=True)
def select_cmd(text, k, mode, model, endpoint, api_key_env, task, cache_path, as_json):
    """Choose the k words to verticalize."""
    sentence = tf.decompose(text)
    req = SelectionRequest(sentence=sentence, k=k, mode=mode,
                           evaluator_model=model, task=task)
    if mode == MODE_HEURISTIC:
        result = select_heuristic(req)
    else:
        if not endpoint or not model:
            raise click.UsageError("llm mode needs --endpoint and --model")
        cfg = lc.ClientConfig.for_selection(
            endpoint_url=endpoint, model_id=model, api_key_env=api_key_env
        )
        client = lc.HttpChatClient(cfg)
        cache = SelectionCache(cache_path) if cache_path else None
        result = select_llm(req, client, cache=cache)
    picked_words = [sentence.words[i] for i in result.indices]
    if as_json:
        _echo_json({
            "indices": list(result.indices),
            "words": picked_words,
            "rationale": result.rationale,
        })
    else:
        click.echo(",".join(str(i) for i in result.indices))
        click.echo(" ".join(picked_words), err=True)


# --- prompts ---

@cli.group("prompts")
def prompts_group():
    """Prompt template operations."""


@prompts_group.command("render")
@click.option("--strategy", type=click.Choice(list(pr.STRATEGY_KINDS)), required=True)
@click.option("--task", "task_name", type=click.Choice(sorted(pr.TASKS)), required=True)
@click.option("--text", required=True)
@click.option("--question", default=None, help="Pair-task question (QNLI).")
@click.option("--json", "as_json", is_flag=True)
def prompts_render(strategy, task_name, text, question, as_json):
    """Render a classification prompt for the given input."""
    task = pr.TASKS[task_name]
    strat = pr.strategy_for(strategy, task)
    messages = pr.build_prompt(strat, pr.compose_input(task, text, question))
    if as_json:
        _echo_json({
            "strategy": strat.strategy_id,
            "task": task.name,
            "template_version": pr.TEMPLATE_VERSION,
            "messages": messages,
        })
    else:
        click.echo(messages[0]["content"])


# --- data ---

@cli.group("data")
def data_group():
    """Dataset operations."""


@data_group.command("load")
@click.option("--dataset", type=click.Choice(sorted(pr.TASKS)), required=True)
@click.option("--path", "path_", required=True, type=click.Path())
@click.option("--split-n", type=int, default=None,
              help="Draw a balanced split of this size (omit to keep all rows).")
@click.option("--seed", type=int, default=0)
@click.option("--stratify/--no-stratify", default=True)
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Write JSONL here instead of stdout.")
@click.pass_context
def data_load(ctx, dataset, path_, split_n, seed, stratify, out_path):
    """Load a corpus file, optionally draw a balanced split, emit JSONL."""
    if ctx.obj.get("seed") is not None:
        seed = ctx.obj["seed"]
    samples = ds.load(dataset, path_)
    if split_n is not None:
        samples = ds.draw_split(samples, ds.SplitSpec(n=split_n, seed=seed, stratify=stratify))
    if out_path:
        ds.write_jsonl(samples, out_path)
        click.echo(f"wrote {len(samples)} samples to {out_path}", err=True)
    else:
        for s in samples:
            click.echo(json.dumps(s.to_json(), ensure_ascii=False))


# --- run / sweep ---

def parse_config(path: str | Path) -> dict:
    """Flat key=value config; '#' comments; later keys override earlier."""
    text = Path(path).read_text("utf-8")
    cfg: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise VertextError(f"{path}:{lineno}: expected key = value, got {raw!r}")
        key, value = line.split("=", 1)
        cfg[key.strip()] = value.strip().strip("\"'")
    return cfg


def _build_client(cfg: dict):
    model = cfg.get("model", "mock-keyword")
    if model == "mock-keyword":
        lexicon_path = cfg.get("lexicon")
        if not lexicon_path:
            raise VertextError("mock-keyword model needs lexicon = <path>")
        lexicon = json.loads(Path(lexicon_path).read_text("utf-8"))
        client = lc.mock_keyword_classifier(
            lexicon, default_label=cfg.get("default_label", "negative")
        )
    else:
        endpoint = cfg.get("endpoint")
        if not endpoint:
            raise VertextError("live model needs endpoint = <url>")
        client_cfg = lc.ClientConfig.for_classification(
            endpoint_url=endpoint,
            model_id=model,
            api_key_env=cfg.get("api_key_env", "VERTEXT_API_KEY"),
            max_tokens=int(cfg.get("max_tokens", 512)),
            timeout=float(cfg.get("timeout", 60)),
            parallelism=int(cfg.get("parallelism", 4)),
        )
        client = lc.HttpChatClient(client_cfg)
    cassette = cfg.get("cassette")
    if cassette:
        mode = cfg.get("cassette_mode", lc.REPLAY)
        store = lc.CassetteStore(cassette)
        inner = client if mode == lc.RECORD else None
        client = lc.CassetteClient(mode, store, inner=inner, config=client.config)
    return client


def _build_selector(cfg: dict, task: pr.TaskSpec):
    kind = cfg.get("selector", "heuristic")
    if kind == "heuristic":
        return ev.HeuristicSelector()
    if kind != "llm":
        raise VertextError(f"unknown selector {kind!r}")
    endpoint = cfg.get("selector_endpoint", cfg.get("endpoint"))
    model = cfg.get("evaluator_model", cfg.get("model"))
    if not endpoint or not model:
        raise VertextError("llm selector needs endpoint and evaluator_model")
    sel_cfg = lc.ClientConfig.for_selection(
        endpoint_url=endpoint, model_id=model,
        api_key_env=cfg.get("api_key_env", "VERTEXT_API_KEY"),
    )
    cache = SelectionCache(cfg["selector_cache"]) if cfg.get("selector_cache") else None
    return ev.LlmSelector(lc.HttpChatClient(sel_cfg), task_name=task.name, cache=cache)


def _load_run_inputs(cfg: dict, seed_override: int | None):
    dataset = cfg.get("dataset")
    data_path = cfg.get("data")
    if not dataset or not data_path:
        raise VertextError("config needs dataset = <name> and data = <path>")
    task = pr.TASKS.get(dataset)
    if task is None:
        raise VertextError(f"unknown dataset {dataset!r}")
    seed = seed_override if seed_override is not None else int(cfg.get("split_seed", 0))
    samples = ds.load(dataset, data_path)
    n = cfg.get("split_n")
    if n is not None:
        samples = ds.draw_split(samples, ds.SplitSpec(n=int(n), seed=seed))
    strategy = pr.strategy_for(cfg.get("strategy", pr.ZERO_SHOT), task)
    return task, samples, strategy, seed


def _write_manifest(out_dir: Path, config_path: str, run_keys: list[str],
                    outputs: list[str]) -> None:
    manifest = {
        "config": str(config_path),
        "run_keys": run_keys,
        "out_dir": str(out_dir),
        "tool_version": __version__,
        "template_version": pr.TEMPLATE_VERSION,
        "outputs": outputs,
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", "utf-8"
    )


@cli.command("run")
@click.option("--config", "config_path", required=True, type=click.Path())
@click.pass_context
def run_cmd(ctx, config_path):
    """Evaluate the conditions named in a config file."""
    cfg = parse_config(config_path)
    out_dir = Path(ctx.obj.get("out_dir") or cfg.get("out_dir", "out"))
    runs_dir = out_dir / "runs"
    runs_dir.mkdir(parents=True, exist_ok=True)

    task, samples, strategy, seed = _load_run_inputs(cfg, ctx.obj.get("seed"))
    client = _build_client(cfg)
    conditions = [c.strip() for c in cfg.get("conditions", "original,vertical").split(",")]
    k = int(cfg.get("k", 2 if task.name == "cola" else 4))
    selector = _build_selector(cfg, task) if ev.VERTICAL in conditions else None

    run_keys = [
        ev.make_run_key(client.config.model_id, task.name, seed, cond,
                        0 if cond == ev.ORIGINAL else k, strategy.strategy_id)
        for cond in conditions
    ]
    # manifest lands on disk before any completion request is issued
    _write_manifest(out_dir, config_path, run_keys, outputs=[])

    outputs = ["manifest.json"]
    for cond in conditions:
        records, cm = ev.run_cell(
            client, task, samples, cond, strategy,
            0 if cond == ev.ORIGINAL else k,
            selector if cond == ev.VERTICAL else None,
            runs_dir, split_seed=seed,
        )
        key = ev.make_run_key(client.config.model_id, task.name, seed, cond,
                              0 if cond == ev.ORIGINAL else k, strategy.strategy_id)
        acc = ev.accuracy(cm)
        click.echo(f"{cond} k={0 if cond == ev.ORIGINAL else k} "
                   f"accuracy={rp.format_pct(acc)} run={key}")
        outputs += [f"runs/{key}/records.jsonl", f"runs/{key}/summary.json"]
    _write_manifest(out_dir, config_path, run_keys, outputs)


@cli.command("sweep")
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--k-max", type=int, default=4, show_default=True)
@click.pass_context
def sweep_cmd(ctx, config_path, k_max):
    """Accuracy vs. number of vertical words, k = 0..k_max."""
    cfg = parse_config(config_path)
    out_dir = Path(ctx.obj.get("out_dir") or cfg.get("out_dir", "out"))
    runs_dir = out_dir / "runs"
    sweeps_dir = out_dir / "sweeps"
    runs_dir.mkdir(parents=True, exist_ok=True)
    sweeps_dir.mkdir(parents=True, exist_ok=True)

    task, samples, strategy, seed = _load_run_inputs(cfg, ctx.obj.get("seed"))
    client = _build_client(cfg)
    selector = _build_selector(cfg, task)

    _write_manifest(out_dir, config_path, [], outputs=[])
    result = ev.sweep(client, task, samples, strategy, k_max, selector,
                      runs_dir, split_seed=seed)
    name = f"{result.model_id}_{result.dataset_id}_s{seed}.json".replace("/", "_")
    (sweeps_dir / name).write_text(
        json.dumps(result.to_json(), indent=2, sort_keys=True) + "\n", "utf-8"
    )
    for k, acc in zip(result.k_values, result.accuracies):
        click.echo(f"k={k} accuracy={rp.format_pct(acc)}")
    _write_manifest(out_dir, config_path, [], outputs=[f"sweeps/{name}"])


# --- tokens ---

@cli.group("tokens")
def tokens_group():
    """Tokenizer analyses."""


@tokens_group.command("inflate")
@click.option("--word", required=True)
@click.option("--artifact", "artifact_path", type=click.Path(), default=None,
              help="Tokenizer artifact dir or tokenizer.json (default: vendored).")
@click.option("--context", default=None,
              help="Explicit vertical rendering to measure instead of a pure column.")
def tokens_inflate(word, artifact_path, context):
    """Horizontal vs vertical token counts for one word, as JSON."""
    artifact = tk.load_artifact(artifact_path or VENDORED_TOKENIZER)
    report = tk.inflate(artifact, word, layout_context=context)
    _echo_json(report.to_json())


# --- report ---

@cli.command("report")
@click.option("--runs", "out_root", required=True, type=click.Path(),
              help="Output directory of earlier run/sweep invocations.")
@click.option("--out", "report_dir", type=click.Path(), default=None,
              help="Report directory (default: <runs>/report).")
@click.option("--attention", "attention_paths", multiple=True, type=click.Path(),
              help="Attention report JSON file(s) to render (repeatable).")
@click.pass_context
def report_cmd(ctx, out_root, report_dir, attention_paths):
    """Render tables, confusion matrices, and figures for finished runs."""
    out_root = Path(ctx.obj.get("out_dir") or out_root)
    report_dir = Path(report_dir) if report_dir else out_root / "report"
    summary = rp.build_report(
        out_root / "runs", report_dir,
        sweeps_dir=out_root / "sweeps",
        attention_paths=list(attention_paths),
    )
    click.echo(f"report written to {report_dir}", err=True)
    click.echo(json.dumps(
        {"rows": len(summary["rows"]), "plots": summary["plots"],
         "incomplete": summary["incomplete"]},
        sort_keys=True,
    ))


def main(argv: list[str] | None = None) -> int:
    """Entry point with the documented exit-code mapping."""
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        exc.show(file=sys.stderr)
        return 1
    except click.Abort:
        return 1
    except FileNotFoundError as exc:
        click.echo(f"error: file not found: {exc.filename or exc}", err=True)
        return 2
    except VertextError as exc:
        click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
