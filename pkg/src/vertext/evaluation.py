"""Run orchestration and accuracy metrics.

A cell is one (model, dataset, condition, strategy, k) evaluation over a
split: select words (vertical condition only), verticalize, prompt,
complete, parse. Every transcript is persisted; records land in a
JSON-lines file keyed by a run hash, so interrupted cells resume by
skipping already-answered samples and still aggregate to byte-identical
summaries. Accuracy is diagonal count over N: unparsed or failed samples
stay in N and count as wrong.
"""

from __future__ import annotations

import hashlib
import json
import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

from .datasets import Sample
from .errors import CellAborted, EmptyRun, SupersetViolation
from .llm_client import Transcript
from .prompts import (
    TEMPLATE_VERSION,
    UNPARSED,
    PromptStrategy,
    TaskSpec,
    build_prompt,
    compose_input,
    parse_label,
)
from .select import SelectionRequest, select_heuristic
from .transform import Sentence, TransformSpec, decompose, verticalize

logger = logging.getLogger(__name__)

ORIGINAL = "original"
VERTICAL = "vertical"

FAILURE_ABORT_FRACTION = 0.2


class Selector(Protocol):
    def select(self, sentence: Sentence, k: int) -> tuple[int, ...]: ...


class HeuristicSelector:
    """Offline selector: longest non-stopwords first."""

    def select(self, sentence: Sentence, k: int) -> tuple[int, ...]:
        return select_heuristic(SelectionRequest(sentence=sentence, k=k)).indices


class LlmSelector:
    """Selector backed by a chat-model evaluator."""

    def __init__(self, client, task_name: str = "classification", cache=None,
                 evaluator_model: str | None = None):
        self.client = client
        self.task_name = task_name
        self.cache = cache
        self.evaluator_model = evaluator_model or client.config.model_id

    def select(self, sentence: Sentence, k: int) -> tuple[int, ...]:
        from .select import select_llm

        req = SelectionRequest(
            sentence=sentence, k=k, mode="llm",
            evaluator_model=self.evaluator_model, task=self.task_name,
        )
        return select_llm(req, self.client, cache=self.cache).indices


class FixedSelector:
    """Replays precomputed selections, keyed by (words, k)."""

    def __init__(self, table: dict[tuple[tuple[str, ...], int], tuple[int, ...]]):
        self.table = table

    def select(self, sentence: Sentence, k: int) -> tuple[int, ...]:
        return self.table[(sentence.words, k)]


@dataclass(frozen=True)
class EvalRecord:
    sample_id: str
    condition: str
    k: int
    strategy_id: str
    prediction: str
    gold: str
    transcript_ref: str
    error: str | None = None

    def __post_init__(self):
        if self.condition == ORIGINAL and self.k != 0:
            raise ValueError("original condition requires k == 0")

    def to_json(self) -> dict:
        return {
            "sample_id": self.sample_id,
            "condition": self.condition,
            "k": self.k,
            "strategy_id": self.strategy_id,
            "prediction": self.prediction,
            "gold": self.gold,
            "transcript_ref": self.transcript_ref,
            "error": self.error,
        }

    @classmethod
    def from_json(cls, rec: dict) -> "EvalRecord":
        return cls(**rec)


@dataclass(frozen=True)
class ConfusionMatrix:
    counts: dict[tuple[str, str], int]  # (gold, predicted) -> count
    n: int

    @classmethod
    def from_counts(cls, counts: dict[tuple[str, str], int]) -> "ConfusionMatrix":
        if any(v < 0 for v in counts.values()):
            raise ValueError("confusion counts must be non-negative")
        return cls(counts=dict(counts), n=sum(counts.values()))

    @classmethod
    def from_records(cls, records: list[EvalRecord]) -> "ConfusionMatrix":
        counts: dict[tuple[str, str], int] = {}
        for r in records:
            key = (r.gold, r.prediction)
            counts[key] = counts.get(key, 0) + 1
        return cls(counts=counts, n=len(records))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "counts": {f"{g}|{p}": v for (g, p), v in sorted(self.counts.items())},
        }


def accuracy(cm: ConfusionMatrix) -> float:
    """Fraction of diagonal counts: mean of the match indicator over N."""
    if cm.n == 0:
        raise EmptyRun("accuracy over zero records")
    return sum(v for (gold, pred), v in cm.counts.items() if gold == pred) / cm.n


@dataclass(frozen=True)
class SweepResult:
    k_values: tuple[int, ...]
    accuracies: tuple[float, ...]
    model_id: str
    dataset_id: str

    def __post_init__(self):
        if len(self.k_values) != len(self.accuracies):
            raise ValueError("k_values and accuracies must have equal length")
        if list(self.k_values) != sorted(set(self.k_values)) or (
            self.k_values and self.k_values[0] != 0
        ):
            raise ValueError("k_values must increase strictly from 0")

    def to_json(self) -> dict:
        return {
            "model": self.model_id,
            "dataset": self.dataset_id,
            "k": list(self.k_values),
            "accuracy": list(self.accuracies),
        }


def make_run_key(model_id: str, dataset: str, split_seed: int, condition: str,
                 k: int, strategy_id: str, template_version: str = TEMPLATE_VERSION) -> str:
    payload = json.dumps(
        {
            "model": model_id,
            "dataset": dataset,
            "split_seed": split_seed,
            "condition": condition,
            "k": k,
            "strategy": strategy_id,
            "templates": template_version,
        },
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def _latest_by_id(records: list[EvalRecord]) -> dict[str, EvalRecord]:
    latest: dict[str, EvalRecord] = {}
    for r in records:
        latest[r.sample_id] = r
    return latest


def _load_records(path: Path) -> list[EvalRecord]:
    if not path.exists():
        return []
    out = []
    for line in path.read_text("utf-8").splitlines():
        if line.strip():
            out.append(EvalRecord.from_json(json.loads(line)))
    return out


def _evaluate_sample(sample: Sample, task: TaskSpec, condition: str, k: int,
                     strategy: PromptStrategy, selector: Selector | None,
                     client, transcripts_dir: Path) -> EvalRecord:
    from .errors import VertextError

    try:
        if condition == VERTICAL:
            sentence = decompose(sample.text)
            indices = selector.select(sentence, k)
            _, rendered = verticalize(
                sentence, TransformSpec(vertical_indices=frozenset(indices))
            )
        else:
            rendered = sample.text
        input_text = compose_input(task, rendered, sample.text2)
        messages = build_prompt(strategy, input_text)
        transcript: Transcript = client.complete(messages)
    except VertextError as exc:
        logger.warning("sample %s failed: %s", sample.id, exc)
        return EvalRecord(
            sample_id=sample.id, condition=condition, k=k,
            strategy_id=strategy.strategy_id, prediction=UNPARSED,
            gold=sample.gold, transcript_ref="", error=f"{type(exc).__name__}: {exc}",
        )

    ref = f"transcripts/{sample.id}.json"
    (transcripts_dir / f"{sample.id}.json").write_text(
        json.dumps(transcript.to_json(), ensure_ascii=False, indent=2), "utf-8"
    )
    parsed = parse_label(transcript.generation, task)
    return EvalRecord(
        sample_id=sample.id, condition=condition, k=k,
        strategy_id=strategy.strategy_id, prediction=parsed.label,
        gold=sample.gold, transcript_ref=ref,
    )


def run_cell(client, task: TaskSpec, split: list[Sample], condition: str,
             strategy: PromptStrategy, k: int, selector: Selector | None,
             out_dir: str | Path, split_seed: int = 0,
             ) -> tuple[list[EvalRecord], ConfusionMatrix]:
    """Evaluate one cell, resuming any earlier partial run under the same key.

    Returns the final per-sample records (sorted by sample id) and their
    confusion matrix; also writes records.jsonl, transcripts/ and
    summary.json under out_dir/<run-key>/.
    """
    if not split:
        raise EmptyRun("empty split")
    if condition not in (ORIGINAL, VERTICAL):
        raise ValueError(f"unknown condition {condition!r}")
    if condition == VERTICAL:
        if selector is None or k < 1:
            raise ValueError("vertical condition needs a selector and k >= 1")
    else:
        k = 0

    run_key = make_run_key(
        client.config.model_id, task.name, split_seed, condition, k,
        strategy.strategy_id,
    )
    run_dir = Path(out_dir) / run_key
    transcripts_dir = run_dir / "transcripts"
    transcripts_dir.mkdir(parents=True, exist_ok=True)
    records_path = run_dir / "records.jsonl"

    existing = _latest_by_id(_load_records(records_path))
    done = {sid for sid, rec in existing.items() if rec.error is None}
    todo = [s for s in split if s.id not in done]
    logger.info(
        "cell %s: %d samples, %d already recorded", run_key, len(split), len(done)
    )

    parallelism = getattr(client.config, "parallelism", 1)
    new_records: list[EvalRecord] = []
    if todo:
        write_lock = threading.Lock()

        def work(sample: Sample) -> EvalRecord:
            rec = _evaluate_sample(
                sample, task, condition, k, strategy, selector, client,
                transcripts_dir,
            )
            # append as soon as each sample finishes, so an interrupted
            # cell resumes from whatever actually completed
            with write_lock:
                with records_path.open("a", encoding="utf-8") as fh:
                    fh.write(json.dumps(rec.to_json(), ensure_ascii=False) + "\n")
            return rec

        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            new_records = list(pool.map(work, todo))

    latest = _latest_by_id(list(existing.values()) + new_records)
    records = sorted(
        (latest[s.id] for s in split if s.id in latest), key=lambda r: r.sample_id
    )
    failures = sum(1 for r in records if r.error is not None)
    if failures > FAILURE_ABORT_FRACTION * len(split):
        raise CellAborted(
            f"cell {run_key}: {failures}/{len(split)} samples failed (>20%)"
        )

    cm = ConfusionMatrix.from_records(records)
    summary = {
        "run_key": run_key,
        "model": client.config.model_id,
        "dataset": task.name,
        "condition": condition,
        "k": k,
        "strategy": strategy.strategy_id,
        "template_version": TEMPLATE_VERSION,
        "split_seed": split_seed,
        "n": cm.n,
        "accuracy": accuracy(cm),
        "confusion": cm.to_json()["counts"],
        "failures": failures,
    }
    (run_dir / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", "utf-8"
    )
    return records, cm


def sweep(client, task: TaskSpec, split: list[Sample], strategy: PromptStrategy,
          k_max: int, selector: Selector, out_dir: str | Path,
          split_seed: int = 0) -> SweepResult:
    """Accuracy as a function of vertical word count, k = 0..k_max.

    Selections are computed once per sample at each k and must form a
    superset chain (each k's word set contains the previous one); the
    chain is enforced, then replayed through run_cell via a FixedSelector.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    table: dict[tuple[tuple[str, ...], int], tuple[int, ...]] = {}
    for sample in split:
        sentence = decompose(sample.text)
        previous: frozenset[int] = frozenset()
        for k in range(1, k_max + 1):
            indices = tuple(selector.select(sentence, k))
            if not previous <= frozenset(indices):
                raise SupersetViolation(
                    f"sample {sample.id}: k={k} selection {sorted(indices)} does not "
                    f"contain k={k - 1} selection {sorted(previous)}"
                )
            previous = frozenset(indices)
            table[(sentence.words, k)] = indices
    fixed = FixedSelector(table)

    accuracies = []
    for k in range(0, k_max + 1):
        condition = ORIGINAL if k == 0 else VERTICAL
        _, cm = run_cell(
            client, task, split, condition, strategy, k,
            fixed if k > 0 else None, out_dir, split_seed=split_seed,
        )
        accuracies.append(accuracy(cm))
    return SweepResult(
        k_values=tuple(range(0, k_max + 1)),
        accuracies=tuple(accuracies),
        model_id=client.config.model_id,
        dataset_id=task.name,
    )
