"""Corpus ingestion and balanced split drawing.

Loaders cover the five benchmark layouts (GLUE TSVs for SST-2 / CoLA /
QNLI, CSV exports for Rotten Tomatoes and Jigsaw Toxicity) plus a
universal JSONL schema {id, text, [text2], label}. Split drawing uses a
self-contained xorshift64* generator so the same (samples, seed) pair
reproduces the same split in any implementation of the documented
algorithm, independent of Python's RNG.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass
from pathlib import Path

from .errors import BadLabel, EmptyFile, InsufficientLabel, SchemaMismatch
from .prompts import TASKS, TaskSpec

logger = logging.getLogger(__name__)

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


class XorShift64Star:
    """xorshift64* PRNG (shifts 12/25/27, multiplier 0x2545F4914F6CDD1D).

    The seed is mixed through one splitmix64 step; a zero state falls back
    to the splitmix64 gamma so the generator never locks up.
    """

    def __init__(self, seed: int):
        state = _splitmix64(seed & _MASK64)
        self._state = state if state != 0 else 0x9E3779B97F4A7C15

    def next_u64(self) -> int:
        x = self._state
        x ^= x >> 12
        x = (x ^ (x << 25)) & _MASK64
        x ^= x >> 27
        self._state = x
        return (x * 0x2545F4914F6CDD1D) & _MASK64

    def below(self, n: int) -> int:
        return self.next_u64() % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates, descending, j = next_u64() % (i + 1)."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]


@dataclass(frozen=True)
class Sample:
    id: str
    text: str
    gold: str
    dataset: str  # task name; resolve via prompts.TASKS
    text2: str | None = None  # QNLI question

    def __post_init__(self):
        if not self.text:
            raise ValueError(f"sample {self.id}: empty text")

    def to_json(self) -> dict:
        rec = {"id": self.id, "text": self.text, "label": self.gold, "dataset": self.dataset}
        if self.text2 is not None:
            rec["text2"] = self.text2
        return rec


@dataclass(frozen=True)
class SplitSpec:
    n: int = 100
    seed: int = 0
    stratify: bool = True

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be >= 0")


def _task(dataset_id: str) -> TaskSpec:
    if dataset_id not in TASKS:
        raise SchemaMismatch(f"unknown dataset {dataset_id!r}; known: {sorted(TASKS)}")
    return TASKS[dataset_id]


def _check_label(label: str, task: TaskSpec, row_id: str) -> str:
    if label not in task.label_set:
        raise BadLabel(f"row {row_id}: label {label!r} not in {task.label_set}")
    return label


def _binary_label(raw: str, zero: str, one: str, row_id: str) -> str:
    if raw == "0":
        return zero
    if raw == "1":
        return one
    raise BadLabel(f"row {row_id}: expected 0/1 label, got {raw!r}")


def load(dataset_id: str, path: str | Path) -> list[Sample]:
    """Parse one corpus file into Samples under the dataset's schema.

    Any file ending in .jsonl uses the universal schema regardless of
    dataset. Rows with empty text are rejected and logged by id.
    """
    task = _task(dataset_id)
    path = Path(path)
    if path.suffix == ".jsonl":
        samples = _load_jsonl(task, path)
    elif dataset_id == "sst2":
        samples = _load_sst2(task, path)
    elif dataset_id == "cola":
        samples = _load_cola(task, path)
    elif dataset_id == "qnli":
        samples = _load_qnli(task, path)
    elif dataset_id == "rotten_tomatoes":
        samples = _load_rotten_tomatoes(task, path)
    else:  # jigsaw
        samples = _load_jigsaw(task, path)
    if not samples:
        raise EmptyFile(f"{path} holds no data rows")
    return samples


def _reject(row_id: str, why: str) -> None:
    logger.warning("rejecting row %s: %s", row_id, why)


def _tsv_rows(path: Path):
    with path.open("r", encoding="utf-8", newline="") as fh:
        yield from csv.reader(fh, delimiter="\t", quoting=csv.QUOTE_NONE)


def _load_sst2(task: TaskSpec, path: Path) -> list[Sample]:
    rows = list(_tsv_rows(path))
    if not rows:
        raise EmptyFile(str(path))
    if rows[0] != ["sentence", "label"]:
        raise SchemaMismatch(f"{path}: expected header sentence<TAB>label, got {rows[0]}")
    samples = []
    for i, row in enumerate(rows[1:], start=1):
        row_id = f"sst2-{i}"
        if len(row) != 2:
            raise SchemaMismatch(f"{path} row {i}: expected 2 columns, got {len(row)}")
        text, raw = row
        if not text.strip():
            _reject(row_id, "empty text")
            continue
        gold = _binary_label(raw, "negative", "positive", row_id)
        samples.append(Sample(id=row_id, text=text.strip(), gold=gold, dataset=task.name))
    return samples


def _load_cola(task: TaskSpec, path: Path) -> list[Sample]:
    samples = []
    for i, row in enumerate(_tsv_rows(path), start=1):
        row_id = f"cola-{i}"
        if len(row) != 4:  # source, label, original annotation, sentence; no header
            raise SchemaMismatch(f"{path} row {i}: expected 4 columns, got {len(row)}")
        _, raw, _, text = row
        if not text.strip():
            _reject(row_id, "empty text")
            continue
        gold = _binary_label(raw, "unacceptable", "acceptable", row_id)
        samples.append(Sample(id=row_id, text=text.strip(), gold=gold, dataset=task.name))
    return samples


def _load_qnli(task: TaskSpec, path: Path) -> list[Sample]:
    rows = list(_tsv_rows(path))
    if not rows:
        raise EmptyFile(str(path))
    if rows[0] != ["index", "question", "sentence", "label"]:
        raise SchemaMismatch(f"{path}: unexpected QNLI header {rows[0]}")
    samples = []
    for i, row in enumerate(rows[1:], start=1):
        if len(row) != 4:
            raise SchemaMismatch(f"{path} row {i}: expected 4 columns, got {len(row)}")
        index, question, sentence, raw = row
        row_id = f"qnli-{index}"
        if not sentence.strip():
            _reject(row_id, "empty sentence")
            continue
        gold = _check_label(raw, task, row_id)
        samples.append(
            Sample(id=row_id, text=sentence.strip(), gold=gold, dataset=task.name,
                   text2=question.strip())
        )
    return samples


def _load_rotten_tomatoes(task: TaskSpec, path: Path) -> list[Sample]:
    with path.open("r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise EmptyFile(str(path))
    if rows[0] != ["text", "label"]:
        raise SchemaMismatch(f"{path}: expected header text,label, got {rows[0]}")
    samples = []
    for i, row in enumerate(rows[1:], start=1):
        row_id = f"rt-{i}"
        if len(row) != 2:
            raise SchemaMismatch(f"{path} row {i}: expected 2 columns, got {len(row)}")
        text, raw = row
        if not text.strip():
            _reject(row_id, "empty text")
            continue
        if raw in task.label_set:
            gold = raw
        else:
            gold = _binary_label(raw, "negative", "positive", row_id)
        samples.append(Sample(id=row_id, text=text.strip(), gold=gold, dataset=task.name))
    return samples


_JIGSAW_FLAGS = ["toxic", "severe_toxic", "obscene", "threat", "insult", "identity_hate"]


def _load_jigsaw(task: TaskSpec, path: Path) -> list[Sample]:
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise EmptyFile(str(path))
        missing = {"id", "comment_text", *_JIGSAW_FLAGS} - set(reader.fieldnames)
        if missing:
            raise SchemaMismatch(f"{path}: missing columns {sorted(missing)}")
        samples = []
        for row in reader:
            row_id = f"jigsaw-{row['id']}"
            text = (row["comment_text"] or "").strip()
            if not text:
                _reject(row_id, "empty comment_text")
                continue
            flags = []
            for col in _JIGSAW_FLAGS:
                raw = (row[col] or "").strip()
                if raw not in ("0", "1"):
                    raise BadLabel(f"row {row_id}: flag {col}={raw!r} is not 0/1")
                flags.append(raw == "1")
            gold = "toxic" if any(flags) else "non-toxic"
            samples.append(Sample(id=row_id, text=text, gold=gold, dataset=task.name))
    return samples


def _load_jsonl(task: TaskSpec, path: Path) -> list[Sample]:
    samples = []
    with path.open("r", encoding="utf-8") as fh:
        for i, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaMismatch(f"{path} line {i}: invalid JSON ({exc})")
            missing = {"id", "text", "label"} - set(rec)
            if missing:
                raise SchemaMismatch(f"{path} line {i}: missing fields {sorted(missing)}")
            row_id = str(rec["id"])
            if not str(rec["text"]).strip():
                _reject(row_id, "empty text")
                continue
            gold = _check_label(str(rec["label"]), task, row_id)
            samples.append(
                Sample(id=row_id, text=str(rec["text"]), gold=gold, dataset=task.name,
                       text2=rec.get("text2"))
            )
    return samples


def draw_split(samples: list[Sample], spec: SplitSpec) -> list[Sample]:
    """Seeded, optionally label-balanced draw of n samples.

    Stratified: labels are processed in sorted order; each bucket is
    shuffled and the first quota taken (quotas differ by at most one, with
    the remainder going to the alphabetically first labels); the union is
    shuffled once more. One xorshift64* stream drives all shuffles in that
    order, so identical (samples, seed) gives an identical split.
    """
    if spec.n == 0:
        return []
    rng = XorShift64Star(spec.seed)
    if not spec.stratify:
        if len(samples) < spec.n:
            raise InsufficientLabel(f"need {spec.n} samples, have {len(samples)}")
        pool = list(samples)
        rng.shuffle(pool)
        return pool[: spec.n]

    labels = sorted({s.gold for s in samples})
    q, r = divmod(spec.n, len(labels))
    chosen: list[Sample] = []
    for pos, label in enumerate(labels):
        quota = q + (1 if pos < r else 0)
        bucket = [s for s in samples if s.gold == label]
        if len(bucket) < quota:
            raise InsufficientLabel(
                f"label {label!r} has {len(bucket)} samples, need {quota}"
            )
        rng.shuffle(bucket)
        chosen.extend(bucket[:quota])
    rng.shuffle(chosen)
    return chosen


def write_jsonl(samples: list[Sample], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for s in samples:
            fh.write(json.dumps(s.to_json(), ensure_ascii=False) + "\n")
