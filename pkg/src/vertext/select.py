"""Key-word selection: which k words of a sentence get verticalized.

Two modes. `select_llm` asks a chat model to name the k most important
words and resolves them back to word positions, caching results so reruns
are free and reproducible. `select_heuristic` is the offline fallback:
longest non-stopword words win, earlier position breaks ties.
"""

from __future__ import annotations

import hashlib
import json
import re
import threading
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import KTooLarge, WordNotInSentence, WrongCardinality
from .transform import Sentence

MODE_LLM = "llm"
MODE_HEURISTIC = "heuristic"

SELECTION_PROMPT_VERSION = "select-v1"
SELECTION_PROMPT = (
    "Identify the {k} words most important to the {task} label in the text below. "
    "Answer with a comma-separated list, words only.\n\nText: {text}"
)
RETRY_PROMPT = (
    "Answer with exactly {k} words, each copied verbatim from the text, "
    "as a comma-separated list with nothing else."
)

_MAX_ATTEMPTS = 3  # initial request plus two retries


def _load_stopwords() -> frozenset[str]:
    text = resources.files("vertext").joinpath("data/stopwords.txt").read_text("utf-8")
    return frozenset(w for w in text.split() if w)


STOPWORDS = _load_stopwords()


@dataclass(frozen=True)
class SelectionRequest:
    sentence: Sentence
    k: int
    mode: str = MODE_HEURISTIC
    evaluator_model: str | None = None
    task: str = "classification"

    def __post_init__(self):
        if self.mode not in (MODE_LLM, MODE_HEURISTIC):
            raise ValueError(f"unknown selection mode {self.mode!r}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.k > len(self.sentence.words):
            raise ValueError(
                f"k={self.k} exceeds word count {len(self.sentence.words)}"
            )


@dataclass(frozen=True)
class SelectionResult:
    indices: tuple[int, ...]  # ascending word positions
    rationale: str | None = None


def rank_heuristic(sentence: Sentence) -> list[int]:
    """Non-stopword indices ranked by (length desc, earlier position)."""
    candidates = [
        i for i, w in enumerate(sentence.words) if w.lower() not in STOPWORDS
    ]
    return sorted(candidates, key=lambda i: (-len(sentence.words[i]), i))


def select_heuristic(req: SelectionRequest) -> SelectionResult:
    ranked = rank_heuristic(req.sentence)
    if len(ranked) < req.k:
        raise KTooLarge(
            f"only {len(ranked)} non-stopword words available, need {req.k}"
        )
    return SelectionResult(indices=tuple(sorted(ranked[: req.k])))


def resolve_word(sentence: Sentence, word: str) -> int:
    """Index of the first case-insensitive occurrence of `word`."""
    target = word.lower()
    for i, w in enumerate(sentence.words):
        if w.lower() == target:
            return i
    raise WordNotInSentence(f"{word!r} does not occur in the sentence")


def _parse_word_list(generation: str) -> list[str]:
    parts = re.split(r"[,\n]+", generation)
    words = []
    for p in parts:
        w = p.strip().strip("\"'`").rstrip(".")
        w = re.sub(r"^\d+[.)]\s*", "", w).strip()
        if w:
            words.append(w)
    return words


class SelectionCache:
    """JSON-lines cache keyed by a content hash of (text, k, model).

    Appends are serialized under a lock; on load, later lines override
    earlier ones, so concurrent duplicate selections resolve last-write-wins.
    """

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path else None
        self._lock = threading.Lock()
        self._entries: dict[str, SelectionResult] = {}
        if self.path and self.path.exists():
            for line in self.path.read_text("utf-8").splitlines():
                if not line.strip():
                    continue
                rec = json.loads(line)
                self._entries[rec["key"]] = SelectionResult(
                    indices=tuple(rec["indices"]), rationale=rec.get("rationale")
                )

    @staticmethod
    def key(text: str, k: int, model: str | None) -> str:
        payload = json.dumps(
            {"text": text, "k": k, "model": model}, sort_keys=True, ensure_ascii=False
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def get(self, key: str) -> SelectionResult | None:
        with self._lock:
            return self._entries.get(key)

    def put(self, key: str, result: SelectionResult) -> None:
        with self._lock:
            self._entries[key] = result
            if self.path:
                rec = {
                    "key": key,
                    "indices": list(result.indices),
                    "rationale": result.rationale,
                }
                with self.path.open("a", encoding="utf-8") as fh:
                    fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


def select_llm(req: SelectionRequest, client, cache: SelectionCache | None = None) -> SelectionResult:
    """Ask the evaluator model for the k key words and resolve them to indices.

    Hallucinated words and wrong-cardinality answers are retried up to two
    times with a corrective follow-up message before raising.
    """
    if req.mode != MODE_LLM:
        raise ValueError("select_llm requires mode='llm'")
    key = SelectionCache.key(req.sentence.original_text, req.k, req.evaluator_model)
    if cache is not None:
        hit = cache.get(key)
        if hit is not None:
            return hit

    messages = [
        {
            "role": "user",
            "content": SELECTION_PROMPT.format(
                k=req.k, task=req.task, text=req.sentence.original_text
            ),
        }
    ]
    last_error: Exception | None = None
    for attempt in range(_MAX_ATTEMPTS):
        transcript = client.complete(messages)
        words = _parse_word_list(transcript.generation)
        try:
            if len(words) != req.k:
                raise WrongCardinality(
                    f"evaluator returned {len(words)} words, expected {req.k}"
                )
            indices = tuple(sorted({resolve_word(req.sentence, w) for w in words}))
            if len(indices) != req.k:
                raise WrongCardinality(
                    f"evaluator words resolve to {len(indices)} distinct positions, expected {req.k}"
                )
        except (WrongCardinality, WordNotInSentence) as exc:
            last_error = exc
            if attempt < _MAX_ATTEMPTS - 1:
                messages = messages + [
                    {"role": "assistant", "content": transcript.generation},
                    {"role": "user", "content": RETRY_PROMPT.format(k=req.k)},
                ]
                continue
            raise
        result = SelectionResult(indices=indices, rationale=transcript.generation)
        if cache is not None:
            cache.put(key, result)
        return result
    raise last_error  # pragma: no cover - loop always returns or raises
