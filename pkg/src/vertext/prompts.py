"""Prompt construction under four strategies, and label parsing.

Strategies: zero_shot (instruction + input + answer directive), cot (adds
a step-by-step cue), few_shot (three worked reconstruction examples, each
with a crafted analysis and label), explicit (discloses the vertical
format and asks the model to reconstruct before answering). Templates are
versioned files shipped with the package; every rendered prompt is a pure
function of (strategy, input), pinned byte-for-byte by golden tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from .select import resolve_word
from .transform import TransformSpec, decompose, verticalize

ZERO_SHOT = "zero_shot"
COT = "cot"
FEW_SHOT = "few_shot"
EXPLICIT = "explicit"
STRATEGY_KINDS = (ZERO_SHOT, COT, FEW_SHOT, EXPLICIT)

TEMPLATE_VERSION = "v1"
UNPARSED = "<unparsed>"


@dataclass(frozen=True)
class TaskSpec:
    name: str
    label_set: tuple[str, ...]
    instruction: str
    pair_task: bool = False

    def __post_init__(self):
        if len(set(self.label_set)) < 2:
            raise ValueError("label_set needs at least 2 distinct entries")


TASKS: dict[str, TaskSpec] = {
    "sst2": TaskSpec(
        "sst2",
        ("positive", "negative"),
        "Determine whether the sentiment of the following movie review sentence is positive or negative.",
    ),
    "rotten_tomatoes": TaskSpec(
        "rotten_tomatoes",
        ("positive", "negative"),
        "Determine whether the sentiment of the following movie review is positive or negative.",
    ),
    "cola": TaskSpec(
        "cola",
        ("acceptable", "unacceptable"),
        "Determine whether the following sentence is grammatically acceptable or unacceptable.",
    ),
    "qnli": TaskSpec(
        "qnli",
        ("entailment", "not_entailment"),
        "Determine whether the sentence contains the answer to the question. "
        "Answer entailment if it does, not_entailment if it does not.",
        pair_task=True,
    ),
    "jigsaw": TaskSpec(
        "jigsaw",
        ("toxic", "non-toxic"),
        "Determine whether the following comment is toxic or non-toxic.",
    ),
}


@dataclass(frozen=True)
class Shot:
    input_text: str  # what the prompt shows (pair tasks include the question)
    analysis: str
    label: str
    grid_text: str = ""  # the verticalized portion alone, for round-trip checks


@dataclass(frozen=True)
class PromptStrategy:
    kind: str
    task: TaskSpec
    shots: tuple[Shot, ...] = ()
    shot_count: int = 3

    def __post_init__(self):
        if self.kind not in STRATEGY_KINDS:
            raise ValueError(f"unknown strategy kind {self.kind!r}")
        if self.kind == FEW_SHOT:
            if not self.shots or len(self.shots) != self.shot_count:
                raise ValueError(
                    f"few_shot needs exactly {self.shot_count} shots, got {len(self.shots)}"
                )
        elif self.shots:
            raise ValueError(f"{self.kind} takes no shots")

    @property
    def strategy_id(self) -> str:
        return f"{self.kind}@{TEMPLATE_VERSION}"


@dataclass(frozen=True)
class LabelParse:
    label: str  # one of task.label_set, or UNPARSED
    raw: str


def compose_input(task: TaskSpec, text: str, text2: str | None = None) -> str:
    """Final input block; pair tasks put the sentence on its own lines so a
    grid rendering keeps its column alignment."""
    if task.pair_task:
        return f"Question: {text2}\nSentence:\n{text}"
    return text


_template_cache: dict[str, str] = {}


def _template(kind: str) -> str:
    if kind not in _template_cache:
        name = f"templates/{kind}_{TEMPLATE_VERSION}.txt"
        _template_cache[kind] = (
            resources.files("vertext").joinpath(name).read_text("utf-8")
        )
    return _template_cache[kind]


def _render_shots(shots: tuple[Shot, ...]) -> str:
    blocks = []
    for shot in shots:
        blocks.append(
            f"Input:\n{shot.input_text}\n\nAnalysis: {shot.analysis}\nLabel: {shot.label}"
        )
    return "\n\n".join(blocks)


def build_prompt(strategy: PromptStrategy, input_text: str) -> list[dict]:
    """Render the strategy's template into a single-user-message prompt."""
    if not input_text:
        raise ValueError("input_text must be nonempty")
    text = _template(strategy.kind)
    text = text.replace("{{instruction}}", strategy.task.instruction)
    text = text.replace("{{labels}}", ", ".join(strategy.task.label_set))
    if strategy.kind == FEW_SHOT:
        text = text.replace("{{shots}}", _render_shots(strategy.shots))
    text = text.replace("{{input}}", input_text)
    return [{"role": "user", "content": text.rstrip("\n")}]


def parse_label(generation: str, task: TaskSpec) -> LabelParse:
    """Find task labels in a generation, case-insensitively.

    Exactly one distinct label -> that label; several -> the last occurring
    (final-answer convention for CoT transcripts); none -> UNPARSED.
    Matches lying inside a longer label's match are ignored, so
    "not_entailment" never double-counts as "entailment".
    """
    text = generation.lower()
    matches: list[tuple[int, int, str]] = []
    for label in task.label_set:
        needle = label.lower()
        start = 0
        while True:
            pos = text.find(needle, start)
            if pos < 0:
                break
            matches.append((pos, pos + len(needle), label))
            start = pos + 1
    kept = [
        m
        for m in matches
        if not any(
            o[2] != m[2]
            and o[0] <= m[0]
            and m[1] <= o[1]
            and (o[1] - o[0]) > (m[1] - m[0])
            for o in matches
        )
    ]
    if not kept:
        return LabelParse(label=UNPARSED, raw=generation)
    distinct = {m[2] for m in kept}
    if len(distinct) == 1:
        return LabelParse(label=kept[0][2], raw=generation)
    last = max(kept, key=lambda m: (m[0], m[1]))
    return LabelParse(label=last[2], raw=generation)


def make_shot(task: TaskSpec, text: str, vertical_words: list[str], label: str,
              reason: str, question: str | None = None) -> Shot:
    """Build a worked example whose analysis describes a real grid."""
    sentence = decompose(text)
    indices = frozenset(resolve_word(sentence, w) for w in vertical_words)
    _, rendered = verticalize(sentence, TransformSpec(vertical_indices=indices))
    listing = "\n".join(
        f"{n}. '{w}' ({', '.join(w)})" for n, w in enumerate(vertical_words, 1)
    )
    analysis = (
        "The vertically inputted words are:\n"
        f"{listing}\n"
        f"Reconstructed input: '{text}'. {reason}"
    )
    return Shot(
        input_text=compose_input(task, rendered, question),
        analysis=analysis,
        label=label,
        grid_text=rendered,
    )


_SHOT_SOURCES: dict[str, list[tuple]] = {
    # (text, vertical words, label, reason[, question])
    "sst2": [
        ("the film is a wonderful journey with heart", ["wonderful"], "positive",
         "The word 'wonderful' expresses strong praise, so the sentiment is positive."),
        ("a dull and tedious plot sinks the movie", ["dull", "tedious"], "negative",
         "Both 'dull' and 'tedious' criticize the plot, so the sentiment is negative."),
        ("an uneven script saved by charming performances", ["charming"], "positive",
         "Despite a reservation, the review praises the 'charming' performances, so the sentiment is positive."),
    ],
    "cola": [
        ("the children played quietly in the garden", ["played"], "acceptable",
         "The verb agrees with its subject and the word order is standard, so the sentence is acceptable."),
        ("the book who I read was long", ["book"], "unacceptable",
         "'who' cannot introduce a relative clause for an inanimate noun, so the sentence is unacceptable."),
        ("every student finished the assignment", ["finished"], "acceptable",
         "Subject, verb, and object are well formed, so the sentence is acceptable."),
    ],
    "qnli": [
        ("The sky appears blue during a clear day", ["blue"], "entailment",
         "The sentence states the color asked about, so it answers the question.",
         "What color is the sky?"),
        ("The bridge carries six lanes of traffic across the bay", ["traffic"], "not_entailment",
         "The sentence describes capacity, not a construction date, so it does not answer the question.",
         "When was the bridge built?"),
        ("The novel was written by a retired teacher", ["written"], "entailment",
         "The sentence names who wrote the novel, so it answers the question.",
         "Who wrote the novel?"),
    ],
    "jigsaw": [
        ("You are a talented idiot who never fails to surprise me", ["idiot"], "toxic",
         "The word 'idiot' is a direct insult, so the comment is toxic."),
        ("Thanks for the helpful explanation and the quick reply", ["helpful"], "non-toxic",
         "The comment is polite gratitude with no attack, so it is non-toxic."),
        ("nobody wants your worthless garbage opinions here", ["worthless", "garbage"], "toxic",
         "'worthless' and 'garbage' demean the person addressed, so the comment is toxic."),
    ],
}
_SHOT_SOURCES["rotten_tomatoes"] = _SHOT_SOURCES["sst2"]


def default_shots(task: TaskSpec) -> tuple[Shot, ...]:
    """The shipped three-shot examples for a task."""
    sources = _SHOT_SOURCES.get(task.name)
    if sources is None:
        raise ValueError(f"no default shots for task {task.name!r}")
    return tuple(make_shot(task, *src) for src in sources)


def strategy_for(kind: str, task: TaskSpec) -> PromptStrategy:
    """Construct a strategy, filling in default shots for few_shot."""
    shots = default_shots(task) if kind == FEW_SHOT else ()
    return PromptStrategy(kind=kind, task=task, shots=shots)
