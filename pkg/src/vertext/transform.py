"""Mixed horizontal/vertical grid layout for sentences.

A sentence is split into whitespace-delimited words. Selected words are
rotated into single-character-wide columns: their first character stays on
row 0 (the "skeleton sentence"), the remaining characters descend the same
column on the rows below. Everything else stays left-to-right on row 0,
words separated by exactly one pad character. Trailing padding is trimmed
per row, which makes the rendering canonical and the whole layout
invertible: `reconstruct(verticalize(s, spec).rendered)` recovers the word
sequence exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    DuplicateIndex,
    EmptyInput,
    MalformedGrid,
    OversizeInput,
    SpecOutOfRange,
)

WORD_MAX_CHARS = 50
SENTENCE_MAX_WORDS = 512

HORIZONTAL = "horizontal"
VERTICAL = "vertical"


@dataclass(frozen=True)
class Sentence:
    """An ordered word list plus the text it came from."""

    words: tuple[str, ...]
    original_text: str

    def __post_init__(self):
        if not self.words:
            raise EmptyInput("sentence has no words")
        for w in self.words:
            if not w or any(ch.isspace() for ch in w):
                raise ValueError(f"invalid word {w!r}: empty or contains whitespace")


@dataclass(frozen=True)
class TransformSpec:
    """Which word positions to verticalize, and the padding character."""

    vertical_indices: frozenset[int] = frozenset()
    pad_char: str = " "

    def __post_init__(self):
        idx = self.vertical_indices
        if not isinstance(idx, frozenset):
            seq = list(idx)
            if len(seq) != len(set(seq)):
                raise DuplicateIndex(f"duplicate vertical indices in {seq}")
            object.__setattr__(self, "vertical_indices", frozenset(seq))
        for i in self.vertical_indices:
            if not isinstance(i, int) or isinstance(i, bool) or i < 0:
                raise SpecOutOfRange(f"vertical index {i!r} is not a non-negative integer")
        if len(self.pad_char) != 1:
            raise ValueError(f"pad_char must be a single character, got {self.pad_char!r}")


@dataclass(frozen=True)
class Placement:
    """Where a word starts in the grid and how it runs."""

    row: int
    col: int
    orientation: str  # HORIZONTAL or VERTICAL


@dataclass(frozen=True)
class LayoutGrid:
    """The 2-D character grid realizing a transform, with its placement map."""

    height: int
    rows: tuple[str, ...]
    placements: dict[int, Placement] = field(compare=False)

    @property
    def rendered(self) -> str:
        return "\n".join(self.rows)


def decompose(text: str) -> Sentence:
    """Split text into maximal runs of non-whitespace, punctuation attached."""
    if not text or not text.strip():
        raise EmptyInput("input text is empty or all whitespace")
    words = tuple(text.split())
    if len(words) > SENTENCE_MAX_WORDS:
        raise OversizeInput(f"sentence has {len(words)} words (limit {SENTENCE_MAX_WORDS})")
    for w in words:
        if len(w) > WORD_MAX_CHARS:
            raise OversizeInput(f"word {w[:16]!r}... has {len(w)} chars (limit {WORD_MAX_CHARS})")
    return Sentence(words=words, original_text=text)


def verticalize(sentence: Sentence, spec: TransformSpec) -> tuple[LayoutGrid, str]:
    """Lay the sentence out on a grid with the selected words verticalized.

    Row 0 holds every word left-to-right, one pad char between words; a
    vertical word contributes only its first character (a width-1 column
    slot). Rows below hold the remaining characters of each vertical word
    in its column, padding elsewhere, trailing padding trimmed.
    """
    words = sentence.words
    for i in spec.vertical_indices:
        if i >= len(words):
            raise SpecOutOfRange(f"vertical index {i} out of range for {len(words)} words")
    pad = spec.pad_char
    for w in words:
        if pad in w:
            raise ValueError(
                f"pad_char {pad!r} occurs inside word {w!r}; layout would not be invertible"
            )

    height = max((len(words[i]) for i in spec.vertical_indices), default=1)
    placements: dict[int, Placement] = {}
    row0_parts: list[str] = []
    col = 0
    for i, w in enumerate(words):
        if i > 0:
            row0_parts.append(pad)
            col += 1
        if i in spec.vertical_indices:
            placements[i] = Placement(row=0, col=col, orientation=VERTICAL)
            row0_parts.append(w[0])
            col += 1
        else:
            placements[i] = Placement(row=0, col=col, orientation=HORIZONTAL)
            row0_parts.append(w)
            col += len(w)
    width = col

    rows = ["".join(row0_parts)]
    for r in range(1, height):
        cells = [pad] * width
        for i in spec.vertical_indices:
            w = words[i]
            if r < len(w):
                cells[placements[i].col] = w[r]
        rows.append("".join(cells).rstrip(pad))

    grid = LayoutGrid(height=height, rows=tuple(rows), placements=placements)
    return grid, grid.rendered


def reconstruct(rendered: str, pad_char: str = " ") -> Sentence:
    """Invert a verticalize rendering back to its word sequence.

    Row-0 tokens whose column carries non-pad characters on lower rows are
    read top-to-bottom as vertical words; all other tokens are horizontal.
    """
    if rendered == "":
        raise MalformedGrid("empty input")
    rows = rendered.split("\n")
    row0 = rows[0]

    tokens: list[tuple[int, str]] = []  # (start column, surface)
    i = 0
    while i < len(row0):
        if row0[i] == pad_char:
            i += 1
            continue
        j = i
        while j < len(row0) and row0[j] != pad_char:
            j += 1
        tokens.append((i, row0[i:j]))
        i = j
    if not tokens:
        raise MalformedGrid("row 0 holds no words")

    below: dict[int, list[tuple[int, str]]] = {}
    for r in range(1, len(rows)):
        for c, ch in enumerate(rows[r]):
            if ch != pad_char:
                below.setdefault(c, []).append((r, ch))

    token_at_col: dict[int, tuple[int, str]] = {}
    for start, surface in tokens:
        for c in range(start, start + len(surface)):
            token_at_col[c] = (start, surface)

    for c, entries in below.items():
        if c not in token_at_col:
            raise MalformedGrid(f"character below column {c}, which holds no word")
        start, surface = token_at_col[c]
        if len(surface) > 1:
            raise MalformedGrid(
                f"character below column {c} of horizontal word {surface!r}"
            )
        got = [r for r, _ in entries]
        if got != list(range(1, len(got) + 1)):
            raise MalformedGrid(f"ragged column {c}: characters on rows {got}")

    words = []
    for start, surface in tokens:
        if len(surface) == 1 and start in below:
            words.append(surface + "".join(ch for _, ch in below[start]))
        else:
            words.append(surface)
    return Sentence(words=tuple(words), original_text=" ".join(words))
