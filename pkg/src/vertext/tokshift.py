"""Byte-level BPE encoding and vertical-layout token inflation.

Loads tokenizer artifacts in the published vocab.json + merges.txt layout
(or a single tokenizer.json), runs the standard byte-level BPE pipeline
(GPT-2 pretokenization regex, byte-to-unicode mapping, lowest-rank merge
first), and measures how a word's token count inflates when its characters
are stacked into a column. Arbitrary byte strings survive an
encode/decode round trip via surrogate escapes, which are a no-op for
valid UTF-8 text.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import regex

from .errors import ArtifactInvalid, UnsupportedTokenizer

_PRETOKEN_RE = regex.compile(
    r"""'s|'t|'re|'ve|'m|'ll|'d| ?\p{L}+| ?\p{N}+| ?[^\s\p{L}\p{N}]+|\s+(?!\S)|\s+"""
)

_INF = float("inf")


def _bytes_to_unicode() -> dict[int, str]:
    """GPT-2's bijective byte -> printable-unicode map."""
    bs = (
        list(range(ord("!"), ord("~") + 1))
        + list(range(ord("¡"), ord("¬") + 1))
        + list(range(ord("®"), ord("ÿ") + 1))
    )
    cs = bs[:]
    n = 0
    for b in range(256):
        if b not in bs:
            bs.append(b)
            cs.append(256 + n)
            n += 1
    return dict(zip(bs, (chr(c) for c in cs)))


_BYTE_ENC = _bytes_to_unicode()
_BYTE_DEC = {v: k for k, v in _BYTE_ENC.items()}


@dataclass
class TokenizerArtifact:
    vocab: dict[str, int]
    merges: list[tuple[str, str]]
    byte_level: bool = True
    special_tokens: frozenset[str] = frozenset()
    ranks: dict[tuple[str, str], int] = field(init=False, repr=False)
    id_to_token: dict[int, str] = field(init=False, repr=False)
    _word_cache: dict[str, tuple[str, ...]] = field(init=False, repr=False)

    def __post_init__(self):
        self.ranks = {pair: rank for rank, pair in enumerate(self.merges)}
        self.id_to_token = {i: t for t, i in self.vocab.items()}
        self._word_cache = {}
        self.validate()

    def validate(self) -> None:
        for a, b in self.merges:
            if a not in self.vocab or b not in self.vocab:
                raise ArtifactInvalid(f"merge ({a!r}, {b!r}) uses symbols missing from vocab")
            if a + b not in self.vocab:
                raise ArtifactInvalid(f"merge result {a + b!r} missing from vocab")
        missing = [s for s in _BYTE_DEC if s not in self.vocab]
        if missing:
            raise ArtifactInvalid(
                f"vocab lacks {len(missing)} byte-level symbols (e.g. {missing[0]!r})"
            )


def load_artifact(path: str | Path) -> TokenizerArtifact:
    """Load from a directory holding vocab.json + merges.txt, or from a
    single tokenizer.json file."""
    path = Path(path)
    if path.is_dir():
        tok_json = path / "tokenizer.json"
        if (path / "vocab.json").exists():
            return _load_vocab_merges(path / "vocab.json", path / "merges.txt")
        if tok_json.exists():
            return _load_tokenizer_json(tok_json)
        raise ArtifactInvalid(f"{path} holds neither vocab.json nor tokenizer.json")
    if path.name == "tokenizer.json" or path.suffix == ".json" and _looks_like_tokenizer_json(path):
        return _load_tokenizer_json(path)
    raise ArtifactInvalid(f"cannot interpret artifact path {path}")


def _looks_like_tokenizer_json(path: Path) -> bool:
    try:
        return "model" in json.loads(path.read_text("utf-8"))
    except (OSError, json.JSONDecodeError):
        return False


def _load_vocab_merges(vocab_path: Path, merges_path: Path) -> TokenizerArtifact:
    try:
        vocab = json.loads(vocab_path.read_text("utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ArtifactInvalid(f"cannot read vocab: {exc}")
    if not merges_path.exists():
        raise ArtifactInvalid(f"missing merges file {merges_path}")
    merges = []
    for line in merges_path.read_text("utf-8").splitlines():
        if not line or line.startswith("#version"):
            continue
        parts = line.split(" ")
        if len(parts) != 2:
            raise ArtifactInvalid(f"malformed merge line {line!r}")
        merges.append((parts[0], parts[1]))
    return TokenizerArtifact(vocab=vocab, merges=merges)


def _load_tokenizer_json(path: Path) -> TokenizerArtifact:
    data = json.loads(path.read_text("utf-8"))
    model = data.get("model", {})
    mtype = model.get("type", "BPE")
    if mtype != "BPE":
        raise UnsupportedTokenizer(f"tokenizer model type {mtype!r}; only BPE is supported")
    vocab = model.get("vocab")
    raw_merges = model.get("merges")
    if vocab is None or raw_merges is None:
        raise ArtifactInvalid(f"{path}: model lacks vocab/merges")
    merges = []
    for m in raw_merges:
        if isinstance(m, str):
            parts = m.split(" ")
            if len(parts) != 2:
                raise ArtifactInvalid(f"malformed merge entry {m!r}")
            merges.append((parts[0], parts[1]))
        else:
            merges.append((m[0], m[1]))
    specials = frozenset(
        t["content"] for t in data.get("added_tokens", []) if t.get("special")
    )
    return TokenizerArtifact(vocab=vocab, merges=merges, special_tokens=specials)


def _bpe_word(artifact: TokenizerArtifact, word: str) -> tuple[str, ...]:
    """Merge a byte-mapped pretoken: lowest-rank pair first, left-to-right."""
    cached = artifact._word_cache.get(word)
    if cached is not None:
        return cached
    symbols = list(word)
    while len(symbols) >= 2:
        pairs = set(zip(symbols, symbols[1:]))
        best = min(pairs, key=lambda p: artifact.ranks.get(p, _INF))
        if best not in artifact.ranks:
            break
        merged = []
        i = 0
        while i < len(symbols):
            if (
                i < len(symbols) - 1
                and symbols[i] == best[0]
                and symbols[i + 1] == best[1]
            ):
                merged.append(symbols[i] + symbols[i + 1])
                i += 2
            else:
                merged.append(symbols[i])
                i += 1
        symbols = merged
    result = tuple(symbols)
    if len(artifact._word_cache) < 65536:
        artifact._word_cache[word] = result
    return result


def _split_specials(text: str, specials: frozenset[str]) -> list[tuple[str, bool]]:
    if not specials:
        return [(text, False)]
    pattern = "|".join(regex.escape(s) for s in sorted(specials, key=len, reverse=True))
    out = []
    pos = 0
    for m in regex.finditer(pattern, text):
        if m.start() > pos:
            out.append((text[pos:m.start()], False))
        out.append((m.group(0), True))
        pos = m.end()
    if pos < len(text):
        out.append((text[pos:], False))
    return out


def encode(artifact: TokenizerArtifact, text: str) -> list[int]:
    """Byte-level pretokenization, then greedy merges by rank."""
    ids: list[int] = []
    for segment, is_special in _split_specials(text, artifact.special_tokens):
        if is_special:
            ids.append(artifact.vocab[segment])
            continue
        for m in _PRETOKEN_RE.finditer(segment):
            data = m.group(0).encode("utf-8", errors="surrogateescape")
            mapped = "".join(_BYTE_ENC[b] for b in data)
            for sym in _bpe_word(artifact, mapped):
                sym_id = artifact.vocab.get(sym)
                if sym_id is None:
                    raise ArtifactInvalid(f"symbol {sym!r} missing from vocab")
                ids.append(sym_id)
    return ids


def encode_bytes(artifact: TokenizerArtifact, data: bytes) -> list[int]:
    return encode(artifact, data.decode("utf-8", errors="surrogateescape"))


def decode_bytes(artifact: TokenizerArtifact, ids: list[int]) -> bytes:
    chunks = []
    for i in ids:
        token = artifact.id_to_token.get(i)
        if token is None:
            raise ArtifactInvalid(f"id {i} missing from vocab")
        chunks.append(bytes(_BYTE_DEC[ch] for ch in token))
    return b"".join(chunks)


def decode(artifact: TokenizerArtifact, ids: list[int]) -> str:
    return decode_bytes(artifact, ids).decode("utf-8", errors="surrogateescape")


def token_surfaces(artifact: TokenizerArtifact, ids: list[int]) -> list[str]:
    """Human-readable piece per id (byte map inverted)."""
    return [
        bytes(_BYTE_DEC[ch] for ch in artifact.id_to_token[i]).decode(
            "utf-8", errors="replace"
        )
        for i in ids
    ]


@dataclass(frozen=True)
class TokenInflationReport:
    word: str
    horizontal_text: str
    horizontal_ids: tuple[int, ...]
    horizontal_pieces: tuple[str, ...]
    vertical_text: str
    vertical_ids: tuple[int, ...]
    vertical_pieces: tuple[str, ...]
    inflation_ratio: float

    def to_json(self) -> dict:
        return {
            "word": self.word,
            "horizontal": {
                "text": self.horizontal_text,
                "ids": list(self.horizontal_ids),
                "pieces": list(self.horizontal_pieces),
                "count": len(self.horizontal_ids),
            },
            "vertical": {
                "text": self.vertical_text,
                "ids": list(self.vertical_ids),
                "pieces": list(self.vertical_pieces),
                "count": len(self.vertical_ids),
            },
            "inflation_ratio": self.inflation_ratio,
        }


def inflate(artifact: TokenizerArtifact, word: str,
            layout_context: str | None = None) -> TokenInflationReport:
    """Token counts for a word written mid-sentence vs stacked in a column.

    The horizontal form carries a leading space (mid-sentence position,
    where common words are single tokens). The vertical form is the word's
    column rendering: its characters joined by newlines, as produced by
    the grid layout; `layout_context` may supply a different rendering
    region (e.g. a column cut from a larger grid).
    """
    if not word or not word.isalpha():
        raise ValueError(f"word must be nonempty alphabetic, got {word!r}")
    horizontal_text = " " + word
    vertical_text = layout_context if layout_context is not None else "\n".join(word)

    h_ids = encode(artifact, horizontal_text)
    v_ids = encode(artifact, vertical_text)
    if decode(artifact, h_ids) != horizontal_text or decode(artifact, v_ids) != vertical_text:
        raise ArtifactInvalid("encode/decode round trip failed")  # pragma: no cover
    return TokenInflationReport(
        word=word,
        horizontal_text=horizontal_text,
        horizontal_ids=tuple(h_ids),
        horizontal_pieces=tuple(token_surfaces(artifact, h_ids)),
        vertical_text=vertical_text,
        vertical_ids=tuple(v_ids),
        vertical_pieces=tuple(token_surfaces(artifact, v_ids)),
        inflation_ratio=len(v_ids) / len(h_ids),
    )
