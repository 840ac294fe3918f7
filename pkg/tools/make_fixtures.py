#!/usr/bin/env python3
"""Generate the committed mock-classifier fixtures.

Every fixture text embeds lexicon keywords as the strictly longest
non-stopwords, so the heuristic selector provably targets them; the
script verifies that before writing. Run from the repo root:

    python tools/make_fixtures.py
"""

import json
from pathlib import Path

from vertext.select import STOPWORDS, SelectionRequest, select_heuristic
from vertext.transform import decompose

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

POSITIVE_WORDS = [
    "wonderful", "charming", "delightful", "marvelous", "stunning",
    "glorious", "splendid", "uplifting", "engaging", "majestic",
]
NEGATIVE_WORDS = [
    "terrible", "horrible", "dreadful", "miserable", "wretched",
    "appalling", "atrocious", "unbearable", "depressing", "tiresome",
]

SINGLE_TEMPLATES = [
    "the cast was {kw} in every scene",
    "a {kw} story from start to end",
    "critics call it {kw} and they agree",
    "this film felt {kw} to me",
    "an {kw} ride for the whole family",
]

PAIR_TEMPLATES = [
    "the {a} and {b} film kept us going",
    "its {a} tone and {b} pace won praise",
    "a {a} script with {b} acting all round",
    "that {a} plot and {b} cast made it work",
]

POSITIVE_PAIRS = [
    ("delightful", "charming"), ("wonderful", "splendid"),
    ("marvelous", "engaging"), ("glorious", "stunning"),
    ("uplifting", "majestic"),
]
NEGATIVE_PAIRS = [
    ("unbearable", "dreadful"), ("miserable", "horrible"),
    ("appalling", "terrible"), ("atrocious", "wretched"),
    ("depressing", "tiresome"),
]


def lexicon() -> dict:
    lex = {w: "positive" for w in POSITIVE_WORDS}
    lex.update({w: "negative" for w in NEGATIVE_WORDS})
    return lex


def check_keyword_is_top(text: str, keywords: list[str], k: int,
                         all_keywords: list[str] | None = None) -> None:
    """The heuristic's top-k for this text must be exactly `keywords`."""
    sentence = decompose(text)
    picked = select_heuristic(SelectionRequest(sentence=sentence, k=k)).indices
    surface = {sentence.words[i] for i in picked}
    assert surface == set(keywords), (text, surface, keywords)
    fillers = [w for w in sentence.words if w not in (all_keywords or keywords)]
    assert all(w.lower() in STOPWORDS or len(w) < 8 for w in fillers), text


def make_single_fixture() -> list[dict]:
    rows = []
    for label, words in (("positive", POSITIVE_WORDS), ("negative", NEGATIVE_WORDS)):
        for wi, kw in enumerate(words):
            for ti, template in enumerate(SINGLE_TEMPLATES):
                text = template.format(kw=kw)
                check_keyword_is_top(text, [kw], k=1)
                rows.append(
                    {"id": f"mock-{label[0]}{wi}{ti}", "text": text, "label": label}
                )
    assert len(rows) == 100
    return rows


def make_pair_fixture() -> list[dict]:
    rows = []
    for label, pairs in (("positive", POSITIVE_PAIRS), ("negative", NEGATIVE_PAIRS)):
        for pi, (a, b) in enumerate(pairs):
            for ti, template in enumerate(PAIR_TEMPLATES):
                text = template.format(a=a, b=b)
                check_keyword_is_top(text, [a], k=1, all_keywords=[a, b])
                check_keyword_is_top(text, [a, b], k=2)
                # enough non-stopwords for a k=4 sweep
                sentence = decompose(text)
                non_stop = [w for w in sentence.words if w.lower() not in STOPWORDS]
                assert len(non_stop) >= 4, text
                rows.append(
                    {"id": f"sweep-{label[0]}{pi}{ti}", "text": text, "label": label}
                )
    assert len(rows) == 40
    return rows


def write_jsonl(rows: list[dict], path: Path) -> None:
    path.write_text(
        "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows), "utf-8"
    )
    print(f"wrote {path} ({len(rows)} rows)")


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    write_jsonl(make_single_fixture(), FIXTURES / "mock_sentiment_100.jsonl")
    write_jsonl(make_pair_fixture(), FIXTURES / "sweep_sentiment_40.jsonl")
    lex_path = FIXTURES / "mock_lexicon.json"
    lex_path.write_text(json.dumps(lexicon(), indent=2, sort_keys=True) + "\n", "utf-8")
    print(f"wrote {lex_path}")


if __name__ == "__main__":
    main()
