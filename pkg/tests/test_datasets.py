import json
from collections import Counter

import pytest

from vertext.datasets import (
    Sample,
    SplitSpec,
    XorShift64Star,
    draw_split,
    load,
    write_jsonl,
)
from vertext.errors import BadLabel, EmptyFile, InsufficientLabel, SchemaMismatch


def make_samples(n_pos, n_neg, dataset="sst2"):
    out = []
    for i in range(n_pos):
        out.append(Sample(id=f"p{i}", text=f"good text {i}", gold="positive", dataset=dataset))
    for i in range(n_neg):
        out.append(Sample(id=f"n{i}", text=f"bad text {i}", gold="negative", dataset=dataset))
    return out


def test_xorshift_is_deterministic():
    a = XorShift64Star(7)
    b = XorShift64Star(7)
    assert [a.next_u64() for _ in range(5)] == [b.next_u64() for _ in range(5)]


def test_xorshift_zero_seed_works():
    gen = XorShift64Star(0)
    vals = {gen.next_u64() for _ in range(10)}
    assert len(vals) == 10


def test_sst2_loader(tmp_path):
    f = tmp_path / "dev.tsv"
    f.write_text("sentence\tlabel\na stirring film\t1\na dreary slog\t0\n")
    samples = load("sst2", f)
    assert samples[0].text == "a stirring film"
    assert samples[0].gold == "positive"
    assert samples[1].gold == "negative"


def test_sst2_schema_mismatch(tmp_path):
    f = tmp_path / "dev.tsv"
    f.write_text("sentence\tlabel\ta stirring film\t1\textra\n")
    with pytest.raises(SchemaMismatch):
        load("sst2", f)


def test_sst2_bad_label(tmp_path):
    f = tmp_path / "dev.tsv"
    f.write_text("sentence\tlabel\na stirring film\t2\n")
    with pytest.raises(BadLabel):
        load("sst2", f)


def test_cola_loader(tmp_path):
    f = tmp_path / "dev.tsv"
    f.write_text("gj04\t1\t\tThe sailors rode the breeze clear of the rocks.\n"
                 "gj04\t0\t*\tThe car honked down the road.\n")
    samples = load("cola", f)
    assert samples[0].gold == "acceptable"
    assert samples[1].gold == "unacceptable"


def test_qnli_loader(tmp_path):
    f = tmp_path / "dev.tsv"
    f.write_text(
        "index\tquestion\tsentence\tlabel\n"
        "0\tWhat color is the sky?\tThe sky is blue.\tentailment\n"
        "1\tWhen was it built?\tThe bridge is long.\tnot_entailment\n"
    )
    samples = load("qnli", f)
    assert samples[0].text == "The sky is blue."
    assert samples[0].text2 == "What color is the sky?"
    assert samples[1].gold == "not_entailment"


def test_rotten_tomatoes_loader(tmp_path):
    f = tmp_path / "rt.csv"
    f.write_text('text,label\n"a fine, absorbing film",1\nforgettable,0\n')
    samples = load("rotten_tomatoes", f)
    assert samples[0].text == "a fine, absorbing film"
    assert samples[0].gold == "positive"


def test_jigsaw_any_flag_rule(tmp_path):
    f = tmp_path / "train.csv"
    f.write_text(
        "id,comment_text,toxic,severe_toxic,obscene,threat,insult,identity_hate\n"
        'abc,"you are an idiot",1,0,0,0,1,0\n'
        'def,"thanks for the help",0,0,0,0,0,0\n'
    )
    samples = load("jigsaw", f)
    assert samples[0].gold == "toxic"
    assert samples[1].gold == "non-toxic"


def test_jigsaw_missing_columns(tmp_path):
    f = tmp_path / "train.csv"
    f.write_text("id,comment_text,toxic\nabc,hi,0\n")
    with pytest.raises(SchemaMismatch):
        load("jigsaw", f)


def test_jsonl_universal_schema(tmp_path):
    f = tmp_path / "data.jsonl"
    rows = [
        {"id": "1", "text": "great movie", "label": "positive"},
        {"id": "2", "text": "terrible movie", "label": "negative"},
    ]
    f.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
    samples = load("sst2", f)
    assert [s.gold for s in samples] == ["positive", "negative"]


def test_jsonl_bad_label(tmp_path):
    f = tmp_path / "data.jsonl"
    f.write_text('{"id": "1", "text": "x", "label": "meh"}\n')
    with pytest.raises(BadLabel):
        load("sst2", f)


def test_empty_file(tmp_path):
    f = tmp_path / "data.jsonl"
    f.write_text("")
    with pytest.raises(EmptyFile):
        load("sst2", f)


def test_rejected_rows_are_logged_not_fatal(tmp_path, caplog):
    f = tmp_path / "dev.tsv"
    f.write_text("sentence\tlabel\n\t1\nsolid film\t1\n")
    with caplog.at_level("WARNING"):
        samples = load("sst2", f)
    assert len(samples) == 1
    assert any("rejecting row" in r.message for r in caplog.records)


def test_unknown_dataset():
    with pytest.raises(SchemaMismatch):
        load("imdb", "nowhere.tsv")


def test_draw_split_balanced():
    samples = make_samples(600, 400)
    split = draw_split(samples, SplitSpec(n=100, seed=42))
    counts = Counter(s.gold for s in split)
    assert counts == {"positive": 50, "negative": 50}
    assert len(split) == 100


def test_draw_split_zero():
    assert draw_split(make_samples(5, 5), SplitSpec(n=0, seed=1)) == []


def test_draw_split_deterministic():
    samples = make_samples(200, 200)
    a = draw_split(samples, SplitSpec(n=100, seed=7))
    b = draw_split(samples, SplitSpec(n=100, seed=7))
    assert [s.id for s in a] == [s.id for s in b]
    c = draw_split(samples, SplitSpec(n=100, seed=8))
    assert [s.id for s in a] != [s.id for s in c]


def test_draw_split_insufficient_label():
    samples = make_samples(100, 3)
    with pytest.raises(InsufficientLabel):
        draw_split(samples, SplitSpec(n=100, seed=1))


def test_draw_split_unstratified():
    samples = make_samples(90, 10)
    split = draw_split(samples, SplitSpec(n=50, seed=3, stratify=False))
    assert len(split) == 50


def test_draw_split_odd_n_quotas_differ_by_at_most_one():
    samples = make_samples(100, 100)
    split = draw_split(samples, SplitSpec(n=99, seed=5))
    counts = Counter(s.gold for s in split)
    assert sorted(counts.values()) == [49, 50]


def test_write_jsonl_round_trip(tmp_path):
    samples = make_samples(2, 2)
    out = tmp_path / "split.jsonl"
    write_jsonl(samples, out)
    again = load("sst2", out)
    assert [s.id for s in again] == [s.id for s in samples]
    assert [s.gold for s in again] == [s.gold for s in samples]
