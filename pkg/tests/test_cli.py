import json
from pathlib import Path

from click.testing import CliRunner

from vertext.cli import cli, main, parse_config

FIXTURES = Path(__file__).parent / "fixtures"


def invoke(*args):
    return CliRunner().invoke(cli, list(args), catch_exceptions=False)


def write_run_config(tmp_path, **overrides):
    cfg = {
        "model": "mock-keyword",
        "lexicon": str(FIXTURES / "mock_lexicon.json"),
        "default_label": "negative",
        "dataset": "sst2",
        "data": str(FIXTURES / "mock_sentiment_100.jsonl"),
        "split_n": "20",
        "split_seed": "42",
        "strategy": "zero_shot",
        "conditions": "original,vertical",
        "k": "1",
        "selector": "heuristic",
        "out_dir": str(tmp_path / "out"),
    }
    cfg.update(overrides)
    path = tmp_path / "run.cfg"
    path.write_text("".join(f"{k} = {v}\n" for k, v in cfg.items()))
    return path


def test_transform_prints_grid():
    result = invoke("transform", "--text", "a bad day", "--indices", "1")
    assert result.exit_code == 0
    assert result.output == "a b day\n  a\n  d\n"


def test_transform_words_flag():
    result = invoke("transform", "--text", "a bad day", "--words", "Bad")
    assert result.output == "a b day\n  a\n  d\n"


def test_transform_json_schema(schema_check):
    result = invoke("transform", "--text", "hi to me", "--indices", "0,2", "--json")
    payload = json.loads(result.output)
    schema_check("transform", payload)
    assert payload["rendered"] == "h to m\ni    e"


def test_select_heuristic_json(schema_check):
    result = invoke("select", "--text", "a bad day", "-k", "1", "--json")
    payload = json.loads(result.output)
    schema_check("select", payload)
    assert payload["indices"] == [1]
    assert payload["words"] == ["bad"]


def test_prompts_render_json(schema_check):
    result = invoke("prompts", "render", "--strategy", "cot", "--task", "sst2",
                    "--text", "a b day\n  a\n  d", "--json")
    payload = json.loads(result.output)
    schema_check("render", payload)
    assert "think step by step" in payload["messages"][0]["content"]


def test_data_load_stdout(schema_check, tmp_path):
    src = tmp_path / "dev.tsv"
    src.write_text("sentence\tlabel\nfine film\t1\nawful film\t0\n")
    result = invoke("data", "load", "--dataset", "sst2", "--path", str(src))
    rows = [json.loads(line) for line in result.output.splitlines()]
    assert len(rows) == 2
    for row in rows:
        schema_check("sample", row)


def test_data_load_split_out(tmp_path):
    out = tmp_path / "split.jsonl"
    result = invoke("data", "load", "--dataset", "sst2",
                    "--path", str(FIXTURES / "mock_sentiment_100.jsonl"),
                    "--split-n", "10", "--seed", "7", "--out", str(out))
    assert result.exit_code == 0
    rows = [json.loads(line) for line in out.read_text().splitlines()]
    assert len(rows) == 10
    labels = [r["label"] for r in rows]
    assert labels.count("positive") == 5


def test_tokens_inflate_json(schema_check):
    result = invoke("tokens", "inflate", "--word", "vertical")
    payload = json.loads(result.output)
    schema_check("inflate", payload)
    assert payload["horizontal"]["count"] == 1
    assert payload["vertical"]["count"] == 15


def test_run_and_report_end_to_end(tmp_path, schema_check):
    config = write_run_config(tmp_path)
    result = invoke("run", "--config", str(config))
    assert result.exit_code == 0
    assert "original k=0 accuracy=100.00" in result.output
    assert "vertical k=1 accuracy=50.00" in result.output

    out = tmp_path / "out"
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["outputs"]
    for run_dir in (out / "runs").iterdir():
        schema_check("run_summary", json.loads((run_dir / "summary.json").read_text()))

    report = invoke("report", "--runs", str(out),
                    "--attention", str(FIXTURES / "attention_original.json"))
    assert report.exit_code == 0
    payload = json.loads(report.output.splitlines()[-1])
    schema_check("report_cli", payload)
    assert (out / "report" / "report.md").exists()
    assert (out / "report" / "table.csv").exists()


def test_sweep_cli(tmp_path, schema_check):
    config = write_run_config(
        tmp_path, data=str(FIXTURES / "sweep_sentiment_40.jsonl"), split_n="20"
    )
    result = invoke("sweep", "--config", str(config), "--k-max", "2")
    assert result.exit_code == 0
    assert "k=0 accuracy=" in result.output
    sweep_files = list((tmp_path / "out" / "sweeps").glob("*.json"))
    assert len(sweep_files) == 1
    schema_check("sweep", json.loads(sweep_files[0].read_text()))


def test_main_exit_codes(tmp_path):
    assert main(["transform", "--text", "hi", "--indices", ""]) == 0
    assert main(["--bogus"]) == 1
    assert main(["transform"]) == 1  # missing required option
    assert main(["run", "--config", str(tmp_path / "missing.toml")]) == 2
    # expected domain failures map to exit 2, not a stack trace
    assert main(["transform", "--text", "a b", "--indices", "9"]) == 2


def test_parse_config(tmp_path):
    path = tmp_path / "x.cfg"
    path.write_text("a = 1\n# comment\nb=two # trailing\nc = 'quoted'\n")
    assert parse_config(path) == {"a": "1", "b": "two", "c": "quoted"}


def test_parse_config_rejects_garbage(tmp_path):
    from vertext.errors import VertextError

    path = tmp_path / "x.cfg"
    path.write_text("not a pair\n")
    import pytest

    with pytest.raises(VertextError):
        parse_config(path)
