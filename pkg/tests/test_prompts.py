from pathlib import Path

import pytest

from vertext.prompts import (
    COT,
    EXPLICIT,
    FEW_SHOT,
    TASKS,
    UNPARSED,
    ZERO_SHOT,
    PromptStrategy,
    build_prompt,
    compose_input,
    default_shots,
    parse_label,
    strategy_for,
)
from vertext.transform import reconstruct

GOLDEN_DIR = Path(__file__).parent / "fixtures" / "prompts_golden"
SAMPLE_INPUT = "a b day\n  a\n  d"


def render(kind, task_name, text=SAMPLE_INPUT):
    return build_prompt(strategy_for(kind, TASKS[task_name]), text)[0]["content"]


def test_explicit_contains_reconstruction_instruction():
    assert "reconstruct the original sentence" in render(EXPLICIT, "sst2")


def test_cot_contains_step_by_step():
    assert "think step by step" in render(COT, "sst2")


def test_zero_shot_contains_labels_and_input():
    content = render(ZERO_SHOT, "sst2")
    assert SAMPLE_INPUT in content
    assert "positive, negative" in content


def test_few_shot_requires_shots():
    with pytest.raises(ValueError):
        PromptStrategy(kind=FEW_SHOT, task=TASKS["sst2"], shots=())


def test_non_few_shot_rejects_shots():
    with pytest.raises(ValueError):
        PromptStrategy(kind=ZERO_SHOT, task=TASKS["sst2"], shots=default_shots(TASKS["sst2"]))


def test_unknown_kind_rejected():
    with pytest.raises(ValueError):
        PromptStrategy(kind="mystery", task=TASKS["sst2"])


@pytest.mark.parametrize("task_name", sorted(TASKS))
def test_default_shots_round_trip(task_name):
    # every crafted analysis must describe a real grid
    for shot in default_shots(TASKS[task_name]):
        words = reconstruct(shot.grid_text).words
        assert " ".join(words) in shot.analysis


def test_shot_count_is_three():
    for task_name in TASKS:
        assert len(default_shots(TASKS[task_name])) == 3


@pytest.mark.parametrize("kind", [ZERO_SHOT, COT, FEW_SHOT, EXPLICIT])
@pytest.mark.parametrize("task_name", ["sst2", "qnli"])
def test_golden_prompts(kind, task_name):
    content = render(kind, task_name)
    golden = GOLDEN_DIR / f"{kind}_{task_name}.txt"
    assert content == golden.read_text("utf-8"), f"prompt drifted from {golden.name}"


def test_build_prompt_pure():
    assert render(COT, "cola") == render(COT, "cola")


def test_empty_input_rejected():
    with pytest.raises(ValueError):
        build_prompt(strategy_for(ZERO_SHOT, TASKS["sst2"]), "")


def test_compose_input_pair_keeps_grid_alignment():
    composed = compose_input(TASKS["qnli"], SAMPLE_INPUT, "When?")
    assert composed.startswith("Question: When?\nSentence:\n")
    assert composed.endswith(SAMPLE_INPUT)


# --- parse_label ---

def test_parse_cot_closing_sentence():
    out = parse_label("…the overall sentiment is negative.", TASKS["sst2"])
    assert out.label == "negative"


def test_parse_case_folding():
    assert parse_label("POSITIVE", TASKS["sst2"]).label == "positive"


def test_parse_last_occurrence_rule():
    assert parse_label("it is positive… no, negative", TASKS["sst2"]).label == "negative"


def test_parse_unparsed():
    out = parse_label("I cannot tell.", TASKS["sst2"])
    assert out.label == UNPARSED
    assert out.raw == "I cannot tell."


@pytest.mark.parametrize("task_name", sorted(TASKS))
def test_parse_bare_labels(task_name):
    task = TASKS[task_name]
    for label in task.label_set:
        assert parse_label(label, task).label == label
        assert parse_label(label.upper(), task).label == label


def test_parse_substring_labels_not_double_counted():
    # "not_entailment" contains "entailment"; it must parse as itself
    task = TASKS["qnli"]
    assert parse_label("The answer is not_entailment", task).label == "not_entailment"
    assert parse_label("non-toxic", TASKS["jigsaw"]).label == "non-toxic"
    assert parse_label("unacceptable", TASKS["cola"]).label == "unacceptable"


def test_parse_transcript_fixture_set():
    """Hand-labeled CoT-style transcripts exercising the last-occurrence rule."""
    fixtures = [
        ("First I thought positive, but the ending is negative", "sst2", "negative"),
        ("negative words appear, yet the overall tone is positive", "sst2", "positive"),
        ("This is toxic. Wait, on reflection it is non-toxic", "jigsaw", "non-toxic"),
        ("entailment? No: not_entailment", "qnli", "not_entailment"),
        ("The sentence is unacceptable, clearly unacceptable", "cola", "unacceptable"),
    ]
    for generation, task_name, expected in fixtures:
        assert parse_label(generation, TASKS[task_name]).label == expected
