"""vertext: vertical-text perturbation harness for text-classification LLMs.

The pipeline: pick the key words of a sentence (select), stack them into
grid columns (transform), prompt a chat model under one of four strategies
(prompts, llm_client), score the predictions (evaluation), and explain the
damage through tokenizer inflation (tokshift) and externally produced
attention reports (reporting).
"""

from .datasets import Sample, SplitSpec, draw_split, load
from .errors import VertextError
from .evaluation import (
    ConfusionMatrix,
    EvalRecord,
    HeuristicSelector,
    LlmSelector,
    SweepResult,
    accuracy,
    run_cell,
    sweep,
)
from .llm_client import (
    CassetteClient,
    CassetteStore,
    ClientConfig,
    HttpChatClient,
    MockChatClient,
    Transcript,
    complete,
    mock_keyword_classifier,
)
from .prompts import (
    TASKS,
    UNPARSED,
    LabelParse,
    PromptStrategy,
    TaskSpec,
    build_prompt,
    parse_label,
    strategy_for,
)
from .select import (
    SelectionCache,
    SelectionRequest,
    SelectionResult,
    select_heuristic,
    select_llm,
)
from .tokshift import (
    TokenInflationReport,
    TokenizerArtifact,
    decode,
    encode,
    inflate,
    load_artifact,
)
from .transform import (
    LayoutGrid,
    Sentence,
    TransformSpec,
    decompose,
    reconstruct,
    verticalize,
)

__all__ = [
    "CassetteClient", "CassetteStore", "ClientConfig", "ConfusionMatrix",
    "EvalRecord", "HeuristicSelector", "HttpChatClient", "LabelParse",
    "LayoutGrid", "LlmSelector", "MockChatClient", "PromptStrategy",
    "Sample", "SelectionCache", "SelectionRequest", "SelectionResult",
    "Sentence", "SplitSpec", "SweepResult", "TASKS", "TaskSpec",
    "TokenInflationReport", "TokenizerArtifact", "Transcript",
    "TransformSpec", "UNPARSED", "VertextError", "accuracy",
    "build_prompt", "complete", "decode", "decompose", "draw_split",
    "encode", "inflate", "load", "load_artifact", "mock_keyword_classifier",
    "parse_label", "reconstruct", "run_cell", "select_heuristic",
    "select_llm", "strategy_for", "sweep", "verticalize",
]
