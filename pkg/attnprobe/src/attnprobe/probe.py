"""Attention extraction from a causal LM toward a probe token.

Appends the probe word to a minimal classification prompt, runs one
forward pass with attentions exposed, and reads the post-softmax row of
the probe's final position at a chosen layer, averaged over heads (or a
single head). The row spans the full sequence, so its weights sum to 1;
that invariant is asserted on every report. Reports serialize to the JSON
schema the vertext report renderer consumes.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import torch

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
CONDITIONS = ("original", "vertical")

PROMPT_SUFFIX = "\nLabel:"


class ModelLoadError(Exception):
    """Model or tokenizer could not be loaded."""


@dataclass(frozen=True)
class AttentionReport:
    model: str
    input_text: str
    probe: str
    probe_multi_token: bool
    condition: str
    layer: int
    head: int | str  # head index, or "mean"
    tokens: tuple[str, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        if len(self.tokens) != len(self.weights):
            raise ValueError("tokens and weights must have equal length")
        if any(w < 0 for w in self.weights):
            raise ValueError("negative attention weight")
        total = sum(self.weights)
        if abs(total - 1.0) > 1e-4:
            raise ValueError(f"attention row sums to {total:.6f}, expected 1")

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "model": self.model,
            "input_text": self.input_text,
            "probe": self.probe,
            "probe_multi_token": self.probe_multi_token,
            "condition": self.condition,
            "layer": self.layer,
            "head": self.head,
            "tokens": list(self.tokens),
            "weights": list(self.weights),
        }

    def write(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_json(), indent=2, ensure_ascii=False) + "\n", "utf-8"
        )


def load_model(model_id: str, device: str = "cpu"):
    """Tokenizer + causal LM in eager-attention mode (attentions exposed)."""
    from transformers import AutoModelForCausalLM, AutoTokenizer

    try:
        tokenizer = AutoTokenizer.from_pretrained(model_id)
        model = AutoModelForCausalLM.from_pretrained(
            model_id, attn_implementation="eager"
        )
    except Exception as exc:
        raise ModelLoadError(f"cannot load {model_id!r}: {exc}") from exc
    model.to(device)
    model.eval()
    return tokenizer, model


def probe(model_id: str, text: str, probe_word: str, layer: int = -1,
          condition: str = "original", head: int | None = None,
          device: str = "cpu", loaded=None) -> AttentionReport:
    """One forward pass; returns the probe position's attention row.

    `loaded` may carry a (tokenizer, model) pair to amortize model loading
    over a batch of inputs.
    """
    if condition not in CONDITIONS:
        raise ValueError(f"condition must be one of {CONDITIONS}")
    tokenizer, model = loaded if loaded is not None else load_model(model_id, device)

    n_layers = model.config.num_hidden_layers
    if not -n_layers <= layer < n_layers:
        raise ValueError(f"layer {layer} out of range for {n_layers}-layer model")

    prompt = f"{text}{PROMPT_SUFFIX} {probe_word}"
    prefix_ids = tokenizer(f"{text}{PROMPT_SUFFIX}", return_tensors="pt").input_ids
    input_ids = tokenizer(prompt, return_tensors="pt").input_ids.to(device)
    probe_pieces = input_ids.shape[1] - prefix_ids.shape[1]
    if probe_pieces < 1:
        raise ValueError(f"probe word {probe_word!r} contributed no tokens")
    multi = probe_pieces > 1
    if multi:
        logger.warning(
            "probe %r splits into %d tokens; using its last piece",
            probe_word, probe_pieces,
        )

    torch.manual_seed(0)
    with torch.no_grad():
        output = model(input_ids, output_attentions=True)
    # (batch, heads, query, key) at the requested layer
    attn = output.attentions[layer][0]
    probe_pos = input_ids.shape[1] - 1
    if head is None:
        row = attn[:, probe_pos, :].mean(dim=0)
        head_label: int | str = "mean"
    else:
        if not 0 <= head < attn.shape[0]:
            raise ValueError(f"head {head} out of range for {attn.shape[0]} heads")
        row = attn[head, probe_pos, :]
        head_label = head
    # raw post-softmax entries; the probe is the last position, so the causal
    # row spans the whole sequence and sums to 1 up to float error
    weights = tuple(float(w) for w in row.to(torch.float64).tolist())

    tokens = tuple(tokenizer.decode([tid]) for tid in input_ids[0].tolist())
    return AttentionReport(
        model=model_id,
        input_text=text,
        probe=probe_word,
        probe_multi_token=multi,
        condition=condition,
        layer=layer,
        head=head_label,
        tokens=tokens,
        weights=weights,
    )
