"""attnprobe: attention weights toward a probe token, original vs vertical."""

from .probe import SCHEMA_VERSION, AttentionReport, ModelLoadError, load_model, probe

__all__ = ["SCHEMA_VERSION", "AttentionReport", "ModelLoadError", "load_model", "probe"]
