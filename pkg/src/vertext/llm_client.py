"""Chat-completion clients: live HTTP, deterministic mocks, record/replay.

Every client exposes `complete(messages) -> Transcript`. The live client
posts the de-facto chat-completions JSON shape and retries transient
failures with exponential backoff. The cassette layer records transcripts
to a JSON-lines file and replays them byte-identically with zero network
traffic, keyed by a content hash of (model, messages, temperature, top_p).
"""

from __future__ import annotations

import hashlib
import json
import os
import random
import threading
import time
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path

import requests

from .errors import (
    AuthError,
    CassetteMiss,
    ClientError,
    CompletionTimeout,
    MalformedResponse,
    RateLimited,
)

RECORD = "record"
REPLAY = "replay"

# Appendix-style decoding defaults: selection wants fully deterministic
# sampling; classification keeps temperature 0 with top_p 0.95.
SELECTION_TOP_P = 1.0
CLASSIFICATION_TOP_P = 0.95


@dataclass
class ClientConfig:
    endpoint_url: str = ""
    api_key_env: str = "VERTEXT_API_KEY"
    model_id: str = "mock"
    temperature: float = 0.0
    top_p: float = CLASSIFICATION_TOP_P
    max_tokens: int = 512
    timeout: float = 60.0
    max_retries: int = 3
    parallelism: int = 4

    def __post_init__(self):
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature {self.temperature} outside [0, 2]")
        if not 0.0 < self.top_p <= 1.0:
            raise ValueError(f"top_p {self.top_p} outside (0, 1]")
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")

    @classmethod
    def for_selection(cls, **kw) -> "ClientConfig":
        kw.setdefault("temperature", 0.0)
        kw.setdefault("top_p", SELECTION_TOP_P)
        return cls(**kw)

    @classmethod
    def for_classification(cls, **kw) -> "ClientConfig":
        kw.setdefault("temperature", 0.0)
        kw.setdefault("top_p", CLASSIFICATION_TOP_P)
        return cls(**kw)

    def api_key(self) -> str | None:
        return os.environ.get(self.api_key_env)


@dataclass
class Transcript:
    messages: list[dict]
    generation: str
    latency_ms: float
    prompt_tokens: int | None
    completion_tokens: int | None
    timestamp: str
    cassette_key: str

    def to_json(self) -> dict:
        return {
            "messages": self.messages,
            "generation": self.generation,
            "latency_ms": self.latency_ms,
            "prompt_tokens": self.prompt_tokens,
            "completion_tokens": self.completion_tokens,
            "timestamp": self.timestamp,
            "cassette_key": self.cassette_key,
        }


def cassette_key(model_id: str, messages: list[dict], temperature: float, top_p: float) -> str:
    """Stable content hash over a canonical JSON serialization."""
    payload = json.dumps(
        {
            "model": model_id,
            "messages": messages,
            "temperature": temperature,
            "top_p": top_p,
        },
        sort_keys=True,
        ensure_ascii=False,
        separators=(",", ":"),
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def _now_iso() -> str:
    return datetime.now(timezone.utc).isoformat()


def _default_transport(url: str, payload: dict, headers: dict, timeout: float):
    resp = requests.post(url, json=payload, headers=headers, timeout=timeout)
    try:
        body = resp.json()
    except ValueError:
        body = None
    return resp.status_code, dict(resp.headers), body


def complete(cfg: ClientConfig, messages: list[dict], *, transport=None, sleep=time.sleep) -> Transcript:
    """One chat completion against an HTTP endpoint, with retry/backoff.

    Transient failures (429, 5xx, timeouts, connection errors) back off
    exponentially from 1s with jitter, honoring Retry-After when present.
    """
    if not messages:
        raise ValueError("messages must be nonempty")
    transport = transport or _default_transport
    key = cfg.api_key()
    headers = {"Content-Type": "application/json"}
    if key:
        headers["Authorization"] = f"Bearer {key}"
    payload = {
        "model": cfg.model_id,
        "messages": messages,
        "temperature": cfg.temperature,
        "top_p": cfg.top_p,
        "max_tokens": cfg.max_tokens,
    }

    last_error: Exception | None = None
    for attempt in range(cfg.max_retries + 1):
        start = time.monotonic()
        try:
            status, resp_headers, body = transport(cfg.endpoint_url, payload, headers, cfg.timeout)
        except requests.Timeout as exc:
            last_error = CompletionTimeout(str(exc))
            status, resp_headers, body = None, {}, None
        except requests.RequestException as exc:
            last_error = ClientError(str(exc))
            status, resp_headers, body = None, {}, None
        latency_ms = (time.monotonic() - start) * 1000.0

        if status is not None:
            if status in (401, 403):
                raise AuthError(f"endpoint returned {status}")
            if status == 429:
                last_error = RateLimited("endpoint returned 429")
            elif status >= 500:
                last_error = ClientError(f"endpoint returned {status}")
            elif status >= 400:
                raise ClientError(f"endpoint returned {status}: {body}")
            else:
                try:
                    generation = body["choices"][0]["message"]["content"]
                except (KeyError, IndexError, TypeError):
                    raise MalformedResponse(f"unexpected response shape: {body!r}")
                usage = body.get("usage") or {}
                return Transcript(
                    messages=messages,
                    generation=generation,
                    latency_ms=latency_ms,
                    prompt_tokens=usage.get("prompt_tokens"),
                    completion_tokens=usage.get("completion_tokens"),
                    timestamp=_now_iso(),
                    cassette_key=cassette_key(cfg.model_id, messages, cfg.temperature, cfg.top_p),
                )

        if attempt < cfg.max_retries:
            delay = (2**attempt) * 1.0 + random.uniform(0.0, 0.5)
            retry_after = resp_headers.get("Retry-After")
            if retry_after:
                try:
                    delay = max(delay, float(retry_after))
                except ValueError:
                    pass
            sleep(delay)
    raise last_error if last_error is not None else ClientError("request failed")


class HttpChatClient:
    """Live client; concurrent `complete` calls are bounded by parallelism."""

    def __init__(self, config: ClientConfig, transport=None):
        self.config = config
        self._transport = transport
        self._slots = threading.BoundedSemaphore(config.parallelism)

    def complete(self, messages: list[dict]) -> Transcript:
        with self._slots:
            return complete(self.config, messages, transport=self._transport)


class MockChatClient:
    """Scripted client: maps cassette keys or plain prompts to generations.

    `script` may map a full cassette key, or the final user message string,
    to the generation; `responder` takes precedence when given.
    """

    def __init__(self, script: dict[str, str] | None = None, responder=None,
                 config: ClientConfig | None = None, default: str = ""):
        self.config = config or ClientConfig(model_id="mock")
        self.script = script or {}
        self.responder = responder
        self.default = default

    def complete(self, messages: list[dict]) -> Transcript:
        key = cassette_key(self.config.model_id, messages, self.config.temperature, self.config.top_p)
        if self.responder is not None:
            generation = self.responder(messages)
        else:
            final_user = next(
                (m["content"] for m in reversed(messages) if m.get("role") == "user"), ""
            )
            generation = self.script.get(key, self.script.get(final_user, self.default))
        return Transcript(
            messages=messages,
            generation=generation,
            latency_ms=0.0,
            prompt_tokens=None,
            completion_tokens=None,
            timestamp=_now_iso(),
            cassette_key=key,
        )


def mock_keyword_classifier(lexicon: dict[str, str], default_label: str,
                            model_id: str = "mock-keyword") -> MockChatClient:
    """A client that answers with the label of the first lexicon word found.

    The final user message is split on whitespace; the first token with a
    (case-insensitive) lexicon entry decides the label, else the default.
    A vertical layout splits a word across lines, so its token disappears:
    this mock is the harness's built-in reader that the layout defeats.
    """
    if not lexicon:
        raise ValueError("lexicon must be nonempty")
    lowered = {w.lower(): label for w, label in lexicon.items()}

    def responder(messages: list[dict]) -> str:
        final_user = next(
            (m["content"] for m in reversed(messages) if m.get("role") == "user"), ""
        )
        for token in final_user.split():
            label = lowered.get(token.lower())
            if label is not None:
                return label
        return default_label

    return MockChatClient(responder=responder, config=ClientConfig(model_id=model_id))


class CassetteStore:
    """Append-only JSON-lines store of {key, request, response, meta} rows."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._entries: dict[str, dict] = {}
        if self.path.exists():
            for line in self.path.read_text("utf-8").splitlines():
                if line.strip():
                    rec = json.loads(line)
                    self._entries[rec["key"]] = rec

    def get(self, key: str) -> dict | None:
        with self._lock:
            return self._entries.get(key)

    def append(self, key: str, request: dict, response: dict, meta: dict) -> None:
        rec = {"key": key, "request": request, "response": response, "meta": meta}
        with self._lock:
            self._entries[key] = rec
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


class CassetteClient:
    """Record/replay wrapper around another client.

    Replay never touches the wrapped client (and therefore the network);
    a missing key raises CassetteMiss.
    """

    def __init__(self, mode: str, store: CassetteStore, inner=None,
                 config: ClientConfig | None = None):
        if mode not in (RECORD, REPLAY):
            raise ValueError(f"unknown cassette mode {mode!r}")
        if mode == RECORD and inner is None:
            raise ValueError("record mode needs an inner client")
        self.mode = mode
        self.store = store
        self.inner = inner
        self.config = config or (inner.config if inner else ClientConfig())

    def complete(self, messages: list[dict]) -> Transcript:
        key = cassette_key(
            self.config.model_id, messages, self.config.temperature, self.config.top_p
        )
        if self.mode == REPLAY:
            rec = self.store.get(key)
            if rec is None:
                raise CassetteMiss(f"no cassette entry for key {key[:12]}...")
            resp = rec["response"]
            return Transcript(
                messages=messages,
                generation=resp["generation"],
                latency_ms=0.0,
                prompt_tokens=resp.get("prompt_tokens"),
                completion_tokens=resp.get("completion_tokens"),
                timestamp=rec["meta"].get("timestamp", _now_iso()),
                cassette_key=key,
            )
        transcript = self.inner.complete(messages)
        transcript = replace(transcript, cassette_key=key)
        self.store.append(
            key,
            request={"model": self.config.model_id, "messages": messages,
                     "temperature": self.config.temperature, "top_p": self.config.top_p},
            response={"generation": transcript.generation,
                      "prompt_tokens": transcript.prompt_tokens,
                      "completion_tokens": transcript.completion_tokens},
            meta={"timestamp": transcript.timestamp, "latency_ms": transcript.latency_ms},
        )
        return transcript
