import json
import socket
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from vertext.errors import (
    AuthError,
    CassetteMiss,
    MalformedResponse,
    RateLimited,
)
from vertext.llm_client import (
    RECORD,
    REPLAY,
    CassetteClient,
    CassetteStore,
    ClientConfig,
    HttpChatClient,
    MockChatClient,
    cassette_key,
    complete,
    mock_keyword_classifier,
)

MSG = [{"role": "user", "content": "hello"}]


def ok_body(text="negative"):
    return {
        "choices": [{"message": {"role": "assistant", "content": text}}],
        "usage": {"prompt_tokens": 3, "completion_tokens": 1},
    }


def transport_returning(*responses):
    """Each response is (status, headers, body); repeats the last one."""
    calls = {"n": 0}

    def transport(url, payload, headers, timeout):
        resp = responses[min(calls["n"], len(responses) - 1)]
        calls["n"] += 1
        return resp

    return transport, calls


def test_config_validation():
    with pytest.raises(ValueError):
        ClientConfig(temperature=3.0)
    with pytest.raises(ValueError):
        ClientConfig(top_p=0.0)
    with pytest.raises(ValueError):
        ClientConfig(parallelism=0)


def test_decoding_defaults():
    assert ClientConfig.for_selection().top_p == 1.0
    assert ClientConfig.for_selection().temperature == 0.0
    assert ClientConfig.for_classification().top_p == 0.95
    assert ClientConfig.for_classification().temperature == 0.0


def test_cassette_key_stable_and_canonical():
    k1 = cassette_key("m", MSG, 0.0, 0.95)
    k2 = cassette_key("m", [dict(reversed(list(MSG[0].items())))], 0.0, 0.95)
    assert k1 == k2  # key order inside messages must not matter
    assert k1 != cassette_key("m", MSG, 0.0, 1.0)


def test_complete_success():
    transport, calls = transport_returning((200, {}, ok_body()))
    t = complete(ClientConfig(endpoint_url="http://x"), MSG, transport=transport)
    assert t.generation == "negative"
    assert t.prompt_tokens == 3
    assert calls["n"] == 1


def test_complete_retries_then_succeeds():
    transport, calls = transport_returning(
        (500, {}, None), (429, {"Retry-After": "0"}, None), (200, {}, ok_body())
    )
    slept = []
    t = complete(
        ClientConfig(endpoint_url="http://x", max_retries=3),
        MSG,
        transport=transport,
        sleep=slept.append,
    )
    assert t.generation == "negative"
    assert calls["n"] == 3
    assert len(slept) == 2
    assert slept[1] >= 2.0  # exponential backoff: second delay >= base * 2


def test_complete_rate_limited_after_retries():
    transport, _ = transport_returning((429, {}, None))
    with pytest.raises(RateLimited):
        complete(
            ClientConfig(endpoint_url="http://x", max_retries=1),
            MSG,
            transport=transport,
            sleep=lambda _: None,
        )


def test_complete_auth_error_not_retried():
    transport, calls = transport_returning((401, {}, None))
    with pytest.raises(AuthError):
        complete(ClientConfig(endpoint_url="http://x"), MSG, transport=transport)
    assert calls["n"] == 1


def test_complete_malformed_response():
    transport, _ = transport_returning((200, {}, {"nope": 1}))
    with pytest.raises(MalformedResponse):
        complete(ClientConfig(endpoint_url="http://x"), MSG, transport=transport)


def test_complete_empty_messages():
    with pytest.raises(ValueError):
        complete(ClientConfig(), [])


def test_parallelism_bound():
    active = {"now": 0, "peak": 0}
    lock = threading.Lock()
    barrier = threading.Event()

    def transport(url, payload, headers, timeout):
        with lock:
            active["now"] += 1
            active["peak"] = max(active["peak"], active["now"])
        barrier.wait(0.05)
        with lock:
            active["now"] -= 1
        return 200, {}, ok_body()

    client = HttpChatClient(
        ClientConfig(endpoint_url="http://x", parallelism=2), transport=transport
    )
    threads = [threading.Thread(target=client.complete, args=(MSG,)) for _ in range(6)]
    for t in threads:
        t.start()
    barrier.set()
    for t in threads:
        t.join()
    assert active["peak"] <= 2


def test_mock_client_scripted_by_key():
    cfg = ClientConfig(model_id="mock")
    key = cassette_key("mock", MSG, 0.0, 0.95)
    client = MockChatClient(script={key: "negative"})
    assert client.complete(MSG).generation == "negative"


def test_keyword_classifier_horizontal_hit():
    client = mock_keyword_classifier({"miserable": "negative"}, default_label="positive")
    out = client.complete([{"role": "user", "content": "He appears miserable throughout"}])
    assert out.generation == "negative"


def test_keyword_classifier_vertical_miss():
    from vertext.transform import TransformSpec, decompose, verticalize

    s = decompose("He appears miserable throughout")
    _, rendered = verticalize(s, TransformSpec(vertical_indices={2}))
    client = mock_keyword_classifier({"miserable": "negative"}, default_label="positive")
    assert client.complete([{"role": "user", "content": rendered}]).generation == "positive"


def test_keyword_classifier_empty_message():
    client = mock_keyword_classifier({"x": "a"}, default_label="d")
    assert client.complete([{"role": "user", "content": ""}]).generation == "d"


def test_keyword_classifier_empty_lexicon_rejected():
    with pytest.raises(ValueError):
        mock_keyword_classifier({}, default_label="d")


def test_cassette_record_then_replay(tmp_path):
    path = tmp_path / "cassette.jsonl"
    inner = MockChatClient(responder=lambda m: "scripted answer")
    rec = CassetteClient(RECORD, CassetteStore(path), inner=inner)
    recorded = rec.complete(MSG)

    replay = CassetteClient(REPLAY, CassetteStore(path), config=inner.config)
    replayed = replay.complete(MSG)
    assert replayed.generation == recorded.generation
    assert replayed.cassette_key == recorded.cassette_key


def test_cassette_replay_miss(tmp_path):
    store = CassetteStore(tmp_path / "cassette.jsonl")
    replay = CassetteClient(REPLAY, store, config=ClientConfig())
    with pytest.raises(CassetteMiss):
        replay.complete(MSG)


def test_replay_never_touches_network(tmp_path, monkeypatch):
    path = tmp_path / "cassette.jsonl"
    inner = MockChatClient(responder=lambda m: "x")
    CassetteClient(RECORD, CassetteStore(path), inner=inner).complete(MSG)

    def no_network(*a, **kw):  # pragma: no cover - would fail the test
        raise AssertionError("network operation attempted in replay mode")

    monkeypatch.setattr(socket, "socket", no_network)
    monkeypatch.setattr("requests.post", no_network)
    replay = CassetteClient(REPLAY, CassetteStore(path), config=inner.config)
    assert replay.complete(MSG).generation == "x"


class _ChatHandler(BaseHTTPRequestHandler):
    def do_POST(self):
        length = int(self.headers["Content-Length"])
        request = json.loads(self.rfile.read(length))
        body = json.dumps(ok_body(f"echo:{request['model']}")).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *a):
        pass


def test_live_http_round_trip_through_cassette(tmp_path):
    server = HTTPServer(("127.0.0.1", 0), _ChatHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        cfg = ClientConfig(
            endpoint_url=f"http://127.0.0.1:{server.server_port}/v1/chat/completions",
            model_id="local-test",
        )
        path = tmp_path / "cassette.jsonl"
        live = HttpChatClient(cfg)
        rec = CassetteClient(RECORD, CassetteStore(path), inner=live, config=cfg)
        recorded = rec.complete(MSG)
        assert recorded.generation == "echo:local-test"
    finally:
        server.shutdown()

    replay = CassetteClient(REPLAY, CassetteStore(path), config=cfg)
    assert replay.complete(MSG).generation == "echo:local-test"
