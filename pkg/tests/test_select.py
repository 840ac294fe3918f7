import pytest

from vertext.errors import KTooLarge, WordNotInSentence, WrongCardinality
from vertext.llm_client import MockChatClient
from vertext.select import (
    STOPWORDS,
    SelectionCache,
    SelectionRequest,
    rank_heuristic,
    select_heuristic,
    select_llm,
)
from vertext.transform import decompose


def req(text, k, **kw):
    return SelectionRequest(sentence=decompose(text), k=k, **kw)


def test_stopword_list_has_fifty_entries():
    assert len(STOPWORDS) == 50


def test_heuristic_tie_break():
    # "bad" and "day" tie on length; earlier position wins
    assert select_heuristic(req("a bad day", 1)).indices == (1,)


def test_heuristic_all_stopwords():
    with pytest.raises(KTooLarge):
        select_heuristic(req("the the the", 1))


def test_heuristic_ranks_by_length():
    # longest non-stopwords: overburdened(12), complicated(11), plotting(8)
    r = req("overburdened with complicated plotting and banal dialogue", 3)
    assert select_heuristic(r).indices == (0, 2, 3)
    ranked = rank_heuristic(r.sentence)
    assert ranked[:4] == [0, 2, 3, 6]  # dialogue ties plotting, later position


def test_heuristic_deterministic():
    r = req("an uneven script saved by charming performances", 2)
    assert select_heuristic(r).indices == select_heuristic(r).indices


def test_k_zero_rejected():
    with pytest.raises(ValueError):
        req("a bad day", 0)


def test_k_above_word_count_rejected():
    with pytest.raises(ValueError):
        req("a bad day", 4)


def scripted_client(*generations):
    calls = {"n": 0}

    def responder(messages):
        gen = generations[min(calls["n"], len(generations) - 1)]
        calls["n"] += 1
        return gen

    return MockChatClient(responder=responder), calls


def test_select_llm_resolves_first_occurrence():
    client, _ = scripted_client("idiot")
    r = req("You are a talented idiot who never fails to surprise me", 1, mode="llm")
    res = select_llm(r, client)
    assert res.indices == (4,)


def test_select_llm_mid_sentence_keyword():
    client, _ = scripted_client("miserable")
    r = req("He appears miserable throughout as he swaggers through his scenes", 1, mode="llm")
    assert select_llm(r, client).indices == (2,)


def test_select_llm_case_insensitive_resolution():
    client, _ = scripted_client("Miserable")
    r = req("He appears miserable throughout", 1, mode="llm")
    assert select_llm(r, client).indices == (2,)


def test_select_llm_retries_hallucination_then_errors():
    client, calls = scripted_client("unicorn")
    r = req("a bad day", 1, mode="llm")
    with pytest.raises(WordNotInSentence):
        select_llm(r, client)
    assert calls["n"] == 3  # initial attempt plus two retries


def test_select_llm_retry_recovers():
    client, calls = scripted_client("unicorn", "bad")
    r = req("a bad day", 1, mode="llm")
    assert select_llm(r, client).indices == (1,)
    assert calls["n"] == 2


def test_select_llm_wrong_cardinality():
    client, _ = scripted_client("bad, day")
    r = req("a bad day", 1, mode="llm")
    with pytest.raises(WrongCardinality):
        select_llm(r, client)


def test_select_llm_duplicate_resolution_is_wrong_cardinality():
    client, _ = scripted_client("bad, Bad")
    r = req("a bad day", 2, mode="llm")
    with pytest.raises(WrongCardinality):
        select_llm(r, client)


def test_select_llm_parses_numbered_lists():
    client, _ = scripted_client("1. bad\n2. day")
    r = req("a bad day", 2, mode="llm")
    assert select_llm(r, client).indices == (1, 2)


def test_cache_round_trip(tmp_path):
    path = tmp_path / "cache.jsonl"
    cache = SelectionCache(path)
    client, calls = scripted_client("bad")
    r = req("a bad day", 1, mode="llm", evaluator_model="m1")
    first = select_llm(r, client, cache=cache)
    second = select_llm(r, client, cache=cache)
    assert first == second
    assert calls["n"] == 1  # second call was a cache hit

    # a fresh cache instance reloads the persisted file
    reloaded = SelectionCache(path)
    third = select_llm(r, client, cache=reloaded)
    assert third == first
    assert calls["n"] == 1


def test_cache_key_depends_on_model():
    k1 = SelectionCache.key("text", 2, "a")
    k2 = SelectionCache.key("text", 2, "b")
    assert k1 != k2
