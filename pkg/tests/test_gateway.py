import pytest

from patcheval.errors import (
    AuthFailure,
    NoEligibleJudge,
    ProviderUnavailable,
    TranscriptMiss,
)
from patcheval.gateway import (
    Gateway,
    ModelHandle,
    RetryPolicy,
    ScriptedProvider,
    TranscriptCache,
    judge_pool,
)
from patcheval.prompts import PromptTurn

QWEN = ModelHandle("qwen")
LLAMA = ModelHandle("llama")
OPENAI = ModelHandle("openai")


def test_judge_pool_excludes_generator():
    pool = judge_pool(QWEN, [QWEN, LLAMA, OPENAI])
    assert [h.provider_id for h in pool] == ["llama", "openai"]


def test_judge_pool_empty_configuration():
    with pytest.raises(NoEligibleJudge):
        judge_pool(QWEN, [])


def test_judge_pool_all_excluded():
    with pytest.raises(NoEligibleJudge):
        judge_pool(QWEN, [QWEN])


def _turns(text="hello"):
    return [PromptTurn("user", text)]


def test_chat_round_trip():
    gw = Gateway({"qwen": ScriptedProvider(default="hi there")})
    assert gw.chat(QWEN, _turns()).text == "hi there"


def test_chat_unknown_provider():
    gw = Gateway({})
    with pytest.raises(ProviderUnavailable):
        gw.chat(QWEN, _turns())


def test_record_then_replay(tmp_path):
    cache = TranscriptCache(tmp_path)
    live = Gateway({"qwen": ScriptedProvider(default="recorded reply")}, cache=cache)
    assert live.chat(QWEN, _turns()).text == "recorded reply"
    assert live.embed(
        ModelHandle("qwen", frozenset({"chat", "embed"})), "text"
    )

    offline = Gateway({}, cache=TranscriptCache(tmp_path), replay=True)
    assert offline.chat(QWEN, _turns()).text == "recorded reply"
    with pytest.raises(TranscriptMiss):
        offline.chat(QWEN, _turns("never recorded"))


def test_replay_distinguishes_temperature(tmp_path):
    cache = TranscriptCache(tmp_path)
    provider = ScriptedProvider(replies=["cold", "hot"])
    live = Gateway({"qwen": provider}, cache=cache)
    assert live.chat(QWEN, _turns(), temperature=0.2).text == "cold"
    assert live.chat(QWEN, _turns(), temperature=0.9).text == "hot"
    # Identical request hits the cache instead of the provider.
    assert live.chat(QWEN, _turns(), temperature=0.2).text == "cold"
    assert len(provider.calls) == 2


def test_retries_transient_failures():
    sleeps = []
    provider = ScriptedProvider(default="ok", fail_times=3)
    gw = Gateway({"qwen": provider}, retry=RetryPolicy(max_retries=3), sleep=sleeps.append)
    assert gw.chat(QWEN, _turns()).text == "ok"
    assert sleeps == [0.5, 1.0, 2.0]


def test_retry_budget_exhausted():
    provider = ScriptedProvider(default="ok", fail_times=4)
    gw = Gateway({"qwen": provider}, retry=RetryPolicy(max_retries=3), sleep=lambda _: None)
    with pytest.raises(ProviderUnavailable):
        gw.chat(QWEN, _turns())


def test_auth_failure_is_fatal():
    class BadAuth:
        def chat(self, turns, temperature):
            raise AuthFailure("401")

        def embed(self, text):
            raise AuthFailure("401")

    sleeps = []
    gw = Gateway({"qwen": BadAuth()}, sleep=sleeps.append)
    with pytest.raises(AuthFailure):
        gw.chat(QWEN, _turns())
    assert sleeps == []


def test_temperature_omitted_when_unsupported():
    provider = ScriptedProvider(default="ok")
    gw = Gateway({"o1": provider})
    handle = ModelHandle("o1", supports_temperature=False)
    gw.chat(handle, _turns(), temperature=0.9)
    assert provider.calls[0][0]["temperature"] is None


def test_capability_checks():
    gw = Gateway({"qwen": ScriptedProvider()})
    with pytest.raises(ValueError):
        gw.embed(QWEN, "text")
    with pytest.raises(ValueError):
        gw.chat(ModelHandle("qwen", frozenset({"embed"})), _turns())
    with pytest.raises(ValueError):
        gw.embed(ModelHandle("qwen", frozenset({"embed"})), "")


def test_scripted_provider_matching():
    provider = ScriptedProvider(
        script={"alpha": "A", "beta": "B"}, default="D"
    )
    assert provider.chat([{"role": "user", "text": "has alpha inside"}], None) == "A"
    assert provider.chat([{"role": "user", "text": "beta here"}], None) == "B"
    assert provider.chat([{"role": "user", "text": "nothing"}], None) == "D"


def test_scripted_embeddings_distinct_and_stable():
    provider = ScriptedProvider()
    a1 = provider.embed("alpha")
    a2 = provider.embed("alpha")
    b = provider.embed("beta")
    assert a1 == a2
    assert a1 != b
    assert len(a1) == 16
