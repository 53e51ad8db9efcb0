"""Uniform access to chat and embedding providers.

Every request is routed through a record/replay transcript cache keyed by
(provider_id, request digest), so a recorded run can be replayed offline
byte-for-byte. Retryable transport failures are retried with bounded
exponential backoff; judge selection enforces the rule that no model
evaluates a patch it generated.
"""

from __future__ import annotations

import hashlib
import json
import logging
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Protocol, Sequence

from .errors import (
    AuthFailure,
    NoEligibleJudge,
    ProviderUnavailable,
    TranscriptMiss,
)
from .prompts import PromptTurn

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModelHandle:
    provider_id: str
    capabilities: frozenset[str] = frozenset({"chat"})
    supports_temperature: bool = True


@dataclass
class ChatResult:
    text: str
    latency_ms: float = 0.0
    truncated: bool = False


class Provider(Protocol):
    """Transport for one configured model."""

    def chat(self, turns: Sequence[dict], temperature: Optional[float]) -> str: ...

    def embed(self, text: str) -> list[float]: ...


def judge_pool(
    generator: ModelHandle, configured: Sequence[ModelHandle]
) -> list[ModelHandle]:
    """Configured judges minus the generating model itself."""
    if not configured:
        raise NoEligibleJudge("no judges configured")
    pool = [h for h in configured if h.provider_id != generator.provider_id]
    if not pool:
        raise NoEligibleJudge(
            f"every configured judge matches generator {generator.provider_id!r}"
        )
    return pool


def _request_digest(kind: str, payload: dict) -> str:
    blob = json.dumps({"kind": kind, **payload}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


class TranscriptCache:
    """On-disk content-addressed store of provider responses."""

    def __init__(self, directory: Path | str):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def _path(self, provider_id: str, digest: str) -> Path:
        return self.directory / f"{provider_id}__{digest}.json"

    def get(self, provider_id: str, digest: str) -> Optional[dict]:
        path = self._path(provider_id, digest)
        if not path.is_file():
            return None
        return json.loads(path.read_text())

    def put(self, provider_id: str, digest: str, response: dict) -> None:
        path = self._path(provider_id, digest)
        with self._lock:
            tmp = path.with_suffix(".tmp")
            tmp.write_text(json.dumps(response, sort_keys=True))
            tmp.replace(path)


@dataclass
class RetryPolicy:
    max_retries: int = 3
    base_delay_s: float = 0.5
    max_delay_s: float = 8.0


class Gateway:
    """Shared front door for all provider traffic.

    ``replay`` mode never touches a live provider: a cache miss is an error,
    which is what makes pipeline runs reproducible offline.
    """

    def __init__(
        self,
        providers: dict[str, Provider],
        cache: Optional[TranscriptCache] = None,
        replay: bool = False,
        retry: Optional[RetryPolicy] = None,
        max_inflight_per_provider: int = 4,
        sleep=time.sleep,
    ):
        self.providers = providers
        self.cache = cache
        self.replay = replay
        self.retry = retry or RetryPolicy()
        self._sleep = sleep
        self._slots = {
            pid: threading.Semaphore(max_inflight_per_provider) for pid in providers
        }
        self._warned_temperature: set[str] = set()

    def _provider(self, model: ModelHandle) -> Provider:
        try:
            return self.providers[model.provider_id]
        except KeyError:
            raise ProviderUnavailable(f"no provider configured: {model.provider_id}")

    def _call(self, model: ModelHandle, kind: str, payload: dict, fn):
        digest = _request_digest(kind, payload)
        if self.cache is not None:
            hit = self.cache.get(model.provider_id, digest)
            if hit is not None:
                return hit["response"]
        if self.replay:
            raise TranscriptMiss(
                f"replay mode: no transcript for {model.provider_id} {kind} {digest[:12]}"
            )
        attempts = 0
        while True:
            attempts += 1
            try:
                with self._slots.get(model.provider_id, threading.Semaphore(1)):
                    response = fn()
                break
            except AuthFailure:
                raise
            except ProviderUnavailable as exc:
                if attempts > self.retry.max_retries:
                    raise
                delay = min(
                    self.retry.base_delay_s * 2 ** (attempts - 1), self.retry.max_delay_s
                )
                log.warning("retrying %s after %s (attempt %d)", kind, exc, attempts)
                self._sleep(delay)
        if self.cache is not None:
            self.cache.put(model.provider_id, digest, {"response": response})
        return response

    def chat(
        self,
        model: ModelHandle,
        turns: Sequence[PromptTurn],
        temperature: float = 0.2,
    ) -> ChatResult:
        if "chat" not in model.capabilities:
            raise ValueError(f"{model.provider_id} has no chat capability")
        effective: Optional[float] = temperature
        if not model.supports_temperature:
            if model.provider_id not in self._warned_temperature:
                log.info(
                    "%s does not support temperature; omitting it", model.provider_id
                )
                self._warned_temperature.add(model.provider_id)
            effective = None
        messages = [{"role": t.role_tag, "text": t.text} for t in turns]
        payload = {"messages": messages, "temperature": effective}
        provider = None if self.replay else self._provider(model)
        start = time.monotonic()
        text = self._call(
            model,
            "chat",
            payload,
            lambda: provider.chat(messages, effective),
        )
        return ChatResult(text=text, latency_ms=(time.monotonic() - start) * 1000.0)

    def embed(self, model: ModelHandle, text: str) -> list[float]:
        if "embed" not in model.capabilities:
            raise ValueError(f"{model.provider_id} has no embed capability")
        if not text:
            raise ValueError("cannot embed empty text")
        provider = None if self.replay else self._provider(model)
        return self._call(
            model, "embed", {"text": text}, lambda: provider.embed(text)
        )


# --- concrete providers ------------------------------------------------------


class OpenAICompatProvider:
    """Chat/embeddings over an OpenAI-compatible HTTP API.

    Credentials come from the environment; base URL and model name from the
    run configuration.
    """

    def __init__(self, base_url: str, model: str, api_key: str, timeout_s: float = 120.0):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.api_key = api_key
        self.timeout_s = timeout_s

    def _post(self, path: str, body: dict) -> dict:
        import requests

        try:
            resp = requests.post(
                f"{self.base_url}{path}",
                json=body,
                headers={"Authorization": f"Bearer {self.api_key}"},
                timeout=self.timeout_s,
            )
        except requests.RequestException as exc:
            raise ProviderUnavailable(str(exc))
        if resp.status_code in (401, 403):
            raise AuthFailure(f"{resp.status_code}: {resp.text[:200]}")
        if resp.status_code == 429 or resp.status_code >= 500:
            raise ProviderUnavailable(f"{resp.status_code}: {resp.text[:200]}")
        resp.raise_for_status()
        return resp.json()

    def chat(self, turns: Sequence[dict], temperature: Optional[float]) -> str:
        body: dict = {
            "model": self.model,
            "messages": [
                {"role": t["role"], "content": t["text"]} for t in turns
            ],
        }
        if temperature is not None:
            body["temperature"] = temperature
        data = self._post("/chat/completions", body)
        return data["choices"][0]["message"]["content"]

    def embed(self, text: str) -> list[float]:
        data = self._post("/embeddings", {"model": self.model, "input": text})
        return data["data"][0]["embedding"]


class ScriptedProvider:
    """Deterministic offline provider for tests and recorded fixtures.

    ``script`` maps a required substring of the last user turn to a reply;
    unmatched requests fall back to ``default`` or echo the last turn.
    Embeddings are a stable hash projection so distinct texts get distinct
    vectors.
    """

    def __init__(
        self,
        script: Optional[dict[str, str]] = None,
        default: Optional[str] = None,
        replies: Optional[list[str]] = None,
        embed_dim: int = 16,
        fail_times: int = 0,
    ):
        self.script = script or {}
        self.default = default
        self.replies = list(replies) if replies else None
        self.embed_dim = embed_dim
        self.fail_times = fail_times
        self.calls: list[list[dict]] = []

    def chat(self, turns: Sequence[dict], temperature: Optional[float]) -> str:
        self.calls.append([dict(t, temperature=temperature) for t in turns])
        if self.fail_times > 0:
            self.fail_times -= 1
            raise ProviderUnavailable("scripted transient failure")
        if self.replies is not None:
            if not self.replies:
                raise ProviderUnavailable("scripted replies exhausted")
            return self.replies.pop(0)
        last = turns[-1]["text"]
        for needle, reply in self.script.items():
            if needle in last:
                return reply
        if self.default is not None:
            return self.default
        return last

    def embed(self, text: str) -> list[float]:
        vec = []
        for i in range(self.embed_dim):
            h = hashlib.sha256(f"{i}:{text}".encode()).digest()
            vec.append(int.from_bytes(h[:4], "big") / 2**31 - 1.0)
        return vec
