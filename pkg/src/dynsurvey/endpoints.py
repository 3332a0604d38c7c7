"""Endpoint configuration and HTTP clients for generation and embeddings.

Both endpoints speak an OpenAI-compatible wire shape: chat completions
for text generation and the ``/embeddings`` request for vectors.
Credentials come from an environment variable named in the endpoint
configuration; nothing is read from disk.
"""

from __future__ import annotations

import logging
import os
import time
from dataclasses import dataclass
from typing import Protocol, Sequence, runtime_checkable

import requests

from .errors import ConfigError, GenerationTransportError, MetricUnavailableError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GenerationRequest:
    """One agent-level generation call.

    ``role`` names the agent role, ``key`` identifies the work item
    (usually a paper id), and ``attempt`` counts correction retries.
    Scripted providers key on the triple; HTTP providers only need the
    prompt.
    """

    role: str
    key: str
    attempt: int
    prompt: str


@runtime_checkable
class TextGenerator(Protocol):
    max_retries: int

    def generate(self, request: GenerationRequest) -> str: ...


@runtime_checkable
class TextEmbedder(Protocol):
    model_id: str
    dimension: int

    def embed(self, texts: Sequence[str]) -> list[list[float]]: ...


@dataclass(frozen=True)
class GenerationEndpoint:
    """Connection settings for a chat-completion backend."""

    base_url: str
    model_id: str
    temperature: float = 0.0
    max_output_tokens: int = 1024
    timeout_s: float = 60.0
    max_retries: int = 1
    api_key_env: str | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.temperature <= 1.0:
            raise ConfigError(f"temperature {self.temperature} outside [0, 1]")
        if self.max_retries < 0:
            raise ConfigError("max_retries must be non-negative")


@dataclass(frozen=True)
class EmbeddingEndpoint:
    """Connection settings for an embedding backend.

    The default model is the fixed pretrained checkpoint used for all
    embedding metrics; pooling is mean over token embeddings and is not
    configurable.
    """

    base_url: str
    model_id: str = "bert-base-uncased"
    dimension: int = 768
    pooling: str = "mean"
    timeout_s: float = 60.0
    max_retries: int = 1
    api_key_env: str | None = None


def _auth_headers(api_key_env: str | None) -> dict[str, str]:
    headers = {"Content-Type": "application/json"}
    if api_key_env:
        key = os.environ.get(api_key_env, "")
        if not key:
            raise ConfigError(f"credential environment variable {api_key_env!r} is empty")
        headers["Authorization"] = f"Bearer {key}"
    return headers


class ChatCompletionClient:
    """Synchronous chat-completion client with bounded transport retries."""

    def __init__(self, endpoint: GenerationEndpoint):
        self.endpoint = endpoint
        self.max_retries = endpoint.max_retries

    def generate(self, request: GenerationRequest) -> str:
        url = self.endpoint.base_url.rstrip("/") + "/chat/completions"
        payload = {
            "model": self.endpoint.model_id,
            "messages": [{"role": "user", "content": request.prompt}],
            "temperature": self.endpoint.temperature,
            "max_tokens": self.endpoint.max_output_tokens,
        }
        headers = _auth_headers(self.endpoint.api_key_env)
        last_error: Exception | None = None
        for attempt in range(self.endpoint.max_retries + 1):
            try:
                response = requests.post(
                    url, json=payload, headers=headers, timeout=self.endpoint.timeout_s)
                response.raise_for_status()
                data = response.json()
                return str(data["choices"][0]["message"]["content"])
            except (requests.RequestException, KeyError, IndexError, ValueError) as exc:
                last_error = exc
                logger.warning("generation call failed (%s, attempt %d): %s",
                               request.role, attempt, exc)
                if attempt < self.endpoint.max_retries:
                    time.sleep(min(2 ** attempt, 10))
        raise GenerationTransportError(
            f"generation endpoint failed after {self.endpoint.max_retries + 1} attempts: "
            f"{last_error}")


class EmbeddingClient:
    """Synchronous embedding client; validates vector dimensions."""

    def __init__(self, endpoint: EmbeddingEndpoint):
        self.endpoint = endpoint
        self.model_id = endpoint.model_id
        self.dimension = endpoint.dimension

    def embed(self, texts: Sequence[str]) -> list[list[float]]:
        if not texts:
            return []
        url = self.endpoint.base_url.rstrip("/") + "/embeddings"
        payload = {"model": self.endpoint.model_id, "input": list(texts)}
        headers = _auth_headers(self.endpoint.api_key_env)
        last_error: Exception | None = None
        for attempt in range(self.endpoint.max_retries + 1):
            try:
                response = requests.post(
                    url, json=payload, headers=headers, timeout=self.endpoint.timeout_s)
                response.raise_for_status()
                data = response.json()
                vectors = [[float(x) for x in item["embedding"]] for item in data["data"]]
                for vector in vectors:
                    if len(vector) != self.endpoint.dimension:
                        raise ValueError(
                            f"embedding has {len(vector)} components, "
                            f"expected {self.endpoint.dimension}")
                if len(vectors) != len(texts):
                    raise ValueError(f"{len(vectors)} embeddings for {len(texts)} inputs")
                return vectors
            except (requests.RequestException, KeyError, ValueError) as exc:
                last_error = exc
                logger.warning("embedding call failed (attempt %d): %s", attempt, exc)
                if attempt < self.endpoint.max_retries:
                    time.sleep(min(2 ** attempt, 10))
        raise MetricUnavailableError(
            f"embedding endpoint failed after {self.endpoint.max_retries + 1} attempts: "
            f"{last_error}")
