"""Shared contract for the four model-dependent judgments.

A backend answers: reward scoring, cognitive-level classification,
discipline classification, discipline description, and text embedding.
This base class owns everything transport-independent: prompt templates,
strict output parsing, re-ask retries, response caching, and the embedding
dimension guard. Subclasses provide the raw fetches.
"""

from __future__ import annotations

import json
import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from ..errors import BackendError, ConfigError
from ..metrics import CognitiveLevel
from .cache import ResponseCache, cache_key


@dataclass(frozen=True)
class BackendConfig:
    """Connection settings for one backend role."""

    endpoint: str
    model_name: str
    api_key_env: str | None = None
    max_in_flight: int = 4
    timeout: float = 30.0
    retries: int = 2

    def __post_init__(self) -> None:
        if self.max_in_flight < 1:
            raise ConfigError("max_in_flight must be >= 1")
        if self.timeout <= 0:
            raise ConfigError("timeout must be > 0")
        if self.retries < 0:
            raise ConfigError("retries must be >= 0")


def canonical_discipline(name: str) -> str:
    """Trim, case-fold, and collapse internal whitespace."""
    return " ".join(name.split()).casefold()


_LEVEL_NAMES = ", ".join(lvl.label for lvl in CognitiveLevel)

BLOOM_PROMPT = (
    "Classify the cognitive demand of the instruction/response pair below "
    f"into one or more of these levels: {_LEVEL_NAMES}.\n"
    "Answer with a single line of comma-separated level names and nothing else.\n\n"
    "Instruction:\n{instruction}\n\nResponse:\n{response}"
)

DISCIPLINE_PROMPT = (
    "Name the academic discipline(s) most relevant to the instruction/response "
    "pair below.\n"
    "Answer with a single line of comma-separated discipline names and nothing else.\n\n"
    "{text}"
)

DESCRIBE_PROMPT = (
    "Write one detailed paragraph describing the academic discipline "
    "\"{name}\": its subject matter, core methods, and typical problems. "
    "Answer with the paragraph only."
)

_RETRY_REMINDER = (
    "\n\n(Attempt {attempt}: the previous answer was not parseable. "
    "Reply with exactly one line containing only comma-separated labels.)"
)


def parse_bloom_labels(text: str) -> frozenset[CognitiveLevel] | None:
    """Strict parse of a one-line comma-separated level list; None on failure."""
    stripped = text.strip()
    if not stripped or "\n" in stripped:
        return None
    levels = []
    for token in stripped.replace(";", ",").split(","):
        token = token.strip()
        if not token:
            continue
        level = CognitiveLevel.parse(token)
        if level is None:
            return None
        levels.append(level)
    return frozenset(levels) if levels else None


def parse_discipline_labels(text: str) -> list[str] | None:
    """Strict parse of one line of discipline names, canonicalized and deduplicated."""
    stripped = text.strip()
    if not stripped or "\n" in stripped:
        return None
    names: list[str] = []
    for token in stripped.replace(";", ",").split(","):
        name = canonical_discipline(token)
        if name and name not in names:
            names.append(name)
    return names or None


class ModelBackend(ABC):
    """Transport-independent implementation of the judgment contract."""

    def __init__(self, cache: ResponseCache | None = None, retries: int = 2) -> None:
        self.cache = cache if cache is not None else ResponseCache()
        self.retries = retries
        self._embed_dim: int | None = None
        self._dim_lock = threading.Lock()

    # -- transports ---------------------------------------------------------

    @abstractmethod
    def _fetch_reward(self, instruction: str, response: str) -> str:
        """Raw reward-endpoint response body for one scored pair."""

    @abstractmethod
    def _fetch_chat(self, prompt: str) -> str:
        """Raw completion text for a single-turn prompt at temperature 0."""

    @abstractmethod
    def _fetch_embedding(self, text: str) -> str:
        """Raw embedding-endpoint response body for one input text."""

    @property
    @abstractmethod
    def model_names(self) -> dict[str, str]:
        """Model identifier per role: reward / chat / embedding."""

    # -- cached raw calls ----------------------------------------------------

    def _cached(self, kind: str, model: str, payload: str, fetch) -> str:
        key = cache_key(kind, model, payload)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        value = fetch()
        self.cache.put(key, value)
        return value

    def _chat(self, prompt: str) -> str:
        return self._cached(
            "chat", self.model_names["chat"], prompt, lambda: self._fetch_chat(prompt)
        )

    def _chat_with_retries(self, prompt: str, parse, what: str):
        """Ask, parse, and re-ask with a stricter reminder on parse failure."""
        retries = self.retries
        for attempt in range(retries + 1):
            asked = prompt if attempt == 0 else prompt + _RETRY_REMINDER.format(attempt=attempt)
            parsed = parse(self._chat(asked))
            if parsed is not None:
                return parsed
        raise BackendError(f"{what}: no parseable answer after {retries + 1} attempt(s)")

    # -- the four judgments --------------------------------------------------

    def score_reward(self, instruction: str, response: str) -> float:
        """Scalar quality/preference score for the pair; no rescaling."""
        payload = json.dumps(
            {"instruction": instruction, "response": response},
            ensure_ascii=False, sort_keys=True,
        )
        raw = self._cached(
            "reward", self.model_names["reward"], payload,
            lambda: self._fetch_reward(instruction, response),
        )
        try:
            score = json.loads(raw)["score"]
        except (json.JSONDecodeError, TypeError, KeyError) as exc:
            raise BackendError(f"malformed reward response: {raw!r}") from exc
        if not isinstance(score, (int, float)) or isinstance(score, bool):
            raise BackendError(f"malformed reward response: non-numeric score {score!r}")
        return float(score)

    def classify_bloom(self, instruction: str, response: str) -> frozenset[CognitiveLevel]:
        """Non-empty set of cognitive levels for the pair (multi-label)."""
        prompt = BLOOM_PROMPT.format(instruction=instruction, response=response)
        return self._chat_with_retries(prompt, parse_bloom_labels, "unclassifiable record")

    def classify_disciplines(
        self, instruction: str, response: str, *, instruction_only: bool = False
    ) -> list[str]:
        """Non-empty list of canonical discipline names for the pair."""
        text = instruction if instruction_only else f"{instruction}\n\n{response}"
        prompt = DISCIPLINE_PROMPT.format(text=text)
        return self._chat_with_retries(
            prompt, parse_discipline_labels, "no disciplines identified"
        )

    def describe_discipline(self, name: str) -> str:
        """Shared description paragraph for one canonical discipline name."""
        if not name.strip():
            raise ValueError("discipline name must be non-empty")
        prompt = DESCRIBE_PROMPT.format(name=name)
        parse = lambda text: text.strip() or None
        return self._chat_with_retries(prompt, parse, f"empty description for '{name}'")

    def embed(self, text: str) -> np.ndarray:
        """Fixed-dimension embedding vector; dimension must not drift."""
        if not text.strip():
            raise ValueError("cannot embed empty text")
        raw = self._cached(
            "embedding", self.model_names["embedding"], text,
            lambda: self._fetch_embedding(text),
        )
        try:
            vector = np.asarray(json.loads(raw)["vectors"][0], dtype=np.float64)
        except (json.JSONDecodeError, TypeError, KeyError, IndexError) as exc:
            raise BackendError(f"malformed embedding response: {raw!r}") from exc
        if vector.ndim != 1 or vector.size == 0:
            raise BackendError(f"malformed embedding response: bad shape {vector.shape}")
        with self._dim_lock:
            if self._embed_dim is None:
                self._embed_dim = vector.size
            elif vector.size != self._embed_dim:
                raise BackendError(
                    f"embedding dimension drift: run began with {self._embed_dim}, "
                    f"got {vector.size}"
                )
        return vector
