"""HTTP implementation of the backend contract.

Three JSON-over-POST endpoints, one per role:

    reward    POST {instruction, response}            -> {"score": number}
    chat      POST {model, messages, temperature: 0}  -> {"text": string}
    embedding POST {model, input: [text]}             -> {"vectors": [[number, ...]]}

Credentials are never stored in configuration; each role names an
environment variable and the token is read at request time. Transport
failures are retried with backoff; at most ``max_in_flight`` requests per
role are outstanding at any instant.
"""

from __future__ import annotations

import json
import os
import threading
import time

import requests

from ..errors import BackendError
from .base import BackendConfig, ModelBackend
from .cache import ResponseCache

_BACKOFF_BASE = 0.1
_BACKOFF_CAP = 2.0


class HttpBackend(ModelBackend):
    """Backend speaking the three-endpoint wire contract."""

    def __init__(
        self,
        reward: BackendConfig,
        chat: BackendConfig,
        embedding: BackendConfig,
        cache: ResponseCache | None = None,
    ) -> None:
        super().__init__(cache=cache, retries=chat.retries)
        self.configs = {"reward": reward, "chat": chat, "embedding": embedding}
        self._gates = {
            role: threading.BoundedSemaphore(cfg.max_in_flight)
            for role, cfg in self.configs.items()
        }
        self._session = requests.Session()

    @property
    def model_names(self) -> dict[str, str]:
        return {role: cfg.model_name for role, cfg in self.configs.items()}

    def _headers(self, cfg: BackendConfig) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        if cfg.api_key_env:
            token = os.environ.get(cfg.api_key_env, "")
            if token:
                headers["Authorization"] = f"Bearer {token}"
        return headers

    def _post(self, role: str, payload: dict) -> str:
        """POST with retries; returns the raw response body text."""
        cfg = self.configs[role]
        last_error: Exception | None = None
        for attempt in range(cfg.retries + 1):
            if attempt:
                time.sleep(min(_BACKOFF_BASE * 2 ** (attempt - 1), _BACKOFF_CAP))
            try:
                with self._gates[role]:
                    resp = self._session.post(
                        cfg.endpoint,
                        data=json.dumps(payload, ensure_ascii=False).encode("utf-8"),
                        headers=self._headers(cfg),
                        timeout=cfg.timeout,
                    )
                if resp.status_code == 200:
                    return resp.text
                last_error = BackendError(
                    f"{role} endpoint returned HTTP {resp.status_code}"
                )
            except requests.RequestException as exc:
                last_error = exc
        raise BackendError(
            f"{role} backend unreachable after {cfg.retries + 1} attempt(s): {last_error}"
        ) from last_error

    # -- transports ----------------------------------------------------------

    def _fetch_reward(self, instruction: str, response: str) -> str:
        return self._post("reward", {"instruction": instruction, "response": response})

    def _fetch_chat(self, prompt: str) -> str:
        body = self._post(
            "chat",
            {
                "model": self.configs["chat"].model_name,
                "messages": [{"role": "user", "content": prompt}],
                "temperature": 0,
            },
        )
        try:
            text = json.loads(body)["text"]
        except (json.JSONDecodeError, TypeError, KeyError) as exc:
            raise BackendError(f"malformed chat response: {body!r}") from exc
        if not isinstance(text, str):
            raise BackendError(f"malformed chat response: non-string text {text!r}")
        return text

    def _fetch_embedding(self, text: str) -> str:
        return self._post(
            "embedding",
            {"model": self.configs["embedding"].model_name, "input": [text]},
        )
