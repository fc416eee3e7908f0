"""Fully offline, seed-deterministic backend.

The stub reads its judgments straight out of the record text where it can
(cognitive-level verbs, known discipline names) and falls back to
content-hash pseudo-randomness otherwise, so fixtures can plant labels by
phrasing while arbitrary corpora still get well-formed annotations. No
sockets are ever touched.
"""

from __future__ import annotations

import hashlib
import json
import re

import numpy as np

from ..metrics import CognitiveLevel
from .base import ModelBackend
from .cache import ResponseCache

# Verb/keyword cues per cognitive level, checked as whole words.
_LEVEL_CUES: dict[CognitiveLevel, tuple[str, ...]] = {
    CognitiveLevel.REMEMBER: ("remember", "recall", "list", "name", "define", "state"),
    CognitiveLevel.UNDERSTAND: ("understand", "explain", "summarize", "describe", "paraphrase"),
    CognitiveLevel.APPLY: ("apply", "use", "solve", "demonstrate", "calculate", "implement"),
    CognitiveLevel.ANALYZE: ("analyze", "analyse", "compare", "contrast", "examine", "dissect"),
    CognitiveLevel.EVALUATE: ("evaluate", "assess", "judge", "critique", "justify", "defend"),
    CognitiveLevel.CREATE: ("create", "design", "compose", "invent", "devise", "construct"),
}

# Small gazetteer used both for text matching and as the hash-fallback pool.
_DISCIPLINES = (
    "mathematics", "physics", "chemistry", "biology", "medicine", "law",
    "history", "economics", "philosophy", "psychology", "computer science",
    "engineering", "literature", "linguistics", "geography", "astronomy",
    "sociology", "political science", "music", "statistics", "ecology",
    "anthropology", "education", "business",
)


def _digest(seed: int, *parts: str) -> int:
    material = "\x1e".join((str(seed),) + parts)
    return int.from_bytes(hashlib.sha256(material.encode("utf-8")).digest()[:8], "big")


class StubBackend(ModelBackend):
    """Deterministic stand-in for all four judgments."""

    def __init__(
        self,
        seed: int = 0,
        embedding_dim: int = 64,
        cache: ResponseCache | None = None,
        retries: int = 2,
    ) -> None:
        super().__init__(cache=cache, retries=retries)
        self.seed = seed
        self.embedding_dim = embedding_dim

    @property
    def model_names(self) -> dict[str, str]:
        tag = f"stub-seed-{self.seed}"
        return {"reward": tag, "chat": tag, "embedding": f"{tag}-d{self.embedding_dim}"}

    # -- transports ----------------------------------------------------------

    def _fetch_reward(self, instruction: str, response: str) -> str:
        h = _digest(self.seed, "reward", instruction, response)
        score = h / float(2**64)
        return json.dumps({"score": score})

    def _fetch_chat(self, prompt: str) -> str:
        if prompt.startswith("Classify the cognitive demand"):
            return self._bloom_answer(prompt)
        if prompt.startswith("Name the academic discipline"):
            return self._discipline_answer(prompt)
        if prompt.startswith("Write one detailed paragraph"):
            return self._description_answer(prompt)
        # Unknown prompt shape: echo something stable and one-line.
        return f"stub-answer-{_digest(self.seed, 'chat', prompt) % 10**8}"

    def _fetch_embedding(self, text: str) -> str:
        rng = np.random.default_rng(_digest(self.seed, "embedding", text))
        vector = rng.standard_normal(self.embedding_dim)
        vector /= np.linalg.norm(vector)
        return json.dumps({"vectors": [vector.tolist()]})

    # -- answer synthesis ----------------------------------------------------
    # Both classifiers look only at the record body, never the prompt
    # template (which itself names the levels and the word "discipline").

    def _bloom_answer(self, prompt: str) -> str:
        body = prompt.split("Instruction:", 1)[-1]
        words = set(re.findall(r"[^\W_]+", body.casefold()))
        found = [
            level for level, cues in _LEVEL_CUES.items()
            if any(cue in words for cue in cues)
        ]
        if not found:
            pick = _digest(self.seed, "bloom-fallback", body) % 6
            found = [CognitiveLevel(pick + 1)]
        return ", ".join(level.label for level in sorted(found))

    def _discipline_answer(self, prompt: str) -> str:
        body = prompt.split("and nothing else.", 1)[-1]
        lowered = " ".join(re.findall(r"[^\W_]+", body.casefold()))
        found = [name for name in _DISCIPLINES if f" {name} " in f" {lowered} "]
        if not found:
            pick = _digest(self.seed, "discipline-fallback", body)
            found = [_DISCIPLINES[pick % len(_DISCIPLINES)]]
            if pick % 3 == 0:  # sometimes two labels
                second = _DISCIPLINES[(pick // 7) % len(_DISCIPLINES)]
                if second != found[0]:
                    found.append(second)
        return ", ".join(found)

    def _description_answer(self, prompt: str) -> str:
        match = re.search(r'"([^"]+)"', prompt)
        name = match.group(1) if match else "the field"
        flavor = _digest(self.seed, "describe", name) % 4
        angles = (
            "its empirical methods and canonical problems",
            "its theoretical foundations and open questions",
            "its formal tools and applied practice",
            "its history, methods, and major subfields",
        )
        return (
            f"{name.capitalize()} is a field of study concerned with the systematic "
            f"investigation of {name}, including {angles[flavor]}. Practitioners of "
            f"{name} develop models, gather evidence, and refine the discipline's "
            f"core concepts."
        )
