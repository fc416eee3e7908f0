"""Pluggable backends for the model-dependent judgments."""

from .base import (
    BLOOM_PROMPT,
    DESCRIBE_PROMPT,
    DISCIPLINE_PROMPT,
    BackendConfig,
    ModelBackend,
    canonical_discipline,
    parse_bloom_labels,
    parse_discipline_labels,
)
from .cache import ResponseCache, cache_key
from .http import HttpBackend
from .stub import StubBackend

__all__ = [
    "BLOOM_PROMPT",
    "DESCRIBE_PROMPT",
    "DISCIPLINE_PROMPT",
    "BackendConfig",
    "HttpBackend",
    "ModelBackend",
    "ResponseCache",
    "StubBackend",
    "cache_key",
    "canonical_discipline",
    "parse_bloom_labels",
    "parse_discipline_labels",
]
