"""Synthetic corpus builders shared by the pipeline, CLI, and acceptance tests.

The word pool deliberately avoids the stub backend's cognitive-level cue
words and its discipline gazetteer, so "uniform" corpora get hash-derived
annotations while "graded" corpora plant labels through phrasing.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

NEUTRAL_WORDS = (
    "river", "stone", "cloud", "garden", "window", "bridge", "candle",
    "forest", "meadow", "harbor", "lantern", "valley", "ribbon", "marble",
    "copper", "shadow", "winter", "summer", "orchard", "village", "thunder",
    "whisper", "journey", "pattern", "texture", "fabric", "timber", "canyon",
    "breeze", "ember", "crystal", "pebble", "harvest", "anchor", "saddle",
    "mirror", "spiral", "hollow", "tunnel", "beacon", "cinder", "drift",
    "fathom", "garnet", "hearth", "ivory", "jasper", "kestrel", "lichen",
    "moss", "nectar", "opal", "quartz", "russet", "sable", "tide",
    "umber", "violet", "wicker", "yarrow", "zephyr", "basalt", "cedar",
)

EASY_DISCIPLINES = ("history", "literature", "geography")
HARD_DISCIPLINES = ("mathematics", "philosophy", "biology", "physics", "law", "music")


def _phrase(rng: np.random.Generator, n_words: int) -> str:
    picks = rng.integers(0, len(NEUTRAL_WORDS), size=n_words)
    return " ".join(NEUTRAL_WORDS[i] for i in picks)


def write_jsonl(path: Path, rows: list[dict]) -> Path:
    with path.open("w", encoding="utf-8") as handle:
        for row in rows:
            handle.write(json.dumps(row, ensure_ascii=False) + "\n")
    return path


def make_uniform_corpus(path: Path, n: int, seed: int = 0) -> Path:
    """Neutral records with varied lengths; all stub judgments hash-derived."""
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(n):
        inst_len = int(rng.integers(5, 18))
        resp_len = int(rng.integers(8, 70))
        rows.append(
            {
                "instruction": f"Tell the tale {i} of the {_phrase(rng, inst_len)}.",
                "response": f"The tale goes: {_phrase(rng, resp_len)}.",
            }
        )
    return write_jsonl(path, rows)


def _easy_record(rng: np.random.Generator, i: int) -> dict:
    topic = _phrase(rng, 2)
    discipline = EASY_DISCIPLINES[int(rng.integers(len(EASY_DISCIPLINES)))]
    filler = _phrase(rng, int(rng.integers(6, 11)))
    return {
        "instruction": f"Remember the short note {i} about {topic} from {discipline}.",
        "response": f"It was {filler}.",
    }


def _hard_record(rng: np.random.Generator, i: int) -> dict:
    picks = rng.choice(len(HARD_DISCIPLINES), size=3, replace=False)
    names = ", ".join(HARD_DISCIPLINES[int(p)] for p in picks)
    body = _phrase(rng, int(rng.integers(90, 120)))
    return {
        "instruction": f"Create and design a grand synthesis {i} spanning {names}.",
        "response": f"A sweeping construction follows: {body}.",
    }


def make_graded_corpus(path: Path, n: int, kind: str, seed: int = 0) -> Path:
    """Mixture corpus: mostly-easy or mostly-hard records (9:1 either way)."""
    assert kind in ("easy", "hard")
    hard_fraction = 0.9 if kind == "hard" else 0.1
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(n):
        if rng.random() < hard_fraction:
            rows.append(_hard_record(rng, i))
        else:
            rows.append(_easy_record(rng, i))
    return write_jsonl(path, rows)
