"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines as they complete.
"""

from __future__ import annotations

import contextlib
import json
import math
import socket
import time

import numpy as np
import pytest
from scipy import sparse

from conftest import NetworkBlockedError, forbid_all_sockets
from corpora import make_graded_corpus, make_uniform_corpus
from test_silhouette import brute_silhouette
from thtb.cluster import kmeans, silhouette
from thtb.metrics import (
    CognitiveLevel,
    LengthMeasure,
    LengthUnit,
    NormalizationContext,
    ScoreCard,
    aggregate_extrinsic,
    aggregate_intrinsic,
    bloom_raw,
    cosine_distance,
    interdisciplinary_complexity,
    irei,
    minmax_normalize,
)
from thtb.pipeline import (
    PipelineConfig,
    run_pipeline,
    score_dataset,
    stage1_reward_filter,
    thtb_dataset_score,
)
from thtb.records import Dataset, InstructionRecord, load_dataset

EXACT = 1e-12


@contextlib.contextmanager
def criterion(num: int, label: str):
    try:
        yield
    except BaseException:
        print(f"\n[acceptance] criterion {num} ({label}): FAIL")
        raise
    print(f"\n[acceptance] criterion {num} ({label}): PASS")


def _offline_config(tmp_path, **overrides) -> PipelineConfig:
    defaults = dict(offline=True, seed=0, workers=1, run_dir=str(tmp_path / "run"))
    defaults.update(overrides)
    return PipelineConfig(**defaults)


# -- criterion 1: pipeline cardinality ----------------------------------------------

def test_criterion_1_pipeline_cardinality(tmp_path):
    with criterion(1, "pipeline cardinality 200/100/50 and 52k -> 2600, < 60 s"):
        small = load_dataset(make_uniform_corpus(tmp_path / "small.jsonl", 1000, seed=1))
        big = load_dataset(make_uniform_corpus(tmp_path / "big.jsonl", 52_000, seed=2))

        started = time.monotonic()
        result_small = run_pipeline(
            small, _offline_config(tmp_path, run_dir=str(tmp_path / "run_small"))
        )
        result_big = run_pipeline(
            big, _offline_config(tmp_path, run_dir=str(tmp_path / "run_big"))
        )
        elapsed = time.monotonic() - started

        outs_small = [entry.population_out for entry in result_small.manifest.stages]
        assert outs_small == [200, 100, 50]
        assert result_small.manifest.selected_count == 50

        outs_big = [entry.population_out for entry in result_big.manifest.stages]
        assert outs_big == [10_400, 5_200, 2_600]
        assert result_big.manifest.selected_count == 2_600
        assert len(result_big.selected.records) == 2_600

        assert elapsed < 60.0, f"offline runs took {elapsed:.1f} s"
        print(f"\n[acceptance] criterion 1 runtime: {elapsed:.1f} s for 53k records")


# -- criterion 2: formula endpoints ---------------------------------------------------

def test_criterion_2_formula_endpoints():
    with criterion(2, "formula endpoint checks at 1e-12"):
        assert bloom_raw({CognitiveLevel.REMEMBER}) == pytest.approx(1.0, abs=EXACT)
        assert bloom_raw({CognitiveLevel.CREATE}) == pytest.approx(6.0, abs=EXACT)
        assert bloom_raw(
            {CognitiveLevel.ANALYZE, CognitiveLevel.EVALUATE}
        ) == pytest.approx(9.0, abs=EXACT)

        e1, e2 = np.array([1.0, 0.0]), np.array([0.0, 1.0])
        assert cosine_distance(e1, e1) == pytest.approx(0.0, abs=EXACT)
        assert cosine_distance(e1, e2) == pytest.approx(1.0, abs=EXACT)
        assert cosine_distance(e1, -e1) == pytest.approx(2.0, abs=EXACT)

        ctx = NormalizationContext(min=1, max=3)
        cos = 1.0 - 0.8
        pair = [np.array([1.0, 0.0]), np.array([cos, math.sqrt(1.0 - cos * cos)])]
        assert interdisciplinary_complexity(pair, ctx) == pytest.approx(1.3, abs=EXACT)

        ctx_len = NormalizationContext(min=20, max=100)
        measure = LengthMeasure(LengthUnit.WHITESPACE_TOKENS, 10, 30)
        assert irei(measure, ctx_len) == pytest.approx(3.25, abs=EXACT)


# -- criterion 3: silhouette oracle ---------------------------------------------------

def test_criterion_3_silhouette_oracle_200_corpora():
    with criterion(3, "silhouette matches brute force on 200 random corpora"):
        rng = np.random.default_rng(42)
        for _ in range(200):
            n = int(rng.integers(4, 13))
            dim = int(rng.integers(3, 10))
            dense = np.abs(rng.normal(size=(n, dim))) * (rng.random(size=(n, dim)) < 0.5)
            norms = np.linalg.norm(dense, axis=1, keepdims=True)
            norms[norms == 0] = 1.0
            dense /= norms
            k = int(rng.integers(2, min(4, n) + 1))
            model = kmeans(sparse.csr_matrix(dense), k=k, seed=int(rng.integers(1 << 30)))
            results = silhouette(model, sparse.csr_matrix(dense))
            expected = brute_silhouette(dense, model.assignment)
            for result, value in zip(results, expected):
                assert abs(result.sc - value) <= 1e-9


# -- criterion 4: K-Means sanity -------------------------------------------------------

def test_criterion_4_kmeans_planted_blobs():
    with criterion(4, "planted two-blob recovery >= 99/100, inertia non-increasing"):
        recovered = 0
        for seed in range(100):
            rng = np.random.default_rng(10_000 + seed)
            n_a = int(rng.integers(2, 26))
            n_b = int(rng.integers(2, 26))
            radius = 1.0
            dim = int(rng.integers(2, 6))
            blob_a = np.clip(rng.normal(scale=radius / 3, size=(n_a, dim)), -radius, radius)
            blob_b = np.clip(rng.normal(scale=radius / 3, size=(n_b, dim)), -radius, radius)
            offset = np.zeros(dim)
            offset[0] = 10.0 * (2 * radius)  # separation >= 10x blob radius
            points = np.vstack([blob_a, blob_b + offset])

            model = kmeans(sparse.csr_matrix(points), k=2, seed=seed)
            history = model.inertia_history
            for earlier, later in zip(history, history[1:]):
                assert later <= earlier + 1e-9 * max(1.0, earlier)

            left = set(model.assignment[:n_a])
            right = set(model.assignment[n_a:])
            if len(left) == 1 and len(right) == 1 and left != right:
                recovered += 1
        assert recovered >= 99, f"recovered only {recovered}/100 planted partitions"


# -- criterion 5: normalization properties ----------------------------------------------

def test_criterion_5_normalization_properties():
    with criterion(5, "min-max normalization and aggregation means"):
        rng = np.random.default_rng(7)
        for trial in range(1000):
            size = int(rng.integers(2, 40))
            if trial % 10 == 0:  # sprinkle degenerate populations
                values = np.full(size, float(rng.normal()))
            else:
                values = rng.normal(scale=float(rng.uniform(0.01, 100)), size=size)
            ctx = NormalizationContext.from_values(values, population="acceptance")
            normed = [minmax_normalize(float(v), ctx) for v in values]
            assert minmax_normalize(ctx.min, ctx) == 0.0
            assert minmax_normalize(ctx.max, ctx) == pytest.approx(
                1.0 if ctx.max > ctx.min else 0.0, abs=EXACT
            )
            if ctx.max == ctx.min:
                assert all(v == 0.0 for v in normed)
            order = np.argsort(values, kind="stable")
            for a, b in zip(order, order[1:]):
                assert normed[a] <= normed[b] + EXACT

        for _ in range(1000):
            a, b = (float(x) for x in rng.uniform(size=2))
            assert aggregate_intrinsic(a, b) == pytest.approx((a + b) / 2.0, abs=EXACT)
            assert aggregate_extrinsic(b, a) == pytest.approx((a + b) / 2.0, abs=EXACT)


# -- criterion 6: rank invariance ---------------------------------------------------------

def test_criterion_6_stage1_rank_invariance():
    with criterion(6, "stage-1 survivors invariant under monotone reward transforms"):
        rng = np.random.default_rng(3)
        for _ in range(50):
            n = int(rng.integers(5, 200))
            keep = float(rng.uniform(0.05, 0.95))
            rewards = [float(r) for r in rng.normal(size=n)]
            records = [
                InstructionRecord(index=i, instruction=f"q{i}", response=f"a{i}")
                for i in range(n)
            ]
            ds = Dataset(records=records, origin="<memory>")

            def cut(values):
                cards = [ScoreCard(index=i, reward=v) for i, v in enumerate(values)]
                return stage1_reward_filter(ds, cards, keep)

            base = cut(rewards)
            assert cut([2.0 * r + 7.0 for r in rewards]) == base
            assert cut([math.exp(r) for r in rewards]) == base


# -- criterion 7: determinism ----------------------------------------------------------

def _manifest_core(path) -> str:
    manifest = json.loads(path.read_text(encoding="utf-8"))
    manifest.pop("runtime", None)  # timestamps, wall clock, worker count, cache telemetry
    return json.dumps(manifest, sort_keys=True)


def test_criterion_7_byte_identical_runs(tmp_path):
    with criterion(7, "byte-identical artifacts across reruns and worker counts"):
        corpus = make_uniform_corpus(tmp_path / "corpus.jsonl", 300, seed=4)
        dataset = load_dataset(corpus)

        def run(tag: str, workers: int):
            config = _offline_config(
                tmp_path,
                workers=workers,
                seed=11,
                cache_dir=str(tmp_path / f"cache_{tag}"),
                run_dir=str(tmp_path / f"run_{tag}"),
            )
            run_pipeline(dataset, config)
            base = tmp_path / f"run_{tag}"
            return (
                (base / "selected").read_bytes(),
                (base / "scored_full").read_bytes(),
                _manifest_core(base / "manifest"),
            )

        first = run("a", workers=1)
        second = run("b", workers=4)  # different worker count, fresh cache
        assert first == second

        third = run("a", workers=1)  # same run dir, warm cache
        assert third == first


# -- criterion 8: dataset-score discrimination ---------------------------------------------

def test_criterion_8_thtb_score_discriminates_hard_from_easy(tmp_path):
    with criterion(8, "thtb score separates hard from easy by >= 0.15"):
        easy = load_dataset(make_graded_corpus(tmp_path / "easy.jsonl", 200, "easy", seed=5))
        hard = load_dataset(make_graded_corpus(tmp_path / "hard.jsonl", 200, "hard", seed=6))
        config = PipelineConfig(offline=True, seed=0, workers=1)
        easy_score = thtb_dataset_score(score_dataset(easy, config))
        hard_score = thtb_dataset_score(score_dataset(hard, config))
        print(
            f"\n[acceptance] criterion 8 scores: hard={hard_score:.4f} "
            f"easy={easy_score:.4f} gap={hard_score - easy_score:.4f}"
        )
        assert hard_score > easy_score
        assert hard_score - easy_score >= 0.15


# -- criterion 9: offline guarantee ----------------------------------------------------------

def test_criterion_9_offline_guarantee(tmp_path):
    with criterion(9, "offline run touches no socket; external network is blocked"):
        # The suite-wide guard rejects any non-loopback connection.
        with pytest.raises(NetworkBlockedError):
            probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
            try:
                probe.connect(("203.0.113.1", 443))
            finally:
                probe.close()

        # A full offline pipeline run completes with sockets entirely forbidden.
        corpus = make_uniform_corpus(tmp_path / "corpus.jsonl", 60, seed=8)
        dataset = load_dataset(corpus)
        with forbid_all_sockets():
            result = run_pipeline(dataset, _offline_config(tmp_path, workers=3))
        assert result.manifest.status == "complete"
        assert result.manifest.selected_count == 3
