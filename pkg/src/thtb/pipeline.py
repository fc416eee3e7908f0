"""Three-stage hardness selection and the dataset-level score.

Stage 1 keeps the top fraction of records by reward, stage 2 by intrinsic
hardness (Bloom + interdisciplinary complexity), stage 3 by extrinsic
hardness (expansion index + silhouette). Annotation is lazy by default:
model judgments are only requested for records that survive into the
stage that needs them, and every normalization context is taken over the
population entering its stage. Switching ``normalization_population`` to
"full-dataset" annotates everything eagerly and normalizes over the whole
input instead.
"""

from __future__ import annotations

import json
import logging
import math
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np
import yaml

from . import __version__
from .backends import BackendConfig, HttpBackend, ModelBackend, ResponseCache, StubBackend
from .cluster import KERNEL_BACKEND, ClusterModel, TfidfModel, auto_k, fit_tfidf, kmeans, silhouette
from .cluster.tfidf import TOKENIZER_MODES
from .errors import ConfigError, PipelineError
from .metrics import (
    LengthUnit,
    NormalizationContext,
    ScoreCard,
    aggregate_extrinsic,
    aggregate_intrinsic,
    bloom_raw,
    interdisciplinary_complexity,
    irei,
    measure_lengths,
    minmax_normalize,
)
from .records import Dataset, InstructionRecord, write_dataset, write_scored

logger = logging.getLogger(__name__)

NORMALIZATION_POPULATIONS = ("stage-local", "full-dataset")
DISCIPLINE_TEXT_MODES = ("instruction+response", "instruction")
THTB_SCORE_DEFINITION = "v1"

_REQUIRED_CONFIG_FIELDS = ("stage1_keep", "stage2_keep", "stage3_keep")


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

@dataclass
class PipelineConfig:
    """Everything a run needs; serializable for reproducibility."""

    stage1_keep: float = 0.20
    stage2_keep: float = 0.50
    stage3_keep: float = 0.50
    k: int | str = "auto"
    max_iter: int = 100
    length_unit: str = LengthUnit.WHITESPACE_TOKENS.value
    tokenizer: str = "words"
    normalization_population: str = "stage-local"
    discipline_text: str = "instruction+response"
    seed: int = 0
    offline: bool = False
    stub_embedding_dim: int = 64
    workers: int = 4
    backends: dict[str, BackendConfig] = field(default_factory=dict)
    cache_dir: str | None = None
    run_dir: str | None = None

    def validate(self, require_backends: bool = True) -> None:
        for name in _REQUIRED_CONFIG_FIELDS:
            keep = getattr(self, name)
            if not isinstance(keep, (int, float)) or not 0 < keep <= 1:
                raise ConfigError(f"{name} must be a fraction in (0, 1], got {keep!r}")
        if self.k != "auto":
            if not isinstance(self.k, int) or self.k < 2:
                raise ConfigError(f"k must be \"auto\" or an integer >= 2, got {self.k!r}")
        if self.max_iter < 1:
            raise ConfigError("max_iter must be >= 1")
        try:
            LengthUnit(self.length_unit)
        except ValueError:
            valid = ", ".join(u.value for u in LengthUnit)
            raise ConfigError(f"length_unit must be one of: {valid}") from None
        if self.tokenizer not in TOKENIZER_MODES:
            raise ConfigError(f"tokenizer must be one of: {', '.join(TOKENIZER_MODES)}")
        if self.normalization_population not in NORMALIZATION_POPULATIONS:
            raise ConfigError(
                "normalization_population must be one of: "
                + ", ".join(NORMALIZATION_POPULATIONS)
            )
        if self.discipline_text not in DISCIPLINE_TEXT_MODES:
            raise ConfigError(
                "discipline_text must be one of: " + ", ".join(DISCIPLINE_TEXT_MODES)
            )
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.stub_embedding_dim < 1:
            raise ConfigError("stub_embedding_dim must be >= 1")
        if require_backends and not self.offline:
            missing = [role for role in ("reward", "chat", "embedding") if role not in self.backends]
            if missing:
                raise ConfigError(
                    f"missing backend config for role(s): {', '.join(missing)} "
                    "(or set offline: true)"
                )

    @classmethod
    def from_file(cls, path: str | Path) -> "PipelineConfig":
        """Load and validate a YAML/JSON config file.

        The three stage keep fractions must be present explicitly; other
        fields fall back to defaults. Unknown keys are rejected.
        """
        try:
            raw = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse config file {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"config file {path} must hold a mapping")

        for name in _REQUIRED_CONFIG_FIELDS:
            if name not in raw:
                raise ConfigError(f"missing config field '{name}'")

        known = {
            "stage1_keep", "stage2_keep", "stage3_keep", "k", "max_iter",
            "length_unit", "tokenizer", "normalization_population",
            "discipline_text", "seed", "offline", "stub_embedding_dim",
            "workers", "backends", "cache_dir", "run_dir",
        }
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config field(s): {', '.join(sorted(unknown))}")

        backends: dict[str, BackendConfig] = {}
        for role, settings in (raw.get("backends") or {}).items():
            if role not in ("reward", "chat", "embedding"):
                raise ConfigError(f"unknown backend role '{role}'")
            if not isinstance(settings, dict) or "endpoint" not in settings or "model_name" not in settings:
                raise ConfigError(f"backend '{role}' needs 'endpoint' and 'model_name'")
            try:
                backends[role] = BackendConfig(**settings)
            except TypeError as exc:
                raise ConfigError(f"backend '{role}': {exc}") from exc

        kwargs = {key: raw[key] for key in known & set(raw) if key != "backends"}
        kwargs["backends"] = backends
        try:
            config = cls(**kwargs)
            config.validate(require_backends=not raw.get("offline", False))
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc
        return config

    def snapshot(self) -> dict:
        """Semantic parameters only: everything that can change the output.

        Concurrency width, cache/run paths, and transport limits are
        runtime details and live in the manifest's runtime block instead.
        """
        snap: dict = {
            "stage1_keep": self.stage1_keep,
            "stage2_keep": self.stage2_keep,
            "stage3_keep": self.stage3_keep,
            "k": self.k,
            "max_iter": self.max_iter,
            "length_unit": self.length_unit,
            "tokenizer": self.tokenizer,
            "normalization_population": self.normalization_population,
            "discipline_text": self.discipline_text,
            "seed": self.seed,
            "offline": self.offline,
            "thtb_score_definition": THTB_SCORE_DEFINITION,
        }
        if self.offline:
            snap["stub_embedding_dim"] = self.stub_embedding_dim
        else:
            snap["backends"] = {
                role: {"endpoint": cfg.endpoint, "model_name": cfg.model_name}
                for role, cfg in sorted(self.backends.items())
            }
        return snap


def build_backend(config: PipelineConfig) -> ModelBackend:
    """Stub when offline, otherwise the HTTP client, sharing one cache."""
    cache = ResponseCache(config.cache_dir)
    if config.offline:
        return StubBackend(
            seed=config.seed, embedding_dim=config.stub_embedding_dim, cache=cache
        )
    return HttpBackend(
        reward=config.backends["reward"],
        chat=config.backends["chat"],
        embedding=config.backends["embedding"],
        cache=cache,
    )


# ---------------------------------------------------------------------------
# Stage cuts
# ---------------------------------------------------------------------------

def _cut_top(
    indices: Sequence[int],
    score_of: Callable[[int], float | None],
    keep: float,
    score_name: str,
) -> list[int]:
    """Keep the top max(1, floor(keep * N)) by score, ties to low index."""
    scored = []
    for idx in indices:
        value = score_of(idx)
        if value is None:
            raise PipelineError(f"missing {score_name} for record {idx}")
        scored.append((idx, value))
    n_keep = max(1, math.floor(keep * len(scored)))
    ranked = sorted(scored, key=lambda pair: (-pair[1], pair[0]))
    return sorted(idx for idx, _ in ranked[:n_keep])


def stage1_reward_filter(
    dataset: Dataset, cards: Sequence[ScoreCard], keep: float
) -> list[int]:
    by_index = {card.index: card for card in cards}
    indices = [record.index for record in dataset.records]
    return _cut_top(indices, lambda i: by_index[i].reward, keep, "reward")


def stage2_intrinsic_filter(
    survivors: Sequence[int], cards: Sequence[ScoreCard], keep: float
) -> list[int]:
    by_index = {card.index: card for card in cards}
    return _cut_top(list(survivors), lambda i: by_index[i].intrinsic, keep, "intrinsic score")


def stage3_extrinsic_filter(
    survivors: Sequence[int], cards: Sequence[ScoreCard], keep: float
) -> list[int]:
    by_index = {card.index: card for card in cards}
    return _cut_top(list(survivors), lambda i: by_index[i].extrinsic, keep, "extrinsic score")


# ---------------------------------------------------------------------------
# Dataset-level score
# ---------------------------------------------------------------------------

_THTB_COMPONENTS = ("reward", "bloom_raw", "ic_raw", "irei_raw", "sc")


def thtb_record_scores(cards: Sequence[ScoreCard]) -> list[float]:
    """Per-record (reward + intrinsic + extrinsic) / 3 with every component
    min-max normalized over exactly this card population."""
    if not cards:
        raise PipelineError("cannot score an empty card list")
    for card in cards:
        for name in _THTB_COMPONENTS:
            if getattr(card, name) is None:
                raise PipelineError(f"record {card.index} is missing {name}")
    contexts = {
        name: NormalizationContext.from_values(
            (getattr(card, name) for card in cards), population="thtb-score"
        )
        for name in _THTB_COMPONENTS
    }
    scores = []
    for card in cards:
        norm = {
            name: minmax_normalize(getattr(card, name), contexts[name])
            for name in _THTB_COMPONENTS
        }
        intrinsic = aggregate_intrinsic(norm["bloom_raw"], norm["ic_raw"])
        extrinsic = aggregate_extrinsic(norm["irei_raw"], norm["sc"])
        scores.append((norm["reward"] + intrinsic + extrinsic) / 3.0)
    return scores


def thtb_dataset_score(cards: Sequence[ScoreCard]) -> float:
    """Mean per-record score over a dataset's cards."""
    scores = thtb_record_scores(cards)
    return sum(scores) / len(scores)


# ---------------------------------------------------------------------------
# Annotation passes
# ---------------------------------------------------------------------------

@dataclass
class DisciplineCatalog:
    """Every discipline seen in a population, with description embeddings."""

    names: list[str]
    descriptions: dict[str, str]
    embeddings: dict[str, np.ndarray]


@dataclass
class ClusterBundle:
    """Clustering artifacts for the silhouette population."""

    record_indices: list[int]
    tfidf: TfidfModel
    model: ClusterModel


def _concurrent_map(fn: Callable, items: Iterable, workers: int) -> list:
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _annotate_rewards(
    records: Sequence[InstructionRecord],
    by_index: dict[int, ScoreCard],
    backend: ModelBackend,
    workers: int,
) -> None:
    rewards = _concurrent_map(
        lambda r: backend.score_reward(r.instruction, r.response), records, workers
    )
    for record, reward in zip(records, rewards):
        by_index[record.index].reward = reward


def _annotate_labels(
    records: Sequence[InstructionRecord],
    by_index: dict[int, ScoreCard],
    backend: ModelBackend,
    workers: int,
    instruction_only: bool,
) -> None:
    def classify(record: InstructionRecord):
        levels = backend.classify_bloom(record.instruction, record.response)
        disciplines = backend.classify_disciplines(
            record.instruction, record.response, instruction_only=instruction_only
        )
        return levels, disciplines

    annotations = _concurrent_map(classify, records, workers)
    for record, (levels, disciplines) in zip(records, annotations):
        card = by_index[record.index]
        card.bloom_levels = levels
        card.bloom_raw = bloom_raw(levels)
        card.disciplines = disciplines


def build_discipline_catalog(
    names: Iterable[str], backend: ModelBackend, workers: int
) -> DisciplineCatalog:
    ordered = sorted(set(names))
    descriptions = _concurrent_map(backend.describe_discipline, ordered, workers)
    embeddings = _concurrent_map(backend.embed, descriptions, workers)
    return DisciplineCatalog(
        names=ordered,
        descriptions=dict(zip(ordered, descriptions)),
        embeddings=dict(zip(ordered, embeddings)),
    )


def _compute_intrinsic(
    records: Sequence[InstructionRecord],
    by_index: dict[int, ScoreCard],
    catalog: DisciplineCatalog,
    population: str,
) -> dict[str, NormalizationContext]:
    cards = [by_index[record.index] for record in records]
    ctx_bloom = NormalizationContext.from_values(
        (card.bloom_raw for card in cards), population=population
    )
    ctx_counts = NormalizationContext.from_values(
        (float(len(card.disciplines)) for card in cards), population=population
    )
    for card in cards:
        embeddings = [catalog.embeddings[name] for name in card.disciplines]
        card.ic_raw = interdisciplinary_complexity(embeddings, ctx_counts)
    ctx_ic = NormalizationContext.from_values(
        (card.ic_raw for card in cards), population=population
    )
    for card in cards:
        card.bloom_norm = minmax_normalize(card.bloom_raw, ctx_bloom)
        card.ic_norm = minmax_normalize(card.ic_raw, ctx_ic)
        card.intrinsic = aggregate_intrinsic(card.bloom_norm, card.ic_norm)
    return {"bloom": ctx_bloom, "discipline_count": ctx_counts, "ic": ctx_ic}


def _compute_irei(
    records: Sequence[InstructionRecord],
    by_index: dict[int, ScoreCard],
    unit: LengthUnit,
    population: str,
) -> dict[str, NormalizationContext]:
    measures = {
        record.index: measure_lengths(record.instruction, record.response, unit)
        for record in records
    }
    ctx_len = NormalizationContext.from_values(
        (float(m.combined) for m in measures.values()), population=population
    )
    for record in records:
        card = by_index[record.index]
        card.irei_raw = irei(measures[record.index], ctx_len)
    ctx_irei = NormalizationContext.from_values(
        (by_index[r.index].irei_raw for r in records), population=population
    )
    for record in records:
        card = by_index[record.index]
        card.irei_norm = minmax_normalize(card.irei_raw, ctx_irei)
    return {"combined_length": ctx_len, "irei": ctx_irei}


def _compute_silhouette(
    records: Sequence[InstructionRecord],
    by_index: dict[int, ScoreCard],
    config: PipelineConfig,
    population: str,
) -> tuple[ClusterBundle | None, dict[str, NormalizationContext]]:
    if len(records) < 2:
        for record in records:
            by_index[record.index].sc = 0.0
        bundle = None
    else:
        tfidf = fit_tfidf(
            [f"{r.instruction}\n{r.response}" for r in records], config.tokenizer
        )
        if config.k == "auto":
            k = auto_k(len(records))
        else:
            k = int(config.k)
            if not 2 <= k <= len(records):
                raise PipelineError(
                    f"k={k} out of range for clustering population of {len(records)}"
                )
        model = kmeans(tfidf, k=k, seed=config.seed, max_iter=config.max_iter)
        for record, result in zip(records, silhouette(model, tfidf)):
            by_index[record.index].sc = result.sc
        bundle = ClusterBundle(
            record_indices=[r.index for r in records], tfidf=tfidf, model=model
        )
    ctx_sc = NormalizationContext.from_values(
        (by_index[r.index].sc for r in records), population=population
    )
    for record in records:
        card = by_index[record.index]
        card.sc_norm = minmax_normalize(card.sc, ctx_sc)
        if card.irei_norm is not None:
            card.extrinsic = aggregate_extrinsic(card.irei_norm, card.sc_norm)
    return bundle, {"sc": ctx_sc}


# ---------------------------------------------------------------------------
# Stage reports and the manifest
# ---------------------------------------------------------------------------

@dataclass
class StageReport:
    stage: int
    score_name: str
    population_in: int
    population_out: int
    score_min: float
    score_max: float
    score_mean: float
    score_median: float
    kept: list[int]

    @classmethod
    def build(
        cls, stage: int, score_name: str, scores: Sequence[float], kept: Sequence[int]
    ) -> "StageReport":
        return cls(
            stage=stage,
            score_name=score_name,
            population_in=len(scores),
            population_out=len(kept),
            score_min=float(min(scores)),
            score_max=float(max(scores)),
            score_mean=float(sum(scores) / len(scores)),
            score_median=float(statistics.median(scores)),
            kept=list(kept),
        )

    def to_dict(self) -> dict:
        return {
            "stage": self.stage,
            "score": self.score_name,
            "population_in": self.population_in,
            "population_out": self.population_out,
            "score_min": self.score_min,
            "score_max": self.score_max,
            "score_mean": self.score_mean,
            "score_median": self.score_median,
            "kept": self.kept,
        }


@dataclass
class RunManifest:
    """Everything needed to re-execute and audit a run."""

    status: str
    config: dict
    input_origin: str
    input_records: int
    backend_models: dict[str, str]
    kernel_backend: str
    stages: list[StageReport] = field(default_factory=list)
    normalization: dict = field(default_factory=dict)
    clustering: dict | None = None
    thtb_score: float | None = None
    selected_count: int | None = None
    aborted_stage: str | None = None
    runtime: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "tool": "thtb",
            "version": __version__,
            "status": self.status,
            "aborted_stage": self.aborted_stage,
            "config": self.config,
            "input": {"origin": self.input_origin, "records": self.input_records},
            "backend_models": self.backend_models,
            "kernel_backend": self.kernel_backend,
            "normalization": self.normalization,
            "stages": [report.to_dict() for report in self.stages],
            "clustering": self.clustering,
            "thtb_score": self.thtb_score,
            "thtb_score_definition": THTB_SCORE_DEFINITION,
            "thtb_score_population": "selected",
            "selected_count": self.selected_count,
            "runtime": self.runtime,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), ensure_ascii=False, indent=2) + "\n"


def _context_dict(contexts: dict[str, NormalizationContext]) -> dict:
    return {
        name: {"min": ctx.min, "max": ctx.max, "population": ctx.population}
        for name, ctx in contexts.items()
    }


# ---------------------------------------------------------------------------
# The pipeline
# ---------------------------------------------------------------------------

@dataclass
class PipelineResult:
    selected: Dataset
    manifest: RunManifest
    cards: list[ScoreCard]
    cluster_bundle: ClusterBundle | None = None


def run_pipeline(
    dataset: Dataset,
    config: PipelineConfig,
    backend: ModelBackend | None = None,
) -> PipelineResult:
    """Annotate, filter through all three stages, and write run artifacts.

    On any failure the manifest (with partial progress and the aborted
    stage identifier) is still flushed to the run directory before the
    error propagates.
    """
    config.validate()
    if len(dataset) == 0:
        raise PipelineError("cannot run the pipeline on an empty dataset")
    if backend is None:
        backend = build_backend(config)

    started = time.monotonic()
    cards = [ScoreCard(index=record.index) for record in dataset.records]
    by_index = {card.index: card for card in cards}
    eager = config.normalization_population == "full-dataset"

    manifest = RunManifest(
        status="running",
        config=config.snapshot(),
        input_origin=dataset.origin,
        input_records=len(dataset),
        backend_models=backend.model_names,
        kernel_backend=KERNEL_BACKEND,
    )
    bundle: ClusterBundle | None = None
    stage_name = "stage1"
    try:
        # Stage 1: reward filter over the full dataset.
        _annotate_rewards(dataset.records, by_index, backend, config.workers)
        kept1 = stage1_reward_filter(dataset, cards, config.stage1_keep)
        manifest.stages.append(
            StageReport.build(1, "reward", [card.reward for card in cards], kept1)
        )

        # Stage 2: intrinsic hardness over the survivors (or everything).
        stage_name = "stage2"
        population2 = dataset.records if eager else [dataset.records[i] for i in kept1]
        pop2_label = "full-dataset" if eager else "stage2-entrants"
        _annotate_labels(
            population2, by_index, backend, config.workers,
            instruction_only=config.discipline_text == "instruction",
        )
        catalog = build_discipline_catalog(
            (name for record in population2 for name in by_index[record.index].disciplines),
            backend,
            config.workers,
        )
        contexts = _compute_intrinsic(population2, by_index, catalog, pop2_label)
        manifest.normalization.update(_context_dict(contexts))
        kept2 = stage2_intrinsic_filter(kept1, cards, config.stage2_keep)
        manifest.stages.append(
            StageReport.build(
                2, "intrinsic", [by_index[i].intrinsic for i in kept1], kept2
            )
        )

        # Stage 3: extrinsic hardness; clustering runs on this population.
        stage_name = "stage3"
        population3 = dataset.records if eager else [dataset.records[i] for i in kept2]
        pop3_label = "full-dataset" if eager else "stage3-entrants"
        contexts = _compute_irei(
            population3, by_index, LengthUnit(config.length_unit), pop3_label
        )
        manifest.normalization.update(_context_dict(contexts))
        bundle, sc_contexts = _compute_silhouette(population3, by_index, config, pop3_label)
        manifest.normalization.update(_context_dict(sc_contexts))
        if bundle is not None:
            manifest.clustering = {
                "population": pop3_label,
                "records": len(bundle.record_indices),
                "k": bundle.model.k,
                "seed": bundle.model.seed,
                "iterations": bundle.model.iterations_run,
                "inertia": bundle.model.inertia,
            }
        kept3 = stage3_extrinsic_filter(kept2, cards, config.stage3_keep)
        manifest.stages.append(
            StageReport.build(
                3, "extrinsic", [by_index[i].extrinsic for i in kept2], kept3
            )
        )

        # Finalize: survival depth, per-record and dataset-level scores.
        stage_name = "finalize"
        survived1, survived2, survived3 = set(kept1), set(kept2), set(kept3)
        for card in cards:
            if card.index in survived3:
                card.selected_stage = 3
            elif card.index in survived2:
                card.selected_stage = 2
            elif card.index in survived1:
                card.selected_stage = 1
            else:
                card.selected_stage = 0
        selected_cards = [by_index[i] for i in kept3]
        for card, score in zip(selected_cards, thtb_record_scores(selected_cards)):
            card.thtb = score
        manifest.thtb_score = thtb_dataset_score(selected_cards)
        manifest.selected_count = len(kept3)
        manifest.status = "complete"

        selected = Dataset(
            records=[dataset.records[i] for i in kept3], origin=dataset.origin
        )
        _finish_runtime(manifest, backend, config, started)
        if config.run_dir:
            _write_artifacts(Path(config.run_dir), dataset, cards, kept3, manifest, bundle)
        return PipelineResult(
            selected=selected, manifest=manifest, cards=cards, cluster_bundle=bundle
        )
    except BaseException:
        manifest.status = "aborted"
        manifest.aborted_stage = stage_name
        _finish_runtime(manifest, backend, config, started)
        if config.run_dir:
            _write_artifacts_best_effort(Path(config.run_dir), dataset, cards, manifest, bundle)
        raise


def _finish_runtime(
    manifest: RunManifest, backend: ModelBackend, config: PipelineConfig, started: float
) -> None:
    manifest.runtime = {
        "created_at": datetime.now(timezone.utc).isoformat(),
        "wall_clock_seconds": round(time.monotonic() - started, 3),
        "workers": config.workers,
        "cache": {"hits": backend.cache.hits, "misses": backend.cache.misses},
        "cache_dir": config.cache_dir,
        "run_dir": config.run_dir,
    }


# ---------------------------------------------------------------------------
# Run-directory artifacts
# ---------------------------------------------------------------------------

def cluster_top_terms(bundle: ClusterBundle, per_cluster: int = 8) -> str:
    """Textual dump of the heaviest centroid terms per cluster."""
    terms = bundle.tfidf.terms
    counts = np.bincount(bundle.model.assignment, minlength=bundle.model.k)
    lines = []
    for c in range(bundle.model.k):
        weights = bundle.model.centroids[c]
        order = np.argsort(-weights)[:per_cluster]
        top = [terms[i] for i in order if weights[i] > 0]
        lines.append(f"cluster {c:03d} (n={int(counts[c])}): {' '.join(top)}")
    return "\n".join(lines) + "\n"


def _write_cluster_dumps(cluster_dir: Path, bundle: ClusterBundle) -> None:
    cluster_dir.mkdir(parents=True, exist_ok=True)
    vectors = bundle.tfidf.vectors
    np.savez(
        cluster_dir / "tfidf.npz",
        data=vectors.data,
        indices=vectors.indices,
        indptr=vectors.indptr,
        shape=np.asarray(vectors.shape),
    )
    (cluster_dir / "vocabulary.json").write_text(
        json.dumps(bundle.tfidf.terms, ensure_ascii=False), encoding="utf-8"
    )
    model = {
        "k": bundle.model.k,
        "seed": bundle.model.seed,
        "iterations_run": bundle.model.iterations_run,
        "inertia": bundle.model.inertia,
        "inertia_history": bundle.model.inertia_history,
        "record_indices": bundle.record_indices,
        "assignment": [int(label) for label in bundle.model.assignment],
    }
    (cluster_dir / "model.json").write_text(
        json.dumps(model, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )
    (cluster_dir / "top_terms.txt").write_text(
        cluster_top_terms(bundle), encoding="utf-8"
    )


def _write_artifacts(
    run_dir: Path,
    dataset: Dataset,
    cards: list[ScoreCard],
    kept: list[int],
    manifest: RunManifest,
    bundle: ClusterBundle | None,
) -> None:
    from .reporting import render_report

    run_dir.mkdir(parents=True, exist_ok=True)
    write_dataset(run_dir / "selected", dataset, kept)
    write_scored(run_dir / "scored_full", dataset, cards)
    (run_dir / "manifest").write_text(manifest.to_json(), encoding="utf-8")
    top_terms = cluster_top_terms(bundle) if bundle is not None else None
    (run_dir / "report.txt").write_text(
        render_report(manifest.to_json_dict(), cards, top_terms), encoding="utf-8"
    )
    if bundle is not None:
        _write_cluster_dumps(run_dir / "clusters", bundle)


def _write_artifacts_best_effort(
    run_dir: Path,
    dataset: Dataset,
    cards: list[ScoreCard],
    manifest: RunManifest,
    bundle: ClusterBundle | None,
) -> None:
    """Abort path: flush whatever is useful, never raise."""
    from .reporting import render_report

    try:
        run_dir.mkdir(parents=True, exist_ok=True)
        (run_dir / "manifest").write_text(manifest.to_json(), encoding="utf-8")
        write_scored(run_dir / "scored_full", dataset, cards)
        top_terms = cluster_top_terms(bundle) if bundle is not None else None
        (run_dir / "report.txt").write_text(
            render_report(manifest.to_json_dict(), cards, top_terms), encoding="utf-8"
        )
    except Exception:
        logger.exception("failed to flush partial run artifacts to %s", run_dir)


# ---------------------------------------------------------------------------
# Selection-free scoring (the `score` command and dataset comparisons)
# ---------------------------------------------------------------------------

SCORE_METRICS = ("reward", "bloom", "ic", "irei", "sc")


def score_dataset(
    dataset: Dataset,
    config: PipelineConfig,
    backend: ModelBackend | None = None,
    metrics: Sequence[str] = SCORE_METRICS,
) -> list[ScoreCard]:
    """Compute the requested metrics for every record, no selection.

    All normalization contexts are taken over the whole dataset. When all
    five raw components are present, per-record and aggregate scores are
    filled in too.
    """
    unknown = [m for m in metrics if m not in SCORE_METRICS]
    if unknown:
        raise ConfigError(
            f"unknown metric(s): {', '.join(unknown)}; valid: {', '.join(SCORE_METRICS)}"
        )
    needs_backend = any(m in metrics for m in ("reward", "bloom", "ic"))
    config.validate(require_backends=needs_backend)
    if len(dataset) == 0:
        raise PipelineError("cannot score an empty dataset")
    if backend is None and needs_backend:
        backend = build_backend(config)

    cards = [ScoreCard(index=record.index) for record in dataset.records]
    by_index = {card.index: card for card in cards}
    records = dataset.records

    if "reward" in metrics:
        _annotate_rewards(records, by_index, backend, config.workers)
    if "bloom" in metrics or "ic" in metrics:
        _annotate_labels(
            records, by_index, backend, config.workers,
            instruction_only=config.discipline_text == "instruction",
        )
    if "ic" in metrics:
        catalog = build_discipline_catalog(
            (name for card in cards for name in card.disciplines),
            backend,
            config.workers,
        )
        _compute_intrinsic(records, by_index, catalog, "full-dataset")
        if "bloom" not in metrics:
            for card in cards:
                card.bloom_levels = None
                card.bloom_raw = None
                card.bloom_norm = None
                card.intrinsic = None
    elif "bloom" in metrics:
        ctx_bloom = NormalizationContext.from_values(
            (card.bloom_raw for card in cards), population="full-dataset"
        )
        for card in cards:
            card.bloom_norm = minmax_normalize(card.bloom_raw, ctx_bloom)
            card.disciplines = None
    if "irei" in metrics:
        _compute_irei(records, by_index, LengthUnit(config.length_unit), "full-dataset")
    if "sc" in metrics:
        _compute_silhouette(records, by_index, config, "full-dataset")

    if all(getattr(card, name) is not None for card in cards for name in _THTB_COMPONENTS):
        for card, score in zip(cards, thtb_record_scores(cards)):
            card.thtb = score
    return cards
