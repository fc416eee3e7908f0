"""Human-readable run reports and single-record inspection."""

from __future__ import annotations

import json
from collections import Counter
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import sparse

from .errors import DatasetFormatError
from .metrics import ScoreCard

_STAGE_COUNT = 3

_DIST_FIELDS = (
    ("reward", "reward"),
    ("bloom_raw", "bloom (raw)"),
    ("ic_raw", "interdisciplinary complexity (raw)"),
    ("irei_raw", "expansion index (raw)"),
    ("sc", "silhouette"),
    ("intrinsic", "intrinsic"),
    ("extrinsic", "extrinsic"),
)


def _quartiles(values: list[float]) -> str:
    q0, q1, q2, q3, q4 = np.percentile(np.asarray(values, dtype=np.float64), [0, 25, 50, 75, 100])
    return (
        f"min={q0:.4f}  q1={q1:.4f}  median={q2:.4f}  q3={q3:.4f}  max={q4:.4f}"
    )


def _histogram_lines(counts: Counter, total_width: int = 40) -> list[str]:
    if not counts:
        return ["  (none)"]
    peak = max(counts.values())
    lines = []
    for name, count in counts.most_common():
        bar = "#" * max(1, round(total_width * count / peak))
        lines.append(f"  {name:<24} {count:>7}  {bar}")
    return lines


def render_report(
    manifest: dict, cards: Sequence[ScoreCard], cluster_top_terms: str | None = None
) -> str:
    """Per-stage survival, score distributions, histograms, and the dataset score."""
    out: list[str] = []
    out.append("THTB selection run report")
    out.append("=" * 60)
    out.append(f"status:         {manifest.get('status', 'unknown')}")
    if manifest.get("aborted_stage"):
        out.append(f"aborted at:     {manifest['aborted_stage']}")
    inp = manifest.get("input", {})
    out.append(f"input:          {inp.get('origin', '?')} ({inp.get('records', '?')} records)")
    out.append(f"tool version:   {manifest.get('version', '?')}")
    out.append(f"kernel backend: {manifest.get('kernel_backend', '?')}")
    models = manifest.get("backend_models", {})
    if models:
        out.append("backends:       " + ", ".join(f"{k}={v}" for k, v in sorted(models.items())))
    out.append("")

    out.append("Stages")
    out.append("-" * 60)
    out.append(f"{'stage':<7}{'score':<12}{'in':>9}{'out':>9}  spread")
    reports = {entry["stage"]: entry for entry in manifest.get("stages", [])}
    for stage in range(1, _STAGE_COUNT + 1):
        entry = reports.get(stage)
        if entry is None:
            out.append(f"{stage:<7}{'-':<12}{'-':>9}{'-':>9}  not reached")
            continue
        spread = (
            f"min={entry['score_min']:.4f} mean={entry['score_mean']:.4f} "
            f"median={entry['score_median']:.4f} max={entry['score_max']:.4f}"
        )
        out.append(
            f"{stage:<7}{entry['score']:<12}{entry['population_in']:>9}"
            f"{entry['population_out']:>9}  {spread}"
        )
    out.append("")

    out.append("Score distributions")
    out.append("-" * 60)
    for attr, label in _DIST_FIELDS:
        values = [getattr(card, attr) for card in cards if getattr(card, attr) is not None]
        if values:
            out.append(f"{label:<36} {_quartiles(values)}  (n={len(values)})")
    out.append("")

    bloom_counts: Counter = Counter()
    for card in cards:
        if card.bloom_levels:
            bloom_counts.update(level.label for level in card.bloom_levels)
    out.append("Cognitive-level histogram")
    out.append("-" * 60)
    out.extend(_histogram_lines(bloom_counts))
    out.append("")

    discipline_counts: Counter = Counter()
    for card in cards:
        if card.disciplines:
            discipline_counts.update(card.disciplines)
    out.append("Discipline histogram (top 20)")
    out.append("-" * 60)
    top = Counter(dict(discipline_counts.most_common(20)))
    out.extend(_histogram_lines(top))
    out.append("")

    if cluster_top_terms:
        out.append("Cluster top terms")
        out.append("-" * 60)
        out.append(cluster_top_terms.rstrip("\n"))
        out.append("")

    score = manifest.get("thtb_score")
    population = manifest.get("thtb_score_population", "selected")
    if score is not None:
        out.append(f"dataset THTB score ({population}): {score:.4f}")
    else:
        out.append("dataset THTB score: not computed")
    out.append("")
    return "\n".join(out)


# ---------------------------------------------------------------------------
# Run-directory access
# ---------------------------------------------------------------------------

def load_manifest(run_dir: str | Path) -> dict:
    path = Path(run_dir) / "manifest"
    if not path.exists():
        raise DatasetFormatError(f"no manifest in {run_dir}")
    try:
        manifest = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DatasetFormatError(f"corrupt manifest in {run_dir}: {exc}") from exc
    if not isinstance(manifest, dict):
        raise DatasetFormatError(f"corrupt manifest in {run_dir}: not an object")
    return manifest


def _load_cluster_dumps(run_dir: Path):
    cluster_dir = run_dir / "clusters"
    needed = ("tfidf.npz", "vocabulary.json", "model.json")
    if not all((cluster_dir / name).exists() for name in needed):
        return None
    with np.load(cluster_dir / "tfidf.npz") as bundle:
        vectors = sparse.csr_matrix(
            (bundle["data"], bundle["indices"], bundle["indptr"]),
            shape=tuple(bundle["shape"]),
        )
    terms = json.loads((cluster_dir / "vocabulary.json").read_text(encoding="utf-8"))
    model = json.loads((cluster_dir / "model.json").read_text(encoding="utf-8"))
    return vectors, terms, model


def inspect_record(run_dir: str | Path, index: int, neighbors: int = 5, terms: int = 8) -> str:
    """Full ScoreCard for one record plus its TF-IDF terms and neighbors."""
    from .records import load_scored

    run_dir = Path(run_dir)
    manifest = load_manifest(run_dir)
    scored_path = run_dir / "scored_full"
    if not scored_path.exists():
        raise DatasetFormatError(f"no scored_full in {run_dir}")
    dataset, cards = load_scored(scored_path)
    if not 0 <= index < len(dataset):
        raise IndexError(f"record index {index} out of range (0..{len(dataset) - 1})")

    record = dataset.records[index]
    card = cards[index]
    out = [f"record {index} (source id: {record.source_id or '-'})"]
    preview = " ".join(record.instruction.split())
    out.append(f"instruction: {preview[:160]}{'...' if len(preview) > 160 else ''}")
    out.append("")
    for name in ScoreCard.SCORE_FIELDS:
        value = getattr(card, name)
        if name == "bloom_levels" and value is not None:
            value = ", ".join(level.label for level in sorted(value))
        elif name == "disciplines" and value is not None:
            value = ", ".join(value)
        elif isinstance(value, float):
            value = f"{value:.6f}"
        out.append(f"  {name:<16} {value if value is not None else '-'}")

    dumps = _load_cluster_dumps(run_dir)
    if dumps is not None:
        vectors, term_list, model = dumps
        positions = {rec_idx: row for row, rec_idx in enumerate(model["record_indices"])}
        row = positions.get(index)
        if row is not None:
            out.append("")
            vec = vectors.getrow(row)
            order = np.argsort(-vec.data)[:terms]
            pairs = [f"{term_list[vec.indices[i]]}={vec.data[i]:.4f}" for i in order]
            out.append("top TF-IDF terms: " + (" ".join(pairs) if pairs else "(empty vector)"))

            assignment = np.asarray(model["assignment"])
            own = assignment[row]
            mates = [r for r in np.flatnonzero(assignment == own) if r != row]
            out.append(f"cluster: {own} ({len(mates) + 1} members)")
            if mates:
                base = vec.toarray().ravel()
                dists = []
                for mate in mates:
                    other = vectors.getrow(mate).toarray().ravel()
                    dists.append((float(np.linalg.norm(base - other)), mate))
                dists.sort()
                shown = [
                    f"record {model['record_indices'][mate]} (d={dist:.4f})"
                    for dist, mate in dists[:neighbors]
                ]
                out.append("nearest in cluster: " + "; ".join(shown))
        else:
            out.append("")
            out.append("record was not part of the clustering population")
    out.append("")
    return "\n".join(out)
