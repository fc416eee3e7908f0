"""Line-oriented dataset reading and scored-output writing.

One JSON object per line, UTF-8. Input records carry ``instruction``,
``response``, and an optional ``id``; scored output appends every
ScoreCard field. Record identity is the zero-based load position, which
makes duplicates legitimate distinct records.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .errors import DatasetFormatError
from .metrics import ScoreCard

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class InstructionRecord:
    """One instruction/response pair; ``index`` is its stable identity."""

    index: int
    instruction: str
    response: str
    source_id: str | None = None


@dataclass
class Dataset:
    """Ordered records plus provenance; order always equals load order."""

    records: list[InstructionRecord]
    origin: str
    skipped: int = 0  # lenient-mode invalid line tally

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)


def _parse_line(line: str, line_no: int) -> tuple[str, str, str | None]:
    try:
        payload = json.loads(line)
    except json.JSONDecodeError as exc:
        raise DatasetFormatError(f"line {line_no}: invalid JSON ({exc.msg})") from exc
    if not isinstance(payload, dict):
        raise DatasetFormatError(f"line {line_no}: expected a JSON object")
    for key in ("instruction", "response"):
        if key not in payload:
            raise DatasetFormatError(f"line {line_no}: missing field '{key}'")
        if not isinstance(payload[key], str):
            raise DatasetFormatError(f"line {line_no}: field '{key}' must be a string")
        if not payload[key].strip():
            raise DatasetFormatError(f"line {line_no}: field '{key}' is empty")
    source_id = payload.get("id")
    if source_id is not None and not isinstance(source_id, str):
        raise DatasetFormatError(f"line {line_no}: field 'id' must be a string")
    return payload["instruction"], payload["response"], source_id


def load_dataset(path: str | Path, strict: bool = True) -> Dataset:
    """Load a dataset file; indices are assigned 0..N-1 in file order.

    In strict mode any invalid line aborts with its line number. In
    lenient mode invalid lines are skipped and tallied on the returned
    ``Dataset.skipped``.
    """
    path = Path(path)
    records: list[InstructionRecord] = []
    skipped = 0
    with path.open("r", encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                if strict:
                    raise DatasetFormatError(f"line {line_no}: blank line")
                skipped += 1
                continue
            try:
                instruction, response, source_id = _parse_line(line, line_no)
            except DatasetFormatError as exc:
                if strict:
                    raise
                logger.debug("skipping %s", exc)
                skipped += 1
                continue
            records.append(
                InstructionRecord(
                    index=len(records),
                    instruction=instruction,
                    response=response,
                    source_id=source_id,
                )
            )
    if skipped:
        logger.warning("skipped %d invalid line(s) while loading %s", skipped, path)
    return Dataset(records=records, origin=str(path), skipped=skipped)


def _record_json_dict(record: InstructionRecord) -> dict:
    out: dict = {"instruction": record.instruction, "response": record.response}
    if record.source_id is not None:
        out["id"] = record.source_id
    return out


def _dump_line(payload: dict) -> str:
    return json.dumps(payload, ensure_ascii=False, allow_nan=False)


def write_dataset(path: str | Path, dataset: Dataset, indices: Sequence[int] | None = None) -> int:
    """Write records (optionally a subset by index) in dataset format."""
    keep = set(indices) if indices is not None else None
    count = 0
    with Path(path).open("w", encoding="utf-8") as handle:
        for record in dataset.records:
            if keep is not None and record.index not in keep:
                continue
            handle.write(_dump_line(_record_json_dict(record)) + "\n")
            count += 1
    return count


def write_scored(path: str | Path, dataset: Dataset, cards: Sequence[ScoreCard]) -> int:
    """Write one line per record with its ScoreCard fields appended.

    Cards must align one-to-one with the dataset records by index.
    """
    by_index: dict[int, ScoreCard] = {}
    for card in cards:
        if card.index in by_index:
            raise DatasetFormatError(f"duplicate card for index {card.index}")
        by_index[card.index] = card
    for record in dataset.records:
        if record.index not in by_index:
            raise DatasetFormatError(f"missing card for index {record.index}")
    extra = set(by_index) - {record.index for record in dataset.records}
    if extra:
        raise DatasetFormatError(f"cards for unknown indices {sorted(extra)}")

    count = 0
    with Path(path).open("w", encoding="utf-8") as handle:
        for record in dataset.records:
            payload = _record_json_dict(record)
            payload.update(by_index[record.index].to_json_dict())
            handle.write(_dump_line(payload) + "\n")
            count += 1
    return count


def load_scored(path: str | Path) -> tuple[Dataset, list[ScoreCard]]:
    """Read a scored file back into records plus their ScoreCards."""
    path = Path(path)
    records: list[InstructionRecord] = []
    cards: list[ScoreCard] = []
    with path.open("r", encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                raise DatasetFormatError(f"line {line_no}: blank line in scored file")
            instruction, response, source_id = _parse_line(line, line_no)
            payload = json.loads(line)
            index = len(records)
            records.append(
                InstructionRecord(
                    index=index, instruction=instruction,
                    response=response, source_id=source_id,
                )
            )
            try:
                cards.append(ScoreCard.from_json_dict(index, payload))
            except ValueError as exc:
                raise DatasetFormatError(f"line {line_no}: {exc}") from exc
    return Dataset(records=records, origin=str(path)), cards
