"""Readers and writers for every pipeline artifact.

All stage outputs are plain TSV/CSV/JSON so they stay inspectable and
diffable. Text artifacts carry a provenance comment header (tool version,
config hash, seed — never timestamps, outputs must be byte-stable); JSON
artifacts embed the same data under a "provenance" key. Labels may not
contain tabs or newlines; writers reject them.
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Optional, Sequence

from . import __version__
from .dataset import LabelPair, LanguageStats
from .dump_ingest import EntityClass, EntityRecord
from .errors import DataError
from .evaluation import ALL_SCOPE, EvalReport, GroundTruthEntry, ScoreReport
from .matcher import BestMatchSet
from .scorers import ScoredPair

logger = logging.getLogger(__name__)

DATASET_COLUMNS = ("entity_id", "lang_1", "lang_2", "label_1", "label_2", "is_main_1", "is_main_2")
SCORED_COLUMNS = ("entity_id", "lang_1", "lang_2", "label_1", "label_2", "scorer_id", "score")
MATCH_COLUMNS = ("entity_id", "lang_1", "lang_2", "label_1", "label_2", "scorer_id", "selected")
TRUTH_COLUMNS = ("entity_id", "lang_1", "lang_2", "label_1", "label_2", "best")
LANGID_COLUMNS = ("label", "lang", "prob")


@dataclass
class Provenance:
    """Run metadata stamped into every artifact."""

    config_hash: str = ""
    seed: Optional[int] = None
    tool_version: str = __version__

    def comment_lines(self) -> list[str]:
        lines = [f"# tool: label-bridge {self.tool_version}"]
        if self.config_hash:
            lines.append(f"# config_hash: {self.config_hash}")
        if self.seed is not None:
            lines.append(f"# seed: {self.seed}")
        return lines

    def as_dict(self) -> dict:
        out = {"tool": f"label-bridge {self.tool_version}"}
        if self.config_hash:
            out["config_hash"] = self.config_hash
        if self.seed is not None:
            out["seed"] = self.seed
        return out


def _check_label(label: str) -> str:
    if "\t" in label or "\n" in label or "\r" in label:
        raise DataError(f"label {label!r} contains a tab or newline")
    return label


def _open_rows(path: str | Path, expected_columns: Sequence[str]) -> Iterator[tuple[int, list[str]]]:
    """Yield (line_number, fields) skipping comments and the header row."""
    header = "\t".join(expected_columns)
    with open(path, encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            if line == header:
                continue
            fields = line.split("\t")
            if len(fields) != len(expected_columns):
                raise DataError(
                    f"{path}:{line_number}: expected {len(expected_columns)} fields, "
                    f"got {len(fields)}"
                )
            yield line_number, fields


def _write_table(
    path: str | Path,
    columns: Sequence[str],
    rows: Iterable[Sequence[str]],
    provenance: Optional[Provenance],
) -> int:
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if provenance is not None:
            for line in provenance.comment_lines():
                fh.write(line + "\n")
        fh.write("\t".join(columns) + "\n")
        for row in rows:
            fh.write("\t".join(row) + "\n")
            count += 1
    return count


def _flag(value: bool) -> str:
    return "1" if value else "0"


def _parse_flag(path, line_number: int, text: str) -> bool:
    if text not in ("0", "1"):
        raise DataError(f"{path}:{line_number}: flag must be 0 or 1, got {text!r}")
    return text == "1"


def _parse_pair(path, line_number: int, fields: Sequence[str], mains: tuple[bool, bool] = (False, False)) -> LabelPair:
    try:
        return LabelPair(
            fields[0], fields[1], fields[2], fields[3], fields[4], mains[0], mains[1]
        )
    except ValueError as exc:
        raise DataError(f"{path}:{line_number}: {exc}") from exc


# --- pair dataset -----------------------------------------------------------

def write_dataset(
    path: str | Path, pairs: Iterable[LabelPair], provenance: Optional[Provenance] = None
) -> int:
    rows = (
        (
            p.entity_id,
            p.lang_1,
            p.lang_2,
            _check_label(p.label_1),
            _check_label(p.label_2),
            _flag(p.is_main_1),
            _flag(p.is_main_2),
        )
        for p in pairs
    )
    return _write_table(path, DATASET_COLUMNS, rows, provenance)


def read_dataset(path: str | Path) -> Iterator[LabelPair]:
    for line_number, fields in _open_rows(path, DATASET_COLUMNS):
        mains = (
            _parse_flag(path, line_number, fields[5]),
            _parse_flag(path, line_number, fields[6]),
        )
        yield _parse_pair(path, line_number, fields[:5], mains)


# --- scored pairs -----------------------------------------------------------

def write_scored(
    path: str | Path, scored: Iterable[ScoredPair], provenance: Optional[Provenance] = None
) -> int:
    ordered = sorted(scored, key=lambda sp: (sp.pair.key, sp.scorer_id))
    rows = (
        (
            sp.pair.entity_id,
            sp.pair.lang_1,
            sp.pair.lang_2,
            _check_label(sp.pair.label_1),
            _check_label(sp.pair.label_2),
            sp.scorer_id,
            f"{sp.score:.6f}",
        )
        for sp in ordered
    )
    return _write_table(path, SCORED_COLUMNS, rows, provenance)


def read_scored(path: str | Path) -> Iterator[ScoredPair]:
    for line_number, fields in _open_rows(path, SCORED_COLUMNS):
        pair = _parse_pair(path, line_number, fields[:5])
        try:
            yield ScoredPair(pair, fields[5], float(fields[6]))
        except ValueError as exc:
            raise DataError(f"{path}:{line_number}: {exc}") from exc


# --- best-match selections ---------------------------------------------------

def write_matches(
    path: str | Path, matches: Iterable[BestMatchSet], provenance: Optional[Provenance] = None
) -> int:
    rows = []
    for match in matches:
        for pair, selected in [(p, True) for p in match.selected] + [
            (p, False) for p in match.rejected
        ]:
            rows.append(
                (
                    pair.entity_id,
                    pair.lang_1,
                    pair.lang_2,
                    _check_label(pair.label_1),
                    _check_label(pair.label_2),
                    match.method_id,
                    _flag(selected),
                )
            )
    rows.sort()
    return _write_table(path, MATCH_COLUMNS, rows, provenance)


def read_matches(path: str | Path) -> list[BestMatchSet]:
    """Rebuild per-(group, method) selections from the flat file."""
    by_group: dict[tuple, BestMatchSet] = {}
    for line_number, fields in _open_rows(path, MATCH_COLUMNS):
        pair = _parse_pair(path, line_number, fields[:5])
        method_id = fields[5]
        selected = _parse_flag(path, line_number, fields[6])
        group = by_group.setdefault(
            (pair.group_key, method_id), BestMatchSet(pair.group_key, method_id)
        )
        (group.selected if selected else group.rejected).append(pair)
    return [by_group[key] for key in sorted(by_group)]


# --- ground truth -----------------------------------------------------------

def write_truth(
    path: str | Path, entries: Iterable[GroundTruthEntry], provenance: Optional[Provenance] = None
) -> int:
    rows = (
        (
            e.pair.entity_id,
            e.pair.lang_1,
            e.pair.lang_2,
            _check_label(e.pair.label_1),
            _check_label(e.pair.label_2),
            _flag(e.best),
        )
        for e in entries
    )
    return _write_table(path, TRUTH_COLUMNS, rows, provenance)


def read_truth(path: str | Path) -> list[GroundTruthEntry]:
    entries = []
    for line_number, fields in _open_rows(path, TRUTH_COLUMNS):
        pair = _parse_pair(path, line_number, fields[:5])
        entries.append(GroundTruthEntry(pair, _parse_flag(path, line_number, fields[5])))
    return entries


# --- language-id table -------------------------------------------------------

def write_langid_table(
    path: str | Path,
    rows: Iterable[tuple[str, str, float]],
    provenance: Optional[Provenance] = None,
) -> int:
    formatted = (
        (_check_label(label), lang, f"{prob:.6f}") for label, lang, prob in rows
    )
    return _write_table(path, LANGID_COLUMNS, formatted, provenance)


# --- entity records ----------------------------------------------------------

def write_entity_records(path: str | Path, records: Iterable[EntityRecord]) -> int:
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for record in records:
            doc = {
                "id": record.id,
                "entity_class": record.entity_class.value,
                "labels": record.labels,
                "aliases": record.aliases,
            }
            fh.write(json.dumps(doc, ensure_ascii=False, sort_keys=True) + "\n")
            count += 1
    return count


def read_entity_records(path: str | Path) -> Iterator[EntityRecord]:
    with open(path, encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                doc = json.loads(line)
                yield EntityRecord(
                    id=doc["id"],
                    entity_class=EntityClass(doc["entity_class"]),
                    labels=doc.get("labels", {}),
                    aliases=doc.get("aliases", {}),
                )
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise DataError(f"{path}:{line_number}: {exc}") from exc


# --- language ranking --------------------------------------------------------

def write_language_selection(
    path: str | Path,
    stats: Sequence[LanguageStats],
    selected: Sequence[str],
    provenance: Optional[Provenance] = None,
) -> None:
    doc = {
        "provenance": provenance.as_dict() if provenance else {},
        "selected": list(selected),
        "stats": [
            {
                "language": s.language,
                "main_label_coverage": s.main_label_coverage,
                "alias_presence": s.alias_presence,
                "mean_alias_count": s.mean_alias_count,
                "rank_main": s.rank_main,
                "rank_presence": s.rank_presence,
                "rank_mean": s.rank_mean,
                "avg_rank": s.avg_rank,
            }
            for s in stats
        ],
    }
    Path(path).write_text(
        json.dumps(doc, ensure_ascii=False, sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )


def read_language_selection(path: str | Path) -> list[str]:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        selected = doc["selected"]
    except (json.JSONDecodeError, KeyError) as exc:
        raise DataError(f"{path}: {exc}") from exc
    if not isinstance(selected, list) or not all(isinstance(s, str) for s in selected):
        raise DataError(f"{path}: 'selected' must be a list of language codes")
    return selected


# --- evaluation outputs ------------------------------------------------------

def write_eval_reports(
    path: str | Path, reports: Sequence[EvalReport], provenance: Optional[Provenance] = None
) -> None:
    doc = {
        "provenance": provenance.as_dict() if provenance else {},
        "reports": [
            {
                "method": r.method_id,
                "scope": r.scope,
                "tp": r.counts.tp,
                "tn": r.counts.tn,
                "fp": r.counts.fp,
                "fn": r.counts.fn,
                "support": r.support,
                "accuracy": r.accuracy,
                "precision": r.precision,
                "recall": r.recall,
                "f1": r.f1,
            }
            for r in reports
        ],
    }
    Path(path).write_text(
        json.dumps(doc, ensure_ascii=False, sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )


def format_eval_grid(reports: Sequence[EvalReport]) -> str:
    """Aligned accuracy grid: one row per method, one column per scope."""
    scopes = [ALL_SCOPE] + sorted({r.scope for r in reports} - {ALL_SCOPE})
    methods = sorted({r.method_id for r in reports})
    cells = {(r.method_id, r.scope): r.accuracy for r in reports}
    width = max([len(m) for m in methods] + [6])
    header = " ".join([f"{'method':<{width}}"] + [f"{s:>7}" for s in scopes])
    lines = [header]
    for method in methods:
        row = [f"{method:<{width}}"]
        for scope in scopes:
            value = cells.get((method, scope))
            row.append(f"{value:>7.3f}" if value is not None else f"{'-':>7}")
        lines.append(" ".join(row))
    return "\n".join(lines)


def write_histograms_csv(
    path: str | Path, reports: Sequence[ScoreReport], provenance: Optional[Provenance] = None
) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if provenance is not None:
            for line in provenance.comment_lines():
                fh.write(line + "\n")
        fh.write("scorer_id,bin_low,bin_high,density\n")
        for report in reports:
            for i in range(len(report.density)):
                fh.write(
                    f"{report.scorer_id},{report.bin_edges[i]:.6f},"
                    f"{report.bin_edges[i + 1]:.6f},{report.density[i]:.6f}\n"
                )


def write_language_means_csv(
    path: str | Path, reports: Sequence[ScoreReport], provenance: Optional[Provenance] = None
) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if provenance is not None:
            for line in provenance.comment_lines():
                fh.write(line + "\n")
        fh.write("scorer_id,language,mean_score\n")
        for report in reports:
            for language, mean in report.language_means.items():
                fh.write(f"{report.scorer_id},{language},{mean:.6f}\n")
