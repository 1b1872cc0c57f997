"""Streaming extraction of entity records from Wikidata-style JSON dumps.

The dump format is one JSON entity document per line, optionally wrapped in
array brackets with trailing commas, optionally gzip-compressed. Extraction
is two passes because classification needs the full subclass graph:

  pass 1  scan every line, collect subclass-of (P279) edges, build the
          subclass closures of the configured root classes;
  pass 2  scan again, emit an :class:`EntityRecord` for every entity whose
          instance-of (P31) target falls inside a root's closure.

Memory stays proportional to the class graph plus one line, never to the
dump. Entities that only have P279 edges into a root are classes, not
instances, and are not emitted.
"""

import enum
import gzip
import json
import logging
import re
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator, Optional, Sequence

from .errors import DataError

logger = logging.getLogger(__name__)

ENTITY_ID_RE = re.compile(r"^Q[0-9]+$")

#: Default root classes: person, organisation, geographic location. Order is
#: the classification priority for entities that fall into several closures.
DEFAULT_ROOTS = ("Q215627", "Q43229", "Q2221906")


class EntityClass(enum.Enum):
    PERSON = "Person"
    ORGANISATION = "Organisation"
    PLACE = "Place"


@dataclass
class RawEntity:
    """One entity document as it appears in the dump, lightly cleaned.

    Language codes are lowercased and alias lists are deduplicated after NFC
    normalization; label text is otherwise untouched.
    """

    id: str
    labels: dict[str, str] = field(default_factory=dict)
    aliases: dict[str, list[str]] = field(default_factory=dict)
    p31: list[str] = field(default_factory=list)
    p279: list[str] = field(default_factory=list)


@dataclass
class ParseDiagnostic:
    """A non-fatal problem encountered while streaming a dump."""

    line_number: int
    message: str


@dataclass
class EntityRecord:
    """A classified entity with its per-language main label and aliases."""

    id: str
    entity_class: EntityClass
    labels: dict[str, str] = field(default_factory=dict)
    aliases: dict[str, list[str]] = field(default_factory=dict)

    def label_count(self) -> int:
        return len(self.labels)

    def all_labels(self, language: str) -> list[str]:
        """Main label first, then aliases, for one language."""
        out = []
        if language in self.labels:
            out.append(self.labels[language])
        out.extend(self.aliases.get(language, []))
        return out


def open_dump(path: str | Path) -> IO[str]:
    """Open a dump file as a text stream, transparently handling gzip."""
    path = Path(path)
    if path.suffix == ".gz":
        return gzip.open(path, "rt", encoding="utf-8")
    return open(path, "r", encoding="utf-8")


def parse_entity_line(line: str) -> Optional[RawEntity]:
    """Parse one dump line into a :class:`RawEntity`.

    Returns ``None`` for non-entity lines (array brackets, property
    documents, blank lines). Raises ``json.JSONDecodeError`` on malformed
    JSON so the caller can decide between diagnostics and aborting.
    """
    stripped = line.strip()
    if not stripped or stripped in ("[", "]"):
        return None
    if stripped.endswith(","):
        stripped = stripped[:-1]
    doc = json.loads(stripped)
    if not isinstance(doc, dict):
        return None
    entity_id = doc.get("id")
    if not isinstance(entity_id, str) or not ENTITY_ID_RE.match(entity_id):
        return None

    labels: dict[str, str] = {}
    for lang, entry in _dict_items(doc.get("labels")):
        value = entry.get("value") if isinstance(entry, dict) else None
        if isinstance(value, str):
            labels[lang.lower()] = value

    aliases: dict[str, list[str]] = {}
    for lang, entries in _dict_items(doc.get("aliases")):
        if not isinstance(entries, list):
            continue
        seen: set[str] = set()
        cleaned: list[str] = []
        for entry in entries:
            value = entry.get("value") if isinstance(entry, dict) else None
            if not isinstance(value, str):
                continue
            key = unicodedata.normalize("NFC", value)
            if key not in seen:
                seen.add(key)
                cleaned.append(value)
        if cleaned:
            aliases[lang.lower()] = cleaned

    return RawEntity(
        id=entity_id,
        labels=labels,
        aliases=aliases,
        p31=_claim_targets(doc, "P31"),
        p279=_claim_targets(doc, "P279"),
    )


def stream_entities(
    lines: Iterable[str],
    *,
    strict: bool = False,
    diagnostics: Optional[list[ParseDiagnostic]] = None,
) -> Iterator[RawEntity]:
    """Yield one :class:`RawEntity` per valid entity line, in dump order.

    Malformed JSON lines produce a :class:`ParseDiagnostic` (appended to
    ``diagnostics`` if given, logged otherwise) and are skipped; with
    ``strict=True`` they abort with :class:`DataError` instead. Only one
    line is held in memory at a time.
    """
    for line_number, line in enumerate(lines, start=1):
        try:
            entity = parse_entity_line(line)
        except json.JSONDecodeError as exc:
            if strict:
                raise DataError(f"line {line_number}: malformed JSON: {exc}") from exc
            diagnostic = ParseDiagnostic(line_number, f"malformed JSON: {exc}")
            if diagnostics is not None:
                diagnostics.append(diagnostic)
            else:
                logger.warning("line %d skipped: %s", line_number, diagnostic.message)
            continue
        if entity is not None:
            yield entity


class ClassGraph:
    """Subclass-of adjacency restricted to the subclasses of the roots.

    ``subclasses(root)`` is every class with a P279 path into ``root``
    (the root itself excluded). Closure computation is a reverse BFS with a
    visited set, so cyclic subclass edges terminate.
    """

    def __init__(self, edges: dict[str, list[str]], roots: Sequence[str] = DEFAULT_ROOTS):
        if len(roots) != len(EntityClass):
            raise ValueError(f"expected {len(EntityClass)} root classes, got {len(roots)}")
        self.roots = tuple(roots)
        self._class_for_root = dict(zip(self.roots, EntityClass))
        self._closures = {root: self._reverse_reachable(edges, root) for root in self.roots}
        members = set().union(*self._closures.values()) if self._closures else set()
        keep = members | set(self.roots)
        self.edges = {
            node: sorted(t for t in targets if t in keep)
            for node, targets in edges.items()
            if node in members
        }

    @staticmethod
    def _reverse_reachable(edges: dict[str, list[str]], root: str) -> frozenset[str]:
        children: dict[str, list[str]] = {}
        for node, targets in edges.items():
            for target in targets:
                children.setdefault(target, []).append(node)
        visited: set[str] = set()
        frontier = [root]
        while frontier:
            current = frontier.pop()
            for child in children.get(current, ()):
                if child not in visited:
                    visited.add(child)
                    frontier.append(child)
        visited.discard(root)
        return frozenset(visited)

    def subclasses(self, root: str) -> frozenset[str]:
        return self._closures[root]

    def classify(self, p31_targets: Iterable[str]) -> Optional[EntityClass]:
        """First root (in priority order) whose closure covers a P31 target."""
        targets = list(p31_targets)
        for root in self.roots:
            closure = self._closures[root]
            if any(t == root or t in closure for t in targets):
                return self._class_for_root[root]
        return None


def build_class_graph(
    entities: Iterable[RawEntity], roots: Sequence[str] = DEFAULT_ROOTS
) -> ClassGraph:
    """Collect P279 edges from a dump scan and close them over the roots."""
    edges: dict[str, list[str]] = {}
    for entity in entities:
        if entity.p279:
            edges.setdefault(entity.id, []).extend(entity.p279)
    return ClassGraph(edges, roots)


def normalize_text(value: str) -> str:
    """NFC-normalize and trim one label string."""
    return unicodedata.normalize("NFC", value).strip()


def normalize_record(record: EntityRecord) -> EntityRecord:
    """Clean labels and aliases of a record; idempotent.

    NFC normalization and whitespace trimming, empty strings dropped,
    aliases deduplicated, and any alias equal to its language's main label
    removed.
    """
    labels: dict[str, str] = {}
    for lang, value in record.labels.items():
        cleaned = normalize_text(value)
        if cleaned:
            labels[lang] = cleaned
    aliases: dict[str, list[str]] = {}
    for lang, values in record.aliases.items():
        seen: set[str] = set()
        cleaned_list: list[str] = []
        for value in values:
            cleaned = normalize_text(value)
            if not cleaned or cleaned == labels.get(lang) or cleaned in seen:
                continue
            seen.add(cleaned)
            cleaned_list.append(cleaned)
        if cleaned_list:
            aliases[lang] = cleaned_list
    return EntityRecord(record.id, record.entity_class, labels, aliases)


def classify_and_extract(
    entities: Iterable[RawEntity], graph: ClassGraph
) -> Iterator[EntityRecord]:
    """Emit a normalized :class:`EntityRecord` per in-scope entity."""
    for entity in entities:
        entity_class = graph.classify(entity.p31)
        if entity_class is None:
            continue
        record = EntityRecord(
            id=entity.id,
            entity_class=entity_class,
            labels=dict(entity.labels),
            aliases={lang: list(values) for lang, values in entity.aliases.items()},
        )
        yield normalize_record(record)


def _dict_items(value):
    return value.items() if isinstance(value, dict) else ()


def _claim_targets(doc: dict, prop: str) -> list[str]:
    claims = doc.get("claims")
    if not isinstance(claims, dict):
        return []
    out: list[str] = []
    for claim in claims.get(prop, ()):
        try:
            target = claim["mainsnak"]["datavalue"]["value"]["id"]
        except (KeyError, TypeError):
            continue
        if isinstance(target, str):
            out.append(target)
    return out
