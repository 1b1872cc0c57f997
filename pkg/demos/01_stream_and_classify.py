"""Stream a dump file and keep only people, organisations, and places.

The dump is read twice: a first pass collects subclass-of edges so the
class graph can be closed over the three root classes, a second pass
classifies each entity by its instance-of targets and normalizes labels.
"""

from collections import Counter
from pathlib import Path

from label_bridge.dump_ingest import (
    build_class_graph,
    classify_and_extract,
    open_dump,
    stream_entities,
)

DUMP = Path(__file__).parent.parent / "tests" / "data" / "fixture" / "dump.jsonl.gz"


def main():
    with open_dump(DUMP) as fh:
        graph = build_class_graph(stream_entities(fh))
    for root in graph.roots:
        print(f"root {root}: {len(graph.subclasses(root))} subclasses")

    with open_dump(DUMP) as fh:
        records = list(classify_and_extract(stream_entities(fh), graph))

    distribution = Counter(r.entity_class.value for r in records)
    print(f"{len(records)} in-scope entities:")
    for name, count in sorted(distribution.items()):
        print(f"  {name:<14} {count}")

    sample = records[0]
    print(f"\nexample record {sample.id} ({sample.entity_class.value})")
    for lang in sorted(sample.labels)[:4]:
        aliases = sample.aliases.get(lang, [])
        print(f"  {lang}: {sample.labels[lang]!r} + {len(aliases)} aliases")


if __name__ == "__main__":
    main()
