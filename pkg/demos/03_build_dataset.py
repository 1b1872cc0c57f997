"""Filter entities by label richness and generate cross-lingual pairs.

Shows the three dataset-construction steps in order: the richness filter
(main label in enough selected languages, enough aliases in enough
languages), the language-ID verification pass that drops mislabeled
strings, and the pair cross product.
"""

from pathlib import Path

from label_bridge.dataset import (
    FilterCriteria,
    filter_entities,
    generate_pairs,
    verify_label_languages,
)
from label_bridge.dump_ingest import (
    build_class_graph,
    classify_and_extract,
    open_dump,
    stream_entities,
)
from label_bridge.langid import FileLanguageIdProvider

FIXTURE = Path(__file__).parent.parent / "tests" / "data" / "fixture"
SELECTED = ["en", "fr", "de", "ru", "es", "it"]


def main():
    with open_dump(FIXTURE / "dump.jsonl.gz") as fh:
        graph = build_class_graph(stream_entities(fh))
    with open_dump(FIXTURE / "dump.jsonl.gz") as fh:
        records = list(classify_and_extract(stream_entities(fh), graph))
    print(f"{len(records)} extracted entities")

    criteria = FilterCriteria(selected_languages=SELECTED)
    kept = list(filter_entities(records, criteria))
    print(
        f"{len(kept)} pass the richness filter (main label in >= "
        f"{criteria.min_languages_with_label} languages, >= {criteria.min_alias_count} "
        f"aliases in >= {criteria.min_languages_with_aliases} languages)"
    )

    langid = FileLanguageIdProvider(FIXTURE / "langid.tsv")
    verified = list(verify_label_languages(kept, langid))
    before = sum(len(r.labels) + sum(map(len, r.aliases.values())) for r in kept)
    after = sum(len(r.labels) + sum(map(len, r.aliases.values())) for r in verified)
    print(f"language verification dropped {before - after} of {before} label strings")

    pairs = list(generate_pairs(verified, SELECTED))
    print(f"{len(pairs)} cross-lingual label pairs, e.g.")
    for pair in pairs[:3]:
        main_flags = f"mains={int(pair.is_main_1)}{int(pair.is_main_2)}"
        print(
            f"  {pair.entity_id} {pair.lang_1}/{pair.lang_2}: "
            f"{pair.label_1!r} / {pair.label_2!r} ({main_flags})"
        )


if __name__ == "__main__":
    main()
