"""Rank candidate languages by label coverage and pick the top six.

Each language is ranked three times, on label coverage, alias presence,
and mean alias count, all computed over every extracted entity. Ranks are
competition-style (ties share a rank), and the selection takes the
languages with the smallest average rank.
"""

from pathlib import Path

from label_bridge.dataset import compute_language_stats, select_top_languages
from label_bridge.dump_ingest import (
    build_class_graph,
    classify_and_extract,
    open_dump,
    stream_entities,
)

DUMP = Path(__file__).parent.parent / "tests" / "data" / "fixture" / "dump.jsonl.gz"
CANDIDATES = ["de", "el", "en", "es", "fr", "it", "ja", "nl", "pl", "pt", "ru", "sv"]


def main():
    with open_dump(DUMP) as fh:
        graph = build_class_graph(stream_entities(fh))
    with open_dump(DUMP) as fh:
        records = list(classify_and_extract(stream_entities(fh), graph))

    stats = compute_language_stats(records, CANDIDATES)
    selected = select_top_languages(stats, 6)

    print(f"{'lang':<6}{'coverage':>10}{'presence':>10}{'aliases':>9}{'avg rank':>10}")
    for s in sorted(stats, key=lambda s: (s.avg_rank, s.language)):
        marker = "  *" if s.language in selected else ""
        print(
            f"{s.language:<6}{s.main_label_coverage:>10.3f}{s.alias_presence:>10.3f}"
            f"{s.mean_alias_count:>9.2f}{s.avg_rank:>10.2f}{marker}"
        )
    print(f"\nselected: {', '.join(selected)}")


if __name__ == "__main__":
    main()
