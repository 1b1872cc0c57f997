#!/usr/bin/env python3
"""Regenerate the committed pipeline fixture under tests/data/fixture/.

The fixture is a small synthetic dump engineered so every pipeline stage has
known work to do:

- three entity classes behind subclass chains, including a P279 cycle;
- 12 candidate languages of which exactly {en, fr, de, ru, es, it} win the
  coverage ranking;
- "rich" entities that pass the default 4/3/3 filter, plus label-poor and
  alias-poor entities that miss it in both possible ways;
- two aliases poisoned in the language-id table;
- one alias-heavy outlier entity, six identical-main entities, and natural
  singleton groups, so sample preprocessing exercises all three steps;
- ground truth marking pairs whose construction variant index matches
  (main<->main, i-th alias <-> i-th alias).

Everything is seeded; rerunning this script must reproduce the committed
bytes exactly.
"""

import gzip
import json
import random
import sys
import unicodedata
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from label_bridge.dataset import (  # noqa: E402
    FilterCriteria,
    compute_language_stats,
    filter_entities,
    generate_pairs,
    select_top_languages,
    verify_label_languages,
)
from label_bridge.dump_ingest import (  # noqa: E402
    build_class_graph,
    classify_and_extract,
    stream_entities,
)
from label_bridge.langid import FileLanguageIdProvider  # noqa: E402

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "tests" / "data" / "fixture"
SEED = 20210
CANDIDATES = ["de", "el", "en", "es", "fr", "it", "ja", "nl", "pl", "pt", "ru", "sv"]
EXPECTED_SELECTED = ["en", "fr", "de", "ru", "es", "it"]
SPARSE = ["el", "ja", "nl", "pl", "pt", "sv"]

SYLLABLES = ["ba", "do", "ki", "lu", "mar", "nes", "por", "ran", "sol", "tu", "vel", "zon"]
MAIN_SUFFIX = {"en": "", "fr": "ette", "de": "heim", "es": "illo", "it": "ino", "ru": "ov"}
ALIAS_SUFFIX = ["an", "or", "is", "ul", "em", "ak"]
TO_CYRILLIC = str.maketrans(
    {
        "a": "а", "b": "б", "d": "д", "e": "е", "g": "г", "i": "и", "k": "к",
        "l": "л", "m": "м", "n": "н", "o": "о", "p": "п", "r": "р", "s": "с",
        "t": "т", "u": "у", "v": "в", "z": "з",
    }
)
TO_GREEK = str.maketrans(
    {"a": "α", "b": "β", "d": "δ", "e": "ε", "i": "ι", "k": "κ", "l": "λ",
     "m": "μ", "n": "ν", "o": "ο", "p": "π", "r": "ρ", "s": "σ", "t": "τ",
     "u": "υ", "v": "β", "z": "ζ"}
)
TO_KATAKANA = str.maketrans(
    {"a": "ア", "b": "バ", "d": "ダ", "e": "エ", "i": "イ", "k": "カ", "l": "ラ",
     "m": "マ", "n": "ナ", "o": "オ", "p": "パ", "r": "ラ", "s": "サ", "t": "タ",
     "u": "ウ", "v": "バ", "z": "ザ"}
)


def to_script(word: str, lang: str) -> str:
    lowered = word.lower()
    if lang == "ru":
        return lowered.translate(TO_CYRILLIC).capitalize()
    if lang == "el":
        return lowered.translate(TO_GREEK).capitalize()
    if lang == "ja":
        return lowered.translate(TO_KATAKANA)
    return word


def make_base(rng: random.Random) -> str:
    return "".join(rng.choice(SYLLABLES) for _ in range(rng.choice((2, 3)))).capitalize()


def main_label(base: str, lang: str) -> str:
    return to_script(base + MAIN_SUFFIX[lang], lang)


def alias_label(base: str, lang: str, i: int) -> str:
    return to_script(base + MAIN_SUFFIX[lang] + ALIAS_SUFFIX[i], lang)


def entity_doc(entity_id, labels=None, aliases=None, p31=(), p279=()):
    doc = {
        "type": "item",
        "id": entity_id,
        "labels": {l: {"language": l, "value": v} for l, v in (labels or {}).items()},
        "aliases": {
            l: [{"language": l, "value": v} for v in vs]
            for l, vs in (aliases or {}).items()
            if vs
        },
        "claims": {},
    }
    for prop, targets in (("P31", p31), ("P279", p279)):
        if targets:
            doc["claims"][prop] = [
                {"mainsnak": {"snaktype": "value", "datavalue": {"value": {"id": t}}}}
                for t in targets
            ]
    return json.dumps(doc, ensure_ascii=False, sort_keys=True)


def build():
    rng = random.Random(SEED)
    lines = []
    variant_index: dict[tuple[str, str, str], int] = {}
    manifest: dict = {
        "seed": SEED,
        "candidate_languages": CANDIDATES,
        "selected_languages": EXPECTED_SELECTED,
    }

    def note(qid, lang, label, index):
        variant_index[(qid, lang, unicodedata.normalize("NFC", label))] = index

    # class hierarchy: chains into all three roots, plus one P279 cycle
    lines.append(entity_doc("Q5", labels={"en": "human"}, p279=["Q215627"]))
    lines.append(entity_doc("Q4830453", labels={"en": "business"}, p279=["Q43229"]))
    lines.append(entity_doc("Q486972", labels={"en": "human settlement"}, p279=["Q2221906"]))
    lines.append(entity_doc("Q515", labels={"en": "city"}, p279=["Q486972"]))
    lines.append(entity_doc("Q9001", labels={"en": "loop org a"}, p279=["Q9002"]))
    lines.append(entity_doc("Q9002", labels={"en": "loop org b"}, p279=["Q9001", "Q43229"]))
    lines.append(entity_doc("Q11424", labels={"en": "film"}, p279=["Q2431196"]))
    lines.append(entity_doc("Q2431196", labels={"en": "audiovisual work"}, p279=["Q17537576"]))

    rich_classes = (["Q5"] * 20) + (["Q4830453"] * 18) + (["Q9001"] * 2) + (["Q515"] * 20)
    class_of = {"Q5": "Person", "Q4830453": "Organisation", "Q9001": "Organisation", "Q515": "Place"}
    class_distribution = {"Person": 0, "Organisation": 0, "Place": 0}

    rich_ids = []
    identical_ids = []
    bases_seen = set()
    outlier_id = "Q1059"

    for i, p31 in enumerate(rich_classes):
        qid = f"Q{1000 + i}"
        rich_ids.append(qid)
        class_distribution[class_of[p31]] += 1
        while True:
            base = make_base(rng)
            if base not in bases_seen:
                bases_seen.add(base)
                break
        identical = 20 <= i < 26  # six organisations share one main label everywhere
        if identical:
            identical_ids.append(qid)
        labels = {}
        for lang in EXPECTED_SELECTED:
            labels[lang] = base if identical else main_label(base, lang)
            note(qid, lang, labels[lang], 0)
        if i == 38:  # one place gets two-word labels to exercise sub-word paths
            labels["en"] = f"{base} City"
            labels["fr"] = f"{base}ette Ville"
            note(qid, "en", labels["en"], 0)
            note(qid, "fr", labels["fr"], 0)
        if i == 7:  # decomposed accent in the raw dump; normalized on extraction
            labels["fr"] = base + "ée"
            note(qid, "fr", labels["fr"], 0)
        alias_count = 6 if qid == outlier_id else 3
        aliases = {}
        for lang in ("en", "fr", "ru"):
            aliases[lang] = [alias_label(base, lang, k) for k in range(alias_count)]
            for k, alias in enumerate(aliases[lang], start=1):
                note(qid, lang, alias, k)
        lines.append(entity_doc(qid, labels=labels, aliases=aliases, p31=[p31]))

    manifest["kept_entities"] = sorted(rich_ids)
    manifest["class_distribution"] = dict(class_distribution)
    manifest["identical_main_entities"] = identical_ids
    manifest["outlier_entity"] = outlier_id

    # label-poor: main labels in only three selected languages -> filtered out
    poor_classes = ["Q5", "Q4830453", "Q515"]
    for i in range(50):
        qid = f"Q{2000 + i}"
        p31 = poor_classes[i % 3]
        class_distribution[class_of[p31]] += 1
        base = make_base(rng)
        labels = {lang: main_label(base, lang) for lang in ("en", "fr", "de")}
        sparse_lang = SPARSE[i % len(SPARSE)]
        labels[sparse_lang] = to_script(base, sparse_lang)
        lines.append(entity_doc(qid, labels=labels, p31=[p31]))

    # alias-poor: enough main labels but only two aliases in two languages
    for i in range(40):
        qid = f"Q{3000 + i}"
        p31 = poor_classes[i % 3]
        class_distribution[class_of[p31]] += 1
        base = make_base(rng)
        labels = {lang: main_label(base, lang) for lang in ("en", "fr", "de", "es", "ru")}
        aliases = {lang: [alias_label(base, lang, k) for k in range(2)] for lang in ("en", "fr")}
        lines.append(entity_doc(qid, labels=labels, aliases=aliases, p31=[p31]))

    # out of scope: instances of a class outside all three root closures
    for i in range(40):
        qid = f"Q{4000 + i}"
        base = make_base(rng)
        lines.append(entity_doc(qid, labels={"en": base}, p31=["Q11424"]))

    manifest["extracted_count"] = 150
    manifest["extracted_class_distribution"] = class_distribution

    # property document and a malformed line, both skipped by the parser
    lines.append(json.dumps({"type": "property", "id": "P31", "labels": {}}))
    lines.append('{"id": "Q99999", "labels": ')

    rng.shuffle(lines)
    dump_path = FIXTURE_DIR / "dump.jsonl.gz"
    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    with open(dump_path, "wb") as raw:
        with gzip.GzipFile(fileobj=raw, mode="wb", mtime=0) as gz:
            payload = "[\n" + ",\n".join(lines) + "\n]\n"
            gz.write(payload.encode("utf-8"))

    # language-id table: two poisoned aliases, one confirmed, one ambiguous
    poisoned = [
        (alias_label_for(variant_index, "Q1001", "en", 2), "en"),
        (alias_label_for(variant_index, "Q1005", "ru", 1), "ru"),
    ]
    confirmed = alias_label_for(variant_index, "Q1002", "en", 1)
    ambiguous = alias_label_for(variant_index, "Q1003", "fr", 1)
    langid_rows = [
        f"{poisoned[0][0]}\tde\t0.950000",
        f"{poisoned[1][0]}\tde\t0.880000",
        f"{confirmed}\ten\t0.990000",
        f"{ambiguous}\tde\t0.300000",
    ]
    langid_path = FIXTURE_DIR / "langid.tsv"
    langid_path.write_text(
        "label\tlang\tprob\n" + "\n".join(langid_rows) + "\n", encoding="utf-8"
    )
    manifest["poisoned_labels"] = [
        {"entity": "Q1001", "lang": "en", "label": poisoned[0][0]},
        {"entity": "Q1005", "lang": "ru", "label": poisoned[1][0]},
    ]

    # run the real pipeline to enumerate dataset pairs, then annotate them
    # mechanically from the construction's variant indices
    with gzip.open(dump_path, "rt", encoding="utf-8") as fh:
        graph = build_class_graph(stream_entities(fh))
    with gzip.open(dump_path, "rt", encoding="utf-8") as fh:
        records = list(classify_and_extract(stream_entities(fh), graph))
    assert len(records) == manifest["extracted_count"], len(records)

    stats = compute_language_stats(records, CANDIDATES)
    selected = select_top_languages(stats, 6)
    assert selected == EXPECTED_SELECTED, selected

    kept = list(filter_entities(records, FilterCriteria(selected_languages=selected)))
    assert sorted(r.id for r in kept) == manifest["kept_entities"], len(kept)
    verified = list(verify_label_languages(kept, FileLanguageIdProvider(langid_path)))
    pairs = list(generate_pairs(verified, selected))

    truth_lines = ["entity_id\tlang_1\tlang_2\tlabel_1\tlabel_2\tbest"]
    best_count = 0
    for p in pairs:
        i1 = variant_index[(p.entity_id, p.lang_1, p.label_1)]
        i2 = variant_index[(p.entity_id, p.lang_2, p.label_2)]
        best = i1 == i2
        best_count += best
        truth_lines.append(
            f"{p.entity_id}\t{p.lang_1}\t{p.lang_2}\t{p.label_1}\t{p.label_2}\t{int(best)}"
        )
    (FIXTURE_DIR / "truth.tsv").write_text("\n".join(truth_lines) + "\n", encoding="utf-8")

    manifest["dataset_pair_count"] = len(pairs)
    manifest["truth_best_count"] = best_count
    (FIXTURE_DIR / "manifest.json").write_text(
        json.dumps(manifest, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    print(f"dump entities: {manifest['extracted_count']} in scope, {len(pairs)} dataset pairs")
    print(f"fixture written to {FIXTURE_DIR}")


def alias_label_for(variant_index, qid, lang, index):
    for (q, l, label), i in variant_index.items():
        if q == qid and l == lang and i == index:
            return label
    raise KeyError((qid, lang, index))


if __name__ == "__main__":
    build()
