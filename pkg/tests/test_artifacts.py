"""Round-trip and format tests for the artifact readers/writers."""

import json

import pytest

from label_bridge import artifacts
from label_bridge.dataset import LabelPair, compute_language_stats, select_top_languages
from label_bridge.dump_ingest import EntityClass, EntityRecord
from label_bridge.errors import DataError
from label_bridge.evaluation import GroundTruthEntry, evaluate, score_reports
from label_bridge.matcher import BestMatchSet, greedy_best_match, group_scored_pairs
from label_bridge.scorers import ScoredPair


def sample_pairs():
    return [
        LabelPair("Q1", "en", "fr", "Bahrain", "Bahreïn", True, True),
        LabelPair("Q1", "en", "fr", "Kingdom of Bahrain", "Bahreïn", False, True),
        LabelPair("Q2", "de", "en", "München", "Munich", True, True),
    ]


class TestDatasetFile:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "dataset.tsv"
        pairs = sample_pairs()
        count = artifacts.write_dataset(path, pairs)
        assert count == 3
        back = list(artifacts.read_dataset(path))
        assert back == pairs
        # is_main is excluded from equality; check it survived explicitly
        assert [(p.is_main_1, p.is_main_2) for p in back] == [
            (p.is_main_1, p.is_main_2) for p in pairs
        ]

    def test_header_and_flags_format(self, tmp_path):
        path = tmp_path / "dataset.tsv"
        artifacts.write_dataset(path, sample_pairs()[:1])
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "entity_id\tlang_1\tlang_2\tlabel_1\tlabel_2\tis_main_1\tis_main_2"
        assert lines[1] == "Q1\ten\tfr\tBahrain\tBahreïn\t1\t1"

    def test_provenance_header_skipped_on_read(self, tmp_path):
        path = tmp_path / "dataset.tsv"
        prov = artifacts.Provenance(config_hash="abc123", seed=7)
        artifacts.write_dataset(path, sample_pairs(), prov)
        text = path.read_text(encoding="utf-8")
        assert text.startswith("# tool: label-bridge ")
        assert "# config_hash: abc123" in text
        assert "# seed: 7" in text
        assert "T" not in text.split("\n")[0]  # no timestamp in the header
        assert len(list(artifacts.read_dataset(path))) == 3

    def test_tab_in_label_rejected(self, tmp_path):
        bad = [LabelPair("Q1", "en", "fr", "has\ttab", "ok", True, True)]
        with pytest.raises(DataError, match="tab or newline"):
            artifacts.write_dataset(tmp_path / "bad.tsv", bad)

    def test_newline_in_label_rejected(self, tmp_path):
        bad = [LabelPair("Q1", "en", "fr", "ok", "has\nnewline", True, True)]
        with pytest.raises(DataError, match="tab or newline"):
            artifacts.write_dataset(tmp_path / "bad.tsv", bad)

    def test_wrong_column_count(self, tmp_path):
        path = tmp_path / "dataset.tsv"
        path.write_text("Q1\ten\tfr\tonly-five\t1\n", encoding="utf-8")
        with pytest.raises(DataError, match="expected 7 fields"):
            list(artifacts.read_dataset(path))

    def test_bad_flag_value(self, tmp_path):
        path = tmp_path / "dataset.tsv"
        path.write_text("Q1\ten\tfr\ta\tb\t1\t2\n", encoding="utf-8")
        with pytest.raises(DataError, match="flag must be 0 or 1"):
            list(artifacts.read_dataset(path))

    def test_non_canonical_language_order_rejected(self, tmp_path):
        path = tmp_path / "dataset.tsv"
        path.write_text("Q1\tfr\ten\ta\tb\t1\t1\n", encoding="utf-8")
        with pytest.raises(DataError, match="canonical"):
            list(artifacts.read_dataset(path))


class TestScoredFile:
    def test_round_trip_sorted_with_six_decimals(self, tmp_path):
        path = tmp_path / "scored.tsv"
        pairs = sample_pairs()
        scored = [
            ScoredPair(pairs[2], "MPA", 0.5),
            ScoredPair(pairs[0], "SIM_C", -0.25),
            ScoredPair(pairs[0], "MPA", 1 / 3),
        ]
        artifacts.write_scored(path, scored)
        lines = [
            line
            for line in path.read_text(encoding="utf-8").splitlines()
            if not line.startswith("#") and not line.startswith("entity_id")
        ]
        # sorted by pair key then scorer id; scores fixed to 6 decimal places
        assert lines[0].endswith("MPA\t0.333333")
        assert lines[1].endswith("SIM_C\t-0.250000")
        assert lines[2].startswith("Q2\tde\ten")
        back = list(artifacts.read_scored(path))
        assert [(sp.pair.key, sp.scorer_id) for sp in back] == [
            (pairs[0].key, "MPA"),
            (pairs[0].key, "SIM_C"),
            (pairs[2].key, "MPA"),
        ]
        assert back[0].score == pytest.approx(1 / 3, abs=1e-6)

    def test_unknown_scorer_id_rejected_on_read(self, tmp_path):
        path = tmp_path / "scored.tsv"
        path.write_text("Q1\ten\tfr\ta\tb\tBOGUS\t0.500000\n", encoding="utf-8")
        with pytest.raises(DataError, match="BOGUS"):
            list(artifacts.read_scored(path))

    def test_out_of_range_score_rejected_on_read(self, tmp_path):
        path = tmp_path / "scored.tsv"
        path.write_text("Q1\ten\tfr\ta\tb\tMPA\t1.500000\n", encoding="utf-8")
        with pytest.raises(DataError):
            list(artifacts.read_scored(path))


class TestMatchFile:
    def build_match_sets(self):
        pairs = [
            LabelPair("Q1", "en", "fr", "a1", "b1"),
            LabelPair("Q1", "en", "fr", "a1", "b2"),
            LabelPair("Q1", "en", "fr", "a2", "b1"),
            LabelPair("Q1", "en", "fr", "a2", "b2"),
        ]
        scores = [0.9, 0.2, 0.3, 0.8]
        groups = group_scored_pairs(
            ScoredPair(p, "MPA", s) for p, s in zip(pairs, scores)
        )
        return [greedy_best_match(g) for g in groups]

    def test_round_trip(self, tmp_path):
        path = tmp_path / "matches.tsv"
        matches = self.build_match_sets()
        artifacts.write_matches(path, matches)
        back = artifacts.read_matches(path)
        assert len(back) == 1
        assert back[0].key == matches[0].key
        assert back[0].method_id == "MPA"
        assert set(back[0].selected) == set(matches[0].selected)
        assert set(back[0].rejected) == set(matches[0].rejected)
        back[0].validate()  # reconstruction is still a one-to-one partition

    def test_methods_kept_separate(self, tmp_path):
        path = tmp_path / "matches.tsv"
        matches = self.build_match_sets()
        other = BestMatchSet(
            matches[0].key, "RAN", list(matches[0].rejected), list(matches[0].selected)
        )
        artifacts.write_matches(path, matches + [other])
        back = artifacts.read_matches(path)
        assert [(m.key, m.method_id) for m in back] == [
            (matches[0].key, "MPA"),
            (matches[0].key, "RAN"),
        ]
        assert set(back[1].selected) == set(other.selected)


class TestTruthFile:
    def test_round_trip_and_evaluate(self, tmp_path):
        path = tmp_path / "truth.tsv"
        pairs = sample_pairs()
        entries = [
            GroundTruthEntry(pairs[0], True),
            GroundTruthEntry(pairs[1], False),
            GroundTruthEntry(pairs[2], True),
        ]
        artifacts.write_truth(path, entries)
        back = artifacts.read_truth(path)
        assert [(e.pair, e.best) for e in back] == [(e.pair, e.best) for e in entries]
        match = BestMatchSet(pairs[0].group_key, "MPA", [pairs[0]], [pairs[1]])
        reports = evaluate([match], back)
        assert reports[0].accuracy == 1.0

    def test_empty_file_yields_no_entries(self, tmp_path):
        path = tmp_path / "truth.tsv"
        path.write_text("entity_id\tlang_1\tlang_2\tlabel_1\tlabel_2\tbest\n", encoding="utf-8")
        assert artifacts.read_truth(path) == []


class TestEntityRecordsFile:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "entities.jsonl"
        records = [
            EntityRecord(
                "Q1",
                EntityClass.PERSON,
                {"en": "Ada Lovelace", "ru": "Ада Лавлейс"},
                {"en": ["Ada King"], "ru": []},
            ),
            EntityRecord("Q2", EntityClass.PLACE, {"fr": "Paris"}, {}),
        ]
        assert artifacts.write_entity_records(path, records) == 2
        back = list(artifacts.read_entity_records(path))
        assert back == records

    def test_unicode_stays_readable(self, tmp_path):
        path = tmp_path / "entities.jsonl"
        artifacts.write_entity_records(
            path, [EntityRecord("Q1", EntityClass.PERSON, {"ru": "Ада"}, {})]
        )
        assert "Ада" in path.read_text(encoding="utf-8")  # not \u escaped

    def test_bad_class_rejected(self, tmp_path):
        path = tmp_path / "entities.jsonl"
        path.write_text(
            json.dumps({"id": "Q1", "entity_class": "Robot", "labels": {}, "aliases": {}})
            + "\n",
            encoding="utf-8",
        )
        with pytest.raises(DataError):
            list(artifacts.read_entity_records(path))


class TestLanguageSelectionFile:
    def test_round_trip(self, tmp_path):
        records = [
            EntityRecord("Q1", EntityClass.PERSON, {"en": "a", "fr": "b"}, {"en": ["x"]}),
            EntityRecord("Q2", EntityClass.PLACE, {"en": "c"}, {}),
        ]
        stats = compute_language_stats(records, ["en", "fr"])
        selected = select_top_languages(stats, 1)
        path = tmp_path / "languages.json"
        artifacts.write_language_selection(path, stats, selected, artifacts.Provenance("h"))
        assert artifacts.read_language_selection(path) == selected
        doc = json.loads(path.read_text(encoding="utf-8"))
        assert doc["provenance"]["config_hash"] == "h"
        assert {s["language"] for s in doc["stats"]} == {"en", "fr"}

    def test_malformed_selection(self, tmp_path):
        path = tmp_path / "languages.json"
        path.write_text('{"selected": "en"}', encoding="utf-8")
        with pytest.raises(DataError):
            artifacts.read_language_selection(path)


class TestEvalOutputs:
    def build_reports(self):
        pairs = sample_pairs()
        match = BestMatchSet(pairs[0].group_key, "MPA", [pairs[0]], [pairs[1]])
        truth = [GroundTruthEntry(pairs[0], True), GroundTruthEntry(pairs[1], False)]
        return evaluate([match], truth)

    def test_json_report(self, tmp_path):
        path = tmp_path / "eval.json"
        reports = self.build_reports()
        artifacts.write_eval_reports(path, reports, artifacts.Provenance("deadbeef", 3))
        doc = json.loads(path.read_text(encoding="utf-8"))
        assert doc["provenance"]["seed"] == 3
        all_row = [r for r in doc["reports"] if r["scope"] == "ALL"][0]
        assert all_row["method"] == "MPA"
        assert all_row["tp"] == 1 and all_row["tn"] == 1
        assert all_row["accuracy"] == 1.0

    def test_grid_has_method_rows_and_scope_columns(self):
        grid = artifacts.format_eval_grid(self.build_reports())
        lines = grid.splitlines()
        assert lines[0].split() == ["method", "ALL", "en", "fr"]
        assert lines[1].split() == ["MPA", "1.000", "1.000", "1.000"]

    def test_grid_missing_scope_shows_dash(self):
        pairs = sample_pairs()
        match_a = BestMatchSet(pairs[0].group_key, "MPA", [pairs[0]], [pairs[1]])
        match_b = BestMatchSet(pairs[2].group_key, "RAN", [pairs[2]], [])
        truth = [
            GroundTruthEntry(pairs[0], True),
            GroundTruthEntry(pairs[1], False),
            GroundTruthEntry(pairs[2], True),
        ]
        grid = artifacts.format_eval_grid(evaluate([match_a], truth) + evaluate([match_b], truth))
        row = [line for line in grid.splitlines() if line.startswith("RAN")][0]
        assert row.split() == ["RAN", "1.000", "1.000", "1.000", "-"]  # fr blank

    def test_histogram_csv(self, tmp_path):
        scored = [
            ScoredPair(sample_pairs()[0], "MPA", 0.5),
            ScoredPair(sample_pairs()[2], "MPA", 0.5),
        ]
        reports = score_reports(scored)
        path = tmp_path / "hist.csv"
        artifacts.write_histograms_csv(path, reports)
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "scorer_id,bin_low,bin_high,density"
        assert len(lines) == 1 + 100  # one scorer, 100 bins
        populated = [l for l in lines[1:] if not l.endswith(",0.000000")]
        assert len(populated) == 1
        assert populated[0].startswith("MPA,0.500000,0.510000,")

    def test_language_means_csv(self, tmp_path):
        scored = [
            ScoredPair(sample_pairs()[0], "MPA", 0.4),
            ScoredPair(sample_pairs()[2], "MPA", 0.8),
        ]
        path = tmp_path / "means.csv"
        artifacts.write_language_means_csv(path, score_reports(scored))
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "scorer_id,language,mean_score"
        assert "MPA,en,0.600000" in lines  # en pairs: 0.4 and 0.8
        assert "MPA,fr,0.400000" in lines
        assert "MPA,de,0.800000" in lines
