"""Tests for pool preprocessing, sampling, and evaluation metrics."""

import itertools

import numpy as np
import pytest

from label_bridge.dataset import LabelPair
from label_bridge.errors import ConfigError, DataError
from label_bridge.evaluation import (
    ALL_SCOPE,
    ConfusionCounts,
    EvalReport,
    GroundTruthEntry,
    ScoreReport,
    allocate_strata,
    evaluate,
    preprocess_pool,
    required_sample_size,
    score_reports,
    stratified_sample,
)
from label_bridge.matcher import BestMatchSet
from label_bridge.scorers import ScoredPair


def cross_product_pairs(entity_id, lang_1, lang_2, labels_1, labels_2):
    return [
        LabelPair(entity_id, lang_1, lang_2, l1, l2)
        for l1, l2 in itertools.product(labels_1, labels_2)
    ]


class TestRequiredSampleSize:
    def test_frozen_values(self):
        assert required_sample_size(10**9, 0.95, 0.05) == 385
        assert required_sample_size(1000, 0.95, 0.05) == 278
        assert required_sample_size(10, 0.95, 0.05) == 10

    def test_other_confidences(self):
        # monotone in confidence for a big population
        n90 = required_sample_size(10**9, 0.90, 0.05)
        n99 = required_sample_size(10**9, 0.99, 0.05)
        assert n90 < 385 < n99

    def test_bad_population(self):
        with pytest.raises(DataError):
            required_sample_size(0, 0.95, 0.05)

    def test_bad_parameters_enumerated(self):
        with pytest.raises(ConfigError) as exc_info:
            required_sample_size(100, 0.93, 1.5)
        message = str(exc_info.value)
        assert "confidence" in message and "margin" in message


class TestPreprocessPool:
    def test_outlier_entity_removed(self):
        # 19 entities with 7 pairs each, one with 42: mean 8.75, stddev ≈7.63,
        # threshold ≈31.6 → only the 42-pair entity is an outlier
        pool = []
        for i in range(19):
            pool += cross_product_pairs(f"Q{i}", "en", "fr", ["a"], [f"b{j}" for j in range(7)])
        pool += cross_product_pairs(
            "Q99", "en", "fr", [f"x{i}" for i in range(6)], [f"y{j}" for j in range(7)]
        )
        cleaned = preprocess_pool(pool, seed=1)
        assert {p.entity_id for p in cleaned} == {f"Q{i}" for i in range(19)}

    def test_singleton_group_removed_not_entity(self):
        pool = cross_product_pairs("Q1", "en", "fr", ["a"], ["b"])  # singleton
        pool += cross_product_pairs("Q1", "de", "en", ["c", "d"], ["a"])  # size 2
        cleaned = preprocess_pool(pool, seed=1)
        assert {p.group_key for p in cleaned} == {("Q1", "de", "en")}

    def test_singleton_entity_mode(self):
        pool = cross_product_pairs("Q1", "en", "fr", ["a"], ["b"])
        pool += cross_product_pairs("Q1", "de", "en", ["c", "d"], ["a"])
        pool += cross_product_pairs("Q2", "en", "fr", ["e", "f"], ["g"])
        cleaned = preprocess_pool(pool, seed=1, drop_singleton_entities=True)
        assert {p.entity_id for p in cleaned} == {"Q2"}

    def test_identical_pair_downsampling_exact_half(self):
        pool = []
        for i in range(10):
            # group of 2 pairs, one of them identical → survives rules 1-2
            pool += cross_product_pairs(f"Q{i}", "en", "fr", ["same", "other"], ["same"])
        cleaned = preprocess_pool(pool, seed=7)
        survivors = {p.entity_id for p in cleaned}
        assert len(survivors) == 5

    def test_downsampling_deterministic(self):
        pool = []
        for i in range(10):
            pool += cross_product_pairs(f"Q{i}", "en", "fr", ["same", "other"], ["same"])
        first = {p.entity_id for p in preprocess_pool(pool, seed=7)}
        second = {p.entity_id for p in preprocess_pool(pool, seed=7)}
        assert first == second

    def test_singleton_removal_runs_before_downsampling(self):
        # the identical pair sits in a singleton group, so rule 2 deletes it
        # and rule 3 must see no identical-pair entities at all
        pool = cross_product_pairs("Q1", "en", "fr", ["same"], ["same"])
        pool += cross_product_pairs("Q1", "de", "en", ["x", "y"], ["z"])
        for seed in range(10):
            cleaned = preprocess_pool(pool, seed=seed)
            assert {p.group_key for p in cleaned} == {("Q1", "de", "en")}

    def test_entities_with_no_issues_untouched(self):
        pool = cross_product_pairs("Q1", "en", "fr", ["a", "b"], ["c", "d"])
        assert set(preprocess_pool(pool, seed=3)) == set(pool)


class TestAllocateStrata:
    def test_even_split(self):
        assert allocate_strata({"a": 10, "b": 10}, 10) == {"a": 5, "b": 5}

    def test_remainder_to_largest(self):
        allocation = allocate_strata({"a": 100, "b": 50, "c": 50}, 10)
        assert allocation["a"] == 4
        assert allocation["b"] == 3 and allocation["c"] == 3

    def test_differ_by_at_most_one_without_caps(self):
        sizes = {f"s{i}": 1000 for i in range(45)}
        allocation = allocate_strata(sizes, 385)
        assert sum(allocation.values()) == 385
        assert max(allocation.values()) - min(allocation.values()) <= 1

    def test_cap_and_redistribute(self):
        allocation = allocate_strata({"tiny": 2, "big": 100}, 30)
        assert allocation == {"tiny": 2, "big": 28}

    def test_oversized_request_rejected(self):
        with pytest.raises(DataError):
            allocate_strata({"a": 3}, 4)


class TestStratifiedSample:
    def pool(self):
        pool = []
        for i in range(6):
            pool += cross_product_pairs(f"Q{i}", "en", "fr", ["a", "b"], ["c", "d"])
        for i in range(6, 10):
            pool += cross_product_pairs(f"Q{i}", "de", "en", ["e"], ["f", "g"])
        return pool

    def test_full_pool(self):
        pool = self.pool()
        assert set(stratified_sample(pool, len(pool), seed=1)) == set(pool)

    def test_deterministic(self):
        pool = self.pool()
        assert stratified_sample(pool, 12, seed=5) == stratified_sample(pool, 12, seed=5)

    def test_whole_groups_sampled(self):
        pool = self.pool()
        by_group = {}
        for p in pool:
            by_group.setdefault(p.group_key, set()).add(p)
        sample = stratified_sample(pool, 12, seed=9)
        sampled_groups = {p.group_key for p in sample}
        sample_set = set(sample)
        for group_key in sampled_groups:
            assert by_group[group_key] <= sample_set

    def test_reaches_targets(self):
        pool = self.pool()  # en-fr: 24 pairs, de-en: 8 pairs
        sample = stratified_sample(pool, 16, seed=2)
        by_stratum = {}
        for p in sample:
            by_stratum[(p.lang_1, p.lang_2)] = by_stratum.get((p.lang_1, p.lang_2), 0) + 1
        assert by_stratum[("de", "en")] >= 8  # capped stratum fully taken
        assert by_stratum[("en", "fr")] >= 8


def single_pair_match(entity_id, predicted, method="LS_C", lang_1="en", lang_2="fr"):
    pair = LabelPair(entity_id, lang_1, lang_2, f"l-{entity_id}", f"r-{entity_id}")
    match = BestMatchSet((entity_id, lang_1, lang_2), method)
    (match.selected if predicted else match.rejected).append(pair)
    return match, pair


class TestEvaluate:
    def build(self, spec_counts):
        """spec_counts: list of (predicted, actual, count)."""
        matches, truth = [], []
        index = 0
        for predicted, actual, count in spec_counts:
            for _ in range(count):
                match, pair = single_pair_match(f"Q{index}", predicted)
                matches.append(match)
                truth.append(GroundTruthEntry(pair, actual))
                index += 1
        return matches, truth

    def test_perfect_agreement(self):
        matches, truth = self.build([(True, True, 5), (False, False, 5)])
        reports = {r.scope: r for r in evaluate(matches, truth)}
        assert reports[ALL_SCOPE].accuracy == 1.0
        assert reports[ALL_SCOPE].f1 == 1.0

    def test_all_wrong(self):
        matches, truth = self.build([(True, False, 5), (False, True, 5)])
        reports = {r.scope: r for r in evaluate(matches, truth)}
        assert reports[ALL_SCOPE].accuracy == 0.0
        assert reports[ALL_SCOPE].f1 == 0.0

    def test_twenty_pair_hand_computed_fixture(self):
        # TP=8, TN=9, FP=1, FN=2 → accuracy 17/20, precision 8/9,
        # recall 4/5, F1 16/19
        matches, truth = self.build(
            [(True, True, 8), (False, False, 9), (True, False, 1), (False, True, 2)]
        )
        reports = {r.scope: r for r in evaluate(matches, truth)}
        report = reports[ALL_SCOPE]
        assert report.support == 20
        assert report.accuracy == pytest.approx(0.85)
        assert report.precision == pytest.approx(8 / 9)
        assert report.recall == pytest.approx(0.8)
        assert report.f1 == pytest.approx(16 / 19)
        assert (report.counts.tp, report.counts.tn, report.counts.fp, report.counts.fn) == (
            8,
            9,
            1,
            2,
        )

    def test_pair_counts_toward_both_languages(self):
        matches, truth = self.build([(True, True, 4)])
        reports = {r.scope: r for r in evaluate(matches, truth)}
        assert reports["en"].support == 4
        assert reports["fr"].support == 4
        assert reports[ALL_SCOPE].support == 4

    def test_scopes_sum_to_twice_all(self):
        matches, truth = self.build([(True, True, 3), (False, False, 2)])
        match_de, pair_de = single_pair_match("Q90", True, lang_1="de", lang_2="en")
        matches.append(match_de)
        truth.append(GroundTruthEntry(pair_de, True))
        reports = evaluate(matches, truth)
        all_support = sum(r.support for r in reports if r.scope == ALL_SCOPE)
        lang_support = sum(r.support for r in reports if r.scope != ALL_SCOPE)
        assert lang_support == 2 * all_support

    def test_methods_reported_separately(self):
        match_a, pair_a = single_pair_match("Q1", True, method="LS_C")
        match_b, pair_b = single_pair_match("Q2", True, method="ML")
        truth = [GroundTruthEntry(pair_a, True), GroundTruthEntry(pair_b, False)]
        reports = evaluate([match_a, match_b], truth)
        methods = {r.method_id for r in reports}
        assert methods == {"LS_C", "ML"}

    def test_missing_truth_is_error(self):
        match, _pair = single_pair_match("Q1", True)
        with pytest.raises(DataError, match="no ground-truth"):
            evaluate([match], [])

    def test_conflicting_annotations_rejected(self):
        _match, pair = single_pair_match("Q1", True)
        entries = [GroundTruthEntry(pair, True), GroundTruthEntry(pair, False)]
        with pytest.raises(DataError, match="conflicting"):
            evaluate([], entries)

    def test_extra_truth_rows_ignored(self):
        match, pair = single_pair_match("Q1", True)
        extra = LabelPair("Q2", "en", "fr", "x", "y")
        reports = evaluate(
            [match], [GroundTruthEntry(pair, True), GroundTruthEntry(extra, False)]
        )
        assert {r.scope: r for r in reports}[ALL_SCOPE].support == 1

    def test_metrics_recompute_from_counts(self):
        counts = ConfusionCounts(tp=8, tn=9, fp=1, fn=2)
        report = EvalReport("LS_C", ALL_SCOPE, counts)
        assert report.accuracy == (8 + 9) / 20
        assert report.f1 == 2 * report.precision * report.recall / (
            report.precision + report.recall
        )


def scored_stream(scores, scorer_id="MPA", lang_2="fr"):
    return [
        ScoredPair(
            LabelPair.canonical(f"Q{i}", "en", f"l{i}", False, lang_2, f"r{i}", False),
            scorer_id,
            score,
        )
        for i, score in enumerate(scores)
    ]


class TestScoreReports:
    def test_constant_scores_single_bin(self):
        (report,) = score_reports(scored_stream([0.5] * 50))
        occupied = np.flatnonzero(report.density)
        assert len(occupied) == 1
        width = report.bin_edges[1] - report.bin_edges[0]
        assert float(np.sum(report.density) * width) == pytest.approx(1.0)

    def test_uniform_scores_flat_histogram(self):
        rng = np.random.default_rng(13)
        scores = rng.uniform(0.0, 1.0, size=10_000).tolist()
        (report,) = score_reports(scored_stream(scores))
        width = report.bin_edges[1] - report.bin_edges[0]
        assert float(np.sum(report.density) * width) == pytest.approx(1.0)
        # binomial noise: expected density 1.0 per bin, σ ≈ 0.1
        assert np.all(np.abs(report.density - 1.0) < 0.5)

    def test_range_follows_scorer(self):
        (report,) = score_reports(scored_stream([0.0, -0.5, 1.0], scorer_id="LS_C"))
        assert report.bin_edges[0] == -1.0
        assert report.bin_edges[-1] == 1.0

    def test_per_language_means(self):
        stream = scored_stream([0.2, 0.4], lang_2="fr") + scored_stream(
            [0.8], lang_2="de"
        )
        (report,) = score_reports(stream)
        assert report.language_means["en"] == pytest.approx((0.2 + 0.4 + 0.8) / 3)
        assert report.language_means["fr"] == pytest.approx(0.3)
        assert report.language_means["de"] == pytest.approx(0.8)

    def test_multiple_scorers_sorted(self):
        stream = scored_stream([0.5], scorer_id="LS_C") + scored_stream(
            [0.5], scorer_id="MPA"
        )
        reports = score_reports(stream)
        assert [r.scorer_id for r in reports] == ["MPA", "LS_C"]

    def test_empty_stream_rejected(self):
        with pytest.raises(DataError):
            score_reports([])
