"""Evaluate matcher output against ground-truth annotations.

Runs the cognate scorer over the bundled fixture dataset, matches each
group greedily, and classifies every pair decision against the bundled
annotations. Every selected pair is a positive prediction, every rejected
pair a negative one, so standard confusion metrics apply per method and
per language.
"""

from pathlib import Path

from label_bridge import artifacts
from label_bridge.evaluation import evaluate, score_reports
from label_bridge.matcher import greedy_best_match, group_scored_pairs
from label_bridge.scorers import ScorerSuite

FIXTURE = Path(__file__).parent.parent / "tests" / "data" / "fixture"


def main():
    truth = artifacts.read_truth(FIXTURE / "truth.tsv")
    annotated = {entry.pair for entry in truth}
    suite = ScorerSuite(["MPA"])

    scored = [
        sp
        for entry in truth
        for sp in suite.score_pair(entry.pair)
    ]
    # deduplicate: several annotations can share a pair's group
    scored = sorted(set(scored), key=lambda sp: sp.pair.key)
    print(f"{len(annotated)} annotated pairs, {len(scored)} scored")

    matches = [greedy_best_match(g) for g in group_scored_pairs(scored)]
    reports = evaluate(matches, truth)
    print(artifacts.format_eval_grid(reports))

    distribution = score_reports(scored)[0]
    peak = distribution.density.argmax()
    low, high = distribution.bin_edges[peak], distribution.bin_edges[peak + 1]
    print(f"\nMPA scores: {distribution.count} values, densest bin [{low:.2f}, {high:.2f})")


if __name__ == "__main__":
    main()
