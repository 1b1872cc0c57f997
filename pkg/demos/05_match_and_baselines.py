"""Pick best matches within one entity's label group, three ways.

The greedy matcher walks pairs from the highest score and keeps any pair
whose labels are both unused. The randomized baseline does the same sweep
in a seeded shuffled order; the main-label baseline just pairs the two
main labels.
"""

from label_bridge.dataset import LabelPair
from label_bridge.matcher import (
    derive_group_seed,
    greedy_best_match,
    group_scored_pairs,
    main_label_baseline,
    randomized_baseline,
)
from label_bridge.scorers import ScorerSuite

EN = [("Bahrain", True), ("Kingdom of Bahrain", False), ("BAH", False)]
FR = [("Bahreïn", True), ("Royaume de Bahreïn", False)]


def main():
    suite = ScorerSuite(["MPA"])
    pairs = [
        LabelPair("Q398", "en", "fr", en, fr, main_en, main_fr)
        for en, main_en in EN
        for fr, main_fr in FR
    ]
    scored = [sp for pair in pairs for sp in suite.score_pair(pair)]
    group = next(iter(group_scored_pairs(scored)))

    print("scored pairs:")
    for sp in sorted(group.pairs, key=lambda sp: -sp.score):
        print(f"  {sp.score:.3f}  {sp.pair.label_1!r} / {sp.pair.label_2!r}")

    greedy = greedy_best_match(group)
    random_pick = randomized_baseline(group, derive_group_seed(42, group.key))
    main_pick = main_label_baseline(group)

    for name, match in (("greedy", greedy), ("random", random_pick), ("main-label", main_pick)):
        chosen = ", ".join(f"{p.label_1!r}/{p.label_2!r}" for p in match.selected)
        print(f"{name:<11} selects {chosen}")


if __name__ == "__main__":
    main()
