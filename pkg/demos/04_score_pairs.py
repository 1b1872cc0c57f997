"""Score a few label pairs with every scorer.

MPA is the dictionary/romanization cognate score; the SIM_* family aligns
sub-word embeddings under different strategies; LS_*/LB_* compare whole-
label sentence embeddings by cosine or inverse Euclidean distance. The
synthetic provider stands in for a real model so this runs offline.
"""

from label_bridge.dataset import LabelPair
from label_bridge.embeddings import SyntheticEmbeddingProvider
from label_bridge.scorers import SCORER_IDS, ScorerSuite

PAIRS = [
    LabelPair("Q398", "en", "fr", "Bahrain", "Bahreïn"),
    LabelPair("Q398", "en", "fr", "Bahrain", "Royaume de Bahreïn"),
    LabelPair("Q1726", "de", "en", "München", "Munich"),
    LabelPair("Q1726", "de", "en", "München", "Gateway to the Alps"),
]


def main():
    suite = ScorerSuite(SCORER_IDS, embedding_provider=SyntheticEmbeddingProvider())
    width = max(len(f"{p.label_1} / {p.label_2}") for p in PAIRS)
    print(f"{'pair':<{width + 2}}" + "".join(f"{sid:>8}" for sid in SCORER_IDS))
    for pair in PAIRS:
        scores = {sp.scorer_id: sp.score for sp in suite.score_pair(pair)}
        name = f"{pair.label_1} / {pair.label_2}"
        print(f"{name:<{width + 2}}" + "".join(f"{scores[sid]:>8.3f}" for sid in SCORER_IDS))
    print("\ncognate overlap (MPA) tracks spelling; embedding scores need a real model")


if __name__ == "__main__":
    main()
