"""Best-match selection per (entity, language 1, language 2) group.

The production matcher is greedy: visit pairs in descending score order
and select any pair whose labels are both still unmatched. Two baselines
share the selection sweep: a seeded random visitation order, and
main-label-only selection. Baselines carry their own method codes (RAN,
ML) so evaluation can compare them against the scorers.
"""

import hashlib
import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .dataset import LabelPair
from .errors import DataError
from .scorers import ScoredPair

RANDOM_BASELINE_ID = "RAN"
MAIN_LABEL_BASELINE_ID = "ML"
BASELINE_IDS = (RANDOM_BASELINE_ID, MAIN_LABEL_BASELINE_ID)

GroupKey = tuple[str, str, str]


@dataclass
class MatchGroup:
    """All scored pairs of one entity/language-pair/scorer combination."""

    key: GroupKey
    pairs: list[ScoredPair]

    def __post_init__(self):
        if not self.pairs:
            raise DataError(f"group {self.key} is empty")
        scorer_ids = {sp.scorer_id for sp in self.pairs}
        if len(scorer_ids) > 1:
            raise DataError(f"group {self.key} mixes scorers: {sorted(scorer_ids)}")
        seen = set()
        for sp in self.pairs:
            if sp.pair.group_key != self.key:
                raise DataError(
                    f"pair {sp.pair.key} does not belong to group {self.key}"
                )
            label_key = (sp.pair.label_1, sp.pair.label_2)
            if label_key in seen:
                raise DataError(f"group {self.key} has duplicate pair {label_key}")
            seen.add(label_key)

    @property
    def scorer_id(self) -> str:
        return self.pairs[0].scorer_id

    def is_complete(self) -> bool:
        """True when the group is a full cross product of its labels."""
        left = {sp.pair.label_1 for sp in self.pairs}
        right = {sp.pair.label_2 for sp in self.pairs}
        return len(self.pairs) == len(left) * len(right)


@dataclass
class BestMatchSet:
    """The matcher's verdict for one group under one method."""

    key: GroupKey
    method_id: str
    selected: list[LabelPair] = field(default_factory=list)
    rejected: list[LabelPair] = field(default_factory=list)

    def validate(self, expect_full_cardinality: bool = True) -> None:
        """Check one-to-one selection and the partition of the group.

        The cardinality rule |selected| = min(distinct sides) holds for
        sweep-based methods on complete groups, but not for the main-label
        baseline, which passes ``expect_full_cardinality=False``.
        """
        left = [p.label_1 for p in self.selected]
        right = [p.label_2 for p in self.selected]
        if len(set(left)) != len(left) or len(set(right)) != len(right):
            raise DataError(f"group {self.key}: selected pairs share a label")
        all_pairs = self.selected + self.rejected
        keys = [p.key for p in all_pairs]
        if len(set(keys)) != len(keys):
            raise DataError(f"group {self.key}: selected/rejected overlap")
        if expect_full_cardinality:
            distinct_1 = len({p.label_1 for p in all_pairs})
            distinct_2 = len({p.label_2 for p in all_pairs})
            if len(self.selected) != min(distinct_1, distinct_2):
                raise DataError(
                    f"group {self.key}: {len(self.selected)} selected, expected "
                    f"{min(distinct_1, distinct_2)}"
                )


def _sweep(group: MatchGroup, ordered: Sequence[LabelPair], method_id: str) -> BestMatchSet:
    used_1: set[str] = set()
    used_2: set[str] = set()
    result = BestMatchSet(group.key, method_id)
    for pair in ordered:
        if pair.label_1 not in used_1 and pair.label_2 not in used_2:
            used_1.add(pair.label_1)
            used_2.add(pair.label_2)
            result.selected.append(pair)
        else:
            result.rejected.append(pair)
    if group.is_complete():
        result.validate()
    else:
        result.validate(expect_full_cardinality=False)
    return result


def greedy_best_match(group: MatchGroup) -> BestMatchSet:
    """Select pairs in descending score order, skipping used labels.

    Ties break on (label_1, label_2) so output is independent of input
    order. The result is order-optimal per step, not globally max-weight.
    """
    order = sorted(
        group.pairs, key=lambda sp: (-sp.score, sp.pair.label_1, sp.pair.label_2)
    )
    return _sweep(group, [sp.pair for sp in order], group.scorer_id)


def randomized_baseline(group: MatchGroup, seed: int) -> BestMatchSet:
    """Same sweep as greedy but with a seeded uniform visitation order."""
    pairs = sorted((sp.pair for sp in group.pairs), key=lambda p: (p.label_1, p.label_2))
    random.Random(seed).shuffle(pairs)
    return _sweep(group, pairs, RANDOM_BASELINE_ID)


def main_label_baseline(group: MatchGroup) -> BestMatchSet:
    """Select exactly the main-label/main-label pairs."""
    pairs = sorted((sp.pair for sp in group.pairs), key=lambda p: (p.label_1, p.label_2))
    result = BestMatchSet(group.key, MAIN_LABEL_BASELINE_ID)
    for pair in pairs:
        if pair.is_main_1 and pair.is_main_2:
            result.selected.append(pair)
        else:
            result.rejected.append(pair)
    result.validate(expect_full_cardinality=False)
    return result


def derive_group_seed(master_seed: int, key: GroupKey) -> int:
    """Stable per-group subseed so groups shuffle independently."""
    digest = hashlib.sha256(
        f"{master_seed}|{key[0]}|{key[1]}|{key[2]}".encode("utf-8")
    ).digest()
    return int.from_bytes(digest[:8], "little")


def group_scored_pairs(scored: Iterable[ScoredPair]) -> Iterator[MatchGroup]:
    """Bucket a scored stream into groups, one per (key, scorer).

    Output is sorted by group key then scorer id, so downstream artifacts
    are deterministic regardless of input order.
    """
    buckets: dict[tuple[GroupKey, str], list[ScoredPair]] = {}
    for sp in scored:
        buckets.setdefault((sp.pair.group_key, sp.scorer_id), []).append(sp)
    for key, _scorer in sorted(buckets):
        yield MatchGroup(key, buckets[(key, _scorer)])
