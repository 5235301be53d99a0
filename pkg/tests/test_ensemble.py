import random

import pytest

from propdetect.corpus import LabelVocabulary
from propdetect.ensemble import (count_empty, majority_threshold, tally, vote,
                                 vote_with_fallback)
from propdetect.errors import ValidationError
from propdetect.predictions import Prediction

LABELS = ["L1", "L2", "L3", "L4", "L5", "L6"]


def preds(mapping: dict) -> list[Prediction]:
    return [Prediction(i, tuple(sorted(labels))) for i, labels in mapping.items()]


def five_model_fixture():
    """votes over e: L1 x5, L2 x3, L3 x2."""
    return [
        preds({"e": {"L1", "L2", "L3"}}),
        preds({"e": {"L1", "L2", "L3"}}),
        preds({"e": {"L1", "L2"}}),
        preds({"e": {"L1"}}),
        preds({"e": {"L1"}}),
    ]


def as_sets(results):
    return {p.id: set(p.labels) for p in results}


class TestVote:
    def test_majority_threshold_rule(self):
        assert majority_threshold(1) == 1
        assert majority_threshold(3) == 2
        assert majority_threshold(5) == 3
        assert majority_threshold(4) == 3  # even k: exact ties excluded
        assert majority_threshold(7) == 4

    def test_five_models_majority(self):
        results = vote(five_model_fixture())
        assert as_sets(results) == {"e": {"L1", "L2"}}

    def test_unanimity(self):
        sets = [preds({"e1": {"L1", "L4"}, "e2": set()})] * 5
        assert as_sets(vote(sets)) == {"e1": {"L1", "L4"}, "e2": set()}

    def test_no_majority_gives_empty_set(self):
        sets = [
            preds({"e": {"L1"}}),
            preds({"e": {"L2"}}),
            preds({"e": {"L3"}}),
            preds({"e": {"L1"}}),
            preds({"e": {"L2"}}),
        ]  # max votes 2 < 3
        results = vote(sets)
        assert as_sets(results) == {"e": set()}
        assert count_empty(results) == 1

    def test_custom_threshold(self):
        results = vote(five_model_fixture(), threshold_votes=2)
        assert as_sets(results) == {"e": {"L1", "L2", "L3"}}

    def test_single_model_is_identity(self):
        single = preds({"e1": {"L1"}, "e2": {"L2", "L3"}})
        assert as_sets(vote([single])) == as_sets(single)

    def test_id_mismatch_lists_difference(self):
        a = preds({"e1": {"L1"}, "e2": {"L1"}})
        b = preds({"e1": {"L1"}, "e3": {"L1"}})
        with pytest.raises(ValidationError) as err:
            vote([a, b])
        assert "e2" in str(err.value) and "e3" in str(err.value)

    def test_no_prediction_sets_rejected(self):
        with pytest.raises(ValidationError):
            vote([])

    def test_duplicate_ids_within_a_set_rejected(self):
        doubled = [Prediction("e", ("L1",)), Prediction("e", ("L1",))]
        with pytest.raises(ValidationError, match="duplicate"):
            vote([doubled])

    def test_bad_threshold_rejected(self):
        with pytest.raises(ValidationError):
            vote(five_model_fixture(), threshold_votes=0)

    def test_vocab_validation(self):
        vocab = LabelVocabulary(["L1"])
        with pytest.raises(ValidationError, match="outside"):
            vote([preds({"e": {"L9"}})], vocab=vocab)

    def test_output_order_follows_vocab(self):
        vocab = LabelVocabulary(["L3", "L1", "L2"])
        sets = [preds({"e": {"L1", "L3"}})]
        assert vote(sets, vocab=vocab)[0].labels == ("L3", "L1")

    def test_scores_ignored(self):
        with_scores = [Prediction("e", ("L1",), scores={"L1": 0.9, "L2": 0.89})]
        without = [Prediction("e", ("L1",))]
        assert as_sets(vote([with_scores])) == as_sets(vote([without]))


class TestFallback:
    def test_top_plurality_fills_empty(self):
        sets = [
            preds({"e": {"L3"}}),
            preds({"e": {"L3"}}),
            preds({"e": {"L1"}}),
            preds({"e": {"L2"}}),
            preds({"e": set()}),
        ]  # max votes 2 on L3, threshold 3
        assert as_sets(vote(sets)) == {"e": set()}
        assert as_sets(vote_with_fallback(sets, mode="top-plurality")) == {"e": {"L3"}}

    def test_fallback_untouched_when_majority_exists(self):
        sets = five_model_fixture()
        assert as_sets(vote_with_fallback(sets, mode="top-plurality")) == as_sets(vote(sets))

    def test_all_models_silent_stays_empty(self):
        sets = [preds({"e": set()})] * 5
        assert as_sets(vote_with_fallback(sets, mode="top-plurality")) == {"e": set()}

    def test_mode_none_is_plain_vote(self):
        sets = five_model_fixture()
        assert as_sets(vote_with_fallback(sets, mode="none")) == as_sets(vote(sets))

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValidationError):
            vote_with_fallback(five_model_fixture(), mode="weird")


def random_prediction_sets(rng: random.Random, k: int, n_examples: int):
    ids = [f"e{i}" for i in range(n_examples)]
    return [
        [Prediction(i, tuple(sorted(x for x in LABELS if rng.random() < 0.35)))
         for i in ids]
        for _ in range(k)
    ]


class TestVoteProperties:
    def test_permutation_invariance(self):
        rng = random.Random(11)
        for _ in range(100):
            k = rng.choice([1, 3, 5, 7])
            sets = random_prediction_sets(rng, k, rng.randint(1, 8))
            shuffled = sets[:]
            rng.shuffle(shuffled)
            assert as_sets(vote(sets)) == as_sets(vote(shuffled))

    def test_monotone_in_votes(self):
        rng = random.Random(12)
        for _ in range(100):
            k = rng.choice([3, 5, 7])
            sets = random_prediction_sets(rng, k, rng.randint(1, 6))
            before = as_sets(vote(sets))
            target_set = rng.randrange(k)
            example = rng.choice(sets[target_set])
            name = rng.choice(LABELS)
            boosted = [list(s) for s in sets]
            boosted[target_set] = [
                Prediction(p.id, tuple(sorted(set(p.labels) | {name})))
                if p.id == example.id else p
                for p in boosted[target_set]
            ]
            after = as_sets(vote(boosted))
            for example_id, labels in before.items():
                assert labels - {name} <= after[example_id]
                if name in labels:
                    assert name in after[example_id]

    def test_idempotent_replication(self):
        rng = random.Random(13)
        for _ in range(100):
            base = random_prediction_sets(rng, 1, rng.randint(1, 8))[0]
            k = rng.choice([1, 3, 5, 7])
            assert as_sets(vote([base] * k)) == {p.id: set(p.labels) for p in base}

    def test_no_invented_labels(self):
        rng = random.Random(14)
        for _ in range(100):
            k = rng.choice([1, 3, 5, 7])
            sets = random_prediction_sets(rng, k, rng.randint(1, 8))
            result = as_sets(vote(sets))
            for example_id, labels in result.items():
                union = set()
                for s in sets:
                    for p in s:
                        if p.id == example_id:
                            union |= set(p.labels)
                assert labels <= union
