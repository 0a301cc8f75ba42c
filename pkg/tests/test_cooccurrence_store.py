#!/usr/bin/env python3 -B
# coding=utf-8

"""
Copyright (C) 2026 TrendChains Developers
"""

import itertools
import math
import random

from collections import Counter

import numpy as np
import pytest

from trendchains.common.errors import UndefinedSimilarityError
from trendchains.common.structs import Entity
from trendchains.cooccurrence_store import CooccurrenceStore, entity_pair

from tests.helpers import APPLE_EVENT, IPHONE, KEYNOTE_ROWS, TIM_COOK, tag, tags


def keynote_store() -> CooccurrenceStore:
    store: CooccurrenceStore = CooccurrenceStore(window=10)

    for row in KEYNOTE_ROWS:
        store.update_counts(tick=0, filtered_entities=row)

    return store


def test_keynote_counts() -> None:
    store: CooccurrenceStore = keynote_store()

    assert (store.entity_freq[IPHONE], store.entity_freq[APPLE_EVENT], store.entity_freq[TIM_COOK]) == (3, 2, 2)
    assert store.pair_counts[entity_pair(a=IPHONE, b=APPLE_EVENT)] == 2
    assert store.pair_counts[entity_pair(a=TIM_COOK, b=IPHONE)] == 2
    assert store.pair_counts[entity_pair(a=APPLE_EVENT, b=TIM_COOK)] == 1


def test_keynote_cosine() -> None:
    store: CooccurrenceStore = keynote_store()

    assert store.cosine_similarity(a=IPHONE, b=APPLE_EVENT) == pytest.approx(0.81649, abs=1e-4)
    assert store.cosine_similarity(a=APPLE_EVENT, b=IPHONE) == store.cosine_similarity(a=IPHONE, b=APPLE_EVENT)
    assert store.cosine_similarity(a=APPLE_EVENT, b=TIM_COOK) == pytest.approx(0.5)
    assert store.cosine_similarity(a=IPHONE, b=IPHONE) == 1.0


def test_singleton_and_empty_updates() -> None:
    store: CooccurrenceStore = CooccurrenceStore(window=3)

    store.update_counts(tick=0, filtered_entities={tag('a')})
    store.update_counts(tick=0, filtered_entities=set())

    assert store.entity_freq == Counter({tag('a'): 1})
    assert not store.pair_counts


def test_same_set_twice_doubles() -> None:
    store: CooccurrenceStore = CooccurrenceStore(window=3)

    for _ in range(2):
        store.update_counts(tick=0, filtered_entities=tags(['a', 'b', 'c']))

    assert set(store.entity_freq.values()) == {2}
    assert set(store.pair_counts.values()) == {2}
    assert len(store.pair_counts) == 3


def test_never_co_occurring_and_unknown() -> None:
    store: CooccurrenceStore = CooccurrenceStore(window=3)

    store.update_counts(tick=0, filtered_entities=tags(['a', 'b']))
    store.update_counts(tick=0, filtered_entities=tags(['c']))

    assert store.cosine_similarity(a=tag('a'), b=tag('c')) == 0.0

    with pytest.raises(UndefinedSimilarityError):
        store.cosine_similarity(a=tag('a'), b=tag('zzz'))


def test_window_one_forgets_previous_tick() -> None:
    store: CooccurrenceStore = CooccurrenceStore(window=1)

    store.update_counts(tick=4, filtered_entities=tags(['a', 'b']))
    store.evict_out_of_window(current_tick=4)

    assert store.entity_freq[tag('a')] == 1

    store.evict_out_of_window(current_tick=5)

    assert not store.entity_freq
    assert not store.pair_counts


def test_window_three_evicts_oldest_bucket() -> None:
    store: CooccurrenceStore = CooccurrenceStore(window=3)

    for tick in (10, 11, 12, 13):
        store.update_counts(tick=tick, filtered_entities=tags(['a', f't{tick}']))

    store.evict_out_of_window(current_tick=13)

    assert store.bucket_ticks() == [11, 12, 13]
    assert tag('t10') not in store.entity_freq
    assert store.entity_freq[tag('a')] == 3


def test_oversized_document_truncated() -> None:
    store: CooccurrenceStore = CooccurrenceStore(window=3, max_doc_entities=4)

    store.update_counts(tick=0, filtered_entities=tags(['hot1', 'hot2']))

    store.update_counts(tick=0, filtered_entities=tags(['hot1', 'hot2', 'a', 'b', 'c', 'd', 'e']))

    assert store.entity_freq[tag('hot1')] == 2
    assert store.entity_freq[tag('hot2')] == 2
    assert sum(store.entity_freq.values()) == 2 + 4
    assert sum(store.pair_counts.values()) == 1 + 6


def test_random_stream_matches_recount() -> None:
    rng: random.Random = random.Random(5)

    window: int = 4

    store: CooccurrenceStore = CooccurrenceStore(window=window)

    history: list[tuple[int, frozenset[Entity]]] = []

    for tick in range(30):
        for _ in range(rng.randint(0, 5)):
            members: frozenset[Entity] = tags(rng.sample('abcdefg', rng.randint(1, 4)))

            store.update_counts(tick=tick, filtered_entities=members)

            history.append((tick, members))

        store.evict_out_of_window(current_tick=tick)

        live: list[frozenset[Entity]] = [members for when, members in history if when > tick - window]

        freq: Counter = Counter(entity for members in live for entity in members)
        pairs: Counter = Counter(pair for members in live for pair in itertools.combinations(sorted(members), 2))

        assert dict(store.entity_freq) == dict(freq)
        assert dict(store.pair_counts) == dict(pairs)

        for (entity_a, entity_b), count in pairs.items():
            assert count <= min(freq[entity_a], freq[entity_b])


def test_densified_cosine_matches_incidence_vectors() -> None:
    rng: random.Random = random.Random(21)

    for _ in range(20):
        documents: list[frozenset[Entity]] = [tags(rng.sample('abcdef', rng.randint(1, 4)))
                                              for _ in range(rng.randint(1, 50))]

        store: CooccurrenceStore = CooccurrenceStore(window=1)

        for members in documents:
            store.update_counts(tick=0, filtered_entities=members)

        present: list[Entity] = sorted(store.entity_freq)

        incidence: np.ndarray = np.array([[1.0 if entity in members else 0.0 for members in documents]
                                          for entity in present])

        for index_a, index_b in itertools.combinations(range(len(present)), 2):
            vector_a, vector_b = incidence[index_a], incidence[index_b]

            expected: float = float(vector_a @ vector_b) / math.sqrt(float(vector_a @ vector_a * (vector_b @ vector_b)))

            assert store.cosine_similarity(a=present[index_a], b=present[index_b]) == pytest.approx(expected, abs=1e-12)
