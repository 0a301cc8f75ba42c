#!/usr/bin/env python3 -B
# coding=utf-8

"""
Co-occurrence Store
Sliding window entity frequencies and pair counts (densified co-occurrence matrix)
Copyright (C) 2026 TrendChains Developers
"""

import itertools
import math
import threading

from collections import Counter
from dataclasses import dataclass, field
from typing import Final, Iterable, Mapping

from trendchains.common.errors import UndefinedSimilarityError
from trendchains.common.structs import Entity

EntityPair = tuple[Entity, Entity]

MAX_DOC_ENTITIES: Final[int] = 64


def entity_pair(a: Entity, b: Entity) -> EntityPair:
    """ Order-independent pair key """

    return (a, b) if a <= b else (b, a)


@dataclass(slots=True)
class _MinuteCounts:
    entity_freq: Counter[Entity] = field(default_factory=Counter)
    pair_counts: Counter[EntityPair] = field(default_factory=Counter)


@dataclass(frozen=True, slots=True)
class StoreView:
    """ Immutable aggregate of the in-window buckets, read by the tick driver """

    tick: int | None
    entity_freq: dict[Entity, int]
    pair_counts: dict[EntityPair, int]

    def cosine_similarity(self, a: Entity, b: Entity) -> float:
        """ Cosine similarity of two in-window entities """

        return pair_cosine(a=a, b=b, entity_freq=self.entity_freq, pair_counts=self.pair_counts)


def pair_cosine(a: Entity, b: Entity, entity_freq: Mapping[Entity, int],
                pair_counts: Mapping[EntityPair, int]) -> float:
    """ Cosine of binary document incidence vectors: pair(a, b) / sqrt(freq(a) * freq(b)) """

    freq_a: int = entity_freq.get(a, 0)
    freq_b: int = entity_freq.get(b, 0)

    if freq_a <= 0 or freq_b <= 0:
        raise UndefinedSimilarityError(f'No in-window frequency for {a if freq_a <= 0 else b!r}')

    if a == b:
        return 1.0

    return min(1.0, pair_counts.get(entity_pair(a=a, b=b), 0) / math.sqrt(freq_a * freq_b))


class CooccurrenceStore:
    """ Per-minute buckets of entity frequencies and pair counts over a sliding window of W minutes """

    TITLE: Final[str] = 'Co-occurrence Store'

    def __init__(self, window: int, max_doc_entities: int = MAX_DOC_ENTITIES) -> None:
        self.window: int = window
        self.max_doc_entities: int = max_doc_entities

        self.entity_freq: Counter[Entity] = Counter()
        self.pair_counts: Counter[EntityPair] = Counter()

        self.current_tick: int | None = None

        self._buckets: dict[int, _MinuteCounts] = {}

        self._lock: threading.Lock = threading.Lock()

    def _truncate(self, entities: set[Entity] | frozenset[Entity]) -> list[Entity]:
        """ Keep the most frequent in-window entities of pathological documents """

        ordered: list[Entity] = sorted(entities)

        if len(ordered) <= self.max_doc_entities:
            return ordered

        ordered.sort(key=lambda entity: -self.entity_freq.get(entity, 0))

        return sorted(ordered[:self.max_doc_entities])

    def update_counts(self, tick: int, filtered_entities: Iterable[Entity]) -> None:
        """ Count one document's trend-filtered entities and their C(n, 2) pairs into the bucket of tick """

        entities: set[Entity] = set(filtered_entities)

        if not entities:
            return

        with self._lock:
            if self.current_tick is not None and tick <= self.current_tick - self.window:
                return

            members: list[Entity] = self._truncate(entities=entities)

            bucket: _MinuteCounts = self._buckets.setdefault(tick, _MinuteCounts())

            bucket.entity_freq.update(members)
            self.entity_freq.update(members)

            # Members are sorted, so combinations already yield canonical pair keys
            pairs: list[EntityPair] = list(itertools.combinations(members, 2))

            bucket.pair_counts.update(pairs)
            self.pair_counts.update(pairs)

    def evict_out_of_window(self, current_tick: int) -> None:
        """ Remove buckets older than current_tick - W + 1 """

        with self._lock:
            floor_tick: int = current_tick - self.window + 1

            for bucket_tick in sorted(self._buckets):
                if bucket_tick >= floor_tick:
                    break

                bucket: _MinuteCounts = self._buckets.pop(bucket_tick)

                self.entity_freq.subtract(bucket.entity_freq)
                self.pair_counts.subtract(bucket.pair_counts)

                for entity in bucket.entity_freq:
                    if self.entity_freq[entity] <= 0:
                        del self.entity_freq[entity]

                for pair in bucket.pair_counts:
                    if self.pair_counts[pair] <= 0:
                        del self.pair_counts[pair]

            if self.current_tick is None or current_tick > self.current_tick:
                self.current_tick = current_tick

    def cosine_similarity(self, a: Entity, b: Entity) -> float:
        """ Cosine similarity of two in-window entities """

        with self._lock:
            return pair_cosine(a=a, b=b, entity_freq=self.entity_freq, pair_counts=self.pair_counts)

    def view(self) -> StoreView:
        """ Consistent copy of the in-window aggregates """

        with self._lock:
            return StoreView(tick=self.current_tick, entity_freq=dict(self.entity_freq),
                             pair_counts=dict(self.pair_counts))

    def bucket_ticks(self) -> list[int]:
        """ Ticks with live buckets """

        return sorted(self._buckets)
