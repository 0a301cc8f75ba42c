#!/usr/bin/env python3 -B
# coding=utf-8

"""
Trend Detector
Short/long window expected-vs-observed entity scoring per domain
Copyright (C) 2026 TrendChains Developers
"""

import logging
import threading

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Final, Mapping

from trendchains.common.config import TREND_SCORE_EPSILON, EngineConfig
from trendchains.common.errors import UndefinedDomainError
from trendchains.common.structs import Document, Entity

logger: logging.Logger = logging.getLogger(__name__)

DomainKey = tuple[str, Entity]

AuthorKey = tuple[str, str, Entity]


@dataclass(frozen=True, slots=True)
class TrendSnapshot:
    """ Ranked trending entities per domain at a tick """

    tick: int
    per_domain: Mapping[str, tuple[tuple[Entity, float], ...]] = field(default_factory=dict)

    def entities(self) -> frozenset[Entity]:
        """ Trending entities of every domain """

        return frozenset(entity for ranked in self.per_domain.values() for entity, _ in ranked)


@dataclass(slots=True)
class _MinuteBucket:
    counts: Counter[DomainKey] = field(default_factory=Counter)
    totals: Counter[str] = field(default_factory=Counter)


class CountWindows:
    """
    Per-minute (domain, entity) buckets aggregated over a short and a long window

    Buckets newer than both window floors add to both aggregates. Advancing the window
    subtracts each bucket exactly once per aggregate, so counts stay exact.
    """

    def __init__(self, short_window: int, long_window: int) -> None:
        self.short_window: int = short_window
        self.long_window: int = long_window

        self.short_counts: Counter[DomainKey] = Counter()
        self.long_counts: Counter[DomainKey] = Counter()

        self.short_totals: Counter[str] = Counter()
        self.long_totals: Counter[str] = Counter()

        self._buckets: dict[int, _MinuteBucket] = {}

        # Oldest tick still inside each aggregate
        self._short_floor: int | None = None
        self._long_floor: int | None = None

    def add(self, tick: int, domain: str, entity: Entity, count: int = 1) -> None:
        """ Count an (entity, domain) tuple into the bucket of tick """

        if self._long_floor is not None and tick < self._long_floor:
            return

        bucket: _MinuteBucket = self._buckets.setdefault(tick, _MinuteBucket())

        bucket.counts[(domain, entity)] += count
        bucket.totals[domain] += count

        self.long_counts[(domain, entity)] += count
        self.long_totals[domain] += count

        if self._short_floor is None or tick >= self._short_floor:
            self.short_counts[(domain, entity)] += count
            self.short_totals[domain] += count

    def advance(self, tick: int) -> None:
        """ Move both window floors so that tick is the newest minute """

        short_floor: int = tick - self.short_window + 1
        long_floor: int = tick - self.long_window + 1

        for bucket_tick in sorted(self._buckets):
            bucket: _MinuteBucket = self._buckets[bucket_tick]

            was_short: bool = self._short_floor is None or bucket_tick >= self._short_floor

            if was_short and bucket_tick < short_floor:
                self.short_counts.subtract(bucket.counts)
                self.short_totals.subtract(bucket.totals)

            if bucket_tick < long_floor:
                self.long_counts.subtract(bucket.counts)
                self.long_totals.subtract(bucket.totals)

                del self._buckets[bucket_tick]

        if self._short_floor is None or short_floor > self._short_floor:
            self._short_floor = short_floor

        if self._long_floor is None or long_floor > self._long_floor:
            self._long_floor = long_floor

        for counter in (self.short_counts, self.long_counts, self.short_totals, self.long_totals):
            for key in [key for key, value in counter.items() if value <= 0]:
                del counter[key]


class TrendDetector:
    """ Trend detection stage: throttled counting, scoring and per-domain ranking """

    TITLE: Final[str] = 'Trend Detector'

    def __init__(self, config: EngineConfig) -> None:
        self.config: EngineConfig = config

        self.windows: CountWindows = CountWindows(short_window=config.short_window,
                                                  long_window=config.long_window)

        self.throttled: int = 0

        # (author, domain, entity) -> tick of the last counted contribution, keys also bucketed by that tick
        self._author_seen: dict[AuthorKey, int] = {}
        self._seen_by_tick: defaultdict[int, set[AuthorKey]] = defaultdict(set)

        self._lock: threading.Lock = threading.Lock()

    def ingest_for_trends(self, doc: Document) -> None:
        """ Emit <entity, domain, 1> for each entity, one count per author per short window """

        tick: int = doc.tick

        with self._lock:
            for entity in doc.entities:
                author_key: AuthorKey = (doc.author_id, doc.domain, entity)

                last_tick: int | None = self._author_seen.get(author_key)

                if last_tick is not None and tick - last_tick < self.config.short_window:
                    self.throttled += 1

                    continue

                self._author_seen[author_key] = tick
                self._seen_by_tick[tick].add(author_key)

                self.windows.add(tick=tick, domain=doc.domain, entity=entity)

    @property
    def throttle_entries(self) -> int:
        """ Tracked (author, domain, entity) contributions """

        return len(self._author_seen)

    def expected_count(self, d: str, e: Entity) -> float:
        """ E(d, e) = N_s(d) / N_l(d) * N_l(d, e) """

        long_total: int = self.windows.long_totals.get(d, 0)

        if long_total <= 0:
            raise UndefinedDomainError(f'Domain {d!r} has no long window history')

        return self.windows.short_totals.get(d, 0) / long_total * self.windows.long_counts.get((d, e), 0)

    def score_entity(self, d: str, e: Entity) -> float:
        """ Observed short window count over smoothed expected count """

        observed: int = self.windows.short_counts.get((d, e), 0)

        if observed <= 0:
            return 0.0

        return observed / (self.expected_count(d=d, e=e) + TREND_SCORE_EPSILON)

    def trend_tick(self, tick: int) -> TrendSnapshot:
        """ Advance windows to tick, score and rank trending entities per domain """

        with self._lock:
            self.windows.advance(tick=tick)

            for seen_tick in [key for key in self._seen_by_tick if tick - key >= self.config.short_window]:
                for author_key in self._seen_by_tick.pop(seen_tick):
                    if self._author_seen.get(author_key) == seen_tick:
                        del self._author_seen[author_key]

            domain_entities: defaultdict[str, list[Entity]] = defaultdict(list)

            for domain, entity in self.windows.short_counts:
                domain_entities[domain].append(entity)

            per_domain: dict[str, tuple[tuple[Entity, float], ...]] = {}

            for domain in sorted(domain_entities):
                try:
                    scored: list[tuple[Entity, float]] = [
                        (entity, self.score_entity(d=domain, e=entity)) for entity in domain_entities[domain]]
                except UndefinedDomainError as error:
                    logger.debug('Skipped non-scorable domain: %s', error)

                    continue

                ranked: list[tuple[Entity, float]] = sorted(
                    (item for item in scored if item[1] > 0 and item[1] >= self.config.min_trend_score),
                    key=lambda item: (-item[1], item[0]))

                if ranked:
                    per_domain[domain] = tuple(ranked[:self.config.trends_top_k])

        return TrendSnapshot(tick=tick, per_domain=per_domain)
