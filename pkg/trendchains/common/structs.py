#!/usr/bin/env python3 -B
# coding=utf-8

"""
Copyright (C) 2026 TrendChains Developers
"""

import math

from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Final, Mapping

from trendchains.common.errors import ClusterError, DocumentError, EntityError
from trendchains.common.patterns import PAT_WHITESPACE_RUN

MINUTE_MS: Final[int] = 60_000


class EntityKind(str, Enum):
    """ Supported entity kinds, custom covers opaque knowledge graph ids """

    HASHTAG = 'hashtag'
    NAMED_ENTITY = 'named_entity'
    CUSTOM = 'custom'


@dataclass(frozen=True, order=True, slots=True)
class Entity:
    """ Normalized entity tag, equal when kind and text are equal """

    kind: EntityKind
    text: str

    def __post_init__(self) -> None:
        if not self.text:
            raise EntityError('Entity text must not be empty')

    def __str__(self) -> str:
        return self.text


def normalize_entity(kind: EntityKind | str, raw: str) -> Entity:
    """ Canonicalize raw entity text: trim, fold whitespace runs, case-fold """

    try:
        entity_kind: EntityKind = EntityKind(kind)
    except ValueError as error:
        raise EntityError(f'Unknown entity kind: {kind!r}') from error

    if not isinstance(raw, str):
        raise EntityError(f'Entity text must be a string, not {type(raw).__name__}')

    text: str = PAT_WHITESPACE_RUN.sub(' ', raw).strip().casefold()

    if not text:
        raise EntityError(f'Empty {entity_kind.value} entity after normalization: {raw!r}')

    return Entity(kind=entity_kind, text=text)


def tick_of(timestamp: int) -> int:
    """ Minute bucket (minutes since stream epoch) of an epoch milliseconds timestamp """

    return timestamp // MINUTE_MS


@dataclass(frozen=True, slots=True)
class Document:
    """ Timestamped bag of entities with author and domain attribution """

    id: str
    timestamp: int
    author_id: str
    domain: str
    entities: frozenset[Entity]

    def __post_init__(self) -> None:
        if isinstance(self.timestamp, bool) or not isinstance(self.timestamp, int) or self.timestamp < 0:
            raise DocumentError(f'Document {self.id!r} timestamp must be a non-negative integer')

        if not isinstance(self.entities, frozenset):
            object.__setattr__(self, 'entities', frozenset(self.entities))

    @property
    def tick(self) -> int:
        """ Minute bucket of the document """

        return tick_of(timestamp=self.timestamp)


@dataclass(frozen=True, slots=True)
class Cluster:
    """ Set of at least two entities with their window frequencies """

    id: str
    entities: frozenset[Entity]
    metadata: Mapping[Entity, int] = field(default_factory=dict)
    rank_score: float = 0.0

    def __post_init__(self) -> None:
        if not isinstance(self.entities, frozenset):
            object.__setattr__(self, 'entities', frozenset(self.entities))

        if len(self.entities) < 2:
            raise ClusterError(f'Cluster {self.id!r} needs at least 2 entities, got {len(self.entities)}')

        foreign: set[Entity] = set(self.metadata) - self.entities

        if foreign:
            raise ClusterError(f'Cluster {self.id!r} metadata has non-member entities: {sorted(foreign)}')

        if any(count < 0 for count in self.metadata.values()):
            raise ClusterError(f'Cluster {self.id!r} metadata counts must be non-negative')

        if not math.isfinite(self.rank_score) or self.rank_score < 0:
            raise ClusterError(f'Cluster {self.id!r} rank score must be finite and non-negative')

        object.__setattr__(self, 'metadata', MappingProxyType(dict(self.metadata)))

    @property
    def aggregate_frequency(self) -> int:
        """ Sum of member window frequencies """

        return sum(self.metadata.values())

    def sorted_entities(self) -> list[Entity]:
        """ Members in canonical order """

        return sorted(self.entities)


@dataclass(frozen=True, slots=True)
class ClusterSnapshot:
    """ Ranked cluster list of one minute """

    tick: int
    clusters: tuple[Cluster, ...] = ()
    dropped_documents: int = 0

    def __post_init__(self) -> None:
        if not isinstance(self.clusters, tuple):
            object.__setattr__(self, 'clusters', tuple(self.clusters))

        cluster_ids: list[str] = [cluster.id for cluster in self.clusters]

        if len(set(cluster_ids)) != len(cluster_ids):
            raise ClusterError(f'Duplicate cluster ids in snapshot of tick {self.tick}')

        for prev_cluster, next_cluster in zip(self.clusters, self.clusters[1:]):
            if (-prev_cluster.rank_score, prev_cluster.id) > (-next_cluster.rank_score, next_cluster.id):
                raise ClusterError(f'Snapshot of tick {self.tick} is not in rank order')


@dataclass(slots=True)
class ClusterChain:
    """ Time-ordered clusters sharing one chain id """

    id: str
    members: list[tuple[int, Cluster]] = field(default_factory=list)

    def append(self, tick: int, cluster: Cluster) -> None:
        """ Add the cluster of a later tick """

        if cluster.id != self.id:
            raise ClusterError(f'Cluster {cluster.id!r} does not belong to chain {self.id!r}')

        if self.members and tick <= self.members[-1][0]:
            raise ClusterError(f'Chain {self.id!r} ticks must be strictly increasing ({tick})')

        self.members.append((tick, cluster))

    @property
    def first_tick(self) -> int:
        """ Tick of the first member """

        return self.members[0][0]

    @property
    def last_tick(self) -> int:
        """ Tick of the latest member """

        return self.members[-1][0]

    @property
    def duration(self) -> int:
        """ Ticks between first and latest member """

        return self.last_tick - self.first_tick if self.members else 0

    def entity_union(self) -> frozenset[Entity]:
        """ All entities the chain ever held """

        return frozenset().union(*(cluster.entities for _, cluster in self.members))
