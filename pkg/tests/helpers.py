#!/usr/bin/env python3 -B
# coding=utf-8

"""
Copyright (C) 2026 TrendChains Developers
"""

from typing import Iterable

from trendchains.common.structs import MINUTE_MS, Cluster, ClusterSnapshot, Document, Entity, EntityKind

IPHONE: Entity = Entity(kind=EntityKind.NAMED_ENTITY, text='iphone')
APPLE_EVENT: Entity = Entity(kind=EntityKind.HASHTAG, text='#appleevent')
TIM_COOK: Entity = Entity(kind=EntityKind.NAMED_ENTITY, text='tim cook')

# Entities per row of the three example tweets
KEYNOTE_ROWS: list[frozenset[Entity]] = [
    frozenset({IPHONE, APPLE_EVENT}),
    frozenset({TIM_COOK, IPHONE, APPLE_EVENT}),
    frozenset({TIM_COOK, IPHONE})
]


def tag(text: str) -> Entity:
    """ Hashtag entity of already normal text """

    return Entity(kind=EntityKind.HASHTAG, text=text)


def tags(texts: Iterable[str]) -> frozenset[Entity]:
    """ Hashtag entity set """

    return frozenset(tag(text=text) for text in texts)


def make_doc(doc_id: str, minute: int, entities: Iterable[Entity] | Iterable[str], author: str | None = None,
             domain: str = 'us', offset_ms: int = 0) -> Document:
    """ Document at minute start plus offset, one author per document unless given """

    members: frozenset[Entity] = frozenset(
        tag(text=item) if isinstance(item, str) else item for item in entities)

    return Document(id=doc_id, timestamp=minute * MINUTE_MS + offset_ms,
                    author_id=f'author-{doc_id}' if author is None else author, domain=domain, entities=members)


def keynote_documents(minute: int = 0, prefix: str = 't') -> list[Document]:
    """ The three example tweets inside one minute """

    return [make_doc(doc_id=f'{prefix}{minute}-{index}', minute=minute, entities=row, offset_ms=index * 1000)
            for index, row in enumerate(KEYNOTE_ROWS)]


def make_cluster(cluster_id: str, texts: Iterable[str], freq: int = 1) -> Cluster:
    """ Cluster of hashtags with a flat frequency """

    members: frozenset[Entity] = tags(texts=texts)

    return Cluster(id=cluster_id, entities=members, metadata={entity: freq for entity in members},
                   rank_score=float(freq * len(members)))


def make_snapshot(tick: int, groups: dict[str, Iterable[str]], dropped: int = 0) -> ClusterSnapshot:
    """ Snapshot of chain id -> member texts, rank ordered """

    clusters: list[Cluster] = [make_cluster(cluster_id=cluster_id, texts=texts) for cluster_id, texts in groups.items()]

    clusters.sort(key=lambda cluster: (-cluster.rank_score, cluster.id))

    return ClusterSnapshot(tick=tick, clusters=tuple(clusters), dropped_documents=dropped)
