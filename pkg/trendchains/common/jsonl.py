#!/usr/bin/env python3 -B
# coding=utf-8

"""
Copyright (C) 2026 TrendChains Developers
"""

import json

from typing import Any, Iterable, Iterator, TextIO

from trendchains.common.errors import DocumentError, EntityError, SchemaError
from trendchains.common.structs import Cluster, ClusterSnapshot, Document, Entity, EntityKind, normalize_entity


def parse_document(line: str, line_no: int | None = None) -> Document:
    """
    Parse one input line

    {"id", "ts_ms", "author", "domain", "entities": [{"kind", "text"}]}
    """

    try:
        record: Any = json.loads(line)
    except json.JSONDecodeError as error:
        raise DocumentError(f'invalid JSON ({error.msg})', line_no=line_no) from error

    if not isinstance(record, dict):
        raise DocumentError('document must be a JSON object', line_no=line_no)

    for key in ('id', 'ts_ms', 'author', 'domain', 'entities'):
        if key not in record:
            raise DocumentError(f'missing "{key}"', line_no=line_no)

    timestamp: Any = record['ts_ms']

    if isinstance(timestamp, float) and timestamp.is_integer():
        timestamp = int(timestamp)

    if isinstance(timestamp, bool) or not isinstance(timestamp, int) or timestamp < 0:
        raise DocumentError(f'"ts_ms" must be a non-negative integer, got {timestamp!r}', line_no=line_no)

    if not isinstance(record['entities'], list):
        raise DocumentError('"entities" must be a list', line_no=line_no)

    entities: set[Entity] = set()

    for raw_entity in record['entities']:
        if not isinstance(raw_entity, dict):
            raise DocumentError(f'entity must be an object, got {raw_entity!r}', line_no=line_no)

        try:
            entities.add(normalize_entity(kind=raw_entity.get('kind', ''), raw=raw_entity.get('text', '')))
        except EntityError as error:
            raise DocumentError(str(error), line_no=line_no) from error

    return Document(id=str(record['id']), timestamp=timestamp, author_id=str(record['author']),
                    domain=str(record['domain']), entities=frozenset(entities))


def dump_document(document: Document) -> str:
    """ Serialize a document to one input line, entities in canonical order """

    return json.dumps({
        'id': document.id,
        'ts_ms': document.timestamp,
        'author': document.author_id,
        'domain': document.domain,
        'entities': [{'kind': entity.kind.value, 'text': entity.text} for entity in sorted(document.entities)]
    }, ensure_ascii=False, separators=(',', ':'))


def dump_snapshot(snapshot: ClusterSnapshot) -> str:
    """
    Serialize a snapshot to one output line

    {"tick", "dropped", "clusters": [{"chain_id", "score", "entities": [{"kind", "text", "freq"}]}]}
    """

    return json.dumps({
        'tick': snapshot.tick,
        'dropped': snapshot.dropped_documents,
        'clusters': [{
            'chain_id': cluster.id,
            'score': cluster.rank_score,
            'entities': [{'kind': entity.kind.value, 'text': entity.text, 'freq': cluster.metadata.get(entity, 0)}
                         for entity in cluster.sorted_entities()]
        } for cluster in snapshot.clusters]
    }, ensure_ascii=False, separators=(',', ':'))


def parse_snapshot(line: str, line_no: int | None = None) -> ClusterSnapshot:
    """ Parse one snapshot output line """

    where: str = 'snapshot' if line_no is None else f'snapshot line {line_no}'

    try:
        record: Any = json.loads(line)

        clusters: list[Cluster] = []

        for raw_cluster in record['clusters']:
            metadata: dict[Entity, int] = {
                Entity(kind=EntityKind(raw_entity['kind']), text=raw_entity['text']): int(raw_entity['freq'])
                for raw_entity in raw_cluster['entities']
            }

            clusters.append(Cluster(id=str(raw_cluster['chain_id']), entities=frozenset(metadata),
                                    metadata=metadata, rank_score=float(raw_cluster['score'])))

        return ClusterSnapshot(tick=int(record['tick']), clusters=tuple(clusters),
                               dropped_documents=int(record['dropped']))
    except KeyError as error:
        raise SchemaError(f'{where}: missing field {error}') from error
    except (ValueError, TypeError) as error:
        raise SchemaError(f'{where}: {error}') from error


def read_snapshots(in_file: TextIO) -> Iterator[ClusterSnapshot]:
    """ Parse every non-blank snapshot line """

    for line_no, line in enumerate(in_file, start=1):
        if line.strip():
            yield parse_snapshot(line=line, line_no=line_no)


def write_documents(out_file: TextIO, documents: Iterable[Document]) -> int:
    """ Write documents as JSONL, returning the count """

    count: int = 0

    for document in documents:
        out_file.write(f'{dump_document(document=document)}\n')

        count += 1

    return count
