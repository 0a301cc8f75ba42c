#!/usr/bin/env python3 -B
# coding=utf-8

"""
Similarity Graph
Per-tick weighted entity graph with minimum similarity filtering
Copyright (C) 2026 TrendChains Developers
"""

import networkx as nx

from trendchains.cooccurrence_store import CooccurrenceStore, EntityPair, StoreView, pair_cosine
from trendchains.common.structs import Entity
from trendchains.trend_detector import TrendSnapshot

# Entity nodes carry their window frequency as "freq", edges their cosine as "weight"
EntityGraph = nx.Graph


def build_graph(store: CooccurrenceStore | StoreView, S: float,  # pylint: disable=invalid-name
                trending: TrendSnapshot | None) -> EntityGraph:
    """
    Build the entity graph of the store's in-window counts

    Nodes are the trending entities (all in-window entities when trending is None) with
    non-zero window frequency. Edges keep pairs whose cosine is strictly above S.
    """

    view: StoreView = store.view() if isinstance(store, CooccurrenceStore) else store

    if trending is None:
        node_entities: list[Entity] = sorted(entity for entity, freq in view.entity_freq.items() if freq > 0)
    else:
        node_entities = sorted(entity for entity in trending.entities() if view.entity_freq.get(entity, 0) > 0)

    graph: EntityGraph = nx.Graph()

    for entity in node_entities:
        graph.add_node(entity, freq=view.entity_freq[entity])

    edges: list[tuple[Entity, Entity, float]] = []

    pair: EntityPair

    for pair, pair_count in view.pair_counts.items():
        entity_a, entity_b = pair

        if pair_count <= 0 or entity_a == entity_b or entity_a not in graph or entity_b not in graph:
            continue

        weight: float = pair_cosine(a=entity_a, b=entity_b, entity_freq=view.entity_freq,
                                    pair_counts=view.pair_counts)

        if weight > S:
            edges.append((entity_a, entity_b, weight))

    graph.add_weighted_edges_from(sorted(edges), weight='weight')

    return graph


def isolated_entities(graph: EntityGraph) -> list[Entity]:
    """ Nodes without any edge, excluded from clustering output """

    return sorted(nx.isolates(graph))
