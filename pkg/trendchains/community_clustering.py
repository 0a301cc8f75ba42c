#!/usr/bin/env python3 -B
# coding=utf-8

"""
Community Clustering
Louvain (resolution R) and connected components partitioning of the entity graph
Copyright (C) 2026 TrendChains Developers
"""

from dataclasses import dataclass, field
from typing import Callable, Final, Iterable, Mapping

import networkx as nx

from trendchains.common.structs import Cluster, Entity
from trendchains.similarity_graph import EntityGraph

# Modularity gain below which Louvain stops aggregating
LOUVAIN_TOLERANCE: Final[float] = 1e-9

# Seeded runs per graph, the partition of highest modularity is kept
LOUVAIN_RESTARTS: Final[int] = 3


@dataclass(frozen=True, slots=True)
class Partition:
    """ Entity to community index, indices contiguous from 0 """

    assignment: Mapping[Entity, int] = field(default_factory=dict)
    modularity: float = 0.0

    @property
    def community_count(self) -> int:
        """ Number of communities """

        return len(set(self.assignment.values()))

    def communities(self) -> list[frozenset[Entity]]:
        """ Communities ordered by index """

        members: dict[int, set[Entity]] = {}

        for entity, index in self.assignment.items():
            members.setdefault(index, set()).add(entity)

        return [frozenset(members[index]) for index in sorted(members)]


def graph_modularity(g: EntityGraph, communities: list[set[Entity]] | list[frozenset[Entity]],
                     R: float = 1.0) -> float:  # pylint: disable=invalid-name
    """ Resolution modularity Q_R of a node partition, 0 for an edgeless graph """

    if g.number_of_edges() == 0 or g.size(weight='weight') <= 0:
        return 0.0

    return float(nx.community.modularity(g, communities, weight='weight', resolution=R))


def _to_partition(g: EntityGraph, communities: Iterable[Iterable[Entity]], R: float) -> Partition:  # pylint: disable=invalid-name
    """ Index communities by their smallest member, so indices are stable """

    ordered: list[frozenset[Entity]] = sorted((frozenset(community) for community in communities if community),
                                              key=min)

    assignment: dict[Entity, int] = {
        entity: index for index, community in enumerate(ordered) for entity in sorted(community)}

    return Partition(assignment=assignment, modularity=graph_modularity(g=g, communities=ordered, R=R))


def louvain(g: EntityGraph, R: float, seed: int) -> Partition:  # pylint: disable=invalid-name
    """ Heuristic maximization of Q_R, deterministic given seed; isolated nodes stay singletons """

    if R <= 0:
        raise ValueError(f'Louvain resolution must be > 0, got {R}')

    if g.number_of_nodes() == 0:
        return Partition()

    # Node insertion order is sorted, so the seeded shuffle fixes the visitation order
    ordered_graph: EntityGraph = nx.Graph()

    ordered_graph.add_nodes_from(sorted(g.nodes(data=True)))
    ordered_graph.add_weighted_edges_from(
        sorted((*sorted((a, b)), weight) for a, b, weight in g.edges(data='weight', default=1.0)))

    best: Partition | None = None

    # Restart seeds are seed, seed + 1, ...; the first best modularity wins
    for restart in range(LOUVAIN_RESTARTS):
        communities: list[set[Entity]] = nx.community.louvain_communities(
            ordered_graph, weight='weight', resolution=R, threshold=LOUVAIN_TOLERANCE, seed=seed + restart)

        partition: Partition = _to_partition(g=ordered_graph, communities=communities, R=R)

        if best is None or partition.modularity > best.modularity + LOUVAIN_TOLERANCE:
            best = partition

    return best if best is not None else Partition()


def connected_components(g: EntityGraph, R: float = 1.0) -> Partition:  # pylint: disable=invalid-name
    """ Communities are exactly the connected components, edge weights ignored """

    return _to_partition(g=g, communities=nx.connected_components(g), R=R)


def to_clusters(p: Partition, g: EntityGraph) -> list[Cluster]:
    """ One placeholder-id Cluster per community of at least two members """

    clusters: list[Cluster] = []

    for community in p.communities():
        if len(community) < 2:
            continue

        metadata: dict[Entity, int] = {entity: int(g.nodes[entity].get('freq', 0)) for entity in sorted(community)}

        clusters.append(Cluster(id='', entities=community, metadata=metadata))

    return clusters


def clustering_backend(name: str) -> Callable[[EntityGraph, float, int], Partition]:
    """ Partitioning function of a backend name (louvain, components) """

    if name == 'louvain':
        return louvain

    if name == 'components':
        return lambda g, R, seed: connected_components(g=g, R=R)

    raise ValueError(f'Unknown clustering backend: {name}')
