#!/usr/bin/env python3 -B
# coding=utf-8

"""
Chain Linker
Minute-to-minute cluster linking via thresholded maximum weight bipartite matching
Copyright (C) 2026 TrendChains Developers
"""

import itertools
import math

from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from scipy.optimize import linear_sum_assignment

from trendchains.common.errors import UndefinedSimilarityError
from trendchains.common.structs import Cluster, ClusterSnapshot, Entity


@dataclass(frozen=True, slots=True)
class LinkCandidate:
    """ Surviving edge between a previous cluster and a current cluster index """

    prev_cluster_id: str
    curr_index: int
    weight: float


@dataclass(frozen=True, slots=True)
class LinkResult:
    """ Matched (previous id, current index) pairs and fresh ids of the unmatched """

    matches: frozenset[tuple[str, int]] = frozenset()
    new_ids: dict[int, str] = field(default_factory=dict)

    def assigned_ids(self) -> dict[int, str]:
        """ Current index to its chain id """

        assigned: dict[int, str] = dict(self.new_ids)

        assigned.update({curr_index: prev_id for prev_id, curr_index in self.matches})

        return assigned


class ChainIdFactory:
    """ Deterministic, run-unique chain ids """

    def __init__(self, prefix: str = 'chain', start: int = 1) -> None:
        self.prefix: str = prefix

        self._counter: Iterator[int] = itertools.count(start)

    def __call__(self) -> str:
        return f'{self.prefix}-{next(self._counter):06d}'


def cluster_overlap(a: Iterable[Entity], b: Iterable[Entity]) -> float:
    """ Set cosine |a & b| / sqrt(|a| * |b|) """

    set_a: frozenset[Entity] = frozenset(a)
    set_b: frozenset[Entity] = frozenset(b)

    if not set_a or not set_b:
        raise UndefinedSimilarityError('Cluster overlap of an empty entity set')

    return len(set_a & set_b) / math.sqrt(len(set_a) * len(set_b))


def link_candidates(prev: Sequence[Cluster], curr: Sequence[Cluster], link_threshold: float) -> list[LinkCandidate]:
    """ Edges with positive overlap at or above the threshold """

    candidates: list[LinkCandidate] = []

    for prev_cluster in prev:
        for curr_index, curr_cluster in enumerate(curr):
            weight: float = cluster_overlap(a=prev_cluster.entities, b=curr_cluster.entities)

            if weight > 0 and weight >= link_threshold:
                candidates.append(LinkCandidate(prev_cluster_id=prev_cluster.id, curr_index=curr_index,
                                                weight=weight))

    return candidates


def max_weight_matching(candidates: Sequence[LinkCandidate]) -> set[tuple[str, int]]:
    """ Exact maximum total weight matching over the candidate edges (Hungarian method) """

    if not candidates:
        return set()

    prev_ids: list[str] = sorted({candidate.prev_cluster_id for candidate in candidates})
    curr_indices: list[int] = sorted({candidate.curr_index for candidate in candidates})

    prev_rows: dict[str, int] = {prev_id: row for row, prev_id in enumerate(prev_ids)}
    curr_cols: dict[int, int] = {curr_index: col for col, curr_index in enumerate(curr_indices)}

    # Missing edges weigh 0, all candidate weights are positive, so zero picks mean "unmatched"
    weights: np.ndarray = np.zeros((len(prev_ids), len(curr_indices)), dtype=np.float64)
    present: np.ndarray = np.zeros(weights.shape, dtype=bool)

    for candidate in candidates:
        row: int = prev_rows[candidate.prev_cluster_id]
        col: int = curr_cols[candidate.curr_index]

        weights[row, col] = candidate.weight
        present[row, col] = True

    rows, cols = linear_sum_assignment(weights, maximize=True)

    return {(prev_ids[row], curr_indices[col]) for row, col in zip(rows, cols) if present[row, col]}


def link(prev: ClusterSnapshot | None, curr: Sequence[Cluster], link_threshold: float,
         id_factory: Callable[[], str]) -> LinkResult:
    """ Link current clusters to the previous minute, new ids for the unlinked ones """

    prev_clusters: Sequence[Cluster] = prev.clusters if prev is not None else ()

    candidates: list[LinkCandidate] = link_candidates(prev=prev_clusters, curr=curr, link_threshold=link_threshold)

    matches: set[tuple[str, int]] = max_weight_matching(candidates=candidates)

    matched_indices: set[int] = {curr_index for _, curr_index in matches}

    new_ids: dict[int, str] = {
        curr_index: id_factory() for curr_index in range(len(curr)) if curr_index not in matched_indices}

    return LinkResult(matches=frozenset(matches), new_ids=new_ids)
