#!/usr/bin/env python3 -B
# coding=utf-8

"""
Evaluation
Offline metrics against labeled ground truth and parameter sweeps
Copyright (C) 2026 TrendChains Developers
"""

import itertools
import logging

from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Final, Iterable, Mapping, Sequence

import pandas as pd

from trendchains.common.config import EngineConfig
from trendchains.common.errors import EntityError, SchemaError, UndefinedMetricError
from trendchains.common.paths import is_file_read, make_parent_dirs
from trendchains.common.structs import ClusterChain, ClusterSnapshot, Document, Entity, normalize_entity
from trendchains.cooccurrence_store import EntityPair, entity_pair
from trendchains.pipeline_engine import MemorySnapshotStore, chains_from_snapshots, replay

GROUND_TRUTH_COLUMNS: Final[list[str]] = ['entity_kind', 'entity_text', 'event_id', 'title', 'relevant']

METRIC_NAMES: Final[tuple[str, ...]] = ('events_detected_fraction', 'consolidation', 'discrimination',
                                        'clustering_score', 'merged_event_fraction', 'duplicate_event_fraction')

STRUCTURE_NAMES: Final[tuple[str, ...]] = ('ticks', 'mean_clusters', 'mean_cluster_size', 'mean_output_entities')

# Chains must last longer than this many ticks to count towards merged events
MERGE_MIN_DURATION: Final[int] = 30

logger: logging.Logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class GroundTruthRecord:
    """ One labeled (entity, event) row """

    entity: Entity
    event_id: int
    title: str
    relevant: bool


@dataclass(frozen=True, slots=True)
class PairSets:
    """ Related (both relevant, one event) and unrelated (exactly one relevant) entity pairs """

    related_pairs: frozenset[EntityPair] = frozenset()
    unrelated_pairs: frozenset[EntityPair] = frozenset()


class GroundTruthCorpus:
    """ Labeled events, each with at least one relevant entity """

    def __init__(self, records: Iterable[GroundTruthRecord]) -> None:
        self.records: tuple[GroundTruthRecord, ...] = tuple(records)

        seen: set[tuple[Entity, int]] = set()

        for record in self.records:
            key: tuple[Entity, int] = (record.entity, record.event_id)

            if key in seen:
                raise SchemaError(f'Duplicate ground truth row for entity {record.entity.text!r}, '
                                  f'event {record.event_id}')

            seen.add(key)

        for event_id in self.events():
            if not self.relevant_entities(event_id=event_id):
                raise SchemaError(f'Ground truth event {event_id} has no relevant entity')

    def __len__(self) -> int:
        return len(self.records)

    def events(self) -> list[int]:
        """ Distinct event ids """

        return sorted({record.event_id for record in self.records})

    def relevant_entities(self, event_id: int) -> frozenset[Entity]:
        """ Entities marked relevant for an event """

        return frozenset(record.entity for record in self.records if record.event_id == event_id and record.relevant)

    def entity_events(self) -> dict[Entity, set[int]]:
        """ Entity to every event id it is labeled with """

        mapping: defaultdict[Entity, set[int]] = defaultdict(set)

        for record in self.records:
            mapping[record.entity].add(record.event_id)

        return dict(mapping)

    def unique_entities(self, relevant_only: bool = False) -> dict[Entity, int]:
        """ Entities labeled with exactly one event id, mapped to it """

        unique: dict[Entity, int] = {
            entity: next(iter(event_ids)) for entity, event_ids in self.entity_events().items() if len(event_ids) == 1}

        if relevant_only:
            relevant: set[tuple[Entity, int]] = {
                (record.entity, record.event_id) for record in self.records if record.relevant}

            unique = {entity: event_id for entity, event_id in unique.items() if (entity, event_id) in relevant}

        return unique

    def pair_sets(self) -> PairSets:
        """ Related and unrelated pairs, a pair related by any event is never unrelated """

        by_event: defaultdict[int, list[GroundTruthRecord]] = defaultdict(list)

        for record in self.records:
            by_event[record.event_id].append(record)

        related: set[EntityPair] = set()
        unrelated: set[EntityPair] = set()

        for event_records in by_event.values():
            for record_a, record_b in itertools.combinations(event_records, 2):
                if record_a.entity == record_b.entity:
                    continue

                pair: EntityPair = entity_pair(a=record_a.entity, b=record_b.entity)

                if record_a.relevant and record_b.relevant:
                    related.add(pair)
                elif record_a.relevant != record_b.relevant:
                    unrelated.add(pair)

        return PairSets(related_pairs=frozenset(related), unrelated_pairs=frozenset(unrelated - related))

    def to_frame(self) -> pd.DataFrame:
        """ Ground truth table in its CSV shape """

        return pd.DataFrame([{
            'entity_kind': record.entity.kind.value,
            'entity_text': record.entity.text,
            'event_id': record.event_id,
            'title': record.title,
            'relevant': 'Y' if record.relevant else 'N'
        } for record in self.records], columns=GROUND_TRUTH_COLUMNS)

    def write_csv(self, out_path: str) -> None:
        """ Write the ground truth CSV """

        make_parent_dirs(in_path=out_path)

        self.to_frame().to_csv(out_path, index=False, lineterminator='\n')

    @classmethod
    def from_frame(cls, frame: pd.DataFrame, source: str = 'ground truth') -> 'GroundTruthCorpus':
        """ Validate and convert a ground truth table """

        missing: list[str] = [column for column in GROUND_TRUTH_COLUMNS if column not in frame.columns]

        if missing:
            raise SchemaError(f'{source}: missing column "{missing[0]}"')

        records: list[GroundTruthRecord] = []

        for row_index, row in enumerate(frame.itertuples(index=False)):
            line_no: int = row_index + 2

            try:
                entity: Entity = normalize_entity(kind=str(row.entity_kind).strip(), raw=str(row.entity_text))
            except EntityError as error:
                raise SchemaError(f'{source} line {line_no}: column "entity_text"/"entity_kind": {error}') from error

            try:
                event_id: int = int(str(row.event_id).strip(), 10)
            except ValueError as error:
                raise SchemaError(f'{source} line {line_no}: column "event_id" expects an integer, '
                                  f'got {row.event_id!r}') from error

            relevant_text: str = str(row.relevant).strip().upper()

            if relevant_text not in ('Y', 'N'):
                raise SchemaError(f'{source} line {line_no}: column "relevant" expects Y or N, got {row.relevant!r}')

            records.append(GroundTruthRecord(entity=entity, event_id=event_id, title=str(row.title),
                                             relevant=relevant_text == 'Y'))

        return cls(records=records)

    @classmethod
    def read_csv(cls, in_path: str) -> 'GroundTruthCorpus':
        """ Read entity_kind,entity_text,event_id,title,relevant CSV """

        if not is_file_read(in_path=in_path):
            raise SchemaError(f'Ground truth file is not readable: {in_path}')

        try:
            frame: pd.DataFrame = pd.read_csv(in_path, dtype=str, keep_default_na=False)
        except pd.errors.EmptyDataError as error:
            raise SchemaError(f'{in_path}: missing column "{GROUND_TRUTH_COLUMNS[0]}"') from error
        except pd.errors.ParserError as error:
            raise SchemaError(f'{in_path}: {error}') from error

        return cls.from_frame(frame=frame, source=in_path)


@dataclass(slots=True)
class MetricReport:
    """ Evaluation metrics of one run, None where undefined """

    events_detected_fraction: float | None = None
    consolidation: float | None = None
    discrimination: float | None = None
    clustering_score: float | None = None
    merged_event_fraction: float | None = None
    duplicate_event_fraction: float | None = None
    structure: dict[str, float] = field(default_factory=dict)

    def as_row(self) -> dict[str, float | None]:
        """ Metric name to value """

        row: dict[str, float | None] = {name: getattr(self, name) for name in METRIC_NAMES}

        row.update(self.structure)

        return row


def output_assignment(snapshot: ClusterSnapshot) -> dict[Entity, str]:
    """ Output entity (member of a size >= 2 cluster) to its cluster id """

    return {entity: cluster.id for cluster in snapshot.clusters if len(cluster.entities) >= 2
            for entity in cluster.entities}


def pair_agreement(outputs: Iterable[Mapping[Entity, str]], pairs: frozenset[EntityPair], together: bool,
                   label: str = 'Pair agreement') -> float:
    """
    Summed over ticks: pairs with both entities output and (together) sharing or (not together)
    not sharing a cluster, over pairs with both entities output
    """

    numerator: int = 0
    denominator: int = 0

    for cluster_of in outputs:

        for entity_a, entity_b in pairs:
            if entity_a not in cluster_of or entity_b not in cluster_of:
                continue

            denominator += 1

            if (cluster_of[entity_a] == cluster_of[entity_b]) == together:
                numerator += 1

    if denominator == 0:
        raise UndefinedMetricError(f'{label} is undefined, no pairs present in the output')

    return numerator / denominator


def consolidation(snapshots: Iterable[ClusterSnapshot], gt: GroundTruthCorpus) -> float:
    """ Sum of related pairs sharing a cluster over related pairs both present, across ticks """

    return pair_agreement(outputs=map(output_assignment, snapshots), pairs=gt.pair_sets().related_pairs,
                          together=True, label='Consolidation')


def discrimination(snapshots: Iterable[ClusterSnapshot], gt: GroundTruthCorpus) -> float:
    """ Sum of unrelated pairs in different clusters over unrelated pairs both present, across ticks """

    return pair_agreement(outputs=map(output_assignment, snapshots), pairs=gt.pair_sets().unrelated_pairs,
                          together=False, label='Discrimination')


def clustering_score(C: float, D: float) -> float:  # pylint: disable=invalid-name
    """ Harmonic mean of consolidation and discrimination, 0 when both are 0 """

    if C + D == 0:
        return 0.0

    return 2 * C * D / (C + D)


def events_detected_fraction(snapshots: Iterable[ClusterSnapshot], gt: GroundTruthCorpus) -> float:
    """ Fraction of events with a unique entity inside some size >= 2 cluster """

    event_ids: list[int] = gt.events()

    if not event_ids:
        raise UndefinedMetricError('Events detected fraction is undefined for empty ground truth')

    unique: dict[Entity, int] = gt.unique_entities()

    detected: set[int] = set()

    for snapshot in snapshots:
        for entity in output_assignment(snapshot=snapshot):
            if entity in unique:
                detected.add(unique[entity])

    return len(detected) / len(event_ids)


def merged_event_fraction(chains: Iterable[ClusterChain], gt: GroundTruthCorpus,
                          min_duration: int = MERGE_MIN_DURATION) -> float:
    """ Fraction of long-lived chains holding relevant unique entities of two or more events """

    unique: dict[Entity, int] = gt.unique_entities(relevant_only=True)

    qualifying: list[ClusterChain] = [chain for chain in chains if chain.members and chain.duration > min_duration]

    if not qualifying:
        raise UndefinedMetricError(f'Merged event fraction is undefined, no chain lasts over {min_duration} ticks')

    merged: int = sum(1 for chain in qualifying
                      if len({unique[entity] for entity in chain.entity_union() if entity in unique}) >= 2)

    return merged / len(qualifying)


def duplicate_event_fraction(chains: Iterable[ClusterChain], gt: GroundTruthCorpus) -> float:
    """ Fraction of events whose relevant entities appear in two or more chains """

    event_ids: list[int] = gt.events()

    if not event_ids:
        raise UndefinedMetricError('Duplicate event fraction is undefined for empty ground truth')

    chain_list: list[ClusterChain] = list(chains)

    duplicated: int = 0

    for event_id in event_ids:
        relevant: frozenset[Entity] = gt.relevant_entities(event_id=event_id)

        chain_ids: set[str] = {chain.id for chain in chain_list if chain.entity_union() & relevant}

        if len(chain_ids) >= 2:
            duplicated += 1

    return duplicated / len(event_ids)


def network_structure(snapshots: Sequence[ClusterSnapshot]) -> dict[str, float]:
    """ Per-tick cluster count, cluster size and output entity averages """

    ticks: int = len(snapshots)

    cluster_sizes: list[int] = [len(cluster.entities) for snapshot in snapshots for cluster in snapshot.clusters]

    return {
        'ticks': float(ticks),
        'mean_clusters': len(cluster_sizes) / ticks if ticks else 0.0,
        'mean_cluster_size': sum(cluster_sizes) / len(cluster_sizes) if cluster_sizes else 0.0,
        'mean_output_entities': sum(cluster_sizes) / ticks if ticks else 0.0
    }


def _defined(metric: Callable[[], float]) -> float | None:
    try:
        return metric()
    except UndefinedMetricError as error:
        logger.info('%s', error)

        return None


def evaluate_run(snapshots: Sequence[ClusterSnapshot], gt: GroundTruthCorpus,
                 chains: Mapping[str, ClusterChain] | None = None) -> MetricReport:
    """ Every metric of one run, undefined ones left as None """

    chain_map: Mapping[str, ClusterChain] = chains_from_snapshots(snapshots=snapshots) if chains is None else chains

    report: MetricReport = MetricReport(
        events_detected_fraction=_defined(lambda: events_detected_fraction(snapshots=snapshots, gt=gt)),
        consolidation=_defined(lambda: consolidation(snapshots=snapshots, gt=gt)),
        discrimination=_defined(lambda: discrimination(snapshots=snapshots, gt=gt)),
        merged_event_fraction=_defined(lambda: merged_event_fraction(chains=chain_map.values(), gt=gt)),
        duplicate_event_fraction=_defined(lambda: duplicate_event_fraction(chains=chain_map.values(), gt=gt)),
        structure=network_structure(snapshots=snapshots))

    if report.consolidation is not None and report.discrimination is not None:
        report.clustering_score = clustering_score(C=report.consolidation, D=report.discrimination)

    return report


@dataclass(frozen=True, slots=True)
class SweepPoint:
    """ One (S, R, backend) grid point """

    min_similarity: float
    resolution: float
    clustering: str


def sweep_grid(S_values: Iterable[float], R_values: Iterable[float],  # pylint: disable=invalid-name
               backends: Iterable[str]) -> list[SweepPoint]:
    """ Cartesian grid in (backend, S, R) order """

    return [SweepPoint(min_similarity=S, resolution=R, clustering=backend)
            for backend, S, R in itertools.product(backends, S_values, R_values)]


def run_point(documents: Sequence[Document], gt: GroundTruthCorpus, config: EngineConfig,
              point: SweepPoint) -> MetricReport:
    """ Isolated deterministic replay of one grid point """

    point_config: EngineConfig = config.with_overrides(min_similarity=point.min_similarity,
                                                       resolution=point.resolution, clustering=point.clustering)

    _, snapshots = replay(documents=documents, config=point_config, store=MemorySnapshotStore())

    return evaluate_run(snapshots=snapshots, gt=gt)


def sweep(corpus: Sequence[Document], gt: GroundTruthCorpus, S_values: Iterable[float],  # pylint: disable=invalid-name
          R_values: Iterable[float], config: EngineConfig | None = None, backends: Iterable[str] = ('louvain',),
          workers: int = 1) -> pd.DataFrame:
    """ One run per (S, R, backend), metrics and network structure per row """

    base_config: EngineConfig = EngineConfig() if config is None else config

    documents: list[Document] = sorted(corpus, key=lambda doc: doc.timestamp)

    points: list[SweepPoint] = sweep_grid(S_values=S_values, R_values=R_values, backends=backends)

    with ThreadPoolExecutor(max_workers=max(workers, 1)) as executor:
        reports: list[MetricReport] = list(executor.map(
            lambda point: run_point(documents=documents, gt=gt, config=base_config, point=point), points))

    rows: list[dict[str, object]] = []

    for point, report in zip(points, reports):
        rows.append({'min_similarity': point.min_similarity, 'resolution': point.resolution,
                     'clustering': point.clustering, **report.as_row()})

    return pd.DataFrame(rows, columns=['min_similarity', 'resolution', 'clustering', *METRIC_NAMES,
                                       *STRUCTURE_NAMES])


def write_metric_table(table: pd.DataFrame, out_path: str) -> None:
    """ Metric CSV, undefined values as NA """

    make_parent_dirs(in_path=out_path)

    table.to_csv(out_path, index=False, na_rep='NA', lineterminator='\n')
