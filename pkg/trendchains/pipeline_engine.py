#!/usr/bin/env python3 -B
# coding=utf-8

"""
Pipeline Engine
Ingestion, load shedding and the per-minute trend/cluster/link tick
Copyright (C) 2026 TrendChains Developers
"""

import dataclasses
import fnmatch
import logging
import os
import queue
import threading
import time

from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Callable, Final, Iterable, Iterator, TextIO

import pandas as pd
import psutil

from trendchains.chain_linker import ChainIdFactory, LinkResult, link
from trendchains.common.config import EngineConfig
from trendchains.common.errors import DocumentError, EngineStoppedError, SnapshotStoreError
from trendchains.common.jsonl import dump_snapshot, parse_document, read_snapshots
from trendchains.common.paths import is_file, is_file_read, make_parent_dirs
from trendchains.common.structs import MINUTE_MS, Cluster, ClusterChain, ClusterSnapshot, Document, Entity, tick_of
from trendchains.common.texts import format_seconds
from trendchains.community_clustering import Partition, clustering_backend, to_clusters
from trendchains.cooccurrence_store import CooccurrenceStore, StoreView
from trendchains.similarity_graph import EntityGraph, build_graph
from trendchains.trend_detector import TrendDetector, TrendSnapshot

CHAIN_EXPORT_COLUMNS: Final[list[str]] = ['tick', 'chain_id', 'size', 'agg_freq', 'entities']

TICK_STAGES: Final[tuple[str, ...]] = ('evict', 'trends', 'graph', 'cluster', 'link', 'rank', 'persist')

LOAD_PROFILE_COLUMNS: Final[list[str]] = ['tick', 'processed_documents', 'processed_entities', 'dropped_documents',
                                         'queued_documents', 'tick_seconds', 'rss_mb', 'documents_per_second',
                                         'entities_per_second', 'dropped_per_second']

# Ticks of load history kept in memory (one day of minutes)
LOAD_HISTORY_TICKS: Final[int] = 1440

MEBIBYTE: Final[int] = 1024 * 1024

logger: logging.Logger = logging.getLogger(__name__)


class SnapshotStore:
    """ Base class for snapshot sinks, idempotent per tick """

    def __init__(self) -> None:
        self.written_ticks: set[int] = set()

    def append(self, snapshot: ClusterSnapshot) -> bool:
        """ Persist the snapshot unless its tick was already written, True when written now """

        if snapshot.tick in self.written_ticks:
            return False

        self._write(snapshot=snapshot)

        self.written_ticks.add(snapshot.tick)

        return True

    def _write(self, snapshot: ClusterSnapshot) -> None:
        raise NotImplementedError(f'Method "_write" not implemented at {__name__}')

    def snapshots(self) -> list[ClusterSnapshot]:
        """ Persisted snapshots in tick order """

        raise NotImplementedError(f'Method "snapshots" not implemented at {__name__}')


class MemorySnapshotStore(SnapshotStore):
    """ In-process snapshot list, used by sweeps and tests """

    def __init__(self) -> None:
        super().__init__()

        self._snapshots: list[ClusterSnapshot] = []

    def _write(self, snapshot: ClusterSnapshot) -> None:
        self._snapshots.append(snapshot)

    def snapshots(self) -> list[ClusterSnapshot]:
        return sorted(self._snapshots, key=lambda snapshot: snapshot.tick)


class JsonlSnapshotStore(SnapshotStore):
    """ Append-only JSONL file, one line per tick """

    def __init__(self, out_path: str, truncate: bool = True) -> None:
        super().__init__()

        self.out_path: str = out_path

        make_parent_dirs(in_path=out_path)

        if truncate or not is_file_read(in_path=out_path):
            with open(out_path, 'w', encoding='utf-8'):
                pass
        else:
            self.written_ticks = {snapshot.tick for snapshot in self.snapshots()}

    def _write(self, snapshot: ClusterSnapshot) -> None:
        line: str = f'{dump_snapshot(snapshot=snapshot)}\n'

        offset: int = os.path.getsize(self.out_path) if is_file(in_path=self.out_path) else 0

        try:
            self._append_text(text=line)
        except OSError:
            # Partial lines are cut off so a retry appends the tick once
            os.truncate(self.out_path, offset)

            raise

    def _append_text(self, text: str) -> None:
        with open(self.out_path, 'a', encoding='utf-8', newline='\n') as out_file:
            out_file.write(text)

    def snapshots(self) -> list[ClusterSnapshot]:
        with open(self.out_path, 'r', encoding='utf-8') as in_file:
            return sorted(read_snapshots(in_file=in_file), key=lambda snapshot: snapshot.tick)


class StreamSnapshotStore(MemorySnapshotStore):
    """ Snapshot lines written to an open text stream (standard output) """

    def __init__(self, out_stream: TextIO) -> None:
        super().__init__()

        self.out_stream: TextIO = out_stream

    def _write(self, snapshot: ClusterSnapshot) -> None:
        self.out_stream.write(f'{dump_snapshot(snapshot=snapshot)}\n')
        self.out_stream.flush()

        super()._write(snapshot=snapshot)


def persist_snapshot(s: ClusterSnapshot, sink: SnapshotStore) -> None:
    """ Append a snapshot to the sink, I/O failures surface as SnapshotStoreError """

    try:
        sink.append(snapshot=s)
    except OSError as error:
        raise SnapshotStoreError(f'Could not persist snapshot of tick {s.tick}: {error}') from error


class IngestQueue:
    """ Bounded document queue, producers are never blocked """

    def __init__(self, capacity: int) -> None:
        self.capacity: int = capacity

        self._queue: queue.Queue[Document] = queue.Queue(maxsize=capacity)

    def offer(self, doc: Document) -> bool:
        """ Enqueue if capacity allows """

        try:
            self._queue.put_nowait(doc)
        except queue.Full:
            return False

        return True

    def poll(self, timeout: float | None = None) -> Document | None:
        """ Next document, None when empty (after timeout, if given) """

        try:
            if timeout is None:
                return self._queue.get_nowait()

            return self._queue.get(timeout=timeout)
        except queue.Empty:
            return None

    def size(self) -> int:
        """ Queued documents """

        return self._queue.qsize()

    def empty(self) -> bool:
        """ Check if nothing is queued """

        return self._queue.empty()


@dataclass(slots=True)
class EngineCounters:
    """ Health counters of an engine run """

    submitted: int = 0
    processed_documents: int = 0
    processed_entities: int = 0
    filtered: int = 0
    shed: int = 0
    malformed: int = 0
    persist_errors: int = 0
    ticks: int = 0
    clusters: int = 0
    shed_per_tick: Counter[int] = field(default_factory=Counter)
    stage_seconds: dict[str, float] = field(default_factory=lambda: {stage: 0.0 for stage in TICK_STAGES})


@dataclass(frozen=True, slots=True)
class TickLoad:
    """ Work done between two ticks, the per-minute load profile """

    tick: int
    processed_documents: int
    processed_entities: int
    dropped_documents: int
    queued_documents: int
    tick_seconds: float
    rss_mb: float


@dataclass(frozen=True, slots=True)
class ReplayProfile:
    """ Speed and memory of a replay run """

    documents: int
    entity_mentions: int
    ticks: int
    wall_seconds: float
    peak_rss_mb: float

    @property
    def virtual_seconds(self) -> float:
        """ Replayed stream time """

        return self.ticks * MINUTE_MS / 1000

    @property
    def realtime_factor(self) -> float:
        """ Replayed stream time over wall time """

        return self.virtual_seconds / self.wall_seconds if self.wall_seconds > 0 else float('inf')

    def summary(self) -> list[str]:
        """ Profile summary lines """

        return [
            f'Replay speed      : {self.realtime_factor:.1f}x real time '
            f'({format_seconds(in_seconds=self.wall_seconds)} for {self.ticks} minutes)',
            f'Peak memory       : {self.peak_rss_mb:.1f} MB resident'
        ]


def rank_clusters(clusters: Iterable[Cluster]) -> list[Cluster]:
    """ Rank by aggregate member window frequency (descending), ties by id """

    scored: list[Cluster] = [
        dataclasses.replace(cluster, rank_score=float(cluster.aggregate_frequency)) for cluster in clusters]

    return sorted(scored, key=lambda cluster: (-cluster.rank_score, cluster.id))


def accept_all(_: Document) -> bool:
    """ Default pre-filter """

    return True


class Engine:
    """ Streaming event detection engine (trend filter, co-occurrence, clustering, linking) """

    TITLE: Final[str] = 'TrendChains Engine'

    def __init__(self, config: EngineConfig, store: SnapshotStore | None = None,
                 pre_filter: Callable[[Document], bool] = accept_all,
                 id_factory: Callable[[], str] | None = None) -> None:
        self.config: EngineConfig = config
        self.snapshot_store: SnapshotStore = MemorySnapshotStore() if store is None else store
        self.pre_filter: Callable[[Document], bool] = pre_filter
        self.id_factory: Callable[[], str] = ChainIdFactory() if id_factory is None else id_factory

        self.trend_detector: TrendDetector = TrendDetector(config=config)
        self.cooccurrence_store: CooccurrenceStore = CooccurrenceStore(window=config.window,
                                                                       max_doc_entities=config.max_doc_entities)
        self.ingest_queue: IngestQueue = IngestQueue(capacity=config.shed_queue_limit)

        self.partitioner: Callable[[EntityGraph, float, int], Partition] = clustering_backend(
            name=config.clustering)

        self.prev_snapshot: ClusterSnapshot | None = None
        self.chains: dict[str, ClusterChain] = {}
        self.counters: EngineCounters = EngineCounters()

        # Trend snapshot of the previous tick, the ingestion side filter
        self.cached_trends: TrendSnapshot | None = None
        self._cached_trend_entities: frozenset[Entity] = frozenset()

        self._pending: list[ClusterSnapshot] = []

        # Work since the previous tick, per-minute load history
        self._tick_documents: int = 0
        self._tick_entities: int = 0

        self.load_history: deque[TickLoad] = deque(maxlen=LOAD_HISTORY_TICKS)

        self._process: psutil.Process = psutil.Process()

        self._running: bool = True

        self._quiesce: threading.RLock = threading.RLock()
        self._counter_lock: threading.Lock = threading.Lock()

    @property
    def running(self) -> bool:
        """ Check if documents are accepted """

        return self._running

    def stop(self) -> None:
        """ Stop accepting documents """

        self._running = False

    def submit(self, doc: Document, tick: int | None = None) -> bool:
        """ Enqueue a document, shedding it when the queue is at capacity (drops count at tick, default doc tick) """

        if not self._running:
            raise EngineStoppedError(f'{self.TITLE} is stopped, document {doc.id!r} rejected')

        accepted: bool = self.ingest_queue.offer(doc=doc)

        with self._counter_lock:
            self.counters.submitted += 1

            if not accepted:
                self.counters.shed += 1
                self.counters.shed_per_tick[doc.tick if tick is None else tick] += 1

        return accepted

    def submit_line(self, line: str, line_no: int | None = None, tick: int | None = None) -> bool:
        """ Parse and submit one JSONL input line, malformed lines are counted and skipped """

        try:
            doc: Document = parse_document(line=line, line_no=line_no)
        except DocumentError as error:
            with self._counter_lock:
                self.counters.malformed += 1

            logger.warning('Skipped malformed document: %s', error)

            return False

        return self.submit(doc=doc, tick=tick)

    def process(self, doc: Document) -> None:
        """ Trend ingestion, then trend filtering and co-occurrence counting of the survivors """

        if not self.pre_filter(doc):
            with self._counter_lock:
                self.counters.filtered += 1

            return

        with self._quiesce:
            self.trend_detector.ingest_for_trends(doc=doc)

            if self.config.trend_filter:
                survivors: frozenset[Entity] = doc.entities & self._cached_trend_entities
            else:
                survivors = doc.entities

            self.cooccurrence_store.update_counts(tick=doc.tick, filtered_entities=survivors)

        with self._counter_lock:
            self.counters.processed_documents += 1
            self.counters.processed_entities += len(doc.entities)

            self._tick_documents += 1
            self._tick_entities += len(doc.entities)

    def drain(self, limit: int | None = None) -> int:
        """ Process queued documents (all, or up to limit), returning how many """

        drained: int = 0

        while limit is None or drained < limit:
            doc: Document | None = self.ingest_queue.poll()

            if doc is None:
                break

            self.process(doc=doc)

            drained += 1

        return drained

    def _timed(self, stage: str, started: float) -> float:
        now: float = time.perf_counter()

        self.counters.stage_seconds[stage] += now - started

        return now

    def tick(self, T: int) -> ClusterSnapshot:  # pylint: disable=invalid-name
        """ evict -> trend tick -> build graph -> cluster -> link -> rank -> persist """

        with self._quiesce:
            started: float = time.perf_counter()

            tick_started: float = started

            self.cooccurrence_store.evict_out_of_window(current_tick=T)

            started = self._timed(stage='evict', started=started)

            trends: TrendSnapshot = self.trend_detector.trend_tick(tick=T)

            started = self._timed(stage='trends', started=started)

            view: StoreView = self.cooccurrence_store.view()

            graph: EntityGraph = build_graph(store=view, S=self.config.min_similarity,
                                             trending=trends if self.config.trend_filter else None)

            started = self._timed(stage='graph', started=started)

            partition: Partition = self.partitioner(graph, self.config.resolution, self.config.seed)

            clusters: list[Cluster] = to_clusters(p=partition, g=graph)

            started = self._timed(stage='cluster', started=started)

            # Only the directly preceding minute is linked, a gap ends every chain
            prev: ClusterSnapshot | None = self.prev_snapshot

            if prev is not None and prev.tick != T - 1:
                prev = None

            link_result: LinkResult = link(prev=prev, curr=clusters, link_threshold=self.config.link_threshold,
                                           id_factory=self.id_factory)

            chain_ids: dict[int, str] = link_result.assigned_ids()

            linked: list[Cluster] = [
                dataclasses.replace(cluster, id=chain_ids[index]) for index, cluster in enumerate(clusters)]

            started = self._timed(stage='link', started=started)

            with self._counter_lock:
                # Late drops of earlier minutes are reported with this one
                dropped: int = sum(self.counters.shed_per_tick.pop(shed_tick)
                                   for shed_tick in [key for key in self.counters.shed_per_tick if key <= T])

                processed: tuple[int, int] = (self._tick_documents, self._tick_entities)

                self._tick_documents = 0
                self._tick_entities = 0

            snapshot: ClusterSnapshot = ClusterSnapshot(tick=T, clusters=tuple(rank_clusters(clusters=linked)),
                                                        dropped_documents=dropped)

            started = self._timed(stage='rank', started=started)

            self._persist(snapshot=snapshot)

            self._timed(stage='persist', started=started)

            self._update_chains(snapshot=snapshot)

            self.prev_snapshot = snapshot

            self.cached_trends = trends
            self._cached_trend_entities = trends.entities()

            self.counters.ticks += 1
            self.counters.clusters += len(snapshot.clusters)

            self.load_history.append(TickLoad(
                tick=T, processed_documents=processed[0], processed_entities=processed[1], dropped_documents=dropped,
                queued_documents=self.ingest_queue.size(), tick_seconds=time.perf_counter() - tick_started,
                rss_mb=self.memory_mb()))

        logger.debug('Tick %d: %d nodes, %d edges, %d clusters, %d dropped', T, graph.number_of_nodes(),
                     graph.number_of_edges(), len(snapshot.clusters), dropped)

        if dropped:
            logger.warning('Tick %d: shed %d documents', T, dropped)

        return snapshot

    def _persist(self, snapshot: ClusterSnapshot) -> None:
        self._pending.append(snapshot)

        while self._pending:
            try:
                persist_snapshot(s=self._pending[0], sink=self.snapshot_store)
            except SnapshotStoreError as error:
                self.counters.persist_errors += 1

                logger.warning('%s (will retry next tick)', error)

                return

            self._pending.pop(0)

    def _update_chains(self, snapshot: ClusterSnapshot) -> None:
        for cluster in snapshot.clusters:
            self.chains.setdefault(cluster.id, ClusterChain(id=cluster.id)).append(tick=snapshot.tick,
                                                                                   cluster=cluster)

        idle_ids: list[str] = [chain_id for chain_id, chain in self.chains.items()
                               if snapshot.tick - chain.last_tick > self.config.chain_retention]

        for chain_id in idle_ids:
            del self.chains[chain_id]

    @property
    def pending_snapshots(self) -> int:
        """ Snapshots awaiting a persistence retry """

        return len(self._pending)

    @property
    def throttled(self) -> int:
        """ Trend contributions dropped by author throttling """

        return self.trend_detector.throttled

    def memory_mb(self) -> float:
        """ Resident memory of the process """

        return self._process.memory_info().rss / MEBIBYTE

    def load_profile(self) -> pd.DataFrame:
        """ Per-tick processed and dropped load, rates per second of stream time """

        table: pd.DataFrame = pd.DataFrame([dataclasses.asdict(load) for load in self.load_history],
                                           columns=LOAD_PROFILE_COLUMNS[:7])

        minute_seconds: float = MINUTE_MS / 1000

        table['documents_per_second'] = table['processed_documents'] / minute_seconds
        table['entities_per_second'] = table['processed_entities'] / minute_seconds
        table['dropped_per_second'] = table['dropped_documents'] / minute_seconds

        return table[LOAD_PROFILE_COLUMNS]

    def summary(self) -> list[str]:
        """ Run summary lines """

        stage_text: str = ', '.join(
            f'{stage} {format_seconds(in_seconds=seconds)}' for stage, seconds in self.counters.stage_seconds.items())

        peak_lines: list[str] = []

        if self.load_history:
            busiest: TickLoad = max(self.load_history, key=lambda load: (load.processed_entities, -load.tick))

            peak_lines.append(f'Peak minute       : tick {busiest.tick}, {busiest.processed_entities} entities, up to '
                              f'{max(load.dropped_documents for load in self.load_history)} dropped per minute')

        return [
            f'Ticks             : {self.counters.ticks}',
            f'Clusters          : {self.counters.clusters}',
            f'Chains (in memory): {len(self.chains)}',
            f'Documents         : {self.counters.processed_documents} processed, {self.counters.shed} shed, '
            f'{self.counters.malformed} malformed, {self.counters.filtered} pre-filtered',
            f'Entity mentions   : {self.counters.processed_entities}, {self.throttled} throttled',
            f'Persist errors    : {self.counters.persist_errors}',
            f'Stage timings     : {stage_text}',
            *peak_lines
        ]


class ReplayDriver:
    """
    Virtual clock driver

    Minute T is ticked only after every document of T was processed or shed. With a drain
    rate, the queue drains that many documents per virtual second between arrivals, so
    bursts above the rate fill the queue and shed; whatever is left drains at minute end.
    """

    def __init__(self, engine: Engine) -> None:
        self.engine: Engine = engine

        self._drain_credit: float = 0.0
        self._drain_clock: int = 0

    def _drain_until(self, timestamp: int) -> None:
        drain_rate: float = self.engine.config.drain_rate

        if drain_rate <= 0:
            self.engine.drain()

            return

        self._drain_credit += (timestamp - self._drain_clock) * drain_rate / 1000

        self._drain_clock = max(self._drain_clock, timestamp)

        self._drain_credit -= self.engine.drain(limit=int(self._drain_credit))

        if self.engine.ingest_queue.empty():
            self._drain_credit = 0.0

    def run(self, documents: Iterable[Document], first_tick: int | None = None,
            last_tick: int | None = None) -> list[ClusterSnapshot]:
        """ Replay time-sorted documents, one snapshot per minute from first to last tick """

        ordered: list[Document] = sorted(documents, key=lambda doc: (doc.timestamp, doc.id))

        by_tick: dict[int, list[Document]] = {}

        for doc in ordered:
            by_tick.setdefault(doc.tick, []).append(doc)

        if not by_tick and (first_tick is None or last_tick is None):
            return []

        start_tick: int = min(by_tick) if first_tick is None else first_tick
        end_tick: int = max(by_tick) if last_tick is None else last_tick

        snapshots: list[ClusterSnapshot] = []

        for tick in range(start_tick, end_tick + 1):
            self._drain_clock = tick * MINUTE_MS
            self._drain_credit = 0.0

            for doc in by_tick.get(tick, []):
                self._drain_until(timestamp=doc.timestamp)

                self.engine.submit(doc=doc)

            self._drain_until(timestamp=(tick + 1) * MINUTE_MS)

            self.engine.drain()

            snapshots.append(self.engine.tick(T=tick))

        return snapshots


def replay(documents: Iterable[Document], config: EngineConfig,
           store: SnapshotStore | None = None) -> tuple[Engine, list[ClusterSnapshot]]:
    """ Deterministic virtual clock run of a document collection """

    engine: Engine = Engine(config=config, store=store)

    return engine, ReplayDriver(engine=engine).run(documents=documents)


def profile_replay(documents: Iterable[Document], config: EngineConfig,
                   store: SnapshotStore | None = None) -> tuple[Engine, ReplayProfile]:
    """ Replay with wall time, stream time and sampled peak resident memory """

    ordered: list[Document] = list(documents)

    engine: Engine = Engine(config=config, store=store)

    started: float = time.perf_counter()

    snapshots: list[ClusterSnapshot] = ReplayDriver(engine=engine).run(documents=ordered)

    wall_seconds: float = time.perf_counter() - started

    peak_rss_mb: float = max((load.rss_mb for load in engine.load_history),
                             default=engine.memory_mb())

    return engine, ReplayProfile(documents=len(ordered), entity_mentions=sum(len(doc.entities) for doc in ordered),
                                 ticks=len(snapshots), wall_seconds=wall_seconds, peak_rss_mb=peak_rss_mb)


def read_documents(in_file: TextIO, counters: EngineCounters | None = None) -> Iterator[Document]:
    """ Parse JSONL documents, counting malformed lines when counters are given """

    for line_no, line in enumerate(in_file, start=1):
        if not line.strip():
            continue

        try:
            yield parse_document(line=line, line_no=line_no)
        except DocumentError as error:
            if counters is not None:
                counters.malformed += 1

            logger.warning('Skipped malformed document: %s', error)


class LiveRunner:
    """ Wall clock driver: one producer, N ingestion workers and a minute timer """

    def __init__(self, engine: Engine, workers: int = 1, clock: Callable[[], float] = time.time,
                 poll_seconds: float = 0.2) -> None:
        self.engine: Engine = engine
        self.workers: int = workers
        self.clock: Callable[[], float] = clock
        self.poll_seconds: float = poll_seconds

        self.snapshots: list[ClusterSnapshot] = []

        self._input_done: threading.Event = threading.Event()

        self._next_tick: int | None = None

    def _now_tick(self) -> int:
        return tick_of(timestamp=int(self.clock() * 1000))

    def _produce(self, in_stream: TextIO) -> None:
        try:
            for line_no, line in enumerate(in_stream, start=1):
                if line.strip():
                    self.engine.submit_line(line=line, line_no=line_no, tick=self._now_tick())
        finally:
            self._input_done.set()

    def _work(self) -> None:
        while True:
            doc: Document | None = self.engine.ingest_queue.poll(timeout=self.poll_seconds)

            if doc is not None:
                self.engine.process(doc=doc)
            elif self._input_done.is_set():
                break

    def _tick_until(self, end_tick: int) -> None:
        if self._next_tick is None:
            self._next_tick = end_tick

        while self._next_tick <= end_tick:
            self.snapshots.append(self.engine.tick(T=self._next_tick))

            self._next_tick += 1

    def run(self, in_stream: TextIO) -> list[ClusterSnapshot]:
        """ Consume the stream until EOF, ticking every wall clock minute """

        self._next_tick = self._now_tick()

        threads: list[threading.Thread] = [threading.Thread(target=self._produce, args=(in_stream,), daemon=True)]

        threads.extend(threading.Thread(target=self._work, daemon=True) for _ in range(self.workers))

        for thread in threads:
            thread.start()

        while any(thread.is_alive() for thread in threads):
            self._tick_until(end_tick=self._now_tick() - 1)

            threads[-1].join(timeout=self.poll_seconds)

        self.engine.drain()

        self._tick_until(end_tick=self._now_tick())

        self.engine.stop()

        return self.snapshots


def chains_from_snapshots(snapshots: Iterable[ClusterSnapshot]) -> dict[str, ClusterChain]:
    """ Rebuild chains (chain id -> members) from snapshots """

    chains: dict[str, ClusterChain] = {}

    for snapshot in sorted(snapshots, key=lambda item: item.tick):
        for cluster in snapshot.clusters:
            chains.setdefault(cluster.id, ClusterChain(id=cluster.id)).append(tick=snapshot.tick, cluster=cluster)

    return chains


def export_chains(snapshots: Iterable[ClusterSnapshot], first_tick: int | None = None, last_tick: int | None = None,
                  pattern: str | None = None, top: int | None = None) -> pd.DataFrame:
    """
    Chain table for stream graph plotting: one row per (tick, chain id)

    A pattern ("*world*cup*" style) keeps chains holding a matching entity somewhere
    in the range. Top keeps the chains of highest total aggregate frequency.
    """

    in_range: list[ClusterSnapshot] = [
        snapshot for snapshot in snapshots
        if (first_tick is None or snapshot.tick >= first_tick) and (last_tick is None or snapshot.tick <= last_tick)]

    rows: list[dict[str, object]] = []

    chain_totals: Counter[str] = Counter()

    matching_ids: set[str] = set()

    pattern_text: str | None = None if pattern is None else pattern.casefold()

    for snapshot in sorted(in_range, key=lambda item: item.tick):
        for cluster in sorted(snapshot.clusters, key=lambda item: item.id):
            entity_texts: list[str] = [entity.text for entity in cluster.sorted_entities()]

            if pattern_text is None or any(fnmatch.fnmatchcase(text, pattern_text) for text in entity_texts):
                matching_ids.add(cluster.id)

            chain_totals[cluster.id] += cluster.aggregate_frequency

            rows.append({'tick': snapshot.tick, 'chain_id': cluster.id, 'size': len(entity_texts),
                         'agg_freq': cluster.aggregate_frequency, 'entities': '|'.join(entity_texts)})

    selected_ids: set[str] = matching_ids

    if top is not None:
        ranked_ids: list[str] = sorted(matching_ids, key=lambda chain_id: (-chain_totals[chain_id], chain_id))

        selected_ids = set(ranked_ids[:max(top, 0)])

    table: pd.DataFrame = pd.DataFrame([row for row in rows if row['chain_id'] in selected_ids],
                                       columns=CHAIN_EXPORT_COLUMNS)

    return table.astype({'tick': 'int64', 'size': 'int64', 'agg_freq': 'int64'}).reset_index(drop=True)
