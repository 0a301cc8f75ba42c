#!/usr/bin/env python3 -B
# coding=utf-8

"""
Copyright (C) 2026 TrendChains Developers
"""

import io
import json

from pathlib import Path

import pandas as pd
import pytest

from trendchains.common.config import EngineConfig
from trendchains.common.errors import EngineStoppedError
from trendchains.common.jsonl import dump_document, parse_snapshot
from trendchains.common.structs import Cluster, ClusterSnapshot, Document
from trendchains.corpus_generator import Scenario, generate_corpus
from trendchains.cooccurrence_store import entity_pair
from trendchains.pipeline_engine import (LOAD_PROFILE_COLUMNS, Engine, IngestQueue, JsonlSnapshotStore, LiveRunner,
                                         MemorySnapshotStore, ReplayDriver, ReplayProfile, StreamSnapshotStore,
                                         chains_from_snapshots, export_chains, profile_replay, rank_clusters, replay)

from tests.helpers import APPLE_EVENT, IPHONE, TIM_COOK, keynote_documents, make_doc, make_snapshot, tag, tags

PERMISSIVE: EngineConfig = EngineConfig(min_similarity=0.1, resolution=1.0, trend_filter=False)


class FlakyStore(MemorySnapshotStore):
    """ Fails the first writes """

    def __init__(self, failures: int) -> None:
        super().__init__()

        self.failures: int = failures
        self.attempts: int = 0

    def _write(self, snapshot: ClusterSnapshot) -> None:
        self.attempts += 1

        if self.failures > 0:
            self.failures -= 1

            raise OSError('disk full')

        super()._write(snapshot=snapshot)


class TornWriteStore(JsonlSnapshotStore):
    """ First writes stop halfway through the line """

    def __init__(self, out_path: str, failures: int) -> None:
        super().__init__(out_path=out_path)

        self.failures: int = failures

    def _append_text(self, text: str) -> None:
        if self.failures > 0:
            self.failures -= 1

            super()._append_text(text=text[:len(text) // 2])

            raise OSError('disk full')

        super()._append_text(text=text)


def test_keynote_single_triangle_cluster() -> None:
    _, snapshots = replay(documents=keynote_documents(minute=0), config=PERMISSIVE)

    assert len(snapshots) == 1
    assert len(snapshots[0].clusters) == 1

    cluster: Cluster = snapshots[0].clusters[0]

    assert cluster.entities == frozenset({IPHONE, APPLE_EVENT, TIM_COOK})
    assert cluster.rank_score == 7.0
    assert cluster.id == 'chain-000001'


def test_keynote_repeated_minute_keeps_chain_id() -> None:
    engine, snapshots = replay(documents=keynote_documents(minute=0) + keynote_documents(minute=1, prefix='r'),
                               config=PERMISSIVE)

    assert [snapshot.tick for snapshot in snapshots] == [0, 1]
    assert snapshots[0].clusters[0].id == snapshots[1].clusters[0].id
    assert list(engine.chains) == [snapshots[0].clusters[0].id]
    assert engine.chains[snapshots[0].clusters[0].id].duration == 1


def test_no_data_empty_snapshot() -> None:
    snapshot: ClusterSnapshot = Engine(config=EngineConfig()).tick(T=5)

    assert snapshot.tick == 5
    assert snapshot.clusters == ()


def test_non_trending_entities_skip_cooccurrence() -> None:
    engine: Engine = Engine(config=EngineConfig())

    engine.process(doc=make_doc(doc_id='d0', minute=0, entities=['#a', '#b']))

    assert engine.trend_detector.windows.long_counts[('us', tag('#a'))] == 1
    assert not engine.cooccurrence_store.entity_freq

    engine.tick(T=0)

    engine.process(doc=make_doc(doc_id='d1', minute=1, entities=['#a', '#b', '#new']))

    assert engine.cooccurrence_store.pair_counts == {entity_pair(a=tag('#a'), b=tag('#b')): 1}
    assert tag('#new') not in engine.cooccurrence_store.entity_freq


def test_ingest_queue_bound() -> None:
    ingest_queue: IngestQueue = IngestQueue(capacity=2)

    assert ingest_queue.offer(doc=make_doc('a', 0, ['#x']))
    assert ingest_queue.offer(doc=make_doc('b', 0, ['#x']))
    assert not ingest_queue.offer(doc=make_doc('c', 0, ['#x']))
    assert ingest_queue.size() == 2


def test_submit_sheds_at_capacity() -> None:
    engine: Engine = Engine(config=EngineConfig(shed_queue_limit=1))

    assert engine.submit(doc=make_doc('a', 3, ['#x']))
    assert not engine.submit(doc=make_doc('b', 3, ['#x']))

    assert engine.counters.shed == 1
    assert engine.counters.shed_per_tick[3] == 1


def test_stopped_engine_rejects() -> None:
    engine: Engine = Engine(config=EngineConfig())

    engine.stop()

    with pytest.raises(EngineStoppedError):
        engine.submit(doc=make_doc('a', 0, ['#x']))


def test_malformed_line_counted() -> None:
    engine: Engine = Engine(config=EngineConfig())

    assert not engine.submit_line(line='{broken', line_no=4)
    assert engine.submit_line(line=dump_document(document=make_doc('a', 0, ['#x'])), line_no=5)
    assert engine.counters.malformed == 1


def test_pre_filter_hook() -> None:
    engine: Engine = Engine(config=PERMISSIVE, pre_filter=lambda doc: not doc.author_id.startswith('spam'))

    engine.process(doc=make_doc('a', 0, ['#x', '#y'], author='spam-bot'))
    engine.process(doc=make_doc('b', 0, ['#x', '#y'], author='human'))

    assert engine.counters.filtered == 1
    assert engine.cooccurrence_store.entity_freq[tag('#x')] == 1


def test_rank_rule() -> None:
    big: Cluster = Cluster(id='z', entities=tags(['a', 'b']), metadata={tag('a'): 10, tag('b'): 5})
    small: Cluster = Cluster(id='a', entities=tags(['c', 'd']), metadata={tag('c'): 8, tag('d'): 0})

    assert [cluster.id for cluster in rank_clusters(clusters=[small, big])] == ['z', 'a']

    tie_a: Cluster = Cluster(id='m', entities=tags(['e', 'f']), metadata={tag('e'): 3, tag('f'): 3})
    tie_b: Cluster = Cluster(id='k', entities=tags(['g', 'h']), metadata={tag('g'): 5, tag('h'): 1})

    ranked: list[Cluster] = rank_clusters(clusters=[tie_a, big, tie_b, small])

    assert [cluster.id for cluster in ranked] == ['z', 'a', 'k', 'm']
    assert [cluster.id for cluster in rank_clusters(clusters=reversed(ranked))] == ['z', 'a', 'k', 'm']


def test_gap_ends_chain() -> None:
    engine: Engine = Engine(config=PERMISSIVE)

    for doc in keynote_documents(minute=0):
        engine.process(doc=doc)

    first: ClusterSnapshot = engine.tick(T=0)
    second: ClusterSnapshot = engine.tick(T=2)

    assert first.clusters[0].entities == second.clusters[0].entities
    assert first.clusters[0].id != second.clusters[0].id


def test_idle_chains_evicted() -> None:
    engine: Engine = Engine(config=PERMISSIVE.with_overrides(window=1, chain_retention=2))

    for doc in keynote_documents(minute=0):
        engine.process(doc=doc)

    engine.tick(T=0)

    for tick in (1, 2):
        engine.tick(T=tick)

    assert len(engine.chains) == 1

    engine.tick(T=3)

    assert not engine.chains


def test_persist_failure_retried_without_duplicates() -> None:
    store: FlakyStore = FlakyStore(failures=1)

    engine: Engine = Engine(config=PERMISSIVE, store=store)

    for doc in keynote_documents(minute=0):
        engine.process(doc=doc)

    failed: ClusterSnapshot = engine.tick(T=0)

    assert len(failed.clusters) == 1
    assert engine.counters.persist_errors == 1
    assert engine.pending_snapshots == 1

    engine.tick(T=1)

    assert engine.pending_snapshots == 0
    assert [snapshot.tick for snapshot in store.snapshots()] == [0, 1]

    assert not store.append(snapshot=failed)
    assert len(store.snapshots()) == 2


def test_torn_jsonl_write_is_rolled_back(tmp_path: Path) -> None:
    out_path: Path = tmp_path / 'snapshots.jsonl'

    engine: Engine = Engine(config=PERMISSIVE, store=TornWriteStore(out_path=str(out_path), failures=1))

    for doc in keynote_documents(minute=0):
        engine.process(doc=doc)

    engine.tick(T=0)

    assert engine.counters.persist_errors == 1
    assert out_path.read_text(encoding='utf-8') == ''

    engine.tick(T=1)

    lines: list[str] = out_path.read_text(encoding='utf-8').splitlines()

    assert [parse_snapshot(line=line).tick for line in lines] == [0, 1]


def test_jsonl_store_idempotent(tmp_path: Path) -> None:
    out_path: Path = tmp_path / 'out' / 'snapshots.jsonl'

    store: JsonlSnapshotStore = JsonlSnapshotStore(out_path=str(out_path))

    snapshot: ClusterSnapshot = make_snapshot(tick=4, groups={'c1': ['a', 'b']})

    assert store.append(snapshot=snapshot)
    assert not store.append(snapshot=snapshot)
    assert out_path.read_text(encoding='utf-8').count('\n') == 1

    reopened: JsonlSnapshotStore = JsonlSnapshotStore(out_path=str(out_path), truncate=False)

    assert not reopened.append(snapshot=snapshot)
    assert reopened.snapshots() == [snapshot]


def test_empty_snapshot_line() -> None:
    stream: io.StringIO = io.StringIO()

    StreamSnapshotStore(out_stream=stream).append(snapshot=ClusterSnapshot(tick=0))

    assert stream.getvalue() == '{"tick":0,"dropped":0,"clusters":[]}\n'


def _burst_documents() -> list[Document]:
    documents: list[Document] = []

    for minute, count in ((0, 300), (1, 1200), (2, 300), (3, 300)):
        spacing: int = 60_000 // count

        for index in range(count):
            documents.append(make_doc(doc_id=f'{minute}-{index}', minute=minute,
                                      entities=[f'#t{index % 5}', f'#t{(index + 1) % 5}'], offset_ms=index * spacing))

    return documents


def test_burst_sheds_only_during_burst_minute() -> None:
    config: EngineConfig = EngineConfig(drain_rate=10.0, shed_queue_limit=100)

    engine, snapshots = replay(documents=_burst_documents(), config=config)

    assert [snapshot.tick for snapshot in snapshots] == [0, 1, 2, 3]
    assert snapshots[0].dropped_documents == 0
    assert snapshots[1].dropped_documents > 0
    assert snapshots[3].dropped_documents == 0
    assert engine.counters.shed == sum(snapshot.dropped_documents for snapshot in snapshots)
    assert engine.counters.processed_documents + engine.counters.shed == 2100


def test_load_profile_per_tick() -> None:
    config: EngineConfig = EngineConfig(drain_rate=10.0, shed_queue_limit=100)

    engine, snapshots = replay(documents=_burst_documents(), config=config)

    profile: pd.DataFrame = engine.load_profile()

    assert list(profile.columns) == LOAD_PROFILE_COLUMNS
    assert profile['tick'].tolist() == [0, 1, 2, 3]
    assert profile['dropped_documents'].tolist() == [snapshot.dropped_documents for snapshot in snapshots]
    assert profile['processed_documents'].sum() == engine.counters.processed_documents
    assert profile['processed_entities'].tolist() == [2 * count for count in profile['processed_documents']]
    assert profile['dropped_per_second'].tolist() == pytest.approx(
        [snapshot.dropped_documents / 60 for snapshot in snapshots])
    assert (profile['rss_mb'] > 0).all()

    assert any(line.startswith('Peak minute') for line in engine.summary())


def test_stale_and_skewed_drops_reach_a_snapshot() -> None:
    engine: Engine = Engine(config=PERMISSIVE.with_overrides(shed_queue_limit=1))

    assert engine.submit(doc=make_doc(doc_id='kept', minute=5, entities=['#a', '#b']))
    assert not engine.submit(doc=make_doc(doc_id='stale', minute=1, entities=['#a']))
    assert not engine.submit(doc=make_doc(doc_id='skewed', minute=9, entities=['#a']), tick=5)

    engine.drain()

    assert engine.tick(T=5).dropped_documents == 2
    assert not engine.counters.shed_per_tick
    assert engine.tick(T=6).dropped_documents == 0


def test_replay_throughput_and_memory() -> None:
    documents, _ = generate_corpus(scenario=Scenario(minutes=30, burst_start=5, background_rate=1000.0), seed=1)

    engine, profile = profile_replay(documents=documents, config=EngineConfig())

    assert isinstance(profile, ReplayProfile)
    assert profile.ticks == 30
    assert profile.documents == len(documents)
    assert profile.entity_mentions == engine.counters.processed_entities
    assert profile.realtime_factor >= 10.0
    assert profile.peak_rss_mb < 2048
    assert any(line.startswith('Replay speed') for line in profile.summary())


def test_replay_emits_empty_minutes() -> None:
    documents: list[Document] = keynote_documents(minute=0) + keynote_documents(minute=3, prefix='late')

    _, snapshots = replay(documents=documents, config=PERMISSIVE.with_overrides(window=1))

    assert [snapshot.tick for snapshot in snapshots] == [0, 1, 2, 3]
    assert [len(snapshot.clusters) for snapshot in snapshots] == [1, 0, 0, 1]


def test_empty_replay() -> None:
    assert not replay(documents=[], config=EngineConfig())[1]


def test_replay_is_byte_deterministic(tmp_path: Path) -> None:
    documents, _ = generate_corpus(scenario=Scenario(events=3, minutes=40, burst_start=10, background_rate=15.0),
                                   seed=5)

    outputs: list[bytes] = []

    for run in range(2):
        out_path: Path = tmp_path / f'run{run}.jsonl'

        engine: Engine = Engine(config=EngineConfig(seed=3), store=JsonlSnapshotStore(out_path=str(out_path)))

        ReplayDriver(engine=engine).run(documents=list(reversed(documents)) if run else documents)

        outputs.append(out_path.read_bytes())

    assert outputs[0] == outputs[1]
    assert outputs[0].count(b'\n') == 40


def _growing_chain_snapshots() -> list[ClusterSnapshot]:
    documents: list[Document] = []

    for minute, texts in enumerate((['#a', '#b'], ['#a', '#b', '#c'], ['#a', '#b', '#c', '#d'])):
        documents.extend(make_doc(doc_id=f'{minute}-{copy}', minute=minute, entities=texts) for copy in range(2))

    documents.append(make_doc(doc_id='other', minute=1, entities=['#golden globes', '#green book']))

    config: EngineConfig = PERMISSIVE.with_overrides(window=1, min_similarity=0.0, clustering='components')

    return replay(documents=documents, config=config)[1]


def test_export_growing_chain() -> None:
    table: pd.DataFrame = export_chains(snapshots=_growing_chain_snapshots(), pattern='#a')

    assert list(table.columns) == ['tick', 'chain_id', 'size', 'agg_freq', 'entities']
    assert table['size'].tolist() == [2, 3, 4]
    assert table['chain_id'].nunique() == 1
    assert table['entities'].iloc[2] == '#a|#b|#c|#d'


def test_export_pattern_and_top() -> None:
    snapshots: list[ClusterSnapshot] = _growing_chain_snapshots()

    globes: pd.DataFrame = export_chains(snapshots=snapshots, pattern='*GOLDEN*globes*')

    assert globes['tick'].tolist() == [1]
    assert globes['entities'].tolist() == ['#golden globes|#green book']

    biggest: pd.DataFrame = export_chains(snapshots=snapshots, top=1)

    assert biggest['size'].tolist() == [2, 3, 4]


def test_export_empty_range() -> None:
    table: pd.DataFrame = export_chains(snapshots=_growing_chain_snapshots(), first_tick=10, last_tick=20)

    assert table.empty
    assert list(table.columns) == ['tick', 'chain_id', 'size', 'agg_freq', 'entities']


def test_chains_from_snapshots_matches_engine() -> None:
    engine, snapshots = replay(documents=keynote_documents(minute=0) + keynote_documents(minute=1, prefix='r'),
                               config=PERMISSIVE)

    rebuilt: dict = chains_from_snapshots(snapshots=reversed(snapshots))

    assert set(rebuilt) == set(engine.chains)
    assert [tick for tick, _ in rebuilt['chain-000001'].members] == [0, 1]


def test_live_runner_flushes_at_eof() -> None:
    lines: str = ''.join(f'{dump_document(document=doc)}\n' for doc in keynote_documents(minute=2)) + 'garbage\n'

    engine: Engine = Engine(config=PERMISSIVE.with_overrides(workers=2))

    snapshots: list[ClusterSnapshot] = LiveRunner(engine=engine, workers=2, clock=lambda: 150.0,
                                                  poll_seconds=0.01).run(in_stream=io.StringIO(lines))

    assert [snapshot.tick for snapshot in snapshots] == [2]
    assert len(snapshots[0].clusters) == 1
    assert engine.counters.malformed == 1
    assert engine.counters.processed_documents == 3
    assert not engine.running


def test_snapshot_lines_are_json() -> None:
    stream: io.StringIO = io.StringIO()

    engine: Engine = Engine(config=PERMISSIVE, store=StreamSnapshotStore(out_stream=stream))

    ReplayDriver(engine=engine).run(documents=keynote_documents(minute=0))

    record: dict = json.loads(stream.getvalue())

    assert record['tick'] == 0
    assert [entity['text'] for entity in record['clusters'][0]['entities']] == ['#appleevent', 'iphone', 'tim cook']
