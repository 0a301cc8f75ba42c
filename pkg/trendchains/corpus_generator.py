#!/usr/bin/env python3 -B
# coding=utf-8

"""
Corpus Generator
Scripted synthetic event corpora with ground truth labels
Copyright (C) 2026 TrendChains Developers
"""

import dataclasses
import itertools

from dataclasses import dataclass
from typing import Any

import numpy as np

from trendchains.common.config import convert_value, parse_key_values
from trendchains.common.errors import ConfigError
from trendchains.common.jsonl import write_documents
from trendchains.common.paths import is_file_read, make_parent_dirs
from trendchains.common.structs import MINUTE_MS, Document, Entity, EntityKind
from trendchains.evaluation import GroundTruthCorpus, GroundTruthRecord


@dataclass(frozen=True, slots=True)
class Scenario:
    """
    Burst schedule, entity pools and noise rates of a synthetic corpus

    Each event document is, in a fixed cycle, a core document (entities_per_doc of the core
    entities), a side topic document (every side and irrelevant entity of the event) or a
    bridge document (the event anchor plus one side topic entity). Bridges are the only link
    between an event and its side topic, so a rising minimum similarity separates them.

    Loose events mention their entities one pair per document, every pair once per round,
    which keeps each of their similarities at exactly 1 / (loose_entities - 1).
    """

    events: int = 4
    loose_events: int = 1
    minutes: int = 60
    start_ms: int = 0
    domains: int = 1
    relevant_entities: int = 4
    side_entities: int = 1
    irrelevant_entities: int = 2
    shared_entities: int = 0
    loose_entities: int = 8
    burst_start: int = 20
    burst_spacing: int = 5
    burst_minutes: int = 10
    burst_rate: float = 30.0
    core_docs: int = 6
    side_docs: int = 3
    bridge_docs: int = 1
    loose_rounds: int = 2
    background_rate: float = 20.0
    noise_vocabulary: int = 200
    entities_per_doc: int = 3
    authors: int = 1000

    def __post_init__(self) -> None:
        for scenario_field in dataclasses.fields(self):
            value: Any = getattr(self, scenario_field.name)

            if value < 0:
                raise ConfigError(f'Scenario field "{scenario_field.name}" must be >= 0, got {value!r}')

        for name in ('minutes', 'domains', 'entities_per_doc', 'authors', 'noise_vocabulary', 'core_docs'):
            if getattr(self, name) < 1:
                raise ConfigError(f'Scenario field "{name}" must be >= 1, got {getattr(self, name)!r}')

        if self.events and self.relevant_entities < 2:
            raise ConfigError(f'Scenario field "relevant_entities" must be >= 2, got {self.relevant_entities!r}')

        if self.loose_events and self.loose_entities < 2:
            raise ConfigError(f'Scenario field "loose_entities" must be >= 2, got {self.loose_entities!r}')

        scheduled: int = self.events + self.loose_events

        if scheduled and self.event_start(event_index=scheduled - 1) >= self.minutes:
            raise ConfigError(f'Scenario event {scheduled - 1} starts at minute '
                              f'{self.event_start(event_index=scheduled - 1)}, past its {self.minutes} minutes')

    @classmethod
    def from_file(cls, in_path: str) -> 'Scenario':
        """ Load a key = value scenario file """

        if not is_file_read(in_path=in_path):
            raise ConfigError(f'Scenario file is not readable: {in_path}')

        with open(in_path, 'r', encoding='utf-8') as scenario_file:
            key_values: dict[str, tuple[int, str]] = parse_key_values(in_text=scenario_file.read(), source=in_path)

        field_types: dict[str, type] = {
            scenario_field.name: type(scenario_field.default) for scenario_field in dataclasses.fields(cls)}

        values: dict[str, Any] = {}

        for key, (line_no, raw_value) in key_values.items():
            if key not in field_types:
                raise ConfigError(f'{in_path} line {line_no}: unknown scenario field "{key}"')

            values[key] = convert_value(name=key, raw_value=raw_value, value_type=field_types[key])

        return cls(**values)

    def event_start(self, event_index: int) -> int:
        """ First burst minute of an event (loose events follow the regular ones) """

        return self.burst_start + event_index * self.burst_spacing

    def bursting(self, event_index: int, minute: int) -> bool:
        """ Check if an event bursts at a minute """

        start: int = self.event_start(event_index=event_index)

        return start <= minute < start + self.burst_minutes

    def role_cycle(self, has_side_topic: bool) -> tuple[str, ...]:
        """ Event document roles, repeated in order """

        if not has_side_topic:
            return ('core',)

        return ('core',) * self.core_docs + ('side',) * self.side_docs + ('bridge',) * self.bridge_docs


@dataclass(frozen=True, slots=True)
class EventPools:
    """ Entities of one scripted event """

    core: list[Entity]
    side: list[Entity]
    irrelevant: list[Entity]

    @property
    def anchor(self) -> Entity:
        """ Core entity carried by bridge documents """

        return self.core[0]

    @property
    def side_topic(self) -> list[Entity]:
        """ Entities mentioned together by side topic documents """

        return self.side + self.irrelevant

    @property
    def relevant(self) -> list[Entity]:
        """ Entities labeled relevant to the event """

        return self.core + self.side


def _event_pools(scenario: Scenario) -> list[EventPools]:
    pools: list[EventPools] = []

    for event_index in range(scenario.events):
        core: list[Entity] = [Entity(kind=EntityKind.HASHTAG, text=f'#event{event_index}_{entity_index}')
                              for entity_index in range(scenario.relevant_entities)]

        # Shared entities link an event to the next one, relevant to both
        for shared_index in range(scenario.shared_entities):
            if event_index > 0:
                core.append(Entity(kind=EntityKind.HASHTAG, text=f'#shared{event_index - 1}_{shared_index}'))

            if event_index < scenario.events - 1:
                core.append(Entity(kind=EntityKind.HASHTAG, text=f'#shared{event_index}_{shared_index}'))

        pools.append(EventPools(
            core=core,
            side=[Entity(kind=EntityKind.HASHTAG, text=f'#event{event_index}_side{entity_index}')
                  for entity_index in range(scenario.side_entities)],
            irrelevant=[Entity(kind=EntityKind.NAMED_ENTITY, text=f'event{event_index} aside {entity_index}')
                        for entity_index in range(scenario.irrelevant_entities)]))

    for loose_index in range(scenario.loose_events):
        pools.append(EventPools(
            core=[Entity(kind=EntityKind.HASHTAG, text=f'#loose{loose_index}_{entity_index}')
                  for entity_index in range(scenario.loose_entities)],
            side=[], irrelevant=[]))

    return pools


def generate_corpus(scenario: Scenario, seed: int = 0) -> tuple[list[Document], GroundTruthCorpus]:
    """ Deterministic time-sorted documents and their ground truth """

    rng: np.random.Generator = np.random.default_rng(seed)

    pools: list[EventPools] = _event_pools(scenario=scenario)

    noise: list[Entity] = [Entity(kind=EntityKind.HASHTAG, text=f'#noise{entity_index}')
                           for entity_index in range(scenario.noise_vocabulary)]

    drafts: list[tuple[int, str, str, frozenset[Entity]]] = []

    def draft(minute: int, entities: set[Entity]) -> None:
        timestamp: int = scenario.start_ms + minute * MINUTE_MS + int(rng.integers(0, MINUTE_MS))

        author: str = f'user{int(rng.integers(0, scenario.authors))}'
        domain: str = f'domain{int(rng.integers(0, scenario.domains))}'

        drafts.append((timestamp, author, domain, frozenset(entities)))

    def pick(pool: list[Entity], count: int) -> set[Entity]:
        picks: np.ndarray = rng.choice(len(pool), size=min(count, len(pool)), replace=False)

        return {pool[int(index)] for index in picks}

    # Per event position in its role cycle and in its side topic bridge rotation
    role_counters: list[int] = [0] * scenario.events
    bridge_counters: list[int] = [0] * scenario.events

    for minute in range(scenario.minutes):
        for _ in range(int(rng.poisson(scenario.background_rate))):
            draft(minute=minute, entities=pick(pool=noise, count=int(rng.integers(1, 4))))

        for event_index, pool in enumerate(pools[:scenario.events]):
            if not scenario.bursting(event_index=event_index, minute=minute):
                continue

            cycle: tuple[str, ...] = scenario.role_cycle(has_side_topic=bool(pool.side_topic))

            for _ in range(int(rng.poisson(scenario.burst_rate))):
                role: str = cycle[role_counters[event_index] % len(cycle)]

                role_counters[event_index] += 1

                if role == 'side':
                    draft(minute=minute, entities=set(pool.side_topic))
                elif role == 'bridge':
                    side_entity: Entity = pool.side_topic[bridge_counters[event_index] % len(pool.side_topic)]

                    bridge_counters[event_index] += 1

                    draft(minute=minute, entities={pool.anchor, side_entity})
                else:
                    draft(minute=minute, entities=pick(pool=pool.core, count=scenario.entities_per_doc))

        for loose_index, pool in enumerate(pools[scenario.events:], start=scenario.events):
            if not scenario.bursting(event_index=loose_index, minute=minute):
                continue

            for _ in range(scenario.loose_rounds):
                for entity_a, entity_b in itertools.combinations(pool.core, 2):
                    draft(minute=minute, entities={entity_a, entity_b})

    drafts.sort(key=lambda item: (item[0], item[1], item[2], sorted(item[3])))

    documents: list[Document] = [
        Document(id=f'doc-{doc_index:08d}', timestamp=timestamp, author_id=author, domain=domain, entities=entities)
        for doc_index, (timestamp, author, domain, entities) in enumerate(drafts)]

    records: list[GroundTruthRecord] = []

    for event_index, pool in enumerate(pools):
        title: str = f'Scripted event {event_index}'

        records.extend(GroundTruthRecord(entity=entity, event_id=event_index, title=title, relevant=True)
                       for entity in pool.relevant)
        records.extend(GroundTruthRecord(entity=entity, event_id=event_index, title=title, relevant=False)
                       for entity in pool.irrelevant)

    return documents, GroundTruthCorpus(records=records)


def write_corpus(documents: list[Document], gt: GroundTruthCorpus, out_path: str, gt_path: str) -> int:
    """ Write documents JSONL and ground truth CSV, returning the document count """

    make_parent_dirs(in_path=out_path)

    with open(out_path, 'w', encoding='utf-8', newline='\n') as out_file:
        count: int = write_documents(out_file=out_file, documents=documents)

    gt.write_csv(out_path=gt_path)

    return count
