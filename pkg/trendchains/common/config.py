#!/usr/bin/env python3 -B
# coding=utf-8

"""
Copyright (C) 2026 TrendChains Developers
"""

import dataclasses

from dataclasses import dataclass
from re import Match
from typing import Any, Final

from trendchains.common.errors import ConfigError
from trendchains.common.paths import is_file_read
from trendchains.common.patterns import PAT_BOOL_FALSE, PAT_BOOL_TRUE, PAT_CONFIG_LINE, PAT_CONFIG_SKIP

# Smoothing term of the trend score, not tunable
TREND_SCORE_EPSILON: Final[float] = 1.0

CLUSTERING_BACKENDS: Final[tuple[str, ...]] = ('louvain', 'components')


@dataclass(frozen=True, slots=True)
class EngineConfig:
    """ Engine parameters, Table-3 style (S, R, W) plus implementation knobs """

    min_similarity: float = 0.1
    resolution: float = 1.0
    window: int = 10
    link_threshold: float = 0.3
    long_window: int = 60
    short_window: int = 5
    trends_top_k: int = 50
    shed_queue_limit: int = 10000
    min_trend_score: float = 0.0
    trend_filter: bool = True
    clustering: str = 'louvain'
    max_doc_entities: int = 64
    drain_rate: float = 0.0
    chain_retention: int = 1440
    seed: int = 0
    workers: int = 1

    def __post_init__(self) -> None:
        self._check_range(name='min_similarity', valid=0.0 <= self.min_similarity <= 1.0, rule='in [0, 1]')
        self._check_range(name='resolution', valid=self.resolution > 0, rule='> 0')
        self._check_range(name='window', valid=self.window >= 1, rule='>= 1')
        self._check_range(name='link_threshold', valid=0.0 <= self.link_threshold <= 1.0, rule='in [0, 1]')
        self._check_range(name='short_window', valid=self.short_window >= 1, rule='>= 1')
        self._check_range(name='long_window', valid=self.long_window > self.short_window, rule='> short_window')
        self._check_range(name='trends_top_k', valid=self.trends_top_k >= 1, rule='>= 1')
        self._check_range(name='shed_queue_limit', valid=self.shed_queue_limit >= 1, rule='>= 1')
        self._check_range(name='min_trend_score', valid=self.min_trend_score >= 0, rule='>= 0')
        self._check_range(name='clustering', valid=self.clustering in CLUSTERING_BACKENDS,
                          rule=f'one of {", ".join(CLUSTERING_BACKENDS)}')
        self._check_range(name='max_doc_entities', valid=self.max_doc_entities >= 2, rule='>= 2')
        self._check_range(name='drain_rate', valid=self.drain_rate >= 0, rule='>= 0')
        self._check_range(name='chain_retention', valid=self.chain_retention >= 1, rule='>= 1')
        self._check_range(name='workers', valid=self.workers >= 1, rule='>= 1')

    def _check_range(self, name: str, valid: bool, rule: str) -> None:
        if not valid:
            raise ConfigError(f'Config field "{name}" must be {rule}, got {getattr(self, name)!r}')

    @classmethod
    def field_types(cls) -> dict[str, type]:
        """ Field name to its Python type """

        return {config_field.name: type(config_field.default) for config_field in dataclasses.fields(cls)}

    def with_overrides(self, **overrides: Any) -> 'EngineConfig':
        """ Copy with the given (non-None) fields replaced """

        valid_fields: dict[str, type] = self.field_types()

        unknown: list[str] = sorted(set(overrides) - set(valid_fields))

        if unknown:
            raise ConfigError(f'Unknown config field(s): {", ".join(unknown)}')

        changes: dict[str, Any] = {name: value for name, value in overrides.items() if value is not None}

        return dataclasses.replace(self, **changes)


def convert_value(name: str, raw_value: str, value_type: type) -> Any:
    """ Convert config file text to the field type """

    try:
        if value_type is bool:
            if PAT_BOOL_TRUE.match(raw_value):
                return True

            if PAT_BOOL_FALSE.match(raw_value):
                return False

            raise ValueError(raw_value)

        if value_type is int:
            return int(raw_value, 10)

        if value_type is float:
            return float(raw_value)
    except ValueError as error:
        raise ConfigError(f'Config field "{name}" expects {value_type.__name__}, got {raw_value!r}') from error

    return raw_value


def parse_key_values(in_text: str, source: str = 'config') -> dict[str, tuple[int, str]]:
    """ Parse key = value lines, returning key -> (line number, raw value) """

    key_values: dict[str, tuple[int, str]] = {}

    for line_no, line_text in enumerate(in_text.splitlines(), start=1):
        if PAT_CONFIG_SKIP.match(line_text):
            continue

        line_match: Match[str] | None = PAT_CONFIG_LINE.match(line_text)

        if not line_match:
            raise ConfigError(f'{source} line {line_no}: expected "key = value", got {line_text.strip()!r}')

        key: str = line_match.group('key').replace('-', '_')

        key_values[key] = (line_no, line_match.group('value').strip('"\''))

    return key_values


def load_config(in_path: str, base: EngineConfig | None = None) -> EngineConfig:
    """ Load key = value config file on top of the base (or default) config """

    if not is_file_read(in_path=in_path):
        raise ConfigError(f'Config file is not readable: {in_path}')

    with open(in_path, 'r', encoding='utf-8') as config_file:
        key_values: dict[str, tuple[int, str]] = parse_key_values(in_text=config_file.read(), source=in_path)

    field_types: dict[str, type] = EngineConfig.field_types()

    overrides: dict[str, Any] = {}

    for key, (line_no, raw_value) in key_values.items():
        if key not in field_types:
            raise ConfigError(f'{in_path} line {line_no}: unknown config field "{key}"')

        overrides[key] = convert_value(name=key, raw_value=raw_value, value_type=field_types[key])

    return (base or EngineConfig()).with_overrides(**overrides)
