#!/usr/bin/env python3 -B
# coding=utf-8

"""
Copyright (C) 2026 TrendChains Developers
"""

from pathlib import Path

import pytest

from trendchains.common.config import EngineConfig, load_config, parse_key_values
from trendchains.common.errors import ConfigError


def test_defaults() -> None:
    config: EngineConfig = EngineConfig()

    assert (config.min_similarity, config.resolution, config.window) == (0.1, 1.0, 10)
    assert config.link_threshold == 0.3
    assert config.clustering == 'louvain'
    assert config.trend_filter is True


@pytest.mark.parametrize('overrides', [
    {'min_similarity': 1.5}, {'resolution': 0.0}, {'window': 0}, {'link_threshold': -0.1},
    {'short_window': 10, 'long_window': 10}, {'trends_top_k': 0}, {'shed_queue_limit': 0},
    {'clustering': 'leiden'}, {'drain_rate': -1.0}
])
def test_invalid_fields_rejected(overrides: dict) -> None:
    with pytest.raises(ConfigError):
        EngineConfig(**overrides)


def test_with_overrides_ignores_none() -> None:
    config: EngineConfig = EngineConfig().with_overrides(min_similarity=0.4, resolution=None)

    assert config.min_similarity == 0.4
    assert config.resolution == 1.0


def test_with_overrides_rejects_unknown() -> None:
    with pytest.raises(ConfigError, match='bogus'):
        EngineConfig().with_overrides(bogus=1)


def test_parse_key_values_skips_comments() -> None:
    parsed: dict[str, tuple[int, str]] = parse_key_values(in_text='# engine\n\nwindow = 3\nmin-similarity: 0.2\n')

    assert parsed == {'window': (3, '3'), 'min_similarity': (4, '0.2')}


def test_load_config_file(tmp_path: Path) -> None:
    config_path: Path = tmp_path / 'engine.conf'

    config_path.write_text('window = 3\ntrend_filter = no\nclustering = components\nseed = 7\n', encoding='utf-8')

    config: EngineConfig = load_config(in_path=str(config_path))

    assert config.window == 3
    assert config.trend_filter is False
    assert config.clustering == 'components'
    assert config.seed == 7
    assert config.min_similarity == 0.1


def test_load_config_names_unknown_key_and_line(tmp_path: Path) -> None:
    config_path: Path = tmp_path / 'engine.conf'

    config_path.write_text('window = 3\nwindo = 4\n', encoding='utf-8')

    with pytest.raises(ConfigError, match='line 2.*windo'):
        load_config(in_path=str(config_path))


def test_load_config_bad_value(tmp_path: Path) -> None:
    config_path: Path = tmp_path / 'engine.conf'

    config_path.write_text('window = ten\n', encoding='utf-8')

    with pytest.raises(ConfigError, match='window'):
        load_config(in_path=str(config_path))


def test_load_config_missing_file(tmp_path: Path) -> None:
    with pytest.raises(ConfigError):
        load_config(in_path=str(tmp_path / 'absent.conf'))
