#!/usr/bin/env python3 -B
# coding=utf-8

"""
Copyright (C) 2026 TrendChains Developers
"""

import re

from typing import Final

PAT_WHITESPACE_RUN: Final[re.Pattern[str]] = re.compile(
    r'\s+'
)

PAT_CONFIG_LINE: Final[re.Pattern[str]] = re.compile(
    r'^\s*(?P<key>[A-Za-z_][A-Za-z0-9_\-]*)\s*[=:]\s*(?P<value>.*?)\s*$'
)

PAT_CONFIG_SKIP: Final[re.Pattern[str]] = re.compile(
    r'^\s*(#.*|;.*)?$'
)

PAT_BOOL_TRUE: Final[re.Pattern[str]] = re.compile(
    r'^(1|y|yes|true|on)$',
    flags=re.IGNORECASE
)

PAT_BOOL_FALSE: Final[re.Pattern[str]] = re.compile(
    r'^(0|n|no|false|off)$',
    flags=re.IGNORECASE
)

PAT_NUMBER_LIST: Final[re.Pattern[str]] = re.compile(
    r'^\s*[-+]?(\d+\.?\d*|\.\d+)(\s*,\s*[-+]?(\d+\.?\d*|\.\d+))*\s*$'
)
