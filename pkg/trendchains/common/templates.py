#!/usr/bin/env python3 -B
# coding=utf-8

"""
Copyright (C) 2026 TrendChains Developers
"""

import sys

from argparse import Namespace
from typing import TextIO

from trendchains.common.config import EngineConfig
from trendchains.common.system import printer


class TrendChainsCommand:
    """ Base class for TrendChains subcommands """

    TITLE: str = 'TrendChains Command'

    def __init__(self, arguments: Namespace, config: EngineConfig, padding: int = 0,
                 summary_stream: TextIO | None = None) -> None:
        self.arguments: Namespace = arguments
        self.config: EngineConfig = config
        self.padding: int = padding
        self.summary_stream: TextIO = sys.stderr if summary_stream is None else summary_stream

        self.input_error: str = ''

    def summary(self, message: str | list[str], padding: int | None = None) -> None:
        """ Show summary line(s) on the summary stream """

        lines: list[str] = [message] if isinstance(message, str) else message

        printer(message='\n'.join(lines), padding=self.padding if padding is None else padding,
                new_line=False, stream=self.summary_stream)

    def check_input(self) -> bool:
        """ Check if the command inputs are usable, setting input_error otherwise """

        raise NotImplementedError(f'Method "check_input" not implemented at {__name__}')

    def run_command(self) -> int:
        """ Execute the command, returning its exit status """

        raise NotImplementedError(f'Method "run_command" not implemented at {__name__}')
