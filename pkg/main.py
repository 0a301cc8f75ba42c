#!/usr/bin/env python3 -B
# coding=utf-8

"""
Copyright (C) 2026 TrendChains Developers
"""

import logging
import sys
import traceback

from argparse import ArgumentParser, BooleanOptionalAction, Namespace
from typing import Any, Final

from trendchains import __version__

from trendchains.commands import COMMANDS
from trendchains.common.config import CLUSTERING_BACKENDS, EngineConfig, load_config
from trendchains.common.errors import TrendChainsError
from trendchains.common.system import printer, python_version
from trendchains.common.templates import TrendChainsCommand

FLAG_HELP: Final[dict[str, str]] = {
    'min_similarity': 'minimum similarity S, edges must be strictly above it',
    'resolution': 'Louvain resolution R',
    'window': 'co-occurrence window W in minutes',
    'link_threshold': 'minimum cluster overlap for linking',
    'long_window': 'trend long window in minutes',
    'short_window': 'trend short window in minutes',
    'trends_top_k': 'trending entities kept per domain',
    'shed_queue_limit': 'ingest queue capacity, documents beyond it are shed',
    'min_trend_score': 'minimum trend score of a trending entity',
    'trend_filter': 'filter co-occurrence counting by trending entities',
    'clustering': 'clustering backend',
    'max_doc_entities': 'entities per document kept for pair counting',
    'drain_rate': 'replay drain rate in documents per virtual second (0 = unlimited)',
    'chain_retention': 'idle minutes before a chain leaves memory',
    'seed': 'seed of all randomness',
    'workers': 'ingestion workers of the live run'
}


class TrendChains:
    """ Main TrendChains class """

    MIN_PYTHON_VER: Final[tuple[int, int]] = (3, 10)

    def __init__(self, argv: list[str] | None = None) -> None:
        self.main_arguments: Namespace = self.build_parser().parse_args(argv)

    @staticmethod
    def build_parser() -> ArgumentParser:
        """ Subcommands, each with the shared config flags """

        config_argparser: ArgumentParser = ArgumentParser(add_help=False, allow_abbrev=False)

        config_argparser.add_argument('-c', '--config', help='key = value engine config file')
        config_argparser.add_argument('-v', '--verbose', help='more log output (repeatable)', action='count',
                                      default=0)

        for name, value_type in EngineConfig.field_types().items():
            flag: str = f'--{name.replace("_", "-")}'

            if value_type is bool:
                config_argparser.add_argument(flag, help=FLAG_HELP[name], action=BooleanOptionalAction, default=None)
            elif name == 'clustering':
                config_argparser.add_argument(flag, help=FLAG_HELP[name], choices=CLUSTERING_BACKENDS, default=None)
            else:
                config_argparser.add_argument(flag, help=FLAG_HELP[name], type=value_type, default=None)

        main_argparser: ArgumentParser = ArgumentParser(prog='trendchains', allow_abbrev=False,
                                                        description='Streaming event detection and cluster chains')

        main_argparser.add_argument('--version', action='version', version=f'TrendChains v{__version__}')

        subparsers: Any = main_argparser.add_subparsers(dest='command', required=True)

        run_parser: ArgumentParser = subparsers.add_parser(
            'run', parents=[config_argparser], allow_abbrev=False, help='live wall clock run over standard input')
        run_parser.add_argument('-o', '--output', help='snapshot JSONL file (default: standard output)')
        run_parser.add_argument('--profile', help='per-minute load profile CSV file')

        replay_parser: ArgumentParser = subparsers.add_parser(
            'replay', parents=[config_argparser], allow_abbrev=False, help='deterministic virtual clock run')
        replay_parser.add_argument('input', help='document JSONL file')
        replay_parser.add_argument('-o', '--output', help='snapshot JSONL file (default: standard output)')
        replay_parser.add_argument('--profile', help='per-minute load profile CSV file')

        evaluate_parser: ArgumentParser = subparsers.add_parser(
            'evaluate', parents=[config_argparser], allow_abbrev=False, help='metrics of a snapshot file')
        evaluate_parser.add_argument('snapshots', help='snapshot JSONL file')
        evaluate_parser.add_argument('ground_truth', help='ground truth CSV file')
        evaluate_parser.add_argument('-o', '--output', help='metric CSV file (default: standard output)')

        sweep_parser: ArgumentParser = subparsers.add_parser(
            'sweep', parents=[config_argparser], allow_abbrev=False, help='metrics over an (S, R) grid')
        sweep_parser.add_argument('input', help='document JSONL file')
        sweep_parser.add_argument('ground_truth', help='ground truth CSV file')
        sweep_parser.add_argument('--s-values', help='comma separated S values', default='0,0.1,0.2,0.3,0.4')
        sweep_parser.add_argument('--r-values', help='comma separated R values', default='1')
        sweep_parser.add_argument('--backends', help='comma separated clustering backends', default='louvain')
        sweep_parser.add_argument('--sweep-workers', help='parallel grid point runs', type=int, default=1)
        sweep_parser.add_argument('-o', '--output', help='metric CSV file (default: standard output)')

        export_parser: ArgumentParser = subparsers.add_parser(
            'export-chains', parents=[config_argparser], allow_abbrev=False, help='chain table of a snapshot file')
        export_parser.add_argument('snapshots', help='snapshot JSONL file')
        export_parser.add_argument('--first-tick', help='first tick of the range', type=int)
        export_parser.add_argument('--last-tick', help='last tick of the range', type=int)
        export_parser.add_argument('--pattern', help='entity text glob, e.g. "*world*cup*"')
        export_parser.add_argument('--top', help='keep the N chains of highest aggregate frequency', type=int)
        export_parser.add_argument('-o', '--output', help='chain CSV file (default: standard output)')

        corpus_parser: ArgumentParser = subparsers.add_parser(
            'gen-corpus', parents=[config_argparser], allow_abbrev=False, help='synthetic corpus and ground truth')
        corpus_parser.add_argument('--scenario', help='key = value scenario file (default scenario otherwise)')
        corpus_parser.add_argument('-o', '--output', help='document JSONL file', required=True)
        corpus_parser.add_argument('-g', '--ground-truth-output', help='ground truth CSV file', required=True)

        return main_argparser

    def load_config(self) -> EngineConfig:
        """ Defaults, then config file, then explicit flags """

        config: EngineConfig = EngineConfig()

        if self.main_arguments.config:
            config = load_config(in_path=self.main_arguments.config)

        flag_values: dict[str, Any] = {
            name: getattr(self.main_arguments, name) for name in EngineConfig.field_types()}

        return config.with_overrides(**flag_values)

    def _check_system_support(self) -> None:
        """ Check Python Version """

        sys_py: tuple = python_version()

        if sys_py < self.MIN_PYTHON_VER:
            min_py_str: str = '.'.join(map(str, self.MIN_PYTHON_VER))
            sys_py_str: str = '.'.join(map(str, sys_py[:2]))

            raise RuntimeError(f'Python >= {min_py_str} required, not {sys_py_str}')

    def _setup_logging(self) -> None:
        level: int = {0: logging.WARNING, 1: logging.INFO}.get(self.main_arguments.verbose, logging.DEBUG)

        logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s', stream=sys.stderr)

    @staticmethod
    def _show_exception_and_exit(exc_type, exc_value, tb) -> None:
        if exc_type is KeyboardInterrupt:
            print('\n', file=sys.stderr)
        else:
            print(f'\nError: TrendChains v{__version__} crashed:\n', file=sys.stderr)

            traceback.print_exception(exc_type, exc_value, tb)

        sys.exit(1)

    def run_main(self) -> int:
        """ Run main flow, returning the exit status """

        sys.excepthook = self._show_exception_and_exit

        self._check_system_support()

        self._setup_logging()

        try:
            command: TrendChainsCommand = COMMANDS[self.main_arguments.command](
                arguments=self.main_arguments, config=self.load_config())

            if not command.check_input():
                printer(message=f'Error: {command.input_error}', new_line=False, stream=sys.stderr)

                return 1

            return command.run_command()
        except (TrendChainsError, OSError) as error:
            printer(message=f'Error: {error}', new_line=False, stream=sys.stderr)

            return 1


if __name__ == '__main__':
    sys.exit(TrendChains().run_main())
