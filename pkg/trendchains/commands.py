#!/usr/bin/env python3 -B
# coding=utf-8

"""
Commands
Subcommands of the TrendChains command line
Copyright (C) 2026 TrendChains Developers
"""

import sys

from typing import Final, TextIO

import pandas as pd

from trendchains.common.errors import ConfigError
from trendchains.common.jsonl import read_snapshots
from trendchains.common.paths import is_file_read, make_parent_dirs
from trendchains.common.patterns import PAT_NUMBER_LIST
from trendchains.common.structs import ClusterSnapshot, Document
from trendchains.common.templates import TrendChainsCommand
from trendchains.common.texts import format_ratio, to_boxed
from trendchains.corpus_generator import Scenario, generate_corpus, write_corpus
from trendchains.evaluation import (METRIC_NAMES, GroundTruthCorpus, MetricReport, evaluate_run, sweep,
                                    write_metric_table)
from trendchains.pipeline_engine import (Engine, EngineCounters, JsonlSnapshotStore, LiveRunner, SnapshotStore,
                                         StreamSnapshotStore, export_chains, profile_replay, read_documents)


def parse_number_list(in_text: str, name: str) -> list[float]:
    """ Comma separated numbers, e.g. "0,0.1,0.2" """

    if not PAT_NUMBER_LIST.match(in_text):
        raise ConfigError(f'Option "{name}" expects comma separated numbers, got {in_text!r}')

    return [float(value) for value in in_text.split(',')]


def read_snapshot_file(in_path: str) -> list[ClusterSnapshot]:
    """ Persisted snapshots of a JSONL file """

    with open(in_path, 'r', encoding='utf-8') as in_file:
        return list(read_snapshots(in_file=in_file))


def write_table(table: pd.DataFrame, out_path: str | None, na_rep: str = 'NA') -> None:
    """ CSV to a file, or standard output without a path """

    if out_path:
        make_parent_dirs(in_path=out_path)

        table.to_csv(out_path, index=False, na_rep=na_rep, lineterminator='\n')
    else:
        table.to_csv(sys.stdout, index=False, na_rep=na_rep, lineterminator='\n')


def snapshot_store(out_path: str | None) -> SnapshotStore:
    """ JSONL snapshot file, or standard output without a path """

    return JsonlSnapshotStore(out_path=out_path) if out_path else StreamSnapshotStore(out_stream=sys.stdout)


def write_load_profile(engine: Engine, out_path: str | None) -> None:
    """ Per-tick load CSV, when a path is given """

    if out_path:
        write_table(table=engine.load_profile(), out_path=out_path)


class ReplayCommand(TrendChainsCommand):
    """ Deterministic virtual clock run of a JSONL document file """

    TITLE: str = 'Replay'

    def check_input(self) -> bool:
        if not is_file_read(in_path=self.arguments.input):
            self.input_error = f'Input file is not readable: {self.arguments.input}'

            return False

        return True

    def run_command(self) -> int:
        read_counters: EngineCounters = EngineCounters()

        with open(self.arguments.input, 'r', encoding='utf-8') as in_file:
            documents: list[Document] = list(read_documents(in_file=in_file, counters=read_counters))

        engine, profile = profile_replay(documents=documents, config=self.config,
                                         store=snapshot_store(out_path=self.arguments.output))

        engine.counters.malformed += read_counters.malformed

        write_load_profile(engine=engine, out_path=self.arguments.profile)

        self.summary(message=[to_boxed(in_text=self.TITLE), *engine.summary(), *profile.summary()])

        return 0


class RunCommand(TrendChainsCommand):
    """ Wall clock live run over standard input """

    TITLE: str = 'Live Run'

    def __init__(self, *args, in_stream: TextIO | None = None, **kwargs) -> None:
        super().__init__(*args, **kwargs)

        self.in_stream: TextIO = sys.stdin if in_stream is None else in_stream

    def check_input(self) -> bool:
        return True

    def run_command(self) -> int:
        engine: Engine = Engine(config=self.config, store=snapshot_store(out_path=self.arguments.output))

        LiveRunner(engine=engine, workers=self.config.workers).run(in_stream=self.in_stream)

        write_load_profile(engine=engine, out_path=self.arguments.profile)

        self.summary(message=[to_boxed(in_text=self.TITLE), *engine.summary()])

        return 0


class EvaluateCommand(TrendChainsCommand):
    """ Metric row of a snapshot file against ground truth """

    TITLE: str = 'Evaluate'

    def check_input(self) -> bool:
        for in_path in (self.arguments.snapshots, self.arguments.ground_truth):
            if not is_file_read(in_path=in_path):
                self.input_error = f'Input file is not readable: {in_path}'

                return False

        return True

    def run_command(self) -> int:
        gt: GroundTruthCorpus = GroundTruthCorpus.read_csv(in_path=self.arguments.ground_truth)

        report: MetricReport = evaluate_run(snapshots=read_snapshot_file(in_path=self.arguments.snapshots), gt=gt)

        write_table(table=pd.DataFrame([report.as_row()]), out_path=self.arguments.output)

        self.summary(message=[to_boxed(in_text=self.TITLE), *(
            f'{name:<25}: {format_ratio(in_value=getattr(report, name))}' for name in METRIC_NAMES)])

        return 0


class SweepCommand(TrendChainsCommand):
    """ Replays over an (S, R, backend) grid """

    TITLE: str = 'Sweep'

    def check_input(self) -> bool:
        for in_path in (self.arguments.input, self.arguments.ground_truth):
            if not is_file_read(in_path=in_path):
                self.input_error = f'Input file is not readable: {in_path}'

                return False

        return True

    def run_command(self) -> int:
        gt: GroundTruthCorpus = GroundTruthCorpus.read_csv(in_path=self.arguments.ground_truth)

        with open(self.arguments.input, 'r', encoding='utf-8') as in_file:
            documents: list[Document] = list(read_documents(in_file=in_file))

        table: pd.DataFrame = sweep(
            corpus=documents, gt=gt, config=self.config,
            S_values=parse_number_list(in_text=self.arguments.s_values, name='--s-values'),
            R_values=parse_number_list(in_text=self.arguments.r_values, name='--r-values'),
            backends=[backend.strip() for backend in self.arguments.backends.split(',') if backend.strip()],
            workers=self.arguments.sweep_workers)

        if self.arguments.output:
            write_metric_table(table=table, out_path=self.arguments.output)
        else:
            write_table(table=table, out_path=None)

        self.summary(message=[to_boxed(in_text=self.TITLE), f'Grid points: {len(table)}'])

        return 0


class ExportChainsCommand(TrendChainsCommand):
    """ Chain table of a snapshot file for stream graph plotting """

    TITLE: str = 'Export Chains'

    def check_input(self) -> bool:
        if not is_file_read(in_path=self.arguments.snapshots):
            self.input_error = f'Input file is not readable: {self.arguments.snapshots}'

            return False

        return True

    def run_command(self) -> int:
        table: pd.DataFrame = export_chains(snapshots=read_snapshot_file(in_path=self.arguments.snapshots),
                                            first_tick=self.arguments.first_tick, last_tick=self.arguments.last_tick,
                                            pattern=self.arguments.pattern, top=self.arguments.top)

        write_table(table=table, out_path=self.arguments.output, na_rep='')

        self.summary(message=[to_boxed(in_text=self.TITLE),
                              f'Rows: {len(table)}, chains: {table["chain_id"].nunique()}'])

        return 0


class GenCorpusCommand(TrendChainsCommand):
    """ Synthetic scripted corpus and its ground truth """

    TITLE: str = 'Generate Corpus'

    def check_input(self) -> bool:
        if self.arguments.scenario and not is_file_read(in_path=self.arguments.scenario):
            self.input_error = f'Scenario file is not readable: {self.arguments.scenario}'

            return False

        return True

    def run_command(self) -> int:
        scenario: Scenario = Scenario.from_file(in_path=self.arguments.scenario) if self.arguments.scenario \
            else Scenario()

        documents, gt = generate_corpus(scenario=scenario, seed=self.config.seed)

        count: int = write_corpus(documents=documents, gt=gt, out_path=self.arguments.output,
                                  gt_path=self.arguments.ground_truth_output)

        self.summary(message=[to_boxed(in_text=self.TITLE),
                              f'Documents: {count}, events: {len(gt.events())}, seed: {self.config.seed}'])

        return 0


COMMANDS: Final[dict[str, type[TrendChainsCommand]]] = {
    'run': RunCommand,
    'replay': ReplayCommand,
    'evaluate': EvaluateCommand,
    'sweep': SweepCommand,
    'export-chains': ExportChainsCommand,
    'gen-corpus': GenCorpusCommand
}
