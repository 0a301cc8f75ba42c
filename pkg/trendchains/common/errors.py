#!/usr/bin/env python3 -B
# coding=utf-8

"""
Copyright (C) 2026 TrendChains Developers
"""


class TrendChainsError(Exception):
    """ Base class of all TrendChains errors """


class EntityError(TrendChainsError, ValueError):
    """ Entity text is empty after normalization or its kind is unknown """


class ClusterError(TrendChainsError, ValueError):
    """ Cluster construction with fewer than two entities or foreign metadata """


class DocumentError(TrendChainsError, ValueError):
    """ Malformed input document """

    def __init__(self, message: str, line_no: int | None = None) -> None:
        super().__init__(message if line_no is None else f'line {line_no}: {message}')

        self.line_no: int | None = line_no


class UndefinedDomainError(TrendChainsError, ArithmeticError):
    """ Domain has no long window history (N_l(d) = 0) """


class UndefinedSimilarityError(TrendChainsError, ArithmeticError):
    """ Similarity requested for a zero-frequency entity or an empty set """


class UndefinedMetricError(TrendChainsError, ArithmeticError):
    """ Metric denominator is zero, value is not applicable """


class EngineStoppedError(TrendChainsError, RuntimeError):
    """ Document submitted to an engine which is not running """


class ConfigError(TrendChainsError, ValueError):
    """ Invalid configuration file, field or scenario """


class SnapshotStoreError(TrendChainsError, OSError):
    """ Snapshot sink failed to persist a snapshot """


class SchemaError(TrendChainsError, ValueError):
    """ Input file does not match its expected schema """
