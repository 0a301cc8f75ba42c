#!/usr/bin/env python3 -B
# coding=utf-8

"""
Copyright (C) 2026 TrendChains Developers
"""

import os

from pathlib import Path


def path_parent(in_path: str) -> Path:
    """ Get absolute parent of path """

    return Path(in_path).parent.absolute()


def make_dirs(in_path: str, parents: bool = True, exist_ok: bool = True) -> None:
    """ Create folder(s), controlling parents and existence """

    Path.mkdir(Path(in_path), parents=parents, exist_ok=exist_ok)


def make_parent_dirs(in_path: str) -> None:
    """ Create the parent folder(s) of an output file path """

    make_dirs(in_path=str(path_parent(in_path=in_path)))


def is_dir(in_path: str) -> bool:
    """ Check if path is a directory """

    return Path(in_path).is_dir()


def is_file(in_path: str) -> bool:
    """ Check if path is a regular file """

    in_path_abs: str = os.path.abspath(in_path)

    return os.path.lexists(in_path_abs) and not is_dir(in_path=in_path_abs) and os.path.isfile(in_path_abs)


def is_access(in_path: str, access_mode: int = os.R_OK) -> bool:
    """ Check if path is accessible """

    return os.access(in_path, access_mode)


def is_file_read(in_path: str) -> bool:
    """ Check if path is a readable file """

    return isinstance(in_path, str) and is_file(in_path=in_path) and is_access(in_path=in_path)
