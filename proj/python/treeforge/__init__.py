# Copyright 2026 The treeforge Authors
# SPDX-License-Identifier: Apache-2.0
"""Thin wrapper over the native module: dicts in, dicts out."""

import json

from . import _treeforge
from ._treeforge import UnknownSuite

__version__ = _treeforge.__version__
__all__ = [
    "UnknownSuite",
    "amalgamate",
    "dichotomy",
    "fan",
    "gen",
    "indep",
    "list_suites",
    "normalize",
    "run_suite",
    "to_dot",
]


def _text(structure):
    return structure if isinstance(structure, str) else json.dumps(structure)


def gen(flavor="mixed", steps=100, seed=1, edges=True):
    return json.loads(_treeforge.gen(flavor, steps, seed, edges))


def amalgamate(left, right, base=None, map_left=(), map_right=(), mixed=False):
    return json.loads(
        _treeforge.amalgamate(
            _text(left),
            _text(right),
            None if base is None else _text(base),
            list(map_left),
            list(map_right),
            mixed,
        )
    )


def indep(structure, relation, a, b, c=(), gamma=None):
    return json.loads(
        _treeforge.indep(_text(structure), relation, list(a), list(b), list(c), gamma)
    )


def dichotomy(structure, perm):
    return json.loads(_treeforge.dichotomy(_text(structure), list(perm)))


def fan(structure, perm, g, max_power=0):
    return json.loads(_treeforge.fan(_text(structure), list(perm), g, max_power))


def run_suite(suite_id, max_size, trials=0, seed=1):
    return json.loads(_treeforge.run_suite(suite_id, max_size, trials, seed))


def list_suites():
    return json.loads(_treeforge.list_suites())


def to_dot(structure):
    return _treeforge.to_dot(_text(structure))


def normalize(structure):
    return json.loads(_treeforge.normalize(_text(structure)))
