"""Symbolic Cartan equivalence engine for Class III_1 CR manifolds."""

import json
import os

from ._crequiv import (
    ConfigError,
    LieAlgebra,
    Scalar,
    ScalarError,
    automorphism_fields,
    automorphism_table,
    check_names,
    commands,
    g7,
    g7_printed,
    n54,
    reorder,
    run_json,
)

__all__ = [
    "ConfigError",
    "LieAlgebra",
    "Scalar",
    "ScalarError",
    "automorphism_fields",
    "automorphism_table",
    "check_names",
    "commands",
    "g7",
    "g7_printed",
    "n54",
    "reorder",
    "run",
]


_PACKAGED_GOLDENS = os.path.join(os.path.dirname(__file__), "goldens.json")


def run(command, checks=(), flat=False, trace=False, goldens=None):
    """Run a command and return its report as a dict."""
    if goldens is None:
        goldens = _PACKAGED_GOLDENS if os.path.exists(_PACKAGED_GOLDENS) else ""
    return json.loads(run_json(command, list(checks), flat, trace, goldens))
