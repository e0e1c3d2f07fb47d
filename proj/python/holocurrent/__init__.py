"""Python bindings for the holocurrent C++ core."""

from ._core import (
    HoloError,
    classify,
    cocycle,
    frenkel,
    killing_form,
    matrix_exp,
    monodromy,
    run_cli,
)

__all__ = [
    "HoloError",
    "classify",
    "cocycle",
    "frenkel",
    "killing_form",
    "matrix_exp",
    "monodromy",
    "run_cli",
]
