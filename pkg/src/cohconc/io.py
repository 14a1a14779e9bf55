"""JSON serialization of states.

Complex numbers are written as ``[re, im]`` pairs. Floats go through
``repr`` which round-trips IEEE doubles exactly (at most 17 significant digits).
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Union

import numpy as np

from .errors import DimensionError, ParameterError
from .states import BipartitePureState, DensityMatrix, PureState


def complex_pairs(values) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(values, dtype=complex).ravel()]


def from_pairs(data) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParameterError(f"expected a list of [re, im] pairs: {exc}") from None
    if arr.ndim == 1 and arr.shape == (2,):
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ParameterError("expected a list of [re, im] pairs")
    return arr[:, 0] + 1j * arr[:, 1]


def state_to_dict(state) -> dict:
    if isinstance(state, PureState):
        return {"dim": state.dim, "kind": "pure", "data": complex_pairs(state.amplitudes)}
    if isinstance(state, BipartitePureState):
        return {"dim": state.vector.shape[0], "kind": "pure", "dims": list(state.dims),
                "data": complex_pairs(state.vector)}
    if isinstance(state, DensityMatrix):
        return {"dim": state.dim, "kind": "mixed", "data": complex_pairs(state.entries)}
    raise ParameterError(f"cannot serialize {type(state).__name__}")


def state_from_dict(obj: dict) -> Union[PureState, DensityMatrix, BipartitePureState]:
    try:
        d = int(obj["dim"])
        kind = obj["kind"]
        data = from_pairs(obj["data"])
    except (KeyError, TypeError) as exc:
        raise ParameterError(f"state file needs dim, kind and data fields ({exc})") from None
    if kind == "pure":
        if data.shape[0] != d:
            raise DimensionError(f"pure state of dim {d} needs {d} amplitudes, got {data.shape[0]}")
        if "dims" in obj:
            return BipartitePureState.from_vector(data, tuple(int(x) for x in obj["dims"]))
        return PureState(data)
    if kind == "mixed":
        if data.shape[0] != d * d:
            raise DimensionError(f"mixed state of dim {d} needs {d * d} entries, got {data.shape[0]}")
        return DensityMatrix(data.reshape(d, d))
    raise ParameterError(f"unknown state kind {kind!r}")


def dumps(obj) -> str:
    return json.dumps(obj, indent=None, sort_keys=False, allow_nan=False)


def save_state(state, path) -> None:
    Path(path).write_text(dumps(state_to_dict(state)) + "\n")


def load_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParameterError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from None
    except OSError as exc:
        raise ParameterError(f"{path}: {exc.strerror}") from None


def load_state(path):
    obj = load_json(path)
    if not isinstance(obj, dict):
        raise ParameterError(f"{path}: expected a JSON object")
    return state_from_dict(obj)
