"""Backend selection for the roof-search kernels.

The compiled extension is used when it was built; otherwise, or when
``COHCONC_PURE_PYTHON`` is set to a non-empty value, the numpy reference
implementation takes over with identical semantics.
"""
import importlib.util
import os

from . import _pykernels

KIND_COHERENCE = _pykernels.KIND_COHERENCE
KIND_QI = _pykernels.KIND_QI
KIND_ENTANGLEMENT = _pykernels.KIND_ENTANGLEMENT


def _load():
    if os.environ.get("COHCONC_PURE_PYTHON"):
        return _pykernels, "python"
    try:
        from . import _ckernels
    except ImportError:
        return _pykernels, "python"
    return _ckernels, "cython"


impl, BACKEND = _load()


def compiled_available() -> bool:
    return importlib.util.find_spec(__package__ + "._ckernels") is not None
