"""Hot-kernel dispatch: the compiled extension when importable, numpy otherwise.

Set ``NSCAP_PURE_PYTHON=1`` to force the fallback.
"""
import os

from nscap import _pykernels

if os.environ.get("NSCAP_PURE_PYTHON") == "1":
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from nscap import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

relabel_block = _impl.relabel_block
adjacent_pairs = _impl.adjacent_pairs
