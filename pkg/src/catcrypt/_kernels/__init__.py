"""Hot loops behind a single interface.

The compiled extension is used when it was built; otherwise, or when
``CATCRYPT_PURE_PYTHON`` is set to a non-empty value, the pure-Python
versions are used. ``BACKEND`` names the active one.
"""
import os

from . import _pykernels as python

compiled = None
if not os.environ.get("CATCRYPT_PURE_PYTHON"):
    try:
        from . import _ckernels as compiled
    except ImportError:
        compiled = None

_active = compiled if compiled is not None else python

BACKEND = _active.NAME
bool_matmul = _active.bool_matmul
int_matmul = _active.int_matmul
seed_histogram = _active.seed_histogram
compose_tables = _active.compose_tables

__all__ = [
    "BACKEND",
    "bool_matmul",
    "int_matmul",
    "seed_histogram",
    "compose_tables",
    "python",
    "compiled",
]
