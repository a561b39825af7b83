"""Select the word-map kernel backend at import time.

The compiled extension is used when it was built; set ``REPWITNESS_PURE=1``
to force the pure-Python fallback.
"""
import os

from . import _pykernels as python_backend

if os.environ.get("REPWITNESS_PURE", "") not in ("", "0"):
    _impl = python_backend
    compiled_backend = None
else:
    try:
        from . import _ckernels as compiled_backend
    except ImportError:  # extension not built
        compiled_backend = None
        _impl = python_backend
    else:
        _impl = compiled_backend

BACKEND = _impl.BACKEND
eval_word = _impl.eval_word
word_jacobian = _impl.word_jacobian
system = _impl.system

__all__ = ["BACKEND", "eval_word", "word_jacobian", "system", "python_backend", "compiled_backend"]
