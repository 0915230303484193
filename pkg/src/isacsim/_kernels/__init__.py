"""Hot numeric kernels with a compiled core and a pure-numpy fallback.

The compiled extension (``_core``, built from Cython) is preferred when it
imports cleanly; otherwise the numpy reference implementations are used.
``BACKEND`` records which one is active.  Force the fallback by setting the
environment variable ``ISACSIM_PURE_PYTHON=1`` before import.
"""

import os

from . import _fallback

BACKEND = "numpy"

if not os.environ.get("ISACSIM_PURE_PYTHON"):
    try:
        from . import _core

        BACKEND = "cython"
    except ImportError:
        _core = None
else:  # pragma: no cover - env-dependent
    _core = None

_impl = _core if BACKEND == "cython" else _fallback

accumulate_echo = _impl.accumulate_echo
music_spectrum = _impl.music_spectrum
jacobi_eigh = _impl.jacobi_eigh

__all__ = ["accumulate_echo", "music_spectrum", "jacobi_eigh", "BACKEND"]
