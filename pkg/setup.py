"""Build script: compiles the optional Cython kernel extension.

The package is fully functional without the extension (a numpy fallback is
selected at import time), so any failure to build it is non-fatal.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext = Extension(
        "isacsim._kernels._core",
        ["src/isacsim/_kernels/_core.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    ext_modules = cythonize([ext], language_level="3")
except Exception as exc:  # pragma: no cover - build-environment dependent
    sys.stderr.write(f"isacsim: skipping Cython extension build ({exc!r}); "
                     "the pure-numpy kernels will be used.\n")

setup(ext_modules=ext_modules)
