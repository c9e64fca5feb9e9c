"""Build script: compiles the optional Cython kernel core.

Set DISSIPCALC_NO_EXT=1 to skip the extension and install the pure-numpy
fallback only (the package selects the backend at import time).
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("DISSIPCALC_NO_EXT"):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools.extension import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "dissipcalc._kernels._core",
                    ["src/dissipcalc/_kernels/_core.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            language_level="3",
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
