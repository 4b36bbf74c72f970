"""Build script for the optional compiled kernels.

The package imports and runs without the extension; ``reachged._backend``
falls back to the numpy implementation when ``_kernels`` is missing.
"""
import os

import numpy as np
from setuptools import Extension, setup


def _extensions():
    if os.environ.get("REACHGED_NO_EXT"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "reachged._kernels",
        ["src/reachged/_kernels.pyx"],
        include_dirs=[np.get_include()],
        # no contraction to FMA: the Kahan loops must match the numpy path bit for bit
        extra_compile_args=["-O3", "-ffp-contract=off", "-fno-fast-math"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize(
        [ext],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )


setup(ext_modules=_extensions())
