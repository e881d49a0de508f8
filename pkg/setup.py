import os

import numpy
from setuptools import Extension, setup

# The compiled kernel is optional: if Cython (or a C toolchain) is missing the
# package falls back to the pure numpy backend selected at import time.
try:
    if not os.path.exists("src/taskreach/backend/_core.pyx"):
        raise ImportError("no kernel source")
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "taskreach.backend._core",
                ["src/taskreach/backend/_core.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "initializedcheck": False,
        },
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
