"""Build script: compiles the quadrature kernel extension unless disabled.

Set SQGEO_NO_EXT=1 to install without the compiled kernel (the numpy
fallback backend is then selected at import time).
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("SQGEO_NO_EXT", "0") != "1":
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext = Extension(
        "sqgeo._quadcore",
        ["src/sqgeo/_quadcore.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=[
            "-O3",
            "-march=native",
            "-ffast-math",
            "-fno-math-errno",
            "-fopenmp",
        ],
        extra_link_args=["-fopenmp"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    ext_modules = cythonize(
        [ext],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )

setup(ext_modules=ext_modules)
