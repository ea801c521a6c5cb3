import os

import numpy as np
from setuptools import Extension, setup

# Strict IEEE semantics: the native kernels must agree bit-for-bit with the
# pure-Python fallback, so no FMA contraction and no fast-math.
compile_args = ["-O2", "-ffp-contract=off", "-fno-fast-math"]

ext_modules = []
if os.environ.get("KINETIKOS_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "kinetikos._native",
                    ["src/kinetikos/_native.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=compile_args,
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )

setup(ext_modules=ext_modules)
