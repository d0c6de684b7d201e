"""Builds the optional Cython evaluation kernel; the package works without it."""

import os
import sys

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("EROTETIC_NO_EXT", "") in ("", "0"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        print("Cython not available; installing the pure-Python kernel only", file=sys.stderr)
    else:
        ext_modules = cythonize(
            [Extension("erotetic._kernels", ["src/erotetic/_kernels.pyx"],
                       extra_compile_args=["-O3"])],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
