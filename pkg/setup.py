"""Builds the optional Cython kernels; the package works without them."""
import os

from setuptools import setup

# -fcx-limited-range: complex products inline instead of calling __muldc3; inputs are finite.
# no builtin sin/cos: gcc would fuse the pair into sincos, which rounds differently
# from the separate calls the pure-Python kernels make
COMPILE_ARGS = ["-O3", "-fcx-limited-range", "-fno-builtin-sin", "-fno-builtin-cos"]

ext_modules = []
if not os.environ.get("COHCONC_NO_EXT"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("cohconc._ckernels", ["src/cohconc/_ckernels.pyx"],
                       extra_compile_args=COMPILE_ARGS)],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
