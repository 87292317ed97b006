"""Build script for the optional compiled similarity kernel.

The package works without the extension: revlab._kernels falls back to the
pure-Python implementation at import time when the compiled module is absent
or fails to build.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "revlab._kernels._simcore",
                sources=["src/revlab/_kernels/_simcore.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
