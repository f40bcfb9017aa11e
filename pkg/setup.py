"""Build script for the optional compiled kernel core.

The package works without the extension (a pure-Python fallback is selected
at import time), so the build is marked optional: if Cython or a C compiler
is unavailable the install still succeeds.

Build in place for development:

    python setup.py build_ext --inplace
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "calibrec._kernels._core",
                ["src/calibrec/_kernels/_core.pyx"],
                # -ffp-contract=off forbids FMA fusion so the compiled kernels
                # produce bit-identical doubles to the pure-Python fallback.
                extra_compile_args=["-O3", "-ffp-contract=off"],
                optional=True,
            )
        ],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
