"""Builds the compiled SGNS training kernel.

The package works without the extension (a pure numpy kernel is selected
at import time), so a missing compiler or Cython only costs speed.
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize

    # -ffp-contract=off keeps the C kernel's arithmetic IEEE-strict so it
    # matches the pure-Python kernel operation for operation.
    extensions = cythonize(
        [
            Extension(
                "lscd._sgns_inner",
                ["src/lscd/_sgns_inner.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3", "-ffp-contract=off"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
