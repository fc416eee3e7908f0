"""Build script for the compiled cluster kernels.

The package works without the extension (a pure numpy/scipy fallback is
selected at import time), so a missing Cython toolchain only costs speed.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "thtb.cluster._kernels",
                ["src/thtb/cluster/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level="3",
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
