"""Build script for the optional compiled kernels.

The package is fully functional without the extension; when Cython or a
compiler is unavailable the pure-Python kernels are used instead.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("SYMGAUSS_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        extensions = [
            Extension(
                "symgauss._kernels",
                ["src/symgauss/_kernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ]
        ext_modules = cythonize(
            extensions,
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
