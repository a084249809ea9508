"""Build script for the optional compiled kernels.

The package works without the extension; ``holorep._core`` falls back to
the numpy implementation when ``holorep._kernels`` cannot be imported.
"""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("HOLOREP_NO_EXT"):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "holorep._kernels",
                    ["src/holorep/_kernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3", "-fcx-limited-range"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
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
