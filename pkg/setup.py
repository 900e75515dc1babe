"""Build the optional Cython kernel extension.

If Cython or a C compiler is unavailable the package still installs and
runs on the pure NumPy kernels in ``homometry._fallback``.
"""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("HOMOMETRY_NO_EXT"):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "homometry._kernels",
                    ["src/homometry/_kernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
