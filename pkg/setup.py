"""Build script: compiles the Cython kernel extension when possible.

The package works without the extension (a numpy fallback is selected at
import time), so any build failure here is non-fatal.
"""

from setuptools import setup

try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    extensions = cythonize(
        [
            Extension(
                "lrperc._kernels",
                ["src/lrperc/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception:  # pragma: no cover - pure-python install path
    extensions = []

setup(ext_modules=extensions)
