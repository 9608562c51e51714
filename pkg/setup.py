"""Build script: compiles the optional incremental-learning kernel.

The package works without the extension (a numpy fallback is selected at
import time), so the extension is marked optional and a failed compile
only degrades performance.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "ldlkit._wh_kernel",
                ["src/ldlkit/_wh_kernel.pyx"],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
