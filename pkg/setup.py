"""Build script: compiles the optional LSTM kernel extension.

The package works without the extension (a NumPy fallback is selected at
import time); the build therefore degrades to pure Python instead of
failing when no compiler or Cython is available.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "volmoe.lstm.backends._cykernels",
                ["src/volmoe/lstm/backends/_cykernels.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    sys.stderr.write(
        f"volmoe: skipping compiled kernels ({exc!r}); "
        "the NumPy backend will be used\n"
    )

setup(ext_modules=ext_modules)
