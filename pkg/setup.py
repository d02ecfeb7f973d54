"""Build script.

The compiled kernel is optional: when Cython (and a C toolchain) is available
the extension is built, otherwise the package installs pure-Python only and
the kernels module falls back at import time.
"""

from setuptools import setup

extensions = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    extensions = cythonize(
        [
            Extension(
                name="sacmine.kernels._ckernels",
                sources=["src/sacmine/kernels/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
