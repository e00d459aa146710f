import os

import numpy as np
from setuptools import setup, Extension

ext_modules = []
if os.environ.get("PROXYZOO_SKIP_EXT", "0") != "1":
    from Cython.Build import cythonize

    ext = Extension(
        "proxyzoo._rotation_kernels",
        ["src/proxyzoo/_rotation_kernels.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    ext_modules = cythonize([ext], language_level=3)

setup(ext_modules=ext_modules)
