import numpy
from setuptools import Extension, setup

# The compiled tangency kernel is optional: if Cython or a C compiler is
# missing the package falls back to the pure-numpy implementation in
# conelab._kernels._tangency_py (selected at import time).
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "conelab._kernels._tangency",
                ["src/conelab/_kernels/_tangency.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
    for ext in ext_modules:
        ext.optional = True
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
