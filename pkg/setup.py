"""Builds the optional Cython kernels; the package works without them."""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("raman3d._kernels", ["src/raman3d/_kernels.pyx"], extra_compile_args=["-O3"])],
        language_level=3,
    )

setup(ext_modules=ext_modules)
