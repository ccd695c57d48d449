"""Build hook for the optional compiled quadrature kernel.

The package works without the extension: casimir_membrane.lifshitz falls back
to a NumPy implementation at import time. Building needs Cython and a C
compiler; if either is missing the extension is simply skipped.
"""
from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "casimir_membrane.lifshitz._kernels_cy",
                ["src/casimir_membrane/lifshitz/_kernels_cy.pyx"],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
