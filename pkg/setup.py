"""Builds the optional Cython despreading kernel.

The package works without it (a numpy fallback is selected at import);
installing with Cython present just makes waveform-mode runs faster.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize

    ext = Extension(
        "wiwi._kernels._despread_cy",
        ["src/wiwi/_kernels/_despread_cy.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
    ext.optional = True
    ext_modules = cythonize([ext], language_level=3)
except ImportError:
    pass

setup(ext_modules=ext_modules)
