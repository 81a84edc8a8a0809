"""Despreading kernel selection: compiled Cython core if built, numpy otherwise.

Set WIWI_FORCE_NUMPY=1 to force the fallback (used by the benchmark and
by tests that compare the two implementations).
"""

from __future__ import annotations

import os

from wiwi._kernels import numpy_ref

despread_numpy = numpy_ref.despread

if os.environ.get("WIWI_FORCE_NUMPY"):
    HAVE_COMPILED = False
    despread = despread_numpy
else:
    try:
        from wiwi._kernels import _despread_cy

        despread = _despread_cy.despread
        HAVE_COMPILED = True
    except ImportError:
        HAVE_COMPILED = False
        despread = despread_numpy

__all__ = ["HAVE_COMPILED", "despread", "despread_numpy"]
