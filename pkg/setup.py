"""Build hook: compile the optional triangle-intersection kernel if Cython is available.

The package is fully functional without the extension; geometry.py falls back to a
numpy implementation at import time.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    import numpy

    ext_modules = cythonize(
        "src/gemdual/_tritri.pyx",
        compiler_directives={"language_level": "3"},
    )
    include_dirs = [numpy.get_include()]
    for ext in ext_modules:
        ext.include_dirs.extend(include_dirs)
except Exception:
    # No Cython (or no compiler): ship pure Python.
    ext_modules = []

setup(ext_modules=ext_modules)
