"""Build script for the optional compiled elimination core.

The package is fully functional without the extension: webrank.linalg falls
back to the pure-Python kernels when webrank._speedups is absent.
"""

from setuptools import setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/webrank/_speedups.pyx"],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
