"""Build script: compiles the optional fast-decode extension.

The package is fully functional without the extension; decoding falls
back to the pure-Python executor. Set BAGPILOT_SKIP_EXT=1 to skip the
build entirely.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("BAGPILOT_SKIP_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "bagpilot.codec._fastdecode",
                    ["src/bagpilot/codec/_fastdecode.pyx"],
                    optional=True,
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
