"""Build the optional compiled path-execution kernel.

The package is fully functional without it (a pure-Python kernel with
identical semantics is selected at import time); when Cython and a C
compiler are available, `timebound.verify._pathcore` is built for a large
exploration speedup. Build failures only disable the extension.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/timebound/verify/_pathcore.pyx",
        compiler_directives={"language_level": "3"},
    )
    for ext in ext_modules:
        ext.include_dirs.append(numpy.get_include())
        ext.define_macros.append(("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION"))
except Exception as exc:  # noqa: BLE001 - any build-tool absence disables the ext
    print(f"timebound: compiled kernel disabled ({exc}); using the pure-Python kernel",
          file=sys.stderr)

setup(ext_modules=ext_modules)
