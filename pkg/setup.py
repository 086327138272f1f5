"""Build script: compile the interpreter kernel with Cython when possible.

The evaluator hot loop lives in ``src/updcheck/runtime/_evalcore.py`` as
ordinary Python.  At build time that file is copied to ``_evalcore_c.py``
and compiled, so the same source exists in two forms and
``updcheck.runtime.interp`` picks the compiled one when it imported as a
real extension.  If Cython or a C compiler is missing the build still
succeeds and the package runs on the pure kernel.
"""

from __future__ import annotations

import shutil
from pathlib import Path

from setuptools import Extension, setup

HERE = Path(__file__).resolve().parent
KERNEL = HERE / "src" / "updcheck" / "runtime" / "_evalcore.py"
TWIN = KERNEL.with_name("_evalcore_c.py")


def _ext_modules() -> list[Extension]:
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    shutil.copyfile(KERNEL, TWIN)
    ext = Extension("updcheck.runtime._evalcore_c",
                    [str(TWIN.relative_to(HERE))])
    return cythonize([ext],
                     compiler_directives={"language_level": "3"},
                     quiet=True)


setup(ext_modules=_ext_modules())
