"""Build script: compiles the optional Cython twins of the hot modules.

The package works without the compiled extensions (pure-Python fallbacks are
selected at import time), so any Cython or compiler failure downgrades to a
pure build instead of aborting.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            "src/asyncvis/_core/_chronicle_c.pyx",
            "src/asyncvis/_core/_exact_c.pyx",
        ],
        language_level="3",
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"asyncvis: skipping compiled core ({exc!r}); pure-Python fallback will be used")

setup(ext_modules=ext_modules)
