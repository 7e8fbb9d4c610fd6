# cython: language_level=3
# Compiled twin of the exact-distribution kernels: same source text as
# _exact_py.py, built as an extension module.
include "_exact_py.py"
