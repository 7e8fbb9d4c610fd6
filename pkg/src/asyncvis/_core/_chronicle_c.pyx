# cython: language_level=3
# Compiled twin of the chronicle state machine: same source text as
# _chronicle_py.py, built as an extension module.
include "_chronicle_py.py"
