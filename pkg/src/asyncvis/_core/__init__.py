"""Hot-path core with compiled/pure twin selection.

``_chronicle_py`` and ``_exact_py`` are the single algorithmic sources; the
``*_c`` extension modules are built from the same text by Cython. The
compiled twins are preferred when importable; set ``ASYNCVIS_PURE_PYTHON=1``
to force the interpreted fallback (the benchmark imports both explicitly).
"""

import os

_FORCE_PURE = os.environ.get("ASYNCVIS_PURE_PYTHON", "") not in ("", "0")

if _FORCE_PURE:
    from . import _chronicle_py as chronicle_impl
    from . import _exact_py as exact_impl
else:
    try:
        from . import _chronicle_c as chronicle_impl
    except ImportError:
        from . import _chronicle_py as chronicle_impl
    try:
        from . import _exact_c as exact_impl
    except ImportError:
        from . import _exact_py as exact_impl

USING_COMPILED_CORE = chronicle_impl.__name__.endswith("_c")
