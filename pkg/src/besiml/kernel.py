"""Select the derivability kernel: compiled if available, else pure Python.

Set ``BESIML_PURE=1`` to force the pure-Python kernel.
"""

import os

from besiml import _pykernel

if os.environ.get("BESIML_PURE", "") not in ("", "0"):
    impl = _pykernel
else:
    try:
        from besiml import _ckernel as impl
    except ImportError:  # extension not built
        impl = _pykernel

BACKEND = impl.BACKEND
FOUND = _pykernel.FOUND
NOT_FOUND = _pykernel.NOT_FOUND
EXHAUSTED = _pykernel.EXHAUSTED
REF = _pykernel.REF


def backends():
    """All importable kernel modules, pure Python first."""
    out = [_pykernel]
    try:
        from besiml import _ckernel
    except ImportError:
        pass
    else:
        out.append(_ckernel)
    return out
