"""Kernel backend selection: compiled extension if available, else pure Python.

Set DIRAC_NODAL_BACKEND=pure (or =compiled) to force a choice; forcing the
compiled backend raises if the extension was not built.
"""

from __future__ import annotations

import os

from . import _purepy

try:
    from . import _core
except ImportError:  # extension not built on this interpreter/platform
    _core = None

HAVE_COMPILED = _core is not None

_requested = os.environ.get("DIRAC_NODAL_BACKEND", "").strip().lower()
if _requested not in ("", "compiled", "pure"):
    raise ValueError(f"DIRAC_NODAL_BACKEND must be 'compiled' or 'pure', got {_requested!r}")
if _requested == "compiled" and not HAVE_COMPILED:
    raise ImportError("DIRAC_NODAL_BACKEND=compiled but the _core extension is not built")

ACTIVE = _requested or ("compiled" if HAVE_COMPILED else "pure")

if ACTIVE == "compiled":
    march = _core.march
    segment_phi1 = _core.segment_phi1
else:
    march = _purepy.march
    segment_phi1 = _purepy.segment_phi1
