"""Quadrature backend selection: compiled extension with numpy fallback.

The environment variable SQGEO_BACKEND ("auto", "compiled", "numpy")
overrides the default; callers may also pass an explicit name.
"""

from __future__ import annotations

import os


def get_backend(name: str | None = None):
    if name is None:
        name = os.environ.get("SQGEO_BACKEND", "auto")
    if name not in ("auto", "compiled", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name in ("auto", "compiled"):
        try:
            from . import _quadcore
            return _quadcore
        except ImportError:
            if name == "compiled":
                raise RuntimeError(
                    "compiled backend requested but sqgeo._quadcore is not built; "
                    "reinstall without SQGEO_NO_EXT or use SQGEO_BACKEND=numpy")
    from . import _quadnp
    return _quadnp


def backend_name(mod) -> str:
    return "compiled" if getattr(mod, "COMPILED", False) else "numpy"
