"""Latent-space stability toolkit: Python bindings for the C++ core."""

try:
    from ._latentstab import *  # noqa: F401,F403
except ImportError:  # extension on sys.path rather than inside the package
    from _latentstab import *  # noqa: F401,F403

__version__ = "0.1.0"
