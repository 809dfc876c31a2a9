"""vprkit: visual process representations from browser interaction logs."""

__version__ = "0.1.0"

from .errors import VprError

__all__ = ["VprError", "__version__"]
