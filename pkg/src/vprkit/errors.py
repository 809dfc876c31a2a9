"""Shared exception base for the toolkit.

Every domain error raised by the library derives from VprError so the CLI
can map them to exit code 1 (I/O and usage problems map to 2).
"""


class VprError(Exception):
    """Base class for all domain errors raised by vprkit."""
