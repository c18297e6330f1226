"""Word-length predictions of communicative-efficiency hypotheses.

Thin re-export of the compiled ``lexopt._core`` extension.
"""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
