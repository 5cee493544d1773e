"""Early-stopping majority voting for stochastic answer sources.

The heavy lifting lives in the compiled extension; this package re-exports
its surface.
"""

from ._seqvote import *  # noqa: F401,F403
from ._seqvote import __version__  # noqa: F401
