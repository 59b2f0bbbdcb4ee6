from ._varlex import *  # noqa: F401,F403
