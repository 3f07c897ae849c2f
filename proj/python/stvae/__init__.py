from ._stvae import *  # noqa: F401,F403
