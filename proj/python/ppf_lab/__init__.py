"""Python surface of the probabilistic power flow toolkit."""

from ._ppf_lab import *  # noqa: F401,F403
