"""Named random sub-streams derived from one global seed.

Every stochastic stage (split, shuffle, init, lime, ...) draws from its own
generator so adding a stage never shifts another stage's draws.
"""
import zlib

import numpy as np


def stream_key(name):
    return zlib.crc32(name.encode("utf-8"))


def substream(seed, name, *extra):
    """Return a Generator keyed on (seed, name, *extra)."""
    entropy = [int(seed), stream_key(name), *[int(e) for e in extra]]
    return np.random.default_rng(np.random.SeedSequence(entropy))
