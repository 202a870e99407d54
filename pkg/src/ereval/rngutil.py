"""Deterministic, platform-independent random streams.

A stream is identified by a master seed plus any number of integer stream
ids; identical identifiers yield identical draw sequences (PCG64 via
numpy's SeedSequence), and distinct ids yield independent streams. This is
what makes parallel simulation output independent of scheduling.
"""

import numpy as np


def make_rng(seed: int, *stream_ids: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, stream_ids)]))
