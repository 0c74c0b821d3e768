"""Named random sub-streams derived from a single user seed."""

import zlib

import numpy as np

TOPOLOGY = "topology"
WORKLOAD = "workload"
RELAY = "vlb-relay"
MATRICES = "matrices"


def substream_seed(seed: int, name: str) -> int:
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, zlib.crc32(name.encode())])
    return int(ss.generate_state(2, dtype=np.uint64)[0] >> np.uint64(1))


def substream(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng(substream_seed(seed, name))
