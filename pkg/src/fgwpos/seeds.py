"""Counter-based seed derivation.

Every random stream is derived from one root seed and a fixed integer path,
so adding new consumers never perturbs existing streams and any run can be
replayed exactly from its manifest.
"""

from __future__ import annotations

import numpy as np

# stream identifiers (first path element after the root seed)
STREAM_AGENT_INIT = 1
STREAM_AGENT_EXPLORE = 2
STREAM_AGENT_REPLAY = 3
STREAM_TRAIN_EPISODE = 11
STREAM_EVAL_EPISODE = 12
STREAM_SWEEP = 13


def derive_seed(root: int, *path: int) -> int:
    """Stable 63-bit seed for the (root, *path) counter tuple."""
    ss = np.random.SeedSequence([int(root), *(int(p) for p in path)])
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> 1)


def derive_rng(root: int, *path: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(root), *(int(p) for p in path)]))
