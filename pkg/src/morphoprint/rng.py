"""Deterministic random-stream derivation.

All randomness in the package flows from a single 64-bit master seed.
Independent streams (environment setup, population sampling, per-individual
evaluation) are derived with fixed integer keys so that results are
reproducible regardless of evaluation order or parallelism.
"""
from __future__ import annotations

import numpy as np

MAX_SEED = 2**64 - 1


def make_rng(master_seed: int, *stream_key: int) -> np.random.Generator:
    """Return a generator for the stream identified by (master_seed, *keys)."""
    if not 0 <= master_seed <= MAX_SEED:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {master_seed}")
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=tuple(stream_key))
    return np.random.Generator(np.random.PCG64(seq))


def derive_seed(master_seed: int, *stream_key: int) -> int:
    """Derive a child 64-bit seed, e.g. the environment seed of a run."""
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=tuple(stream_key))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def entropy_seed() -> int:
    """Fresh seed from OS entropy, for when the user does not pin one."""
    return int(np.random.SeedSequence().generate_state(1, dtype=np.uint64)[0])
