"""Deterministic random-stream derivation.

All simulation randomness flows from numpy SeedSequence keyed on
(base_seed, tag, integers...). String tags are hashed with sha256 into
fixed 32-bit words, so derived streams do not depend on Python's hash
randomization and are reproducible across runs and platforms.
"""

import hashlib

import numpy as np

__all__ = ["derive_seed_sequence", "derive_rng", "as_generator"]


def _words(part):
    if isinstance(part, str):
        digest = hashlib.sha256(part.encode("utf-8")).digest()
        return [int.from_bytes(digest[i : i + 4], "little") for i in range(0, 16, 4)]
    if isinstance(part, (bool, np.bool_)):
        return [int(part)]
    if isinstance(part, (int, np.integer)):
        return [int(part) & 0xFFFFFFFF, (int(part) >> 32) & 0xFFFFFFFF]
    raise TypeError(f"cannot derive seed words from {type(part).__name__}")


def derive_seed_sequence(base_seed, *parts):
    entropy = [int(base_seed) & 0xFFFFFFFFFFFFFFFF]
    for part in parts:
        entropy.extend(_words(part))
    return np.random.SeedSequence(entropy)


def derive_rng(base_seed, *parts):
    """PCG64 generator for the stream keyed by (base_seed, *parts)."""
    return np.random.Generator(np.random.PCG64(derive_seed_sequence(base_seed, *parts)))


def as_generator(rng):
    """Accept an int seed, a SeedSequence, a Generator, or None."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)
