"""
Deterministic random streams.

Every random operation in the package takes an explicit ``numpy.random.Generator``
backed by PCG64, so a 64-bit seed reproduces its output on every platform.
"""

import hashlib
from typing import Optional

import numpy as np

RngState = np.random.Generator

SEED_MASK = (1 << 64) - 1


def make_rng(seed: int) -> RngState:
    """
    Create a generator from an explicit 64-bit seed.
    
    Args:
        seed: Non-negative integer, reduced modulo 2**64
        
    Returns:
        A PCG64-backed generator
    """
    return np.random.Generator(np.random.PCG64(int(seed) & SEED_MASK))


def derive_seed(master_seed: int, *parts: object) -> int:
    """
    Derive a child seed by hashing the master seed with a tuple of tags.
    
    The derivation does not depend on call order, so replicates can be
    scheduled on any worker.
    
    Args:
        master_seed: Experiment master seed
        *parts: Tags such as model name, tree size, replicate index
        
    Returns:
        64-bit integer seed
    """
    key = "|".join(str(p) for p in (int(master_seed) & SEED_MASK,) + parts)
    digest = hashlib.blake2b(key.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def derive_rng(master_seed: int, *parts: object) -> RngState:
    """Shortcut for ``make_rng(derive_seed(master_seed, *parts))``."""
    return make_rng(derive_seed(master_seed, *parts))


def ensure_rng(rng: Optional[RngState] = None, seed: int = 0) -> RngState:
    """Return ``rng`` if given, else a generator seeded with ``seed``."""
    if rng is None:
        return make_rng(seed)
    return rng
