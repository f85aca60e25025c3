"""Seed derivation: all randomness flows from one top-level seed.

Task streams are derived as sha256(master ":" label), so runs are
reproducible and independent tasks never share a stream.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(master: int, label: str) -> int:
    digest = hashlib.sha256(f"{master}:{label}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def stream(master: int, label: str = "") -> np.random.Generator:
    seed = derive_seed(master, label) if label else int(master)
    return np.random.Generator(np.random.PCG64(seed))
