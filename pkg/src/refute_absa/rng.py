"""Deterministic random substreams backed by the Philox counter-based generator.

Every source of randomness in the refutation suite is keyed by
``(master_seed, *labels)`` where the labels identify the spec, the test, and
the iteration. Streams derived this way are independent of execution order
and of how work is split across processes, which is what makes grid runs
byte-reproducible at any worker count.
"""

from __future__ import annotations

import hashlib

import numpy as np

_KEY_BYTES = 16  # Philox4x64 key: two 64-bit words


def stream_key(master_seed: int, *labels) -> np.ndarray:
    """Derive a 128-bit Philox key from the master seed and a label tuple."""
    text = "\x1f".join([str(int(master_seed))] + [str(lab) for lab in labels])
    digest = hashlib.blake2b(text.encode("utf-8"), digest_size=_KEY_BYTES).digest()
    return np.frombuffer(digest, dtype=np.uint64)


def substream(master_seed: int, *labels) -> np.random.Generator:
    """Generator for the substream named by ``labels`` under ``master_seed``.

    The same arguments always produce an identical stream, on any platform
    and regardless of what other streams have been consumed.
    """
    return np.random.Generator(np.random.Philox(key=stream_key(master_seed, *labels)))


def iteration_stream(key: np.ndarray, iteration: int) -> np.random.Generator:
    """Generator for one iteration within a keyed stream.

    The iteration index is placed in the upper words of the Philox counter,
    giving each iteration a disjoint block of 2**128 draws so iterations can
    be evaluated in any order (or in parallel) without interacting.
    """
    counter = np.array([0, 0, iteration, 0], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))
