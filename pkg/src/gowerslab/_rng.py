"""Counter-based random streams.

Every Monte-Carlo consumer draws in fixed-size blocks; block ``b`` of stream
``seed`` is generated by a Philox generator keyed on ``(seed, b)``. Draws are
therefore a pure function of (seed, draw index) and do not depend on how
blocks are distributed over worker threads.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

BLOCK = 4096


def block_rng(seed: int, block: int, stream: int = 0) -> np.random.Generator:
    key = (int(seed) & (2**64 - 1)) | ((int(stream) & 0xFFFF) << 64) | (int(block) << 80)
    return np.random.Generator(np.random.Philox(key=key & (2**128 - 1)))


def blocks(n: int, block: int = BLOCK):
    """Yield ``(block_index, size)`` covering ``n`` draws."""
    for b, start in enumerate(range(0, n, block)):
        yield b, min(block, n - start)


def map_ordered(fn, items, threads: int = 1):
    """``list(map(fn, items))``, optionally on a thread pool; order is preserved."""
    items = list(items)
    if threads is None or threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def pairwise_sum(values) -> float | complex:
    """Sum in a fixed binary-tree order so the result is independent of batching."""
    vals = list(values)
    if not vals:
        return 0.0
    while len(vals) > 1:
        nxt = [vals[i] + vals[i + 1] for i in range(0, len(vals) - 1, 2)]
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0]
