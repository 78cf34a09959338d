"""Seeded random streams.

Every stream is a Philox counter-based generator keyed by the experiment seed
plus a tuple of non-negative integers. Splitting rule used across the package:

* ``(restart,)`` parameter initialisation for one optimizer restart,
* ``(restart, iteration, slot)`` one loss evaluation inside a step, where
  ``slot`` is ``0`` for the plain loss and ``1 + 2*k`` / ``2 + 2*k`` for the
  plus / minus shift of parameter component ``k`` (theta first, then phi),
* ``(STREAM_DIAG, which, i, part)`` Hadamard-test shots for diagonal entries.

The same keys always give the same stream, independently of call order.
"""
import numpy as np

STREAM_INIT = 0
STREAM_LOSS = 1
STREAM_DIAG = 2
STREAM_BENCH = 3


def generator(seed, *key) -> np.random.Generator:
    seq = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(seq))
