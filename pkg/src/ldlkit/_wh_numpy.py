"""Pure-numpy token loop for incremental delta-rule training.

Same contract as the compiled kernel in _wh_kernel.pyx: rows of W touched
by a token are exactly the active cue columns of the token's entry, cue
values are assumed binary, and W is updated in place.
"""

from __future__ import annotations

import numpy as np


def run_stream(
    W: np.ndarray,
    indptr: np.ndarray,
    indices: np.ndarray,
    S: np.ndarray,
    stream: np.ndarray,
    eta: float,
    checkpoints: np.ndarray,
    snapshots: np.ndarray,
) -> None:
    ck = 0
    n_ck = checkpoints.shape[0]
    while ck < n_ck and checkpoints[ck] == 0:
        snapshots[ck] = W
        ck += 1
    for t, eid in enumerate(stream, start=1):
        idx = indices[indptr[eid] : indptr[eid + 1]]
        delta = eta * (S[eid] - W[idx].sum(axis=0))
        W[idx] += delta
        while ck < n_ck and checkpoints[ck] == t:
            snapshots[ck] = W
            ck += 1
