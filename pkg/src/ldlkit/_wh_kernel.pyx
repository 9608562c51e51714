# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled token loop for incremental delta-rule training.

Contract mirrors _wh_numpy.run_stream: binary cue rows given as CSR-style
(indptr, indices) arrays, W updated in place, snapshots written at the
requested token counts.
"""

import numpy as np


def run_stream(double[:, ::1] W,
               long long[::1] indptr,
               long long[::1] indices,
               double[:, ::1] S,
               long long[::1] stream,
               double eta,
               long long[::1] checkpoints,
               double[:, :, ::1] snapshots):
    cdef Py_ssize_t n_tokens = stream.shape[0]
    cdef Py_ssize_t n_ck = checkpoints.shape[0]
    cdef Py_ssize_t dim = W.shape[1]
    cdef Py_ssize_t t, j, r, row, ck = 0
    cdef long long eid
    cdef double[::1] delta = np.empty(dim, dtype=np.float64)

    while ck < n_ck and checkpoints[ck] == 0:
        snapshots[ck, :, :] = W
        ck += 1
    for t in range(n_tokens):
        eid = stream[t]
        for j in range(dim):
            delta[j] = S[eid, j]
        for r in range(indptr[eid], indptr[eid + 1]):
            row = indices[r]
            for j in range(dim):
                delta[j] -= W[row, j]
        for j in range(dim):
            delta[j] *= eta
        for r in range(indptr[eid], indptr[eid + 1]):
            row = indices[r]
            for j in range(dim):
                W[row, j] += delta[j]
        while ck < n_ck and checkpoints[ck] == t + 1:
            snapshots[ck, :, :] = W
            ck += 1
