# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled similarity kernel; mirrors _pysim.similarity_matrix exactly."""

import numpy as np


def similarity_matrix(
    int[::1] tok_data_a, long long[::1] tok_off_a,
    int[::1] tri_data_a, int[::1] tri_cnt_a, long long[::1] tri_off_a,
    double[::1] norm_a,
    int[::1] tok_data_b, long long[::1] tok_off_b,
    int[::1] tri_data_b, int[::1] tri_cnt_b, long long[::1] tri_off_b,
    double[::1] norm_b,
    double token_weight,
):
    cdef Py_ssize_t n = tok_off_a.shape[0] - 1
    cdef Py_ssize_t m = tok_off_b.shape[0] - 1
    out_arr = np.zeros((n, m), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double w = token_weight
    cdef double cw = 1.0 - w
    cdef Py_ssize_t i, j
    cdef long long ta0, ta1, tb0, tb1, ra0, ra1, rb0, rb1, p, q
    cdef long long inter, union_
    cdef int x, y
    cdef double na, nb, jac, dot, cos

    for i in range(n):
        ta0 = tok_off_a[i]; ta1 = tok_off_a[i + 1]
        ra0 = tri_off_a[i]; ra1 = tri_off_a[i + 1]
        na = norm_a[i]
        for j in range(m):
            tb0 = tok_off_b[j]; tb1 = tok_off_b[j + 1]
            p = ta0; q = tb0; inter = 0
            while p < ta1 and q < tb1:
                x = tok_data_a[p]; y = tok_data_b[q]
                if x == y:
                    inter += 1; p += 1; q += 1
                elif x < y:
                    p += 1
                else:
                    q += 1
            union_ = (ta1 - ta0) + (tb1 - tb0) - inter
            jac = (<double>inter) / (<double>union_) if union_ > 0 else 0.0
            rb0 = tri_off_b[j]; rb1 = tri_off_b[j + 1]
            p = ra0; q = rb0; dot = 0.0
            while p < ra1 and q < rb1:
                x = tri_data_a[p]; y = tri_data_b[q]
                if x == y:
                    dot += (<double>tri_cnt_a[p]) * (<double>tri_cnt_b[q])
                    p += 1; q += 1
                elif x < y:
                    p += 1
                else:
                    q += 1
            nb = norm_b[j]
            cos = dot / (na * nb) if (na > 0.0 and nb > 0.0) else 0.0
            out[i, j] = w * jac + cw * cos
    return out_arr
