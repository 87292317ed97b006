"""Pure-Python similarity kernel, the fallback for the compiled extension.

Operates on the flat packed layout produced by revlab.align: per side, a
concatenated token-id array with offsets, a concatenated (trigram-id, count)
array with offsets, and per-sentence trigram norms. Both kernels perform the
identical merge-order arithmetic so their outputs are bit-for-bit equal.
"""

from __future__ import annotations

import numpy as np


def similarity_matrix(
    tok_data_a, tok_off_a, tri_data_a, tri_cnt_a, tri_off_a, norm_a,
    tok_data_b, tok_off_b, tri_data_b, tri_cnt_b, tri_off_b, norm_b,
    token_weight: float,
):
    n = len(tok_off_a) - 1
    m = len(tok_off_b) - 1
    out = np.zeros((n, m), dtype=np.float64)
    w = float(token_weight)
    cw = 1.0 - w
    for i in range(n):
        ta0, ta1 = tok_off_a[i], tok_off_a[i + 1]
        ra0, ra1 = tri_off_a[i], tri_off_a[i + 1]
        na = norm_a[i]
        for j in range(m):
            tb0, tb1 = tok_off_b[j], tok_off_b[j + 1]
            # token Jaccard over sorted unique ids
            p, q, inter = ta0, tb0, 0
            while p < ta1 and q < tb1:
                x, y = tok_data_a[p], tok_data_b[q]
                if x == y:
                    inter += 1
                    p += 1
                    q += 1
                elif x < y:
                    p += 1
                else:
                    q += 1
            union = (ta1 - ta0) + (tb1 - tb0) - inter
            jac = inter / union if union > 0 else 0.0
            # trigram cosine over sorted (id, count) runs
            rb0, rb1 = tri_off_b[j], tri_off_b[j + 1]
            p, q = ra0, rb0
            dot = 0.0
            while p < ra1 and q < rb1:
                x, y = tri_data_a[p], tri_data_b[q]
                if x == y:
                    dot += float(tri_cnt_a[p]) * float(tri_cnt_b[q])
                    p += 1
                    q += 1
                elif x < y:
                    p += 1
                else:
                    q += 1
            nb = norm_b[j]
            cos = dot / (na * nb) if na > 0.0 and nb > 0.0 else 0.0
            out[i, j] = w * jac + cw * cos
    return out
