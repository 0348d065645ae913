"""Pure-Python kernels, used when the compiled extension is unavailable.

Both kernels perform the same floating-point operations in the same order
as their Cython counterparts in ``_kernels.pyx``, so either backend returns
identical results.
"""

import numpy as np

BACKEND = "python"


def louvain_local_move(indptr, indices, weights, k, order, resolution, m2, max_passes):
    """Greedy modularity local moving from the all-singletons partition.

    Returns ``(labels, moved)`` where ``labels[i]`` is the id of the vertex
    that seeded ``i``'s community and ``moved`` counts vertex moves.
    """
    n = len(k)
    indptr = indptr.tolist()
    indices = indices.tolist()
    weights = weights.tolist()
    k = k.tolist()
    order = order.tolist()
    comm = list(range(n))
    tot = list(k)
    neigh_w = [0.0] * n
    seen = [False] * n
    moved = 0
    for _ in range(max_passes):
        pass_moves = 0
        for i in order:
            ci = comm[i]
            ki = k[i]
            touched = []
            for p in range(indptr[i], indptr[i + 1]):
                j = indices[p]
                if j == i:
                    continue
                c = comm[j]
                if not seen[c]:
                    seen[c] = True
                    neigh_w[c] = 0.0
                    touched.append(c)
                neigh_w[c] += weights[p]
            tot[ci] -= ki
            own_w = neigh_w[ci] if seen[ci] else 0.0
            best = ci
            best_gain = own_w - resolution * tot[ci] * ki / m2
            for c in touched:
                gain = neigh_w[c] - resolution * tot[c] * ki / m2
                if gain > best_gain:
                    best_gain = gain
                    best = c
            tot[best] += ki
            for c in touched:
                seen[c] = False
            if best != ci:
                comm[i] = best
                pass_moves += 1
        moved += pass_moves
        if pass_moves == 0:
            break
    return np.asarray(comm, dtype=np.int64), moved


def _less(a0, a1, b0, b1):
    return a0 < b0 or (a0 == b0 and a1 < b1)


def lap_max_lex(w, card):
    """Maximum assignment on a square matrix under the lexicographic
    objective ``(sum w, sum card)``.

    Shortest-augmenting-path Hungarian method with lexicographic pair
    arithmetic.  Returns ``(row_to_col, u, v)`` where ``u`` and ``v`` are
    ``(n, 2)`` dual potentials of the equivalent minimisation problem with
    cost ``-(w, card)``: every reduced cost ``cost - u[i] - v[j]`` is
    lexicographically non-negative and zero on the assignment.
    """
    n = w.shape[0]
    if n == 0:
        return np.zeros(0, dtype=np.int64), np.zeros((0, 2)), np.zeros((0, 2))
    c0 = (-w).tolist()
    c1 = (-card).tolist()
    inf = float("inf")
    u0 = [0.0] * (n + 1)
    u1 = [0.0] * (n + 1)
    v0 = [0.0] * (n + 1)
    v1 = [0.0] * (n + 1)
    p = [0] * (n + 1)
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        min0 = [inf] * (n + 1)
        min1 = [inf] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            d0 = inf
            d1 = inf
            j1 = 0
            row0 = c0[i0 - 1]
            row1 = c1[i0 - 1]
            for j in range(1, n + 1):
                if not used[j]:
                    r0 = row0[j - 1] - u0[i0] - v0[j]
                    r1 = row1[j - 1] - u1[i0] - v1[j]
                    if _less(r0, r1, min0[j], min1[j]):
                        min0[j] = r0
                        min1[j] = r1
                        way[j] = j0
                    if _less(min0[j], min1[j], d0, d1):
                        d0 = min0[j]
                        d1 = min1[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u0[p[j]] += d0
                    u1[p[j]] += d1
                    v0[j] -= d0
                    v1[j] -= d1
                else:
                    min0[j] -= d0
                    min1[j] -= d1
            j0 = j1
            if p[j0] == 0:
                break
        while True:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
            if j0 == 0:
                break
    row_to_col = np.empty(n, dtype=np.int64)
    for j in range(1, n + 1):
        row_to_col[p[j] - 1] = j - 1
    u = np.column_stack([u0[1:], u1[1:]])
    v = np.column_stack([v0[1:], v1[1:]])
    return row_to_col, u, v
