"""Maximum-weight bipartite matching over weighted community bipartite graphs.

Ties are broken deterministically.  Among matchings whose total weight is
within ``TOL`` (relative) of the optimum, the one with most pairs wins, and
among those the lexicographically smallest sorted ``(left, right)`` pair
list.  :func:`brute_force_matching` applies the same rule by exhaustive
enumeration and serves as a test oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .errors import InstanceTooLarge, MLNError, UnweightedCBG

TOL = 1e-9
BRUTE_FORCE_LIMIT = 8


@dataclass(frozen=True)
class Matching:
    pairs: tuple
    total_weight: float
    per_pair_weight: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.pairs)

    def swapped(self) -> "Matching":
        pairs = tuple(sorted((r, l) for l, r in self.pairs))
        return Matching(pairs, self.total_weight, {(r, l): w for (l, r), w in self.per_pair_weight.items()})


@dataclass(frozen=True, eq=False)
class WeightedBipartite:
    """Bare weighted bipartite graph with the fields the matchers read."""

    left_nodes: np.ndarray
    right_nodes: np.ndarray
    edge_left: np.ndarray
    edge_right: np.ndarray
    weights: np.ndarray

    @classmethod
    def from_matrix(cls, weights, mask=None):
        """Sides ``0..rows-1`` and ``0..cols-1``; ``mask`` marks existing
        edges (default: every cell that is not NaN)."""
        weights = np.asarray(weights, dtype=np.float64)
        if weights.ndim != 2:
            weights = weights.reshape(len(weights), -1)
        if mask is None:
            mask = ~np.isnan(weights)
        li, ri = np.nonzero(mask)
        return cls(
            np.arange(weights.shape[0]),
            np.arange(weights.shape[1]),
            li.astype(np.int64),
            ri.astype(np.int64),
            weights[li, ri],
        )

    def swapped(self):
        order = np.lexsort((self.edge_left, self.edge_right))
        return WeightedBipartite(
            self.right_nodes, self.left_nodes, self.edge_right[order], self.edge_left[order], self.weights[order]
        )


def _tolerance(best):
    return TOL * max(1.0, abs(best))


def _dense(cbg):
    if cbg.weights is None:
        raise UnweightedCBG("apply a weight metric before matching")
    w = np.asarray(cbg.weights, dtype=np.float64)
    if np.isnan(w).any() or (w < 0).any():
        raise MLNError("meta edge weights must be non-negative numbers")
    left = np.asarray(cbg.left_nodes)
    right = np.asarray(cbg.right_nodes)
    li = np.searchsorted(left, cbg.edge_left)
    ri = np.searchsorted(right, cbg.edge_right)
    weight = np.zeros((len(left), len(right)))
    mask = np.zeros((len(left), len(right)), dtype=bool)
    weight[li, ri] = w
    mask[li, ri] = True
    return left, right, weight, mask


def _assign(weight, mask, rows, cols, kernels):
    """Best (weight, cardinality) matching of a row/column sub-problem.

    Returns ``(total, count, {row: col}, u, v)`` in the caller's indices.
    """
    nr, nc = len(rows), len(cols)
    size = max(nr, nc)
    w = np.zeros((size, size))
    card = np.zeros((size, size))
    if nr and nc:
        sub_mask = mask[np.ix_(rows, cols)]
        w[:nr, :nc] = np.where(sub_mask, weight[np.ix_(rows, cols)], 0.0)
        card[:nr, :nc] = sub_mask
    row_to_col, u, v = kernels.lap_max_lex(w, card)
    chosen = {}
    total = 0.0
    for i in range(nr):
        j = int(row_to_col[i])
        if j < nc and mask[rows[i], cols[j]]:
            chosen[int(rows[i])] = int(cols[j])
            total += weight[rows[i], cols[j]]
    return total, len(chosen), chosen, u, v


def _result(left, right, weight, chosen):
    pairs = tuple(sorted((int(left[i]), int(right[j])) for i, j in chosen.items()))
    per_pair = {}
    total = 0.0
    for i, j in sorted(chosen.items()):
        w = float(weight[i, j])
        per_pair[(int(left[i]), int(right[j]))] = w
        total += w
    return Matching(pairs, total, per_pair)


def max_weight_matching(cbg, kernels=None) -> Matching:
    """Maximum-weight matching of a weighted community bipartite graph.

    One Hungarian solve under the lexicographic objective (weight, pair
    count) yields the optimum and its dual potentials.  Only meta edges that
    are tight under those duals can appear in any optimal matching, so the
    lexicographic tie-break re-solves restricted sub-problems only for tight
    alternatives.
    """
    kernels = kernels or _backend.kernels
    left, right, weight, mask = _dense(cbg)
    nl, nr = weight.shape
    if nl == 0 or nr == 0 or not mask.any():
        return Matching((), 0.0, {})
    rows_all = np.arange(nl)
    cols_all = np.arange(nr)
    best_w, best_k, current, u, v = _assign(weight, mask, rows_all, cols_all, kernels)
    tol = _tolerance(best_w)
    reduced = -weight - u[:nl, 0][:, None] - v[:nr, 0][None, :]
    tight = mask & (reduced <= 10 * tol)

    used = np.zeros(nr, dtype=bool)
    fixed = {}
    fixed_w = 0.0
    fixed_k = 0
    for row in range(nl):
        incumbent = current.get(row)
        chosen = incumbent
        for col in np.flatnonzero(tight[row] & ~used):
            if incumbent is not None and col >= incumbent:
                break
            used[col] = True
            rest = np.arange(row + 1, nl)
            sub_w, sub_k, sub, _, _ = _assign(weight, mask, rest, np.flatnonzero(~used), kernels)
            used[col] = False
            total_w = fixed_w + weight[row, col] + sub_w
            total_k = fixed_k + 1 + sub_k
            if total_w >= best_w - tol and total_k >= best_k:
                chosen = int(col)
                current = dict(fixed)
                current[row] = chosen
                current.update(sub)
                best_k = max(best_k, total_k)
                break
        if chosen is not None:
            fixed[row] = chosen
            used[chosen] = True
            fixed_w += weight[row, chosen]
            fixed_k += 1
    return _result(left, right, weight, fixed)


def brute_force_matching(cbg) -> Matching:
    """Exhaustive matching oracle with the same tie-break rule."""
    left, right, weight, mask = _dense(cbg)
    nl, nr = weight.shape
    if min(nl, nr) > BRUTE_FORCE_LIMIT:
        raise InstanceTooLarge(
            f"brute force needs a side with at most {BRUTE_FORCE_LIMIT} meta nodes, got {nl} x {nr}"
        )
    if nl == 0 or nr == 0 or not mask.any():
        return Matching((), 0.0, {})
    flip = nl > nr
    if flip:
        weight, mask = weight.T, mask.T
    nodes = weight.shape[0]
    adj = [list(np.flatnonzero(mask[i])) for i in range(nodes)]

    def enumerate_all(visit):
        taken = set()
        chosen = []

        def rec(i, total):
            if i == nodes:
                visit(total, chosen)
                return
            rec(i + 1, total)
            for j in adj[i]:
                if j not in taken:
                    taken.add(j)
                    chosen.append((i, j))
                    rec(i + 1, total + weight[i, j])
                    chosen.pop()
                    taken.discard(j)

        rec(0, 0.0)

    best = [-1.0]

    def top(total, chosen):
        if total > best[0]:
            best[0] = total

    enumerate_all(top)
    floor = best[0] - _tolerance(best[0])
    winner = [None, -1]

    def pick(total, chosen):
        if total < floor:
            return
        pairs = sorted((j, i) if flip else (i, j) for i, j in chosen)
        k = len(pairs)
        if k > winner[1] or (k == winner[1] and pairs < winner[0]):
            winner[0] = pairs
            winner[1] = k

    enumerate_all(pick)
    if flip:
        weight = weight.T
    return _result(left, right, weight, dict(winner[0]))
