"""Numba kernels for bagged CART regression trees.

Trees are stored in flat per-tree arrays of fixed capacity ``2 * n - 1``
(the most nodes a binary tree over ``n`` bootstrap rows can have).
A node with ``feature == -1`` is a leaf.
"""

from __future__ import annotations

import numba as nb
import numpy as np


@nb.njit(cache=True, nogil=True)
def _build_tree(X, y, rows, min_leaf, max_features, feature, threshold, left, right, value):
    n = rows.shape[0]
    p = X.shape[1]
    order = rows.copy()
    # explicit stack of (node id, start, end) over ``order``
    stack_node = np.empty(n, dtype=np.int64)
    stack_start = np.empty(n, dtype=np.int64)
    stack_end = np.empty(n, dtype=np.int64)
    stack_node[0] = 0
    stack_start[0] = 0
    stack_end[0] = n
    top = 1
    n_nodes = 1
    features = np.arange(p)
    xs = np.empty(n)
    ys = np.empty(n)
    tmp = np.empty(n, dtype=np.int64)

    while top > 0:
        top -= 1
        node = stack_node[top]
        start = stack_start[top]
        end = stack_end[top]
        m = end - start

        total = 0.0
        ymin = y[order[start]]
        ymax = ymin
        for i in range(start, end):
            v = y[order[i]]
            total += v
            if v < ymin:
                ymin = v
            if v > ymax:
                ymax = v
        feature[node] = -1
        if ymin == ymax:
            value[node] = ymin
            continue
        value[node] = total / m
        if m < 2 * min_leaf:
            continue

        # Fisher-Yates draw of candidate features; constant features do not
        # count against the max_features budget.
        for i in range(p):
            features[i] = i
        best_gain = -np.inf
        best_feat = -1
        best_thr = 0.0
        visited = 0
        remaining = p
        while remaining > 0 and visited < max_features:
            j = np.random.randint(0, remaining)
            f = features[j]
            features[j] = features[remaining - 1]
            features[remaining - 1] = f
            remaining -= 1

            for i in range(m):
                xs[i] = X[order[start + i], f]
            perm = np.argsort(xs[:m], kind="mergesort")
            if xs[perm[m - 1]] == xs[perm[0]]:
                continue
            visited += 1
            for i in range(m):
                ys[i] = y[order[start + perm[i]]]
            s_left = 0.0
            for i in range(m - 1):
                s_left += ys[i]
                n_left = i + 1
                n_right = m - n_left
                if n_left < min_leaf or n_right < min_leaf:
                    continue
                x_lo = xs[perm[i]]
                x_hi = xs[perm[i + 1]]
                if x_lo == x_hi:
                    continue
                s_right = total - s_left
                # variance reduction up to terms constant within the node
                gain = s_left * s_left / n_left + s_right * s_right / n_right
                if gain > best_gain:
                    best_gain = gain
                    best_feat = f
                    thr = x_lo + (x_hi - x_lo) / 2.0
                    if thr >= x_hi or thr < x_lo:
                        thr = x_lo
                    best_thr = thr
        if best_feat < 0:
            continue

        # stable partition of order[start:end] on x <= threshold
        n_left = 0
        for i in range(start, end):
            r = order[i]
            if X[r, best_feat] <= best_thr:
                tmp[n_left] = r
                n_left += 1
        k = n_left
        for i in range(start, end):
            r = order[i]
            if X[r, best_feat] > best_thr:
                tmp[k] = r
                k += 1
        for i in range(m):
            order[start + i] = tmp[i]

        feature[node] = best_feat
        threshold[node] = best_thr
        lnode = n_nodes
        rnode = n_nodes + 1
        n_nodes += 2
        left[node] = lnode
        right[node] = rnode
        # push right first so the left subtree is expanded first
        stack_node[top] = rnode
        stack_start[top] = start + n_left
        stack_end[top] = end
        top += 1
        stack_node[top] = lnode
        stack_start[top] = start
        stack_end[top] = start + n_left
        top += 1
    return n_nodes


@nb.njit(cache=True, nogil=True)
def fit_trees(X, y, seeds, min_leaf, max_features, feature, threshold, left, right, value):
    """Fit one bootstrapped tree per entry of ``seeds`` into the given buffers.

    Returns the bootstrap row indices, shape ``(n_trees, n)``.
    """
    n = X.shape[0]
    n_trees = seeds.shape[0]
    boots = np.empty((n_trees, n), dtype=np.int64)
    for t in range(n_trees):
        np.random.seed(seeds[t])
        for i in range(n):
            boots[t, i] = np.random.randint(0, n)
        _build_tree(X, y, boots[t], min_leaf, max_features,
                    feature[t], threshold[t], left[t], right[t], value[t])
    return boots


@nb.njit(cache=True, nogil=True)
def predict_trees(Xq, feature, threshold, left, right, value):
    """Per-tree predictions, shape ``(n_trees, n_query)``."""
    n_trees = feature.shape[0]
    nq = Xq.shape[0]
    out = np.empty((n_trees, nq))
    for t in range(n_trees):
        for i in range(nq):
            node = 0
            while feature[t, node] >= 0:
                if Xq[i, feature[t, node]] <= threshold[t, node]:
                    node = left[t, node]
                else:
                    node = right[t, node]
            out[t, i] = value[t, node]
    return out
