"""Compiled inner loops (numba). Callers validate inputs; nothing here raises."""

import math

import numpy as np
from numba import njit


@njit(cache=True)
def _orient(ax, ay, bx, by, cx, cy, eps):
    d = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    if abs(d) <= eps:
        return 0
    return 1 if d > 0 else -1


@njit(cache=True)
def _on_segment(ax, ay, bx, by, px, py):
    return (min(ax, bx) <= px <= max(ax, bx)) and (min(ay, by) <= py <= max(ay, by))


@njit(cache=True)
def segments_cross(p, q, r, s, eps):
    o1 = _orient(r[0], r[1], s[0], s[1], p[0], p[1], eps)
    o2 = _orient(r[0], r[1], s[0], s[1], q[0], q[1], eps)
    o3 = _orient(p[0], p[1], q[0], q[1], r[0], r[1], eps)
    o4 = _orient(p[0], p[1], q[0], q[1], s[0], s[1], eps)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    if o1 == 0 and _on_segment(r[0], r[1], s[0], s[1], p[0], p[1]):
        return True
    if o2 == 0 and _on_segment(r[0], r[1], s[0], s[1], q[0], q[1]):
        return True
    if o3 == 0 and _on_segment(p[0], p[1], q[0], q[1], r[0], r[1]):
        return True
    if o4 == 0 and _on_segment(p[0], p[1], q[0], q[1], s[0], s[1]):
        return True
    return False


@njit(cache=True)
def first_self_intersection(v, eps):
    """Return (i, j) of the first crossing pair of non-adjacent edges, or (-1, -1)."""
    n = v.shape[0]
    lo = np.empty((n, 2))
    hi = np.empty((n, 2))
    for i in range(n):
        j = (i + 1) % n
        lo[i, 0] = min(v[i, 0], v[j, 0])
        lo[i, 1] = min(v[i, 1], v[j, 1])
        hi[i, 0] = max(v[i, 0], v[j, 0])
        hi[i, 1] = max(v[i, 1], v[j, 1])
    for i in range(n):
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            if lo[i, 0] > hi[j, 0] or lo[j, 0] > hi[i, 0]:
                continue
            if lo[i, 1] > hi[j, 1] or lo[j, 1] > hi[i, 1]:
                continue
            if segments_cross(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n], eps):
                return i, j
    return -1, -1


@njit(cache=True)
def _foot(px, py, ax, ay, bx, by):
    dx = bx - ax
    dy = by - ay
    ll = dx * dx + dy * dy
    t = ((px - ax) * dx + (py - ay) * dy) / ll
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    fx = ax + t * dx
    fy = ay + t * dy
    return math.hypot(px - fx, py - fy), t, fx, fy


@njit(cache=True)
def nearest_distances(points, a, b):
    """Unsigned distance from each point to a set of segments a[k] -> b[k]."""
    out = np.empty(points.shape[0])
    for i in range(points.shape[0]):
        best = np.inf
        for k in range(a.shape[0]):
            d, _, _, _ = _foot(points[i, 0], points[i, 1], a[k, 0], a[k, 1], b[k, 0], b[k, 1])
            if d < best:
                best = d
        out[i] = best
    return out


@njit(cache=True)
def _nearest(px, py, a, dx, dy, inv):
    best = np.inf
    kb = 0
    for k in range(a.shape[0]):
        t = ((px - a[k, 0]) * dx[k] + (py - a[k, 1]) * dy[k]) * inv[k]
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
        ex = a[k, 0] + t * dx[k] - px
        ey = a[k, 1] + t * dy[k] - py
        d2 = ex * ex + ey * ey
        if d2 < best:
            best = d2
            kb = k
    return math.sqrt(best), kb


@njit(cache=True)
def normal_cuts(a, b, t_hi, tol, eta):
    """Smallest cut distance along the edge-midpoint normal rays of a polyline set.

    For every segment midpoint m with unit normal n (both sides), the cut
    distance is the largest t such that m is still a nearest point of
    m + t n, i.e. ``dist(m + t n) >= t - eta``. The set of such t is an
    interval, so it is found by bisection to width ``tol``; rays whose cut
    exceeds the current minimum are rejected with a single evaluation.

    Returns (cut, segment index, side) with index -1 when no ray is cut
    before ``t_hi``.
    """
    m = a.shape[0]
    dx = np.empty(m)
    dy = np.empty(m)
    inv = np.empty(m)
    for k in range(m):
        dx[k] = b[k, 0] - a[k, 0]
        dy[k] = b[k, 1] - a[k, 1]
        inv[k] = 1.0 / (dx[k] * dx[k] + dy[k] * dy[k])
    best = t_hi
    best_k = -1
    best_side = 0
    for side in (1.0, -1.0):
        for k in range(m):
            ln = math.sqrt(1.0 / inv[k])
            nx = side * dy[k] / ln
            ny = -side * dx[k] / ln
            mx = a[k, 0] + 0.5 * dx[k]
            my = a[k, 1] + 0.5 * dy[k]
            d, _ = _nearest(mx + best * nx, my + best * ny, a, dx, dy, inv)
            if d >= best - eta:
                continue
            lo = 0.0
            hi = best
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                d, _ = _nearest(mx + mid * nx, my + mid * ny, a, dx, dy, inv)
                if d >= mid - eta:
                    lo = mid
                else:
                    hi = mid
            best = 0.5 * (lo + hi)
            best_k = k
            best_side = int(side)
    return best, best_k, best_side


@njit(cache=True)
def dinic(n, s, t, start, to, res, rev, eps):
    """Dinic max-flow on a CSR residual graph; ``res`` is updated in place.

    Returns the flow value and the BFS levels of the final residual graph
    (level >= 0 marks the source side of a minimum cut).
    """
    level = np.empty(n, np.int64)
    it = np.empty(n, np.int64)
    queue = np.empty(n, np.int64)
    path = np.empty(n, np.int64)
    flow = 0.0
    while True:
        level[:] = -1
        level[s] = 0
        qh = 0
        qt = 1
        queue[0] = s
        while qh < qt:
            u = queue[qh]
            qh += 1
            for k in range(start[u], start[u + 1]):
                v = to[k]
                if res[k] > eps and level[v] < 0:
                    level[v] = level[u] + 1
                    queue[qt] = v
                    qt += 1
        if level[t] < 0:
            break
        for u in range(n):
            it[u] = start[u]
        while True:
            depth = 0
            u = s
            found = False
            while True:
                if u == t:
                    found = True
                    break
                advanced = False
                while it[u] < start[u + 1]:
                    k = it[u]
                    v = to[k]
                    if res[k] > eps and level[v] == level[u] + 1:
                        path[depth] = k
                        depth += 1
                        u = v
                        advanced = True
                        break
                    it[u] += 1
                if not advanced:
                    if u == s:
                        break
                    level[u] = -2
                    depth -= 1
                    u = to[rev[path[depth]]]
                    it[u] += 1
            if not found:
                break
            push = np.inf
            for d in range(depth):
                if res[path[d]] < push:
                    push = res[path[d]]
            for d in range(depth):
                k = path[d]
                res[k] -= push
                res[rev[k]] += push
            flow += push
    return flow, level
