"""Independent oracles used to check derived values.

Nothing here calls the code under test for the quantity being checked.
"""

from __future__ import annotations

from math import gcd


def componentwise_boundary_complexity(w):
    """Sum of 3g - 3 over the closed boundary components, one per end, with
    genus one more than the genus shifted past that end."""
    plus = sum(3 * (1 + abs(x)) - 3 for x in w if x > 0)
    minus = sum(3 * (1 + abs(x)) - 3 for x in w if x < 0)
    return plus, minus


def closed_pants_count(genus):
    return 2 * genus - 2


def farey_bfs(a, b, bound):
    """Plain BFS over slopes (p, q) with |p|, q <= bound, adjacency by a
    determinant check against every slope in the box."""
    nodes = [(p, q) for q in range(0, bound + 1) for p in range(-bound, bound + 1) if gcd(abs(p), q) == 1 and (q > 0 or p == 1)]
    if a not in nodes or b not in nodes:
        return None
    dist = {a: 0}
    frontier = [a]
    while frontier:
        nxt = []
        for x in frontier:
            if x == b:
                return dist[x]
            for y in nodes:
                if y not in dist and abs(x[0] * y[1] - x[1] * y[0]) == 1:
                    dist[y] = dist[x] + 1
                    nxt.append(y)
        frontier = nxt
    return dist.get(b)


def ladder_link_components(moved, period, lo, hi, margin=None):
    """Count flow components of (level, curve) states on a wide stretch of
    the ladder by union-find.

    A state continues to the next level unless its curve is the one moved
    there; the last level continues across the seam with positions shifted
    by the period.  Components are the link annuli.
    """
    n = len(moved)
    margin = margin if margin is not None else 6 * period + 6
    lo, hi = lo - margin, hi + margin
    ids = [f"{t}{x}" for x in range(lo, hi + 1) for t in "sam"]
    parent = {}

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    def union(u, v):
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv

    for level in range(n):
        for c in ids:
            parent[(level, c)] = (level, c)
    for level in range(n):
        for c in ids:
            if moved[level] == c:
                continue
            if level + 1 < n:
                union((level, c), (level + 1, c))
            else:
                t, x = c[0], int(c[1:])
                if x + period <= hi:
                    union((level, c), (0, f"{t}{x + period}"))
    roots = {find(u) for u in parent}
    # components living entirely at the far ends of the range are the same
    # escaping annuli cut off by the truncation; count only components that
    # meet the band where moves happen or that reach it by the flow
    positions = [int(c[1:]) for c in moved]
    band_lo, band_hi = min(positions) - period, max(positions) + period
    live = set()
    for (level, c) in parent:
        x = int(c[1:])
        if band_lo <= x <= band_hi:
            live.add(find((level, c)))
    return len(live & roots)


def voct_coefficient(n_t, n_s):
    return n_t + 2 * n_s
