"""Brute-force reference computations, independent of the package's algorithms."""

from __future__ import annotations

import itertools
import math


def min_cut_value(nodes, arcs, s, t):
    """Minimum s-t cut by enumerating every vertex bipartition. ``arcs``: {(u, v): cap}."""
    others = [n for n in nodes if n not in (s, t)]
    best = math.inf
    for r in range(len(others) + 1):
        for side in itertools.combinations(others, r):
            S = {s, *side}
            cut = sum(c for (u, v), c in arcs.items() if u in S and v not in S)
            best = min(best, cut)
    return best


def integral_flows(nodes, arcs, s, t):
    """Yield every integral flow assignment ({arc: f}, value) respecting capacity and conservation."""
    keys = list(arcs)
    for fs in itertools.product(*(range(int(arcs[k]) + 1) for k in keys)):
        bal = dict.fromkeys(nodes, 0)
        for (u, v), f in zip(keys, fs):
            bal[u] -= f
            bal[v] += f
        if all(bal[n] == 0 for n in nodes if n not in (s, t)):
            yield dict(zip(keys, fs)), -bal[s]


def max_flow_by_enumeration(nodes, arcs, s, t):
    return max(v for _, v in integral_flows(nodes, arcs, s, t))


def sequential_values(nodes, arcs, commodities):
    """Set of per-commodity value tuples over every choice of maximum integral flow at each step."""
    out = set()

    def rec(residual, i, acc):
        if i == len(commodities):
            out.add(tuple(acc))
            return
        src, dst, demand = commodities[i]
        # super source arc caps the commodity at its demand
        work = dict(residual)
        work[("S*", src)] = demand
        flows = list(integral_flows(list(nodes) + ["S*"], work, "S*", dst))
        best = max(v for _, v in flows)
        seen = set()
        for f, v in flows:
            if v != best:
                continue
            nxt = {k: residual[k] - f.get(k, 0) for k in residual}
            key = tuple(sorted(nxt.items()))
            if key in seen:
                continue
            seen.add(key)
            rec(nxt, i + 1, acc + [best])

    rec(dict(arcs), 0, [])
    return out


def simple_paths(adj, s, t):
    """All simple s-t paths in an adjacency dict."""
    stack = [(s, (s,))]
    while stack:
        u, path = stack.pop()
        if u == t:
            yield path
            continue
        for v in adj.get(u, ()):
            if v not in path:
                stack.append((v, path + (v,)))


def best_path(adj, weight, s, t):
    """Shortest simple path, ties to the lexicographically smallest node sequence."""
    best = None
    for p in simple_paths(adj, s, t):
        length = sum(weight[(u, v)] for u, v in zip(p, p[1:]))
        key = (round(length, 9), p)
        if best is None or key < best:
            best = key
    return None if best is None else best[1]
