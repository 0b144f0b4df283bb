"""Pure-Python derivability kernels.

Atoms are small ints, resources are sorted int tuples (multiset discipline)
or frozensets (set discipline).  Rules are given as

    by_goal[q]  -> list of rule indices concluding q
    prem[i]     -> tuple of (sorted assumption tuple, premise goal)

Both searches return ``(status, tree, nodes)`` where status is FOUND,
NOT_FOUND or EXHAUSTED.  Trees are ``REF`` for a Ref leaf, or
``(rule_index, splits, children)`` (multiset) / ``(rule_index, children)``
(set).  The compiled kernel in ``_ckernel.pyx`` implements the same
functions with the same results.
"""

import sys

FOUND = 0
NOT_FOUND = 1
EXHAUSTED = 2
REF = -1

INF = 1 << 30

BACKEND = "python"


class _Abort(Exception):
    pass


def compositions(n, k):
    if k == 1:
        return [(n,)]
    out = []
    for first in range(n + 1):
        for rest in compositions(n - first, k - 1):
            out.append((first,) + rest)
    return out


def splits(res, k):
    """All ordered k-splits of a sorted tuple, multiplicity aware."""
    if k == 1:
        return [(res,)]
    runs = []
    i = 0
    n = len(res)
    while i < n:
        j = i
        while j < n and res[j] == res[i]:
            j += 1
        runs.append((res[i], j - i))
        i = j
    partial = [tuple(() for _ in range(k))]
    for atom, count in runs:
        nxt = []
        comps = compositions(count, k)
        for parts in partial:
            for comp in comps:
                nxt.append(tuple(parts[t] + (atom,) * comp[t] for t in range(k)))
        partial = nxt
    return partial


def balanced(res, goal, weights):
    """Necessary condition for derivability from a conserved linear weight."""
    if weights is None:
        return True
    for w in weights:
        total = 0
        for a in res:
            total += w[a]
        if total != w[goal]:
            return False
    return True


def modelled(res, goal, models):
    """Necessary condition for derivability from respecting valuations."""
    if not models:
        return True
    for vals, mul, leq, acc in models:
        for a in res:
            acc = mul[acc][vals[a]]
        if not leq[acc][vals[goal]]:
            return False
    return True


def search_multiset(by_goal, prem, res, goal, max_height, max_nodes, weights=None, models=None):
    success = {}
    dead = set()
    shallow = {}
    counter = [0]
    limit = sys.getrecursionlimit()
    if limit < 4 * max_height + 200:
        sys.setrecursionlimit(4 * max_height + 200)

    def dfs(g, r, h, path):
        key = (g, r)
        t = success.get(key)
        if t is not None:
            return t, INF, False
        if key in dead:
            return None, INF, False
        idx = path.get(key)
        if idx is not None:
            return None, idx, False
        if len(r) == 1 and r[0] == g:
            success[key] = REF
            return REF, INF, False
        if not balanced(r, g, weights) or not modelled(r, g, models):
            dead.add(key)
            return None, INF, False
        if h <= 1:
            if not r:
                for ri in by_goal.get(g, ()):
                    if not prem[ri]:
                        t = (ri, (), ())
                        success[key] = t
                        return t, INF, False
            return None, INF, any(prem[ri] for ri in by_goal.get(g, ()))
        if shallow.get(key, 0) >= h:
            return None, INF, True
        counter[0] += 1
        if counter[0] > max_nodes:
            raise _Abort
        me = len(path)
        path[key] = me
        low = INF
        cut = False
        for ri in by_goal.get(g, ()):
            premises = prem[ri]
            n = len(premises)
            if n == 0:
                if not r:
                    del path[key]
                    t = (ri, (), ())
                    success[key] = t
                    return t, INF, False
                continue
            for sp in splits(r, n):
                kids = []
                for i in range(n):
                    assume, q = premises[i]
                    sub = tuple(sorted(sp[i] + assume)) if assume else sp[i]
                    t, lo, c = dfs(q, sub, h - 1, path)
                    if lo < low:
                        low = lo
                    if c:
                        cut = True
                    if t is None:
                        break
                    kids.append(t)
                else:
                    del path[key]
                    t = (ri, sp, tuple(kids))
                    success[key] = t
                    return t, INF, False
        del path[key]
        if low >= me:
            low = INF
            if cut:
                if shallow.get(key, 0) < h:
                    shallow[key] = h
            else:
                dead.add(key)
        return None, low, cut

    try:
        for height in range(1, max_height + 1):
            t, _, cut = dfs(goal, res, height, {})
            if t is not None:
                return FOUND, t, counter[0]
            if not cut:
                return NOT_FOUND, None, counter[0]
    except _Abort:
        return EXHAUSTED, None, counter[0]
    return EXHAUSTED, None, counter[0]


def search_set(by_goal, prem, res, goal, max_nodes, models=None):
    """Set-discipline search; loops are cut by subsumption so it terminates."""
    success = {}
    dead = {}
    counter = [0]
    path = []
    limit = sys.getrecursionlimit()

    def known(g, r):
        for s, t in success.get(g, ()):
            if s <= r:
                return t
        return None

    def is_dead(g, r):
        for s in dead.get(g, ()):
            if r <= s:
                return True
        return False

    def dfs(g, r):
        if g in r:
            return REF, INF
        t = known(g, r)
        if t is not None:
            return t, INF
        if is_dead(g, r):
            return None, INF
        if not modelled(r, g, models):
            dead.setdefault(g, []).append(r)
            return None, INF
        low = INF
        for i in range(len(path) - 1, -1, -1):
            pg, pr = path[i]
            if pg == g and r <= pr:
                return None, i
        counter[0] += 1
        if counter[0] > max_nodes:
            raise _Abort
        me = len(path)
        path.append((g, r))
        if len(path) + 100 > limit:
            sys.setrecursionlimit(len(path) * 2 + 200)
        found = None
        for ri in by_goal.get(g, ()):
            kids = []
            for assume, q in prem[ri]:
                sub = r.union(assume) if assume else r
                t, lo = dfs(q, sub)
                if lo < low:
                    low = lo
                if t is None:
                    break
                kids.append(t)
            else:
                found = (ri, tuple(kids))
                break
        path.pop()
        if found is not None:
            success.setdefault(g, []).append((r, found))
            return found, INF
        if low >= me:
            dead.setdefault(g, []).append(r)
            low = INF
        return None, low

    try:
        t, _ = dfs(goal, frozenset(res))
    except _Abort:
        return EXHAUSTED, None, counter[0]
    if t is None:
        return NOT_FOUND, None, counter[0]
    return FOUND, t, counter[0]
