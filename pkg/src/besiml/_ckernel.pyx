# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled derivability kernels; same interface and results as _pykernel."""

import sys

FOUND = 0
NOT_FOUND = 1
EXHAUSTED = 2
REF = -1

cdef long INF = 1 << 30

BACKEND = "cython"


class _Abort(Exception):
    pass


cdef list _compositions(int n, int k):
    cdef list out, rest
    cdef int first
    if k == 1:
        return [(n,)]
    out = []
    for first in range(n + 1):
        for rest_t in _compositions(n - first, k - 1):
            out.append((first,) + rest_t)
    return out


def compositions(n, k):
    return _compositions(n, k)


cdef list _splits(tuple res, int k):
    cdef Py_ssize_t i = 0, j, n = len(res)
    cdef int t
    cdef list runs = [], partial, nxt, comps
    if k == 1:
        return [(res,)]
    while i < n:
        j = i
        while j < n and res[j] == res[i]:
            j += 1
        runs.append((res[i], j - i))
        i = j
    partial = [tuple([() for _ in range(k)])]
    for atom, count in runs:
        nxt = []
        comps = _compositions(count, k)
        for parts in partial:
            for comp in comps:
                nxt.append(tuple([parts[t] + (atom,) * comp[t] for t in range(k)]))
        partial = nxt
    return partial


def splits(res, k):
    return _splits(tuple(res), k)


cdef bint _balanced(tuple res, int goal, object weights):
    cdef long total
    if weights is None:
        return True
    for w in weights:
        total = 0
        for a in res:
            total += <long>w[a]
        if total != <long>w[goal]:
            return False
    return True


cdef bint _modelled(tuple res, int goal, object models):
    cdef int acc
    if not models:
        return True
    for vals, mul, leq, unit in models:
        acc = unit
        for a in res:
            acc = mul[acc][vals[a]]
        if not leq[acc][vals[goal]]:
            return False
    return True


def modelled(res, goal, models):
    return _modelled(tuple(res), goal, models)


def balanced(res, goal, weights):
    return _balanced(tuple(res), goal, weights)


cdef class _Multi:
    cdef dict by_goal
    cdef list prem
    cdef object weights
    cdef object models
    cdef dict success
    cdef set dead
    cdef dict shallow
    cdef long counter
    cdef long max_nodes

    def __init__(self, by_goal, prem, weights, max_nodes, models=None):
        self.by_goal = dict(by_goal)
        self.prem = list(prem)
        self.weights = weights
        self.models = models
        self.success = {}
        self.dead = set()
        self.shallow = {}
        self.counter = 0
        self.max_nodes = max_nodes

    cdef tuple dfs(self, int g, tuple r, int h, dict path):
        cdef tuple key = (g, r)
        cdef object t, idx
        cdef long low, lo, me
        cdef bint cut, c
        cdef tuple premises, sp, assume, sub
        cdef int n, i, q
        cdef list kids
        cdef tuple res
        t = self.success.get(key)
        if t is not None:
            return (t, INF, False)
        if key in self.dead:
            return (None, INF, False)
        idx = path.get(key)
        if idx is not None:
            return (None, <long>idx, False)
        if len(r) == 1 and r[0] == g:
            self.success[key] = REF
            return (REF, INF, False)
        if not _balanced(r, g, self.weights) or not _modelled(r, g, self.models):
            self.dead.add(key)
            return (None, INF, False)
        rules = self.by_goal.get(g, ())
        if h <= 1:
            if not r:
                for ri in rules:
                    if not self.prem[ri]:
                        t = (ri, (), ())
                        self.success[key] = t
                        return (t, INF, False)
            for ri in rules:
                if self.prem[ri]:
                    return (None, INF, True)
            return (None, INF, False)
        if self.shallow.get(key, 0) >= h:
            return (None, INF, True)
        self.counter += 1
        if self.counter > self.max_nodes:
            raise _Abort
        me = len(path)
        path[key] = me
        low = INF
        cut = False
        for ri in rules:
            premises = self.prem[ri]
            n = len(premises)
            if n == 0:
                if not r:
                    del path[key]
                    t = (ri, (), ())
                    self.success[key] = t
                    return (t, INF, False)
                continue
            for sp in _splits(r, n):
                kids = []
                for i in range(n):
                    assume, q = premises[i]
                    sub = tuple(sorted(sp[i] + assume)) if assume else sp[i]
                    res = self.dfs(q, sub, h - 1, path)
                    lo = res[1]
                    if lo < low:
                        low = lo
                    if res[2]:
                        cut = True
                    if res[0] is None:
                        break
                    kids.append(res[0])
                else:
                    del path[key]
                    t = (ri, sp, tuple(kids))
                    self.success[key] = t
                    return (t, INF, False)
        del path[key]
        if low >= me:
            low = INF
            if cut:
                if self.shallow.get(key, 0) < h:
                    self.shallow[key] = h
            else:
                self.dead.add(key)
        return (None, low, cut)


def search_multiset(by_goal, prem, res, goal, max_height, max_nodes, weights=None, models=None):
    cdef _Multi m = _Multi(by_goal, prem, weights, max_nodes, models)
    cdef int height
    cdef tuple out
    if sys.getrecursionlimit() < 4 * max_height + 200:
        sys.setrecursionlimit(4 * max_height + 200)
    try:
        for height in range(1, max_height + 1):
            out = m.dfs(goal, tuple(res), height, {})
            if out[0] is not None:
                return FOUND, out[0], m.counter
            if not out[2]:
                return NOT_FOUND, None, m.counter
    except _Abort:
        return EXHAUSTED, None, m.counter
    return EXHAUSTED, None, m.counter


cdef class _Sets:
    cdef dict by_goal
    cdef list prem
    cdef dict success
    cdef dict dead
    cdef list path
    cdef long counter
    cdef long max_nodes
    cdef object models

    def __init__(self, by_goal, prem, max_nodes, models=None):
        self.models = models
        self.by_goal = dict(by_goal)
        self.prem = list(prem)
        self.success = {}
        self.dead = {}
        self.path = []
        self.counter = 0
        self.max_nodes = max_nodes

    cdef object known(self, int g, frozenset r):
        for s, t in self.success.get(g, ()):
            if s <= r:
                return t
        return None

    cdef bint is_dead(self, int g, frozenset r):
        for s in self.dead.get(g, ()):
            if r <= s:
                return True
        return False

    cdef tuple dfs(self, int g, frozenset r):
        cdef long low = INF, me, lo
        cdef Py_ssize_t i
        cdef object t, found
        cdef frozenset sub
        cdef list kids
        cdef tuple res
        if g in r:
            return (REF, INF)
        t = self.known(g, r)
        if t is not None:
            return (t, INF)
        if self.is_dead(g, r):
            return (None, INF)
        if not _modelled(tuple(r), g, self.models):
            self.dead.setdefault(g, []).append(r)
            return (None, INF)
        for i in range(len(self.path) - 1, -1, -1):
            pg, pr = self.path[i]
            if pg == g and r <= pr:
                return (None, i)
        self.counter += 1
        if self.counter > self.max_nodes:
            raise _Abort
        me = len(self.path)
        self.path.append((g, r))
        if len(self.path) + 100 > sys.getrecursionlimit():
            sys.setrecursionlimit(len(self.path) * 2 + 200)
        found = None
        for ri in self.by_goal.get(g, ()):
            kids = []
            for assume, q in self.prem[ri]:
                sub = r.union(assume) if assume else r
                res = self.dfs(q, sub)
                lo = res[1]
                if lo < low:
                    low = lo
                if res[0] is None:
                    break
                kids.append(res[0])
            else:
                found = (ri, tuple(kids))
                break
        self.path.pop()
        if found is not None:
            self.success.setdefault(g, []).append((r, found))
            return (found, INF)
        if low >= me:
            self.dead.setdefault(g, []).append(r)
            low = INF
        return (None, low)


def search_set(by_goal, prem, res, goal, max_nodes, models=None):
    cdef _Sets s = _Sets(by_goal, prem, max_nodes, models)
    cdef tuple out
    try:
        out = s.dfs(goal, frozenset(res))
    except _Abort:
        return EXHAUSTED, None, s.counter
    if out[0] is None:
        return NOT_FOUND, None, s.counter
    return FOUND, out[0], s.counter
