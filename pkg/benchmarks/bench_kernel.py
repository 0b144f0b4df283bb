"""Compare the pure-Python and compiled derivability kernels.

Runs the same derivability queries through every importable backend,
checks that the verdicts agree and reports wall time per workload:

    python3 benchmarks/bench_kernel.py [--sample N] [--repeat K] [--seed S]
"""

from __future__ import annotations

import argparse
import random
import time
from itertools import combinations_with_replacement

from besiml import kernel
from besiml.base import AtomicRule, Base, Budget, derive
from besiml.flatten import bespoke_base
from besiml.harness import enumerate_sequents
from besiml.syntax import IMLL, IPL


def flat_queries(logic, sample, rng):
    seqs = list(enumerate_sequents(logic, ("p", "q"), 3, 3))
    out = []
    for s in rng.sample(seqs, min(sample, len(seqs))):
        # no valuation pruning: time the search itself under the node budget
        _, base, res, goal = bespoke_base(s)
        out.append((base, res, goal, ()))
    return out


def random_queries(sample, rng):
    atoms = ("p", "q", "r")
    out = []
    while len(out) < sample:
        rules = []
        for _ in range(rng.randint(2, 6)):
            prem = [(rng.sample(atoms * 2, rng.randint(0, 2)), rng.choice(atoms))
                    for _ in range(rng.randint(0, 2))]
            rules.append(AtomicRule(prem, rng.choice(atoms)))
        base = Base(rules)
        res = list(rng.choice(list(combinations_with_replacement(atoms, rng.randint(0, 3)))))
        out.append((base, res, rng.choice(atoms), ()))
    return out


def run(queries, backend, repeat):
    best = float("inf")
    statuses = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        got = [derive(b, r, g, Budget(max_nodes=20_000), backend=backend, models=ms).status
               for b, r, g, ms in queries]
        best = min(best, time.perf_counter() - t0)
        statuses = got
    return best, statuses


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sample", type=int, default=150, help="queries per workload")
    ap.add_argument("--repeat", type=int, default=3, help="take the best of this many runs")
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args(argv)
    rng = random.Random(a.seed)
    workloads = {
        "IMLL flat queries (base M)": flat_queries(IMLL, a.sample, rng),
        "IPL flat queries (base N)": flat_queries(IPL, a.sample, rng),
        "random multiset bases": random_queries(a.sample, rng),
    }
    backends = kernel.backends()
    names = [m.BACKEND for m in backends]
    print(f"{'workload':32} " + " ".join(f"{n:>10}" for n in names) + "   speedup  agree")
    for title, qs in workloads.items():
        results = [run(qs, m, a.repeat) for m in backends]
        times = [t for t, _ in results]
        agree = all(r[1] == results[0][1] for r in results)
        speedup = times[0] / times[-1] if len(times) > 1 and times[-1] > 0 else 1.0
        print(f"{title:32} " + " ".join(f"{t:>9.3f}s" for t in times) + f"   {speedup:6.2f}x  {agree}")
    if len(backends) == 1:
        print("compiled kernel not built; only the pure-Python backend was timed")


if __name__ == "__main__":
    main()
