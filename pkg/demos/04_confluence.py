"""
Uniqueness in practice
======================

Random instances are reduced under several move orders.  The reduced
structures are compared through their canonical signatures: they must all be
the same.
"""
import time
from collections import Counter

from graphmfd import Policy, gen, reduce, signature

n_instances, n_policies = 200, 8
kinds = Counter()
divergent = 0
start = time.perf_counter()
for seed in range(n_instances):
    g = gen(seed, 1 + seed % 25, rays=seed % 3)
    outcomes = [reduce(g, Policy(p)) for p in range(n_policies)]
    for o in outcomes[:1]:
        kinds.update(m.kind.value for m in o.trace)
    sigs = {signature(o.reduced) for o in outcomes if o.ok}
    divergent += len(sigs) > 1
elapsed = time.perf_counter() - start

print(f"{n_instances} instances, {n_policies} orders each, {divergent} divergent")
print(f"{elapsed:.1f}s")
for kind, count in kinds.most_common():
    print(f"  {kind:22s} {count}")

# the engine is linear enough for large chains
g = gen(1, 10_000, chain_heavy=True)
start = time.perf_counter()
out = reduce(g)
print(f"10,000 pieces: {len(out.trace)} moves in {time.perf_counter() - start:.2f}s, "
      f"{len(out.reduced.pieces)} pieces left")
