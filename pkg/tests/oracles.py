"""Brute-force oracles shared by the test modules."""

import itertools
import math


def surjections(r, k):
    # k! S(r, k) by inclusion-exclusion
    return sum((-1) ** j * math.comb(k, j) * (k - j) ** r for j in range(k + 1))


def ordered_set_partitions(r):
    for k in range(1, r + 1):
        for labels in itertools.product(range(k), repeat=r):
            if len(set(labels)) == k:
                yield tuple(frozenset(i for i in range(r) if labels[i] == b) for b in range(k))


def coarsenings(p):
    """Ordered partitions obtained by merging runs of consecutive blocks (p included)."""
    out = set()
    for cuts in itertools.product([0, 1], repeat=len(p) - 1):
        blocks, cur = [], set(p[0])
        for c, b in zip(cuts, p[1:]):
            if c:
                blocks.append(frozenset(cur))
                cur = set(b)
            else:
                cur |= b
        blocks.append(frozenset(cur))
        out.add(tuple(blocks))
    return out


def subchains(c):
    inner = c[1:-1]
    for k in range(len(inner) + 1):
        for keep in itertools.combinations(inner, k):
            yield (c[0],) + keep + (c[-1],)


def assert_permutohedral(chains, to_partition, r):
    """chains -> ordered partitions of range(r) is a bijection carrying 'coarser than' to merging."""
    img = {c: to_partition(c) for c in chains}
    assert sorted(img.values(), key=repr) == sorted(ordered_set_partitions(r), key=repr)
    chain_set = set(chains)
    for c in chains:
        ups = {img[d] for d in subchains(c)}
        assert all(d in chain_set for d in subchains(c))
        assert ups == coarsenings(img[c])


def circles_oracle(pd, free, state):
    """Union-find on edge labels with the smoothing joins; state bit 0 joins (0,1),(2,3)."""
    parent = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            x = parent[x]
        return x

    def join(a, b):
        parent[find(a)] = find(b)

    for x, s in zip(pd, state):
        for e in x:
            find(e)
        if s == 0:
            join(x[0], x[1]); join(x[2], x[3])
        else:
            join(x[0], x[3]); join(x[1], x[2])
    return len({find(e) for e in parent}) + free
