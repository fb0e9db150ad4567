"""The cube category 2^n, its chain posets and cyclic group actions.

Vertices are plain tuples of 0/1 ints.  A morphism u -> v exists iff
u_i >= v_i for every coordinate, so the norm |u| decreases along morphisms.
Chains are stored as vertex sequences u = w^0 > w^1 > ... > w^k = v.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional, Sequence

import networkx as nx

Vertex = tuple
Chain = tuple


def norm(u: Sequence[int]) -> int:
    return sum(u)


def _check_dims(u, v):
    if len(u) != len(v):
        raise ValueError(f"dimension mismatch: {len(u)} vs {len(v)}")


def geq(u, v) -> bool:
    _check_dims(u, v)
    return all(a >= b for a, b in zip(u, v))


def cube_hom(u, v) -> Optional[int]:
    """Return the grading |u| - |v| of the unique morphism u -> v, or None."""
    if not geq(u, v):
        return None
    return norm(u) - norm(v)


def vertices(n: int) -> list:
    return [tuple(b) for b in itertools.product((0, 1), repeat=n)]


def vertices_by_norm(n: int) -> dict:
    out: dict = {}
    for v in vertices(n):
        out.setdefault(sum(v), []).append(v)
    return out


def drop(u, k: int) -> tuple:
    """The vertex obtained from u by turning coordinate k from 1 to 0."""
    if u[k] != 1:
        raise ValueError(f"coordinate {k} of {u} is not 1")
    return u[:k] + (0,) + u[k + 1:]


def edges(n: int) -> Iterator[tuple]:
    """All pairs (u, v) with u >=_1 v."""
    for u in vertices(n):
        for k in range(n):
            if u[k]:
                yield u, drop(u, k)


def changed_coords(u, v) -> list:
    """Coordinates i with u_i = 1, v_i = 0 (the set u Δ v)."""
    return [i for i, (a, b) in enumerate(zip(u, v)) if a == 1 and b == 0]


def two_faces(n: int) -> Iterator[tuple]:
    """All (u, v, v', w) with u >=_1 v, v' >=_1 w and v != v'."""
    for u in vertices(n):
        ones = [i for i in range(n) if u[i]]
        for i, j in itertools.permutations(ones, 2):
            v = drop(u, i)
            vp = drop(u, j)
            yield u, v, vp, drop(v, j)


def three_faces(n: int) -> Iterator[tuple]:
    """All (u, (i, j, k)) with i < j < k coordinates equal to 1 in u."""
    for u in vertices(n):
        ones = [i for i in range(n) if u[i]]
        for trip in itertools.combinations(ones, 3):
            yield u, trip


def chain_from_order(u, order: Sequence[int]) -> tuple:
    """Maximal chain starting at u that drops the coordinates in `order`."""
    out = [tuple(u)]
    for k in order:
        out.append(drop(out[-1], k))
    return tuple(out)


def canonical_chain(u, v) -> tuple:
    """Maximal chain from u to v dropping coordinates in increasing order."""
    if not geq(u, v):
        raise ValueError(f"{u} is not >= {v}")
    return chain_from_order(u, changed_coords(u, v))


def enumerate_chains(u, v, k: int) -> set:
    """All strictly decreasing chains with exactly k steps from u to v."""
    if not geq(u, v):
        return set()
    r = norm(u) - norm(v)
    if k == 0:
        return {(tuple(u),)} if r == 0 else set()
    if k > r or r == 0:
        return set()
    diff = changed_coords(u, v)
    out = set()
    for blocks in ordered_partitions(diff, k):
        out.add(chain_from_partition(u, blocks))
    return out


def ordered_partitions(items: Sequence, k: int) -> Iterator[tuple]:
    """Ordered partitions of `items` into k non-empty blocks."""
    items = list(items)
    for labels in itertools.product(range(k), repeat=len(items)):
        if len(set(labels)) != k:
            continue
        yield tuple(
            frozenset(x for x, lab in zip(items, labels) if lab == b) for b in range(k)
        )


def chain_from_partition(u, blocks) -> tuple:
    """Chain dropping block P_1 first, then P_2, and so on."""
    out = [tuple(u)]
    for block in blocks:
        w = list(out[-1])
        for i in block:
            w[i] = 0
        out.append(tuple(w))
    return tuple(out)


def chain_to_partition(chain) -> tuple:
    return tuple(frozenset(changed_coords(a, b)) for a, b in zip(chain, chain[1:]))


def refines(fine, coarse) -> bool:
    """fine <= coarse in the face order: fine contains all vertices of coarse."""
    return fine[0] == coarse[0] and fine[-1] == coarse[-1] and set(coarse) <= set(fine)


@dataclass(frozen=True)
class FacePoset:
    """Chains from top to bottom ordered by refinement, with face dimensions."""

    top: tuple
    bottom: tuple
    chains: tuple

    @property
    def rank(self) -> int:
        return norm(self.top) - norm(self.bottom)

    def dim(self, chain) -> int:
        return self.rank - (len(chain) - 1)

    def f_vector(self) -> dict:
        out: dict = {}
        for c in self.chains:
            out[self.dim(c)] = out.get(self.dim(c), 0) + 1
        return dict(sorted(out.items()))

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * f for d, f in self.f_vector().items())

    def leq(self, a, b) -> bool:
        return refines(a, b)

    def hasse_graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(self.chains)
        for a in self.chains:
            for b in self.chains:
                if a != b and self.dim(b) == self.dim(a) + 1 and refines(a, b):
                    g.add_edge(a, b)
        return g


def face_poset(u, v) -> FacePoset:
    """Poset of chains from u to v; isomorphic to the faces of the (r-1)-permutohedron."""
    if tuple(u) == tuple(v):
        raise ValueError("degenerate interval: u == v")
    if not geq(u, v):
        raise ValueError(f"{u} is not >= {v}")
    r = norm(u) - norm(v)
    chains = []
    for k in range(1, r + 1):
        chains.extend(sorted(enumerate_chains(u, v, k)))
    return FacePoset(tuple(u), tuple(v), tuple(chains))


@dataclass(frozen=True)
class CyclicAction:
    """Z_m acting on 2^(n_block*m) by cyclically permuting blocks.

    ``perm[i]`` is the coordinate that coordinate i is sent to by the
    generator, i.e. (1 . x)[perm[i]] = x[i].  An explicit ``perm`` may have
    any length (e.g. extra fixed coordinates); ``n_block`` is then only
    informative.
    """

    m: int
    n_block: int
    perm: Optional[tuple] = None

    def __post_init__(self):
        if self.m < 1 or self.n_block < 0:
            raise ValueError("need m >= 1, n_block >= 0")
        if self.perm is None:
            n, m = self.n_block, self.m
            p = tuple(((i // n + 1) % m) * n + i % n for i in range(n * m)) if n else ()
            object.__setattr__(self, "perm", p)
        else:
            p = tuple(self.perm)
            if sorted(p) != list(range(len(p))):
                raise ValueError("perm is not a permutation of the coordinates")
            object.__setattr__(self, "perm", p)
            q = list(range(self.dim))
            for _ in range(self.m):
                q = [p[i] for i in q]
            if q != list(range(self.dim)):
                raise ValueError(f"perm does not have order dividing {self.m}")

    @property
    def dim(self) -> int:
        return self.n_block * self.m if self.perm is None else len(self.perm)

    def elements(self) -> range:
        return range(self.m)

    def mul(self, g: int, h: int) -> int:
        return (g + h) % self.m

    def inv(self, g: int) -> int:
        return (-g) % self.m

    def coord_perm(self, g: int) -> tuple:
        return _power_perm(self.perm, g % self.m)

    def act_vertex(self, g: int, u) -> tuple:
        p = self.coord_perm(g)
        out = [0] * len(u)
        for i, x in enumerate(u):
            out[p[i]] = x
        return tuple(out)

    def act_chain(self, g: int, chain) -> tuple:
        return tuple(self.act_vertex(g, w) for w in chain)

    def act_coord(self, g: int, i: int) -> int:
        return self.coord_perm(g)[i]

    def subgroup(self, index: int) -> tuple:
        """Elements of the unique subgroup of Z_m of the given index."""
        if index < 1 or self.m % index:
            raise ValueError(f"index {index} does not divide {self.m}")
        return tuple(range(0, self.m, index))

    def is_fixed(self, u, H) -> bool:
        return all(self.act_vertex(h, u) == tuple(u) for h in H)

    def coordinate_orbits(self, H) -> list:
        seen: set = set()
        orbits = []
        for i in range(self.dim):
            if i in seen:
                continue
            orb = sorted({self.act_coord(h, i) for h in H})
            seen.update(orb)
            orbits.append(orb)
        return orbits


@lru_cache(maxsize=None)
def _power_perm(p: tuple, g: int) -> tuple:
    q = tuple(range(len(p)))
    for _ in range(g):
        q = tuple(p[i] for i in q)
    return q


def trivial_action(n: int) -> CyclicAction:
    return CyclicAction(m=1, n_block=n)


@dataclass(frozen=True)
class FixedSubcube:
    """(2^(nm))^H identified with 2^(nk) for H of index k."""

    action: CyclicAction
    index: int

    @property
    def H(self) -> tuple:
        return self.action.subgroup(self.index)

    @property
    def dim(self) -> int:
        return self.action.n_block * self.index

    def restrict(self, u) -> tuple:
        """Fixed vertex of the big cube -> vertex of 2^(nk) (first k blocks)."""
        if not self.action.is_fixed(u, self.H):
            raise ValueError(f"{u} is not fixed by the subgroup of index {self.index}")
        if self.action.n_block * self.action.m != len(u):
            raise ValueError("dimension mismatch")
        return tuple(u[: self.dim])

    def include(self, y) -> tuple:
        if len(y) != self.dim:
            raise ValueError("dimension mismatch")
        return tuple(y) * (self.action.m // self.index)

    def fixed_vertices(self) -> list:
        return [self.include(y) for y in vertices(self.dim)]

    def residual_action(self) -> CyclicAction:
        """The action of Z_m / H = Z_k on the fixed subcube."""
        return CyclicAction(m=self.index, n_block=self.action.n_block)


def fixed_subcube(a: CyclicAction, index: int) -> FixedSubcube:
    a.subgroup(index)
    if a.perm != CyclicAction(a.m, a.n_block).perm:
        raise ValueError("fixed_subcube needs the standard block action")
    return FixedSubcube(a, index)


@dataclass(frozen=True)
class FixedFacePoset:
    chains: tuple
    target: FacePoset
    iso: dict  # fixed chain -> chain of the subcube interval


def fixed_face_poset(u, v, a: CyclicAction, index: int) -> FixedFacePoset:
    """H-fixed chains from u to v with an explicit isomorphism to a subcube face poset."""
    sub = fixed_subcube(a, index)
    H = sub.H
    for w in (u, v):
        if not a.is_fixed(w, H):
            raise ValueError(f"{w} is not fixed by the subgroup of index {index}")
    full = face_poset(u, v)
    fixed = tuple(c for c in full.chains if all(a.is_fixed(w, H) for w in c))
    target = face_poset(sub.restrict(u), sub.restrict(v))
    iso = {c: tuple(sub.restrict(w) for w in c) for c in fixed}
    if sorted(iso.values()) != sorted(target.chains):
        raise AssertionError("restriction is not a bijection onto the subcube face poset")
    # the order is containment of vertex sets, so an injective vertex map preserves and reflects it
    verts = {w for c in fixed for w in c}
    if len({sub.restrict(w) for w in verts}) != len(verts):
        raise AssertionError("restriction is not injective on fixed vertices")
    return FixedFacePoset(fixed, target, iso)


def posets_isomorphic(chains_a, chains_b) -> bool:
    """Order-isomorphism test by graph matching on the strict order relation."""

    def graph(chains):
        g = nx.DiGraph()
        g.add_nodes_from(chains)
        for x in chains:
            for y in chains:
                if x != y and refines(x, y):
                    g.add_edge(x, y)
        return g

    return nx.is_isomorphic(graph(chains_a), graph(chains_b))
