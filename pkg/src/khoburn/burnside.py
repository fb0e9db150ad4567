"""Finite correspondences and cube-shaped Burnside functors.

Atomic correspondence elements are strings.  Elements of composites are
flattened tuples ``(e_k, ..., e_1)`` listing the last step first, so the
composite of (B o A) has elements ``flat(b) + flat(a)`` and bracketing is
irrelevant.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import numpy as np

from . import cube


def flat(x) -> tuple:
    return x if isinstance(x, tuple) else (x,)


@dataclass(frozen=True, eq=False)
class Correspondence:
    """A span src <-s- elements -t-> tgt of finite sets."""

    src: tuple
    tgt: tuple
    elements: tuple
    s: dict
    t: dict

    def __post_init__(self):
        if len(set(self.elements)) != len(self.elements):
            raise ValueError("duplicate correspondence elements")
        srcset, tgtset = set(self.src), set(self.tgt)
        for a in self.elements:
            if a not in self.s or a not in self.t:
                raise ValueError(f"source/target map not total at {a!r}")
            if self.s[a] not in srcset:
                raise ValueError(f"s({a!r}) = {self.s[a]!r} not in source")
            if self.t[a] not in tgtset:
                raise ValueError(f"t({a!r}) = {self.t[a]!r} not in target")

    def __len__(self):
        return len(self.elements)

    def fiber(self, x, y) -> list:
        return [a for a in self.elements if self.s[a] == x and self.t[a] == y]

    def fibers(self) -> dict:
        out: dict = {}
        for a in self.elements:
            out.setdefault((self.s[a], self.t[a]), []).append(a)
        return out

    def counts(self) -> dict:
        return {k: len(v) for k, v in self.fibers().items()}

    def is_invertible(self) -> bool:
        return (
            sorted(map(repr, self.s.values())) == sorted(map(repr, self.src))
            and sorted(map(repr, self.t.values())) == sorted(map(repr, self.tgt))
            and len(self.elements) == len(self.src) == len(self.tgt)
        )

    def same_as(self, other: "Correspondence") -> bool:
        return (
            set(self.src) == set(other.src)
            and set(self.tgt) == set(other.tgt)
            and set(self.elements) == set(other.elements)
            and all(self.s[a] == other.s[a] and self.t[a] == other.t[a] for a in self.elements)
        )


def identity(X: Iterable) -> Correspondence:
    X = tuple(X)
    return Correspondence(X, X, X, {x: x for x in X}, {x: x for x in X})


def from_bijection(X: Iterable, f: dict) -> Correspondence:
    """The correspondence X <-id- X -f-> f(X)."""
    X = tuple(X)
    return Correspondence(X, tuple(f[x] for x in X), X, {x: x for x in X}, dict(f))


def compose(B: Correspondence, A: Correspondence) -> Correspondence:
    """B o A as the fiber product over tgt(A) = src(B)."""
    if set(A.tgt) != set(B.src):
        raise ValueError("cannot compose: target of A differs from source of B")
    by_src: dict = {}
    for b in B.elements:
        by_src.setdefault(B.s[b], []).append(b)
    elements, s, t = [], {}, {}
    for a in A.elements:
        for b in by_src.get(A.t[a], ()):
            c = flat(b) + flat(a)
            elements.append(c)
            s[c] = A.s[a]
            t[c] = B.t[b]
    return Correspondence(A.src, B.tgt, tuple(elements), s, t)


def is_morphism(f: dict, A: Correspondence, B: Correspondence) -> bool:
    """Whether f: A -> B is a bijection commuting with source and target maps."""
    if set(f) != set(A.elements) or sorted(map(repr, f.values())) != sorted(map(repr, B.elements)):
        return False
    return all(A.s[a] == B.s[f[a]] and A.t[a] == B.t[f[a]] for a in A.elements)


@dataclass
class Report:
    """Outcome of a validator: a list of (stage, location, message) failures."""

    name: str
    failures: list = field(default_factory=list)
    checks: int = 0

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, stage: str, where, msg: str):
        self.failures.append((stage, where, msg))

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "ok": self.ok,
            "checks": self.checks,
            "failures": [
                {"stage": s, "where": _jsonable(w), "message": m} for s, w, m in self.failures
            ],
        }


def _jsonable(x):
    if isinstance(x, tuple):
        if x and all(v in (0, 1) for v in x if isinstance(v, int)) and all(isinstance(v, int) for v in x):
            return "".join(map(str, x))
        return [_jsonable(v) for v in x]
    return x


def vkey(u) -> str:
    return "".join(map(str, u))


def parse_vkey(s: str) -> tuple:
    return tuple(int(c) for c in s)


class BurnsideFunctor:
    """A strictly unitary Burnside functor 2^n -> B given by 2-face data.

    ``squares[(u, v, vp, w)]`` maps composite elements (b, a) along u->v->w to
    composite elements along u->vp->w.  Both orientations are stored.
    Composites along longer morphisms use the canonical maximal chain that
    drops coordinates in increasing order.
    """

    def __init__(self, n: int, vertex_sets: dict, edges: dict, squares: dict, meta=None):
        self.n = n
        self.vertex_sets = {tuple(k): tuple(v) for k, v in vertex_sets.items()}
        self.edges = {(tuple(u), tuple(v)): c for (u, v), c in edges.items()}
        self.squares = {}
        for (u, v, vp, w), f in squares.items():
            self.squares[(u, v, vp, w)] = dict(f)
            if (u, vp, v, w) not in squares:
                self.squares[(u, vp, v, w)] = {b: a for a, b in f.items()}
        self.meta = dict(meta or {})
        self._corr_cache: dict = {}

    def F(self, v) -> tuple:
        return self.vertex_sets[tuple(v)]

    def edge(self, u, v) -> Correspondence:
        return self.edges[(tuple(u), tuple(v))]

    def chain_composite(self, chain) -> Correspondence:
        if len(chain) == 1:
            return identity(self.F(chain[0]))
        c = self.edge(chain[0], chain[1])
        for a, b in zip(chain[1:], chain[2:]):
            c = compose(self.edge(a, b), c)
        return c

    def corr(self, u, v) -> Correspondence:
        """F(u, v) for u > v, normalised along the canonical maximal chain."""
        key = (tuple(u), tuple(v))
        if key not in self._corr_cache:
            self._corr_cache[key] = self.chain_composite(cube.canonical_chain(u, v))
        return self._corr_cache[key]

    def transport(self, elem: tuple, u, order_from, order_to) -> tuple:
        """Move a composite element between two maximal chains from u.

        Orders are the sequences of dropped coordinates.  The bijection is a
        product of square bijections (bubble sort); by the hexagon axiom it
        does not depend on the chosen sequence of swaps.
        """
        order = list(order_from)
        target = list(order_to)
        if sorted(order) != sorted(target):
            raise ValueError("chains have different endpoints")
        elem = list(flat(elem))
        L = len(order)
        pos = {c: i for i, c in enumerate(target)}
        changed = True
        while changed:
            changed = False
            for p in range(L - 1):
                if pos[order[p]] > pos[order[p + 1]]:
                    chain = cube.chain_from_order(u, order)
                    wp, w1, w2 = chain[p], chain[p + 1], chain[p + 2]
                    alt = cube.drop(wp, order[p + 1])
                    sq = self.squares[(wp, w1, alt, w2)]
                    ib, ia = L - 2 - p, L - 1 - p
                    b2, a2 = sq[(elem[ib], elem[ia])]
                    elem[ib], elem[ia] = b2, a2
                    order[p], order[p + 1] = order[p + 1], order[p]
                    changed = True
        return tuple(elem)

    def compose_map(self, u, v, w, b, a) -> tuple:
        """F(u, v, w): element b of F(v, w) and a of F(u, v) to F(u, w)."""
        o1 = cube.changed_coords(u, v)
        o2 = cube.changed_coords(v, w)
        return self.transport(flat(b) + flat(a), u, o1 + o2, cube.changed_coords(u, w))

    def decompose(self, u, v, w, c) -> tuple:
        """Inverse of compose_map: split c in F(u, w) through v."""
        o1 = cube.changed_coords(u, v)
        o2 = cube.changed_coords(v, w)
        e = self.transport(c, u, cube.changed_coords(u, w), o1 + o2)
        k = len(o2)
        b, a = e[:k], e[k:]
        return (b[0] if k == 1 else b), (a[0] if len(a) == 1 else a)

    def relabel(self, vertex_maps: dict, edge_maps: Optional[dict] = None) -> "BurnsideFunctor":
        """Conjugate by per-vertex label bijections (and optional edge element bijections)."""
        edge_maps = edge_maps or {}
        edges = {}
        for (u, v), c in self.edges.items():
            em = edge_maps.get((u, v), {a: a for a in c.elements})
            fu, fv = vertex_maps[u], vertex_maps[v]
            edges[(u, v)] = Correspondence(
                tuple(fu[x] for x in c.src),
                tuple(fv[y] for y in c.tgt),
                tuple(em[a] for a in c.elements),
                {em[a]: fu[c.s[a]] for a in c.elements},
                {em[a]: fv[c.t[a]] for a in c.elements},
            )
        squares = {}
        for (u, v, vp, w), sq in self.squares.items():
            e1, e2 = edge_maps.get((u, v)), edge_maps.get((v, w))
            f1, f2 = edge_maps.get((u, vp)), edge_maps.get((vp, w))
            m1 = lambda x, e=e1: e[x] if e else x
            m2 = lambda x, e=e2: e[x] if e else x
            n1 = lambda x, e=f1: e[x] if e else x
            n2 = lambda x, e=f2: e[x] if e else x
            squares[(u, v, vp, w)] = {
                (m2(b), m1(a)): (n2(b2), n1(a2)) for (b, a), (b2, a2) in sq.items()
            }
        vsets = {v: tuple(vertex_maps[v][x] for x in xs) for v, xs in self.vertex_sets.items()}
        return BurnsideFunctor(self.n, vsets, edges, squares, self.meta)


HEXAGON_SWAPS = (0, 1, 0, 1, 0, 1)


def validate_functor(F: BurnsideFunctor) -> Report:
    """Typing, involution and hexagon checks for a cube Burnside functor."""
    rep = Report("functor")
    n = F.n
    for v in cube.vertices(n):
        rep.checks += 1
        if v not in F.vertex_sets:
            rep.fail("typing", v, "missing vertex set")
    if not rep.ok:
        return rep
    for u, v in cube.edges(n):
        rep.checks += 1
        c = F.edges.get((u, v))
        if c is None:
            rep.fail("typing", (u, v), "missing edge correspondence")
            continue
        if set(c.src) != set(F.F(u)) or set(c.tgt) != set(F.F(v)):
            rep.fail("typing", (u, v), "edge correspondence has wrong source or target")
        if not all(isinstance(a, str) for a in c.elements):
            rep.fail("typing", (u, v), "edge elements must be atomic labels")
    if not rep.ok:
        return rep
    for face in cube.two_faces(n):
        u, v, vp, w = face
        rep.checks += 1
        sq = F.squares.get(face)
        if sq is None:
            rep.fail("square", face, "missing square bijection")
            continue
        A = compose(F.edge(v, w), F.edge(u, v))
        B = compose(F.edge(vp, w), F.edge(u, vp))
        if not is_morphism(sq, A, B):
            rep.fail("square", face, "not an isomorphism of correspondences")
            continue
        back = F.squares.get((u, vp, v, w), {})
        if any(back.get(sq[x]) != x for x in A.elements):
            rep.fail("involution", face, "F_{u,v,v',w} != F_{u,v',v,w}^-1")
    if not rep.ok:
        return rep
    for u, coords in cube.three_faces(n):
        order = list(coords)
        start = F.chain_composite(cube.chain_from_order(u, order))
        for e0 in start.elements:
            rep.checks += 1
            e = list(e0)
            o = list(order)
            bad = None
            for p in HEXAGON_SWAPS:
                chain = cube.chain_from_order(u, o)
                alt = cube.drop(chain[p], o[p + 1])
                key = (chain[p], chain[p + 1], alt, chain[p + 2])
                ib, ia = 1 - p, 2 - p
                e[ib], e[ia] = F.squares[key][(e[ib], e[ia])]
                o[p], o[p + 1] = o[p + 1], o[p]
            if tuple(e) != e0:
                bad = tuple(e)
            if bad is not None:
                rep.fail("hexagon", (u, coords), f"element {e0!r} returns as {bad!r}")
    return rep


def standard_sign(u, v) -> int:
    """(-1)^{s_{u,v}} with s_{u,v} = sum_{i<k} u_i for the changed coordinate k."""
    (k,) = cube.changed_coords(u, v)
    return -1 if sum(u[:k]) % 2 else 1


@dataclass
class ChainComplex:
    """Free chain complex over Z; ``diffs[d]`` maps degree d to degree d - 1."""

    bases: dict
    diffs: dict

    def d(self, deg: int) -> np.ndarray:
        if deg in self.diffs:
            return self.diffs[deg]
        return np.zeros((len(self.bases.get(deg - 1, ())), len(self.bases.get(deg, ()))), dtype=np.int64)

    def d_squared_zero(self) -> bool:
        for deg in self.bases:
            if not (self.d(deg - 1) @ self.d(deg) == 0).all():
                return False
        return True


def totalize(F: BurnsideFunctor, sign: Callable = standard_sign, check: bool = True) -> ChainComplex:
    """Z<F> totalised: degree |v| summands, signed correspondence counts."""
    if check:
        rep = validate_functor(F)
        if not rep.ok:
            raise ValueError(f"invalid functor: {rep.failures[:3]}")
    bases: dict = {}
    for d, vs in sorted(cube.vertices_by_norm(F.n).items()):
        bases[d] = [(v, x) for v in sorted(vs) for x in F.F(v)]
    index = {d: {g: i for i, g in enumerate(b)} for d, b in bases.items()}
    diffs = {}
    for d in bases:
        if d == 0:
            continue
        M = np.zeros((len(bases[d - 1]), len(bases[d])), dtype=np.int64)
        for u in cube.vertices_by_norm(F.n)[d]:
            for k in range(F.n):
                if not u[k]:
                    continue
                v = cube.drop(u, k)
                c = F.edge(u, v)
                sg = sign(u, v)
                for a in c.elements:
                    M[index[d - 1][(v, c.t[a])], index[d][(u, c.s[a])]] += sg
        diffs[d] = M
    return ChainComplex(bases, diffs)


def natural_isomorphism_check(F1: BurnsideFunctor, F2: BurnsideFunctor, vertex_maps: dict,
                              edge_maps: Optional[dict] = None) -> bool:
    """Whether per-vertex bijections (with edge bijections) give F1 ~= F2.

    Missing edge bijections are filled in when every fiber has at most one
    element, or when the element labels agree.
    """
    if F1.n != F2.n:
        raise ValueError("shape mismatch")
    edge_maps = dict(edge_maps or {})
    for v in cube.vertices(F1.n):
        f = vertex_maps.get(v)
        if f is None or set(f) != set(F1.F(v)) or set(f.values()) != set(F2.F(v)):
            return False
    for (u, v), c1 in F1.edges.items():
        c2 = F2.edges.get((u, v))
        if c2 is None or len(c1) != len(c2):
            return False
        if (u, v) not in edge_maps:
            guess = _guess_edge_map(c1, c2, vertex_maps[u], vertex_maps[v])
            if guess is None:
                return False
            edge_maps[(u, v)] = guess
        em = edge_maps[(u, v)]
        fu, fv = vertex_maps[u], vertex_maps[v]
        if sorted(map(repr, em.values())) != sorted(map(repr, c2.elements)):
            return False
        if any(c2.s[em[a]] != fu[c1.s[a]] or c2.t[em[a]] != fv[c1.t[a]] for a in c1.elements):
            return False
    for face, sq1 in F1.squares.items():
        u, v, vp, w = face
        sq2 = F2.squares[face]
        for (b, a), (b2, a2) in sq1.items():
            lhs = sq2[(edge_maps[(v, w)][b], edge_maps[(u, v)][a])]
            if lhs != (edge_maps[(vp, w)][b2], edge_maps[(u, vp)][a2]):
                return False
    return True


def _guess_edge_map(c1, c2, fu, fv):
    if set(c1.elements) == set(c2.elements):
        em = {a: a for a in c1.elements}
        if all(c2.s[a] == fu[c1.s[a]] and c2.t[a] == fv[c1.t[a]] for a in c1.elements):
            return em
    f2 = c2.fibers()
    em = {}
    for (x, y), els in c1.fibers().items():
        tgt = f2.get((fu[x], fv[y]), [])
        if len(tgt) != len(els) or len(els) > 1:
            return None
        em[els[0]] = tgt[0]
    return em


# JSON (de)serialisation

def correspondence_to_json(c: Correspondence) -> list:
    return [[_enc(a), c.s[a], c.t[a]] for a in c.elements]


def _enc(a):
    return list(a) if isinstance(a, tuple) else a


def _dec(a):
    return tuple(a) if isinstance(a, list) else a


def functor_to_json(F: BurnsideFunctor) -> dict:
    squares = []
    for (u, v, vp, w), sq in sorted(F.squares.items()):
        if (vkey(v), vkey(vp)) > (vkey(vp), vkey(v)):
            continue
        squares.append({
            "u": vkey(u), "v": vkey(v), "vp": vkey(vp), "w": vkey(w),
            "pairs": [[list(k), list(val)] for k, val in sorted(sq.items())],
        })
    return {
        "n": F.n,
        "vertex_sets": {vkey(v): list(xs) for v, xs in sorted(F.vertex_sets.items())},
        "edges": [
            {"u": vkey(u), "v": vkey(v), "elements": correspondence_to_json(c)}
            for (u, v), c in sorted(F.edges.items())
        ],
        "squares": squares,
        "meta": F.meta,
    }


def functor_from_json(data: dict) -> BurnsideFunctor:
    n = int(data["n"])
    vsets = {parse_vkey(k): tuple(v) for k, v in data["vertex_sets"].items()}
    edges = {}
    for e in data["edges"]:
        u, v = parse_vkey(e["u"]), parse_vkey(e["v"])
        els = tuple(_dec(a) for a, _, _ in e["elements"])
        s = {_dec(a): x for a, x, _ in e["elements"]}
        t = {_dec(a): y for a, _, y in e["elements"]}
        edges[(u, v)] = Correspondence(vsets[u], vsets[v], els, s, t)
    squares = {}
    for sq in data["squares"]:
        key = tuple(parse_vkey(sq[k]) for k in ("u", "v", "vp", "w"))
        squares[key] = {tuple(a): tuple(b) for a, b in sq["pairs"]}
    return BurnsideFunctor(n, vsets, edges, squares, data.get("meta"))


def product_functor(factors: list) -> BurnsideFunctor:
    """External product of 1-dimensional functors, one per coordinate.

    Each factor is a Correspondence from F(1) to F(0).  Vertex labels are
    "."-joined tuples of factor labels; square bijections are the canonical
    interchange of the two independent steps.
    """
    n = len(factors)
    sep = "."

    def vset(v):
        pools = [factors[i].src if v[i] else factors[i].tgt for i in range(n)]
        return tuple(sep.join(p) for p in itertools.product(*pools))

    vsets = {v: vset(v) for v in cube.vertices(n)}
    edges = {}
    for u, v in cube.edges(n):
        (k,) = cube.changed_coords(u, v)
        A = factors[k]
        pools = [factors[i].src if u[i] else factors[i].tgt for i in range(n)]
        els, s, t = [], {}, {}
        for rest in itertools.product(*(pools[:k] + [("*",)] + pools[k + 1:])):
            for a in A.elements:
                lab = sep.join(rest[:k] + (a,) + rest[k + 1:])
                src = sep.join(rest[:k] + (A.s[a],) + rest[k + 1:])
                tgt = sep.join(rest[:k] + (A.t[a],) + rest[k + 1:])
                els.append(lab)
                s[lab], t[lab] = src, tgt
        edges[(u, v)] = Correspondence(vsets[u], vsets[v], tuple(els), s, t)
    squares = {}
    for u, v, vp, w in cube.two_faces(n):
        (i,) = cube.changed_coords(u, v)
        (j,) = cube.changed_coords(u, vp)
        sq = {}
        c1, c2 = edges[(u, v)], edges[(v, w)]
        for a in c1.elements:
            pa = a.split(sep)
            for b in c2.elements:
                if c2.s[b] != c1.t[a]:
                    continue
                pb = b.split(sep)
                # a changes slot i, b changes slot j; swap the order of the two steps
                a2 = pa[:]
                a2[j] = pb[j]
                a2[i] = factors[i].s[pa[i]]
                b2 = pb[:]
                b2[i] = pa[i]
                b2[j] = factors[j].t[pb[j]]
                sq[(b, a)] = (sep.join(b2), sep.join(a2))
        squares[(u, v, vp, w)] = sq
    return BurnsideFunctor(n, vsets, edges, squares, {"kind": "product"})

