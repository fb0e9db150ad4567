"""External Z_m-actions on cube Burnside functors.

Two encodings are supported.  A :class:`MusytAction` is a family of
bijections phi_{g,v}: F(v) -> F(gv) and phi_{g,u,v}: F(u,v) -> F(gu,gv).  An
:class:`SZAction` is a family of invertible correspondences psi_{g,v} with
2-morphisms psi_{g,h,v} and psi_{g,A}.  Both store data on cube edges only;
maps on longer morphisms are derived through the canonical maximal chain.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Optional

from . import cube
from .burnside import (
    BurnsideFunctor,
    Correspondence,
    Report,
    compose,
    flat,
    identity,
    is_morphism,
    parse_vkey,
    product_functor,
    validate_functor,
    vkey,
)
from .cube import CyclicAction


@dataclass(frozen=True)
class RepLabel:
    """Formal virtual representation of Z_m: irreducible label -> multiplicity.

    Labels: "triv" (dim 1), "sign" (dim 1, m even), "rot<k>" (dim 2).
    """

    terms: tuple = ()

    @property
    def dim(self) -> int:
        return sum(c * (2 if lab.startswith("rot") else 1) for lab, c in self.terms)

    def __add__(self, other: "RepLabel") -> "RepLabel":
        d = dict(self.terms)
        for lab, c in other.terms:
            d[lab] = d.get(lab, 0) + c
        return RepLabel(tuple(sorted((k, v) for k, v in d.items() if v)))

    def to_json(self) -> dict:
        return dict(self.terms)

    @staticmethod
    def from_json(d) -> "RepLabel":
        return RepLabel(tuple(sorted((k, int(v)) for k, v in (d or {}).items() if v)))


@dataclass
class MusytAction:
    group: CyclicAction
    vertex: dict          # (g, v) -> {x: phi(x)}
    edge: dict            # (g, u, v) -> {a: phi(a)}, u >=_1 v

    def phi(self, g: int, v) -> dict:
        return self.vertex[(g % self.group.m, tuple(v))]

    def phi_edge(self, g: int, u, v) -> dict:
        return self.edge[(g % self.group.m, tuple(u), tuple(v))]


@dataclass
class SZAction:
    group: CyclicAction
    one_isos: dict        # (g, v) -> Correspondence F(v) -> F(gv)
    squares: dict         # (g, h, v) -> {p: (q, r)}, psi_{gh,v} -> psi_{g,hv} o psi_{h,v}
    edge: dict            # (g, u, v) -> {(p, a): (b, q)}, psi_{g,v} o F(A) -> F(gA) o psi_{g,u}


def act_chain_order(G: CyclicAction, g: int, order) -> list:
    return [G.act_coord(g, i) for i in order]


def composite_map(F: BurnsideFunctor, phi: MusytAction, g: int, u, w, elem) -> tuple:
    """phi_{g,u,w} on an element of the canonical composite F(u, w)."""
    G = phi.group
    order = cube.changed_coords(u, w)
    chain = cube.chain_from_order(u, order)
    parts = flat(elem)
    L = len(order)
    out = []
    for k in range(L):
        a, b = chain[k], chain[k + 1]
        out.append(phi.phi_edge(g, a, b)[parts[L - 1 - k]])
    image = tuple(reversed(out))
    gu = G.act_vertex(g, u)
    gw = G.act_vertex(g, w)
    res = F.transport(image, gu, act_chain_order(G, g, order), cube.changed_coords(gu, gw))
    return res[0] if len(res) == 1 else res


def validate_musyt(F: BurnsideFunctor, phi: MusytAction, full_md5: bool = True) -> Report:
    """MD-1 .. MD-5 for every group element (pair) and every edge / 2-face."""
    rep = Report("musyt")
    G = phi.group
    m = G.m
    verts = cube.vertices(F.n)
    edges = list(cube.edges(F.n))
    for g in range(m):
        for v in verts:
            rep.checks += 1
            f = phi.vertex.get((g, v))
            gv = G.act_vertex(g, v)
            if f is None or set(f) != set(F.F(v)) or sorted(f.values()) != sorted(F.F(gv)):
                rep.fail("typing", (g, v), "phi_{g,v} is not a bijection F(v) -> F(gv)")
        for u, v in edges:
            rep.checks += 1
            f = phi.edge.get((g, u, v))
            gu, gv = G.act_vertex(g, u), G.act_vertex(g, v)
            tgt = F.edge(gu, gv).elements
            if f is None or set(f) != set(F.edge(u, v).elements) or sorted(f.values()) != sorted(tgt):
                rep.fail("typing", (g, u, v), "phi_{g,u,v} is not a bijection F(u,v) -> F(gu,gv)")
    if not rep.ok:
        return rep
    for v in verts:
        rep.checks += 1
        if any(phi.vertex[(0, v)][x] != x for x in F.F(v)):
            rep.fail("MD-1", v, "phi_{e,v} is not the identity")
    for u, v in edges:
        rep.checks += 1
        if any(phi.edge[(0, u, v)][a] != a for a in F.edge(u, v).elements):
            rep.fail("MD-1", (u, v), "phi_{e,u,v} is not the identity")
    for g, h in itertools.product(range(m), repeat=2):
        gh = (g + h) % m
        for u in verts:
            rep.checks += 1
            hu = G.act_vertex(h, u)
            if any(phi.vertex[(gh, u)][x] != phi.vertex[(g, hu)][phi.vertex[(h, u)][x]] for x in F.F(u)):
                rep.fail("MD-2", (g, h, u), "phi_{gh,u} != phi_{g,hu} o phi_{h,u}")
        for u, v in edges:
            rep.checks += 1
            hu, hv = G.act_vertex(h, u), G.act_vertex(h, v)
            e1, e2, e3 = phi.edge[(gh, u, v)], phi.edge[(g, hu, hv)], phi.edge[(h, u, v)]
            if any(e1[a] != e2[e3[a]] for a in F.edge(u, v).elements):
                rep.fail("MD-3", (g, h, u, v), "phi_{gh,u,v} != phi_{g,hu,hv} o phi_{h,u,v}")
    for g in range(m):
        for u, v in edges:
            rep.checks += 1
            c = F.edge(u, v)
            gc = F.edge(G.act_vertex(g, u), G.act_vertex(g, v))
            e = phi.edge[(g, u, v)]
            for a in c.elements:
                if gc.s[e[a]] != phi.vertex[(g, u)][c.s[a]] or gc.t[e[a]] != phi.vertex[(g, v)][c.t[a]]:
                    rep.fail("MD-4", (g, u, v), f"source/target not intertwined at {a!r}")
                    break
    if not rep.ok:
        return rep
    # MD-5 on generating 2-faces: the square bijections are equivariant
    for g in range(m):
        for face in cube.two_faces(F.n):
            u, v, vp, w = face
            rep.checks += 1
            gface = tuple(G.act_vertex(g, x) for x in face)
            sq, gsq = F.squares[face], F.squares[gface]
            for (b, a), (b2, a2) in sq.items():
                lhs = gsq[(phi.edge[(g, v, w)][b], phi.edge[(g, u, v)][a])]
                rhs = (phi.edge[(g, vp, w)][b2], phi.edge[(g, u, vp)][a2])
                if lhs != rhs:
                    rep.fail("MD-5", (g,) + face, f"composition not equivariant at {(b, a)!r}")
                    break
    if not rep.ok or not full_md5:
        return rep
    # MD-5 for all composable u > v > w with derived maps on longer morphisms
    for g in range(1, m):
        for u in verts:
            for w in verts:
                if u == w or not cube.geq(u, w) or cube.norm(u) - cube.norm(w) < 2:
                    continue
                for v in verts:
                    if v in (u, w) or not (cube.geq(u, v) and cube.geq(v, w)):
                        continue
                    rep.checks += 1
                    A, B = F.corr(u, v), F.corr(v, w)
                    gu, gv, gw = (G.act_vertex(g, x) for x in (u, v, w))
                    for a in A.elements:
                        for b in B.elements:
                            if B.s[b] != A.t[a]:
                                continue
                            lhs = composite_map(F, phi, g, u, w, F.compose_map(u, v, w, b, a))
                            rhs = F.compose_map(gu, gv, gw, composite_map(F, phi, g, v, w, b),
                                                composite_map(F, phi, g, u, v, a))
                            if lhs != rhs:
                                rep.fail("MD-5", (g, u, v, w), f"composite map mismatch at {(b, a)!r}")
    return rep


def trivial_musyt(F: BurnsideFunctor, G: Optional[CyclicAction] = None) -> MusytAction:
    """Identity data for a group acting trivially on the cube (m = 1 by default)."""
    G = G or CyclicAction(1, F.n)
    if any(G.act_vertex(1, v) != v for v in cube.vertices(F.n)):
        raise ValueError("trivial action needs a group acting trivially on the cube")
    vert = {(g, v): {x: x for x in F.F(v)} for g in range(G.m) for v in cube.vertices(F.n)}
    edge = {(g, u, v): {a: a for a in F.edge(u, v).elements} for g in range(G.m) for u, v in cube.edges(F.n)}
    return MusytAction(G, vert, edge)


def musyt_to_sz(F: BurnsideFunctor, phi: MusytAction) -> SZAction:
    G = phi.group
    one = {}
    for (g, v), f in phi.vertex.items():
        X = F.F(v)
        one[(g, v)] = Correspondence(X, F.F(G.act_vertex(g, v)), X, {x: x for x in X}, dict(f))
    sq = {}
    for g, h in itertools.product(range(G.m), repeat=2):
        for v in cube.vertices(F.n):
            f = phi.vertex[(h, v)]
            sq[(g, h, v)] = {a: (f[a], a) for a in F.F(v)}
    edge = {}
    for (g, u, v), f in phi.edge.items():
        c = F.edge(u, v)
        edge[(g, u, v)] = {(c.t[a], a): (f[a], c.s[a]) for a in c.elements}
    return SZAction(G, one, sq, edge)


def _inverse(d: dict) -> dict:
    return {v: k for k, v in d.items()}


def sz_to_musyt(F: BurnsideFunctor, psi: SZAction) -> MusytAction:
    G = psi.group
    vert = {}
    s_inv = {}
    for (g, v), c in psi.one_isos.items():
        if not c.is_invertible():
            raise ValueError(f"psi_{{{g},{vkey(v)}}} is not invertible")
        s_inv[(g, v)] = _inverse(c.s)
        vert[(g, v)] = {x: c.t[s_inv[(g, v)][x]] for x in F.F(v)}
    edge = {}
    for (g, u, v), f in psi.edge.items():
        c = F.edge(u, v)
        out = {}
        for a in c.elements:
            p = s_inv[(g, v)][c.t[a]]
            b, _q = _split_front(f[(p, a)], 1)
            out[a] = b
        edge[(g, u, v)] = out
    return MusytAction(G, vert, edge)


def _split_front(x: tuple, k: int):
    head, tail = x[:k], x[k:]
    return (head[0] if k == 1 else head), (tail[0] if len(tail) == 1 else tail)


def validate_sz(F: BurnsideFunctor, psi: SZAction) -> Report:
    """Typing, 2-morphism checks, EB-1 on edges and EB-2 on 2-faces."""
    rep = Report("sz")
    G = psi.group
    m = G.m
    verts = cube.vertices(F.n)
    edges = list(cube.edges(F.n))
    for g in range(m):
        for v in verts:
            rep.checks += 1
            c = psi.one_isos.get((g, v))
            if c is None or set(c.src) != set(F.F(v)) or set(c.tgt) != set(F.F(G.act_vertex(g, v))):
                rep.fail("typing", (g, v), "psi_{g,v} has wrong source or target")
            elif not c.is_invertible():
                rep.fail("typing", (g, v), "psi_{g,v} is not invertible")
    if not rep.ok:
        return rep
    for g, h in itertools.product(range(m), repeat=2):
        for v in verts:
            rep.checks += 1
            hv = G.act_vertex(h, v)
            A = psi.one_isos[((g + h) % m, v)]
            B = compose(psi.one_isos[(g, hv)], psi.one_isos[(h, v)])
            f = psi.squares.get((g, h, v))
            if f is None or not is_morphism(f, A, B):
                rep.fail("2-morphism", (g, h, v), "psi_{g,h,v} is not an isomorphism of correspondences")
    for g in range(m):
        for u, v in edges:
            rep.checks += 1
            gu, gv = G.act_vertex(g, u), G.act_vertex(g, v)
            A = compose(psi.one_isos[(g, v)], F.edge(u, v))
            B = compose(F.edge(gu, gv), psi.one_isos[(g, u)])
            f = psi.edge.get((g, u, v))
            if f is None or not is_morphism(f, A, B):
                rep.fail("2-morphism", (g, u, v), "psi_{g,A} is not an isomorphism of correspondences")
    if not rep.ok:
        return rep
    for g, h in itertools.product(range(m), repeat=2):
        gh = (g + h) % m
        for u, v in edges:
            rep.checks += 1
            hu, hv = G.act_vertex(h, u), G.act_vertex(h, v)
            sq_u_inv = _inverse(psi.squares[(g, h, u)])
            for (p, a), target in psi.edge[(gh, u, v)].items():
                p1, p2 = psi.squares[(g, h, v)][p]
                b, q = psi.edge[(h, u, v)][(p2, a)]
                b2, r = psi.edge[(g, hu, hv)][(p1, b)]
                s = sq_u_inv[(r, q)]
                if (b2, s) != target:
                    rep.fail("EB-1", (g, h, u, v), f"composite differs at {(p, a)!r}")
                    break
    if not rep.ok:
        return rep
    for g in range(m):
        for face in cube.two_faces(F.n):
            u, v, vp, w = face
            rep.checks += 1
            gface = tuple(G.act_vertex(g, x) for x in face)
            gsq = F.squares[gface]
            for (b, a), (b2, a2) in F.squares[face].items():
                for p in psi.one_isos[(g, w)].elements:
                    if psi.one_isos[(g, w)].s[p] != F.edge(v, w).t[b]:
                        continue
                    lhs = _push(psi, g, (p, b, a), (v, w), (u, v))
                    lhs = gsq[lhs[:2]] + lhs[2:]
                    rhs = _push(psi, g, (p, b2, a2), (vp, w), (u, vp))
                    if lhs != rhs:
                        rep.fail("EB-2", (g,) + face, f"2-morphisms differ at {(p, b, a)!r}")
    return rep


def _push(psi: SZAction, g, elem, e2, e1) -> tuple:
    """(p, b, a) in psi_g o F(B) o F(A) -> (b', a', r) in F(gB) o F(gA) o psi_g."""
    p, b, a = elem
    b2, q = psi.edge[(g,) + e2][(p, b)]
    a2, r = psi.edge[(g,) + e1][(q, a)]
    return (b2, a2, r)


def musyt_equal(phi1: MusytAction, phi2: MusytAction) -> bool:
    return phi1.vertex == phi2.vertex and phi1.edge == phi2.edge and phi1.group.perm == phi2.group.perm


@dataclass
class SZWitness:
    """An equivariant natural isomorphism between two SZ actions on F.

    ``J`` is the functor on 2^(n+1) whose last coordinate is the isomorphism
    direction: J(v, 1) carries ``psi1`` and J(v, 0) carries ``psi0``, and
    J((v,1) -> (v,0)) is the identity correspondence.  ``action`` is the
    SZ action on J extending both.
    """

    J: BurnsideFunctor
    action: SZAction
    chi: dict  # (g, v) -> {(p0, x): (y, p1)}
    report: Report

    @property
    def ok(self) -> bool:
        return self.report.ok

    @property
    def is_identity(self) -> bool:
        """Whether every connecting map pairs each element with an identically labelled one."""
        return all(p0 == p1 for f in self.chi.values() for (p0, _), (_, p1) in f.items())


def natural_iso_functor(F: BurnsideFunctor) -> BurnsideFunctor:
    """F x 2^1 with identity correspondences along the last coordinate."""
    n = F.n
    vsets = {}
    for v in cube.vertices(n):
        for e in (0, 1):
            vsets[v + (e,)] = F.F(v)
    edges = {}
    for u, v in cube.edges(n):
        for e in (0, 1):
            edges[(u + (e,), v + (e,))] = F.edge(u, v)
    for v in cube.vertices(n):
        edges[(v + (1,), v + (0,))] = identity(F.F(v))
    squares = {}
    for (u, v, vp, w), sq in F.squares.items():
        for e in (0, 1):
            squares[(u + (e,), v + (e,), vp + (e,), w + (e,))] = sq
    for u, v in cube.edges(n):
        c = F.edge(u, v)
        # (u,1) -> (v,1) -> (v,0) versus (u,1) -> (u,0) -> (v,0)
        squares[(u + (1,), v + (1,), u + (0,), v + (0,))] = {(c.t[a], a): (a, c.s[a]) for a in c.elements}
    return BurnsideFunctor(n + 1, vsets, edges, squares, {"kind": "natural_iso"})


def extend_action(G: CyclicAction) -> CyclicAction:
    return CyclicAction(G.m, G.n_block, tuple(G.perm) + (G.dim,))


def roundtrip_sz(F: BurnsideFunctor, psi: SZAction) -> SZWitness:
    """Witness that musyt_to_sz(sz_to_musyt(psi)) is equivariantly isomorphic to psi."""
    phi = sz_to_musyt(F, psi)
    psi0 = musyt_to_sz(F, phi)
    return sz_witness(F, psi, psi0)


def sz_witness(F: BurnsideFunctor, psi1: SZAction, psi0: SZAction) -> SZWitness:
    """Build J and its action from psi1 (top layer) and psi0 (bottom layer), then validate.

    Both actions must induce the same bijections phi_{g,v}; the connecting
    2-morphisms are then forced.
    """
    G = psi1.group
    if G.perm != psi0.group.perm or G.m != psi0.group.m:
        raise ValueError("actions over different cube actions")
    J = natural_iso_functor(F)
    GJ = extend_action(G)
    one, sq, edge = {}, {}, {}
    for layer, psi in ((1, psi1), (0, psi0)):
        for (g, v), c in psi.one_isos.items():
            one[(g, v + (layer,))] = c
        for (g, h, v), f in psi.squares.items():
            sq[(g, h, v + (layer,))] = f
        for (g, u, v), f in psi.edge.items():
            edge[(g, u + (layer,), v + (layer,))] = f
    chi = {}
    for g in range(G.m):
        for v in cube.vertices(F.n):
            c0, c1 = psi0.one_isos[(g, v)], psi1.one_isos[(g, v)]
            s1_inv = _inverse(c1.s)
            # psi0_{g,v} o id_{F(v)}  ->  id_{F(gv)} o psi1_{g,v}
            f = {}
            for p0 in c0.elements:
                p1 = s1_inv[c0.s[p0]]
                f[(p0, c0.s[p0])] = (c1.t[p1], p1)
            chi[(g, v)] = f
            edge[(g, v + (1,), v + (0,))] = f
    action = SZAction(GJ, one, sq, edge)
    rep = validate_functor(J)
    rep.name = "sz_witness"
    if rep.ok:
        r2 = validate_sz(J, action)
        rep.failures.extend(r2.failures)
        rep.checks += r2.checks
    return SZWitness(J, action, chi, rep)


def fixed_label(elem) -> str:
    """Atomic label for a composite element used as an edge element of F^H."""
    return elem if isinstance(elem, str) else "<" + "|".join(elem) + ">"


def fixed_point_functor(F: BurnsideFunctor, phi: MusytAction, index: int):
    """F^H over the fixed subcube 2^(n_block * index), H the subgroup of that index.

    Returns (F^H, sub) where ``sub`` is the FixedSubcube identification.
    """
    G = phi.group
    sub = cube.fixed_subcube(G, index)
    H = sub.H
    k = sub.dim
    vsets = {}
    for y in cube.vertices(k):
        U = sub.include(y)
        fixed = tuple(x for x in F.F(U) if all(phi.phi(h, U)[x] == x for h in H))
        vsets[y] = fixed
    back: dict = {}
    edges = {}
    for y, z in cube.edges(k):
        U, W = sub.include(y), sub.include(z)
        C = F.corr(U, W)
        els, s, t = [], {}, {}
        for c in C.elements:
            if all(composite_map(F, phi, h, U, W, c) == c for h in H):
                lab = fixed_label(c)
                back[(y, z, lab)] = c
                els.append(lab)
                s[lab], t[lab] = C.s[c], C.t[c]
                if C.s[c] not in vsets[y] or C.t[c] not in vsets[z]:
                    raise ValueError(f"fixed element {c!r} over non-fixed endpoints: invalid action")
        edges[(y, z)] = Correspondence(vsets[y], vsets[z], tuple(els), s, t)
    squares = {}
    for face in cube.two_faces(k):
        y, y1, y2, z = face
        U, U1, U2, Z = (sub.include(x) for x in face)
        fwd = {fixed_label(c): lab for (a, b, lab), c in back.items() if (a, b) == (y2, z)}
        fwd_a = {fixed_label(c): lab for (a, b, lab), c in back.items() if (a, b) == (y, y2)}
        sq = {}
        for la in edges[(y, y1)].elements:
            a = back[(y, y1, la)]
            for lb in edges[(y1, z)].elements:
                if edges[(y1, z)].s[lb] != edges[(y, y1)].t[la]:
                    continue
                b = back[(y1, z, lb)]
                o1 = cube.changed_coords(U, U1)
                o2 = cube.changed_coords(U1, Z)
                p1 = cube.changed_coords(U, U2)
                p2 = cube.changed_coords(U2, Z)
                e = F.transport(flat(b) + flat(a), U, o1 + o2, p1 + p2)
                b2, a2 = e[: len(p2)], e[len(p2):]
                b2 = b2[0] if len(b2) == 1 else b2
                a2 = a2[0] if len(a2) == 1 else a2
                sq[(lb, la)] = (fwd[fixed_label(b2)], fwd_a[fixed_label(a2)])
        squares[face] = sq
    FH = BurnsideFunctor(k, vsets, edges, squares, {"kind": "fixed_point", "index": index})
    FH.fixed_back = back
    return FH, sub


def fixed_residual_action(F: BurnsideFunctor, phi: MusytAction, index: int, FH: BurnsideFunctor, sub) -> MusytAction:
    """The action of Z_m / H = Z_index on F^H."""
    R = sub.residual_action()
    vert, edge = {}, {}
    for g in range(R.m):
        for y in cube.vertices(FH.n):
            U = sub.include(y)
            f = phi.phi(g, U)
            vert[(g, y)] = {x: f[x] for x in FH.F(y)}
        for y, z in cube.edges(FH.n):
            U, W = sub.include(y), sub.include(z)
            gy, gz = R.act_vertex(g, y), R.act_vertex(g, z)
            out = {}
            for lab in FH.edge(y, z).elements:
                c = FH.fixed_back[(y, z, lab)]
                out[lab] = fixed_label(composite_map(F, phi, g, U, W, c))
                if out[lab] not in FH.edge(gy, gz).elements:
                    raise AssertionError("residual action leaves the fixed functor")
            edge[(g, y, z)] = out
    return MusytAction(R, vert, edge)


# random instances

def _product_action(factors: list, G: CyclicAction, twist_X=None, twist_Y=None, twist_A=None,
                    slot_auto=None) -> tuple:
    """Product functor with Z_m permuting slots along G.perm.

    ``twist_*`` are automorphisms of the (shared) factor applied when a slot
    wraps from the last block to the first and undone when it moves from the
    first block to the second.  ``slot_auto`` is an automorphism (X, Y, A maps)
    of order dividing m applied on every slot by the generator.
    """
    F = product_functor(factors)
    n = F.n
    sep = "."
    nb = G.n_block if G.perm == CyclicAction(G.m, G.n_block).perm else None

    def gen_slot(i, lab, kind):
        tgt = G.perm[i]
        maps = []
        if slot_auto is not None:
            maps.append(slot_auto[kind])
        if nb and twist_X is not None:
            blk_from, blk_to = i // nb, tgt // nb
            tw = {"X": twist_X, "Y": twist_Y, "A": twist_A}[kind]
            if blk_from == G.m - 1 and blk_to == 0:
                maps.append(tw)
            elif blk_from == 0 and blk_to == 1 % G.m and G.m > 1:
                maps.append(_inverse(tw))
        for f in maps:
            lab = f[lab]
        return tgt, lab

    def gen_vertex(v, x):
        parts = x.split(sep)
        out = [None] * n
        for i, lab in enumerate(parts):
            j, l2 = gen_slot(i, lab, "X" if v[i] else "Y")
            out[j] = l2
        return sep.join(out)

    def gen_edge(u, v, a):
        (k,) = cube.changed_coords(u, v)
        parts = a.split(sep)
        out = [None] * n
        for i, lab in enumerate(parts):
            kind = "A" if i == k else ("X" if u[i] else "Y")
            j, l2 = gen_slot(i, lab, kind)
            out[j] = l2
        return sep.join(out)

    vert, edge = {}, {}
    for v in cube.vertices(n):
        cur = {x: x for x in F.F(v)}
        w = v
        for g in range(G.m):
            vert[(g, v)] = dict(cur)
            cur = {x: gen_vertex(w, y) for x, y in cur.items()}
            w = G.act_vertex(1, w)
    for u, v in cube.edges(n):
        cur = {a: a for a in F.edge(u, v).elements}
        uu, vv = u, v
        for g in range(G.m):
            edge[(g, u, v)] = dict(cur)
            cur = {a: gen_edge(uu, vv, b) for a, b in cur.items()}
            uu, vv = G.act_vertex(1, uu), G.act_vertex(1, vv)
    return F, MusytAction(G, vert, edge)


def relabel_action(F: BurnsideFunctor, phi: MusytAction, vmaps: dict, emaps: dict) -> tuple:
    F2 = F.relabel(vmaps, emaps)
    G = phi.group
    vert, edge = {}, {}
    for (g, v), f in phi.vertex.items():
        gv = G.act_vertex(g, v)
        vert[(g, v)] = {vmaps[v][x]: vmaps[gv][y] for x, y in f.items()}
    for (g, u, v), f in phi.edge.items():
        key = (G.act_vertex(g, u), G.act_vertex(g, v))
        edge[(g, u, v)] = {emaps[(u, v)][a]: emaps[key][b] for a, b in f.items()}
    return F2, MusytAction(G, vert, edge)


def disjoint_sum(F1: BurnsideFunctor, phi1: MusytAction, F2: BurnsideFunctor, phi2: MusytAction) -> tuple:
    if F1.n != F2.n or phi1.group.perm != phi2.group.perm:
        raise ValueError("summands must share cube and action")
    tag = lambda i, x: f"{i}:{x}"
    vm = lambda F, i: {v: {x: tag(i, x) for x in F.F(v)} for v in F.vertex_sets}
    em = lambda F, i: {e: {a: tag(i, a) for a in c.elements} for e, c in F.edges.items()}
    A, pa = relabel_action(F1, phi1, vm(F1, 0), em(F1, 0))
    B, pb = relabel_action(F2, phi2, vm(F2, 1), em(F2, 1))
    vsets = {v: A.F(v) + B.F(v) for v in A.vertex_sets}
    edges = {}
    for e in A.edges:
        ca, cb = A.edges[e], B.edges[e]
        edges[e] = Correspondence(vsets[e[0]], vsets[e[1]], ca.elements + cb.elements,
                                  {**ca.s, **cb.s}, {**ca.t, **cb.t})
    squares = {f: {**A.squares[f], **B.squares[f]} for f in A.squares}
    S = BurnsideFunctor(A.n, vsets, edges, squares, {"kind": "sum"})
    vert = {k: {**pa.vertex[k], **pb.vertex[k]} for k in pa.vertex}
    edge = {k: {**pa.edge[k], **pb.edge[k]} for k in pa.edge}
    return S, MusytAction(phi1.group, vert, edge)


def _random_factor(rng: random.Random, nx: int, ny: int, max_el: int) -> Correspondence:
    X = tuple(f"x{i}" for i in range(nx))
    Y = tuple(f"y{i}" for i in range(ny))
    k = rng.randint(0, max_el) if nx and ny else 0
    els = tuple(f"a{i}" for i in range(k))
    s = {a: rng.choice(X) for a in els}
    t = {a: rng.choice(Y) for a in els}
    return Correspondence(X, Y, els, s, t)


def _random_auto(rng: random.Random, A: Correspondence, m: Optional[int] = None):
    """A random automorphism of A (of order dividing m when given), or None."""
    for _ in range(20):
        fx = dict(zip(A.src, rng.sample(A.src, len(A.src))))
        fy = dict(zip(A.tgt, rng.sample(A.tgt, len(A.tgt))))
        fib = A.fibers()
        fa = {}
        ok = True
        for (x, y), els in fib.items():
            tgt = fib.get((fx[x], fy[y]), [])
            if len(tgt) != len(els):
                ok = False
                break
            perm = rng.sample(tgt, len(tgt))
            fa.update(zip(els, perm))
        if not ok:
            continue
        auto = {"X": fx, "Y": fy, "A": fa}
        if m is None or all(_order_divides(f, m) for f in auto.values()):
            return auto
    return None


def _order_divides(f: dict, m: int) -> bool:
    for x in f:
        y = x
        for _ in range(m):
            y = f[y]
        if y != x:
            return False
    return True


def _random_relabel(rng: random.Random, F: BurnsideFunctor, phi: MusytAction) -> tuple:
    vm = {}
    for v, xs in F.vertex_sets.items():
        perm = rng.sample(range(len(xs)), len(xs))
        vm[v] = {x: f"v{vkey(v)}_{p}" for x, p in zip(xs, perm)}
    em = {}
    for e, c in F.edges.items():
        perm = rng.sample(range(len(c.elements)), len(c.elements))
        em[e] = {a: f"e{p}" for a, p in zip(c.elements, perm)}
    return relabel_action(F, phi, vm, em)


def random_musyt_instance(rng: random.Random, m: int, max_n: int = 3, max_size: int = 3) -> tuple:
    """A random (F, phi) with Z_m acting on 2^n, n <= max_n, |F(v)| <= max_size."""
    kinds = ["block"] if m <= max_n else []
    kinds += ["trivial"]
    kind = rng.choice(kinds)
    if kind == "block":
        nb = 1
        G = CyclicAction(m, nb)
        n = m
        sizes = [(1, 1)] if max_size < 4 else [(1, 1), (2, 1), (1, 2)]
        nx, ny = rng.choice([s for s in sizes if max(s) ** n <= max_size] or [(1, 1)])
        A = _random_factor(rng, nx, ny, 2)
        auto = _random_auto(rng, A) if rng.random() < 0.5 else None
        tw = (auto["X"], auto["Y"], auto["A"]) if auto else (None, None, None)
        F, phi = _product_action([A] * n, G, *tw)
    else:
        n = rng.randint(1, max_n)
        G = CyclicAction(m, 0, tuple(range(n)))
        ny = 2 if 2 ** n <= max_size and rng.random() < 0.4 else 1
        A = _random_factor(rng, 1, ny, 3)
        # the generator applies one automorphism on every slot, so slots share a factor
        auto = _random_auto(rng, A, m)
        F, phi = _product_action([A] * n, G, slot_auto=auto)
    F, phi = _random_relabel(rng, F, phi)
    if rng.random() < 0.3:
        F2, phi2 = random_musyt_instance(rng, m, max_n, 1)
        if F2.n == F.n and phi2.group.perm == phi.group.perm and \
                all(len(F.F(v)) + len(F2.F(v)) <= max_size for v in F.vertex_sets):
            F, phi = disjoint_sum(F, phi, F2, phi2)
    return F, phi


def random_sz_from_musyt(rng: random.Random, F: BurnsideFunctor, phi: MusytAction) -> SZAction:
    """An SZ action inducing phi whose 1-isomorphisms carry fresh, shuffled element labels."""
    G = phi.group
    one = {}
    sinv = {}
    for (g, v), f in phi.vertex.items():
        X = F.F(v)
        order = rng.sample(range(len(X)), len(X))
        els = tuple(f"p{g}_{vkey(v)}_{i}" for i in order)
        s = dict(zip(els, X))
        t = {p: f[s[p]] for p in els}
        one[(g, v)] = Correspondence(X, F.F(G.act_vertex(g, v)), els, s, t)
        sinv[(g, v)] = _inverse(s)
    sq = {}
    for g, h in itertools.product(range(G.m), repeat=2):
        for v in cube.vertices(F.n):
            hv = G.act_vertex(h, v)
            c = one[((g + h) % G.m, v)]
            out = {}
            for p in c.elements:
                r = sinv[(h, v)][c.s[p]]
                q = sinv[(g, hv)][one[(h, v)].t[r]]
                out[p] = (q, r)
            sq[(g, h, v)] = out
    edge = {}
    for (g, u, v), f in phi.edge.items():
        c = F.edge(u, v)
        edge[(g, u, v)] = {(sinv[(g, v)][c.t[a]], a): (f[a], sinv[(g, u)][c.s[a]]) for a in c.elements}
    return SZAction(G, one, sq, edge)


# JSON

def _group_json(G: CyclicAction) -> dict:
    return {"m": G.m, "n_block": G.n_block, "perm": list(G.perm)}


def _group_from_json(d: dict) -> CyclicAction:
    return CyclicAction(int(d["m"]), int(d["n_block"]), tuple(d["perm"]))


def _enc(x):
    return list(x) if isinstance(x, tuple) else x


def _dec(x):
    return tuple(x) if isinstance(x, list) else x


def musyt_to_json(phi: MusytAction) -> dict:
    return {
        "group": _group_json(phi.group),
        "vertex": [{"g": g, "v": vkey(v), "map": f} for (g, v), f in sorted(phi.vertex.items())],
        "edge": [{"g": g, "u": vkey(u), "v": vkey(v), "map": f} for (g, u, v), f in sorted(phi.edge.items())],
    }


def musyt_from_json(d: dict) -> MusytAction:
    G = _group_from_json(d["group"])
    vert = {(e["g"], parse_vkey(e["v"])): dict(e["map"]) for e in d["vertex"]}
    edge = {(e["g"], parse_vkey(e["u"]), parse_vkey(e["v"])): dict(e["map"]) for e in d["edge"]}
    return MusytAction(G, vert, edge)


def sz_to_json(psi: SZAction) -> dict:
    from .burnside import correspondence_to_json

    return {
        "group": _group_json(psi.group),
        "one_isos": [{"g": g, "v": vkey(v), "elements": correspondence_to_json(c)}
                     for (g, v), c in sorted(psi.one_isos.items())],
        "squares": [{"g": g, "h": h, "v": vkey(v), "pairs": [[_enc(a), _enc(b)] for a, b in f.items()]}
                    for (g, h, v), f in sorted(psi.squares.items())],
        "edge": [{"g": g, "u": vkey(u), "v": vkey(v), "pairs": [[_enc(a), _enc(b)] for a, b in f.items()]}
                 for (g, u, v), f in sorted(psi.edge.items())],
    }


def sz_from_json(d: dict, F: BurnsideFunctor) -> SZAction:
    G = _group_from_json(d["group"])
    one = {}
    for e in d["one_isos"]:
        g, v = e["g"], parse_vkey(e["v"])
        els = tuple(_dec(a) for a, _, _ in e["elements"])
        one[(g, v)] = Correspondence(F.F(v), F.F(G.act_vertex(g, v)), els,
                                     {_dec(a): x for a, x, _ in e["elements"]},
                                     {_dec(a): y for a, _, y in e["elements"]})
    sq = {(e["g"], e["h"], parse_vkey(e["v"])): {_dec(a): _dec(b) for a, b in e["pairs"]} for e in d["squares"]}
    edge = {(e["g"], parse_vkey(e["u"]), parse_vkey(e["v"])): {_dec(a): _dec(b) for a, b in e["pairs"]}
            for e in d["edge"]}
    return SZAction(G, one, sq, edge)
