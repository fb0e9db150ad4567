"""Cellular chain models of the two realizations and their comparison.

A cell model has one cell per generator (object), a degree, an integral
incidence matrix and the permutation of cells given by the group generator.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from . import cube, linalg
from .actions import MusytAction, SZAction, composite_map, fixed_point_functor, fixed_residual_action, sz_to_musyt
from .burnside import BurnsideFunctor, standard_sign, totalize, vkey
from .flowcat import CubicalFlowCategory, burnside_to_flowcat, obj_id, split_obj


@dataclass
class CellModel:
    cells: list              # cell keys "vertex/label"
    degrees: list            # |f(x)| + shift
    d: np.ndarray            # d[y, x]: incidence of x on y (deg y = deg x - 1)
    perm: list               # generator image: perm[k] = index of t . cell k
    shift: int = 0
    route: str = ""

    def index(self) -> dict:
        return {c: k for k, c in enumerate(self.cells)}

    def d_squared_zero(self) -> bool:
        return not (self.d @ self.d).any()

    def to_json(self) -> dict:
        rows, cols = np.nonzero(self.d)
        return {
            "route": self.route,
            "shift": self.shift,
            "cells": [{"key": c, "degree": g} for c, g in zip(self.cells, self.degrees)],
            "incidence": [[self.cells[int(c)], self.cells[int(r)], int(self.d[r, c])] for r, c in zip(rows, cols)],
            "action": [self.cells[p] for p in self.perm],
        }


def _as_musyt(F: BurnsideFunctor, action) -> Optional[MusytAction]:
    if action is None or isinstance(action, MusytAction):
        return action
    if isinstance(action, SZAction):
        return sz_to_musyt(F, action)
    raise TypeError("expected a MusytAction or SZAction")


def hocolim_cells(F: BurnsideFunctor, action: Union[MusytAction, SZAction, None] = None,
                  shift: int = 0, check: bool = True) -> CellModel:
    """Cells indexed by generators of F, incidences the signed correspondence counts.

    With an SZ action the cell permutation is read off the 1-isomorphisms
    directly (x -> t(s^-1(x))).
    """
    T = totalize(F, check=check)
    cells, degrees, where = [], [], {}
    for deg in sorted(T.bases):
        for v, x in T.bases[deg]:
            where[(v, x)] = len(cells)
            cells.append(obj_id(v, x))
            degrees.append(deg + shift)
    N = len(cells)
    d = np.zeros((N, N), dtype=np.int64)
    for deg, M in T.diffs.items():
        for r, c in zip(*np.nonzero(M)):
            d[where[T.bases[deg - 1][r]], where[T.bases[deg][c]]] = M[r, c]
    perm = list(range(N))
    if isinstance(action, SZAction):
        G = action.group
        for (v, x), k in where.items():
            c = action.one_isos[(1 % G.m, v)]
            p = {c.s[a]: a for a in c.elements}[x]
            perm[k] = where[(G.act_vertex(1, v), c.t[p])]
    elif action is not None:
        G = action.group
        for (v, x), k in where.items():
            perm[k] = where[(G.act_vertex(1, v), action.phi(1, v)[x])]
    return CellModel(cells, degrees, d, perm, shift, "hocolim")


def flowcat_cells(C: CubicalFlowCategory, shift: int = 0) -> CellModel:
    """Cells are objects; incidence of x on y counts components of the 0-dimensional M(x, y)."""
    order = sorted(C.objects, key=lambda x: (cube.norm(C.f(x)), C.f(x)))
    where = {x: k for k, x in enumerate(order)}
    N = len(order)
    d = np.zeros((N, N), dtype=np.int64)
    for (x, y), cs in C.components.items():
        u, v = C.f(x), C.f(y)
        if cube.norm(u) - cube.norm(v) != 1:
            continue
        d[where[y], where[x]] = standard_sign(u, v) * len(cs)
    g1 = C.g_objects.get(1 % C.group.m, {x: x for x in order})
    perm = [where[g1[x]] for x in order]
    degrees = [cube.norm(C.f(x)) + shift for x in order]
    return CellModel(list(order), degrees, d, perm, shift, "flowcat")


def _reorder(B: CellModel, cells: list) -> CellModel:
    idx = B.index()
    p = [idx[c] for c in cells]
    inv = {old: new for new, old in enumerate(p)}
    return CellModel(cells, [B.degrees[i] for i in p], B.d[np.ix_(p, p)],
                     [inv[B.perm[i]] for i in p], B.shift, B.route)


@dataclass
class Comparison:
    ok: bool
    f2_equal: bool
    signs: Optional[dict]              # cell -> +1 / -1
    obstruction: Optional[list] = None  # cycle of cells with inconsistent signs
    equivariant: bool = False
    message: str = ""

    def to_json(self) -> dict:
        return {
            "ok": self.ok, "f2_equal": self.f2_equal, "equivariant": self.equivariant,
            "signs": self.signs, "obstruction": self.obstruction, "message": self.message,
        }


def compare_realizations(A: CellModel, B: CellModel) -> Comparison:
    """Search for a diagonal +-1 matrix S with S d_A = d_B S and check it against the actions."""
    if sorted(A.cells) != sorted(B.cells):
        return Comparison(False, False, None, message="cell sets differ")
    B = _reorder(B, A.cells)
    if A.degrees != B.degrees:
        return Comparison(False, False, None, message="cell degrees differ")
    f2 = bool((linalg.to_f2(A.d) == linalg.to_f2(B.d)).all())
    if not ((A.d != 0) == (B.d != 0)).all() or not (np.abs(A.d) == np.abs(B.d)).all():
        return Comparison(False, f2, None, message="incidence magnitudes differ")
    N = len(A.cells)
    # edge (x, y) requires s_y * s_x = sign(B) / sign(A)
    adj: dict = {k: [] for k in range(N)}
    rows, cols = np.nonzero(A.d)
    for r, c in zip(rows, cols):
        rel = int(np.sign(A.d[r, c]) * np.sign(B.d[r, c]))
        adj[c].append((r, rel))
        adj[r].append((c, rel))
    s = [0] * N
    parent: dict = {}
    for root in range(N):
        if s[root]:
            continue
        s[root] = 1
        parent[root] = None
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y, rel in adj[x]:
                if not s[y]:
                    s[y] = s[x] * rel
                    parent[y] = x
                    queue.append(y)
    for r, c in zip(rows, cols):
        rel = int(np.sign(A.d[r, c]) * np.sign(B.d[r, c]))
        if s[r] * s[c] != rel:
            cyc = _tree_cycle(parent, int(r), int(c))
            return Comparison(False, f2, None, [A.cells[k] for k in cyc],
                              message="no consistent sign assignment")
    S = np.diag(s)
    if not (S @ A.d == B.d @ S).all():
        return Comparison(False, f2, None, message="sign assignment failed verification")
    # group compatibility: same permutation, and the twist s(gx) s(x) is a chain automorphism
    equiv = A.perm == B.perm
    if equiv:
        twist = [s[A.perm[k]] * s[k] for k in range(N)]
        equiv = all(twist[r] == twist[c] for r, c in zip(rows, cols))
    signs = {A.cells[k]: s[k] for k in range(N)}
    return Comparison(equiv, f2, signs, equivariant=equiv,
                      message="" if equiv else "sign isomorphism does not respect the group action")


def _tree_cycle(parent: dict, a: int, b: int) -> list:
    def path(x):
        out = []
        while x is not None:
            out.append(x)
            x = parent[x]
        return out

    pa, pb = path(a), path(b)
    common = set(pa) & set(pb)
    ia = next(i for i, x in enumerate(pa) if x in common)
    ib = pb.index(pa[ia])
    return pa[: ia + 1] + list(reversed(pb[:ib]))


def fixed_submodel_burnside(F: BurnsideFunctor, phi: MusytAction, index: int) -> CellModel:
    """H-fixed cells of hocolim_cells(F, phi) with incidences from H-fixed composite elements."""
    big = hocolim_cells(F, phi, check=False)
    G = phi.group
    sub = cube.fixed_subcube(G, index)
    H = sub.H
    cells, keys = [], []
    fixed_verts = set(sub.fixed_vertices())
    for c in big.cells:
        v, x = split_obj(c)
        if v not in fixed_verts:
            continue
        if all(phi.phi(h, v)[x] == x for h in H):
            keys.append((v, x))
            cells.append(obj_id(sub.restrict(v), x))
    order = sorted(range(len(cells)), key=lambda k: (sum(sub.restrict(keys[k][0])), sub.restrict(keys[k][0])))
    cells = [cells[k] for k in order]
    keys = [keys[k] for k in order]
    where = {c: k for k, c in enumerate(cells)}
    degrees = [cube.norm(sub.restrict(v)) for v, _ in keys]
    N = len(cells)
    d = np.zeros((N, N), dtype=np.int64)
    for y, z in cube.edges(sub.dim):
        U, W = sub.include(y), sub.include(z)
        C = F.corr(U, W)
        sg = standard_sign(y, z)
        for e in C.elements:
            if all(composite_map(F, phi, h, U, W, e) == e for h in H):
                a, b = obj_id(y, C.s[e]), obj_id(z, C.t[e])
                if a in where and b in where:
                    d[where[b], where[a]] += sg
    perm = []
    for v, x in keys:
        gv = G.act_vertex(1, v)
        perm.append(where[obj_id(sub.restrict(gv), phi.phi(1, v)[x])])
    return CellModel(cells, degrees, d, perm, 0, "hocolim-fixed")


def fixed_submodel_flowcat(C: CubicalFlowCategory, index: int) -> CellModel:
    """H-fixed objects of a flow category over fixed vertices, with H-fixed 0-dimensional components."""
    G = C.group
    sub = cube.fixed_subcube(G, index)
    H = sub.H
    fixed_verts = set(sub.fixed_vertices())
    objs = [x for x in C.objects if C.f(x) in fixed_verts and all(C.g_objects[h][x] == x for h in H)]
    key = {x: obj_id(sub.restrict(C.f(x)), split_obj(x)[1]) for x in objs}
    objs.sort(key=lambda x: (cube.norm(sub.restrict(C.f(x))), sub.restrict(C.f(x))))
    where = {x: k for k, x in enumerate(objs)}
    N = len(objs)
    d = np.zeros((N, N), dtype=np.int64)
    for x in objs:
        for y in objs:
            u, v = sub.restrict(C.f(x)), sub.restrict(C.f(y))
            if not cube.geq(u, v) or cube.norm(u) - cube.norm(v) != 1:
                continue
            fixed = [c for c in C.B(x, y) if all(C.g_components[(h, x, y)][c] == c for h in H)]
            d[where[y], where[x]] = standard_sign(u, v) * len(fixed)
    g1 = C.g_objects[1 % G.m]
    perm = [where[g1[x]] for x in objs]
    degrees = [cube.norm(sub.restrict(C.f(x))) for x in objs]
    return CellModel([key[x] for x in objs], degrees, d, perm, 0, "flowcat-fixed")


@dataclass
class FixedReport:
    ok: bool
    index: int
    n_cells: int
    comparisons: dict = field(default_factory=dict)
    valid_functor: bool = True

    def to_json(self) -> dict:
        return {"ok": self.ok, "index": self.index, "n_cells": self.n_cells, "valid_functor": self.valid_functor,
                "comparisons": {k: v.to_json() for k, v in self.comparisons.items()}}


def fixed_cell_comparison(F: BurnsideFunctor, phi: MusytAction, index: int,
                          C: Optional[CubicalFlowCategory] = None) -> FixedReport:
    """Three-way comparison of H-fixed cell models (H of the given index in Z_m)."""
    from .burnside import validate_functor

    FH, sub = fixed_point_functor(F, phi, index)
    valid = validate_functor(FH).ok
    psi = fixed_residual_action(F, phi, index, FH, sub)
    A = hocolim_cells(FH, psi, check=False)
    B = fixed_submodel_burnside(F, phi, index)
    if C is None:
        C = burnside_to_flowcat(F, phi)
    Cf = fixed_submodel_flowcat(C, index)
    D = flowcat_cells(burnside_to_flowcat(FH, psi))
    comps = {
        "fixed_functor~hocolim_fixed": compare_realizations(A, B),
        "fixed_functor~flowcat_fixed": compare_realizations(A, Cf),
        "fixed_functor~flowcat_of_fixed": compare_realizations(A, D),
    }
    ok = valid and all(c.ok and c.f2_equal for c in comps.values())
    return FixedReport(ok, index, len(A.cells), comps, valid)


def cell_homology(M: CellModel, coeffs: str = "Q") -> dict:
    """Homology dimensions of a cell model by degree."""
    out = {}
    degs = sorted(set(M.degrees))
    for deg in degs:
        cols = [k for k, g in enumerate(M.degrees) if g == deg]
        lower = [k for k, g in enumerate(M.degrees) if g == deg - 1]
        upper = [k for k, g in enumerate(M.degrees) if g == deg + 1]
        d_out = M.d[np.ix_(lower, cols)] if lower else np.zeros((0, len(cols)), dtype=np.int64)
        d_in = M.d[np.ix_(cols, upper)] if upper else np.zeros((len(cols), 0), dtype=np.int64)
        rk = linalg.rank_f2 if coeffs.upper() == "F2" else linalg.rank_z
        h = len(cols) - (rk(d_out) if d_out.size else 0) - (rk(d_in) if d_in.size else 0)
        if h:
            out[deg] = h
    return out
