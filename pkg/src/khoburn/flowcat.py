"""Cubical flow categories stored combinatorially.

Every moduli space M(x, y) is a trivial cover of the face poset of the cube
interval (f(x), f(y)), so it is recorded as its set of components B_{x,y};
the face structure is the permutohedron from :mod:`khoburn.cube`.  Boundary
facets are indexed by intermediate vertices, and the composition maps say
how products of components land in components.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from . import cube
from .actions import MusytAction, RepLabel, composite_map, fixed_label
from .burnside import BurnsideFunctor, Correspondence, Report, parse_vkey, vkey
from .cube import CyclicAction


def obj_id(v, x: str) -> str:
    return f"{vkey(v)}/{x}"


def split_obj(o: str) -> tuple:
    v, x = o.split("/", 1)
    return parse_vkey(v), x


@dataclass
class CubicalFlowCategory:
    n: int
    objects: dict                 # object id -> cube vertex
    components: dict              # (x, y) -> tuple of component labels, f(x) > f(y)
    composition: dict             # (x, y, z) -> {(c_yz, c_xy): c_xz}
    group: CyclicAction
    g_objects: dict               # g -> {x: G_g(x)}
    g_components: dict            # (g, x, y) -> {c: G_g(c)}
    V: RepLabel = field(default_factory=RepLabel)

    def f(self, x) -> tuple:
        return self.objects[x]

    def gr(self, x) -> int:
        return cube.norm(self.objects[x])

    def over(self, v) -> list:
        return [x for x, u in self.objects.items() if u == tuple(v)]

    def B(self, x, y) -> tuple:
        return self.components.get((x, y), ())

    def moduli_dim(self, x, y) -> int:
        return self.gr(x) - self.gr(y) - 1

    def moduli(self, x, y) -> list:
        """M(x, y) as (component, face) pairs; faces are chains of the cube interval."""
        P = cube.face_poset(self.f(x), self.f(y))
        return [(c, ch) for c in self.B(x, y) for ch in P.chains]


def burnside_to_flowcat(F: BurnsideFunctor, phi: Optional[MusytAction] = None,
                        V: Optional[RepLabel] = None) -> CubicalFlowCategory:
    if phi is None:
        from .actions import trivial_musyt

        phi = trivial_musyt(F)
    G = phi.group
    objects = {obj_id(v, x): v for v in cube.vertices(F.n) for x in F.F(v)}
    comps: dict = {}
    label: dict = {}   # (u, w, elem) -> component label
    verts = cube.vertices(F.n)
    pairs = [(u, w) for u in verts for w in verts if u != w and cube.geq(u, w)]
    for u, w in pairs:
        C = F.corr(u, w)
        for c in C.elements:
            lab = fixed_label(c)
            label[(u, w, c)] = lab
            comps.setdefault((obj_id(u, C.s[c]), obj_id(w, C.t[c])), []).append(lab)
    comps = {k: tuple(v) for k, v in comps.items()}
    composition: dict = {}
    for u, w in pairs:
        for v in verts:
            if v in (u, w) or not (cube.geq(u, v) and cube.geq(v, w)):
                continue
            A, B = F.corr(u, v), F.corr(v, w)
            for a in A.elements:
                for b in B.elements:
                    if B.s[b] != A.t[a]:
                        continue
                    c = F.compose_map(u, v, w, b, a)
                    key = (obj_id(u, A.s[a]), obj_id(v, A.t[a]), obj_id(w, B.t[b]))
                    composition.setdefault(key, {})[(label[(v, w, b)], label[(u, v, a)])] = label[(u, w, c)]
    g_obj = {}
    for g in range(G.m):
        g_obj[g] = {obj_id(v, x): obj_id(G.act_vertex(g, v), phi.phi(g, v)[x])
                    for v in verts for x in F.F(v)}
    g_comp: dict = {}
    for g in range(G.m):
        for u, w in pairs:
            C = F.corr(u, w)
            gu, gw = G.act_vertex(g, u), G.act_vertex(g, w)
            for c in C.elements:
                x, y = obj_id(u, C.s[c]), obj_id(w, C.t[c])
                img = composite_map(F, phi, g, u, w, c) if g else c
                g_comp.setdefault((g, x, y), {})[label[(u, w, c)]] = label[(gu, gw, img)]
    return CubicalFlowCategory(F.n, objects, comps, composition, G, g_obj, g_comp, V or RepLabel())


def flowcat_to_burnside(C: CubicalFlowCategory) -> tuple:
    """(F, phi, V): vertex sets are fibres of f, edges are the components over cube edges."""
    n = C.n
    names = {x: split_obj(x)[1] if "/" in x else x for x in C.objects}
    vsets = {v: tuple(names[x] for x in C.over(v)) for v in cube.vertices(n)}
    for v, xs in vsets.items():
        if len(set(xs)) != len(xs):
            raise ValueError(f"object names over {vkey(v)} are not distinct")
    edges = {}
    for u, v in cube.edges(n):
        els, s, t = [], {}, {}
        for x in C.over(u):
            for y in C.over(v):
                for c in C.B(x, y):
                    els.append(c)
                    s[c], t[c] = names[x], names[y]
        edges[(u, v)] = Correspondence(vsets[u], vsets[v], tuple(els), s, t)
    squares = {}
    for face in cube.two_faces(n):
        u, v, vp, w = face
        inv = {}
        for x in C.over(u):
            for y in C.over(vp):
                for z in C.over(w):
                    for (b, a), c in C.composition.get((x, y, z), {}).items():
                        inv[(x, z, c)] = (b, a)
        sq = {}
        for x in C.over(u):
            for y in C.over(v):
                for z in C.over(w):
                    for (b, a), c in C.composition.get((x, y, z), {}).items():
                        sq[(b, a)] = inv[(x, z, c)]
        squares[face] = sq
    F = BurnsideFunctor(n, vsets, edges, squares, {"kind": "from_flowcat"})
    G = C.group
    vert, edge = {}, {}
    for g in range(G.m):
        for v in cube.vertices(n):
            vert[(g, v)] = {names[x]: names[C.g_objects[g][x]] for x in C.over(v)}
        for u, v in cube.edges(n):
            out = {}
            for x in C.over(u):
                for y in C.over(v):
                    out.update(C.g_components.get((g, x, y), {}))
            edge[(g, u, v)] = out
    return F, MusytAction(G, vert, edge), C.V


def validate_flowcat(C: CubicalFlowCategory) -> Report:
    rep = Report("flowcat")
    G = C.group
    objs = sorted(C.objects)
    for (x, y), cs in C.components.items():
        rep.checks += 1
        if x not in C.objects or y not in C.objects:
            rep.fail("grading", (x, y), "components between unknown objects")
        elif not cube.geq(C.f(x), C.f(y)) or C.f(x) == C.f(y):
            rep.fail("grading", (x, y), "components only allowed when f(x) > f(y)")
        elif len(set(cs)) != len(cs):
            rep.fail("grading", (x, y), "duplicate component labels")
    if not rep.ok:
        return rep
    # composition typing and boundary decomposition (FC-3)
    for (x, y, z), table in C.composition.items():
        for (b, a), c in table.items():
            rep.checks += 1
            if a not in C.B(x, y) or b not in C.B(y, z) or c not in C.B(x, z):
                rep.fail("FC-3", (x, y, z), f"composition entry {(b, a)!r} -> {c!r} is mistyped")
    if not rep.ok:
        return rep
    by_vertex: dict = {}
    for x in objs:
        by_vertex.setdefault(C.f(x), []).append(x)
    for x in objs:
        for z in objs:
            u, w = C.f(x), C.f(z)
            if u == w or not cube.geq(u, w) or cube.norm(u) - cube.norm(w) < 2:
                continue
            for v in cube.vertices(C.n):
                if v in (u, w) or not (cube.geq(u, v) and cube.geq(v, w)):
                    continue
                rep.checks += 1
                image = []
                for y in by_vertex.get(v, []):
                    table = C.composition.get((x, y, z), {})
                    for a in C.B(x, y):
                        for b in C.B(y, z):
                            if (b, a) not in table:
                                rep.fail("FC-3", (x, y, z), f"composition undefined on {(b, a)!r}")
                            else:
                                image.append(table[(b, a)])
                if sorted(image) != sorted(C.B(x, z)):
                    rep.fail("FC-3", (x, vkey(v), z),
                             "facet through this vertex is not a bijection onto the components")
    if not rep.ok:
        return rep
    # associativity over chains x > y > y' > z
    for (x, y, y2), t1 in C.composition.items():
        for z in objs:
            if (y2, z) not in C.components or (x, y2, z) not in C.composition:
                continue
            t2 = C.composition.get((y, y2, z), {})
            t3 = C.composition.get((x, y, z), {})
            t4 = C.composition[(x, y2, z)]
            for (b, a), ba in t1.items():
                for c in C.B(y2, z):
                    rep.checks += 1
                    left = t4.get((c, ba))
                    cb = t2.get((c, b))
                    right = t3.get((cb, a)) if cb is not None else None
                    if left is None or left != right:
                        rep.fail("associativity", (x, y, y2, z), f"(c b) a != c (b a) at {(c, b, a)!r}")
    if not rep.ok:
        return rep
    # group functors
    m = G.m
    for g in range(m):
        rep.checks += 1
        go = C.g_objects.get(g)
        if go is None or sorted(go) != objs or sorted(go.values()) != objs:
            rep.fail("EFC", g, "G_g is not a bijection on objects")
            continue
        for x in objs:
            if C.f(go[x]) != G.act_vertex(g, C.f(x)):
                rep.fail("EFC", (g, x), "G_g does not cover the cube action")
        for (x, y), cs in C.components.items():
            gc = C.g_components.get((g, x, y))
            if gc is None or sorted(gc) != sorted(cs) or sorted(gc.values()) != sorted(C.B(go[x], go[y])):
                rep.fail("EFC", (g, x, y), "G_g is not a bijection of components")
    if not rep.ok:
        return rep
    for x in objs:
        rep.checks += 1
        if C.g_objects[0][x] != x:
            rep.fail("EFC-1", x, "G_e is not the identity on objects")
    for (g, x, y), f in C.g_components.items():
        if g == 0 and any(a != b for a, b in f.items()):
            rep.fail("EFC-1", (x, y), "G_e is not the identity on components")
    for g, h in itertools.product(range(m), repeat=2):
        gh = (g + h) % m
        for x in objs:
            rep.checks += 1
            if C.g_objects[gh][x] != C.g_objects[g][C.g_objects[h][x]]:
                rep.fail("EFC-2", (g, h, x), "G_gh != G_g G_h on objects")
        for (x, y), cs in C.components.items():
            hx, hy = C.g_objects[h][x], C.g_objects[h][y]
            for c in cs:
                if C.g_components[(gh, x, y)][c] != C.g_components[(g, hx, hy)][C.g_components[(h, x, y)][c]]:
                    rep.fail("EFC-2", (g, h, x, y), f"G_gh != G_g G_h on component {c!r}")
                    break
    for g in range(m):
        go = C.g_objects[g]
        for (x, y, z), table in C.composition.items():
            rep.checks += 1
            gt = C.composition.get((go[x], go[y], go[z]), {})
            for (b, a), c in table.items():
                gb = C.g_components[(g, y, z)][b]
                ga = C.g_components[(g, x, y)][a]
                if gt.get((gb, ga)) != C.g_components[(g, x, z)][c]:
                    rep.fail("EFC-3", (g, x, y, z), f"composition not equivariant at {(b, a)!r}")
                    break
    return rep


def canonical_decomposition(C: CubicalFlowCategory, x, z, c) -> tuple:
    """Split a component into edge components along the canonical maximal chain.

    Returns ((x_0, ..., x_k), (e_1, ..., e_k)) with objects over the chain.
    """
    u, w = C.f(x), C.f(z)
    chain = cube.canonical_chain(u, w)
    objs, comps = [x], []
    cur_x, cur_c = x, c
    for v in chain[1:-1]:
        found = None
        for y in C.over(v):
            for (b, a), cc in C.composition.get((cur_x, y, z), {}).items():
                if cc == cur_c:
                    found = (y, a, b)
                    break
            if found:
                break
        if found is None:
            raise ValueError(f"component {c!r} does not decompose through {vkey(v)}")
        y, a, b = found
        objs.append(y)
        comps.append(a)
        cur_x, cur_c = y, b
    objs.append(z)
    comps.append(cur_c)
    return tuple(objs), tuple(comps)


@dataclass
class FlowcatIso:
    objects: dict       # object of C -> object of D
    components: dict    # (x, y) -> {c: d}
    report: Report

    @property
    def ok(self) -> bool:
        return self.report.ok


def flowcat_natural_iso(C: CubicalFlowCategory, D: CubicalFlowCategory, max_nodes: int = 100000) -> FlowcatIso:
    """Search for an isomorphism C -> D over the cube commuting with composition and G.

    Objects over each vertex are matched by name when possible; otherwise a
    bounded backtracking search runs over bijections of fibres.  Components
    over cube edges are matched within each fibre, and longer components
    are determined by their canonical edge decompositions.
    """
    rep = Report("flowcat_iso")
    if C.n != D.n or C.group.perm != D.group.perm or C.group.m != D.group.m:
        rep.fail("shape", None, "different cube or group")
        return FlowcatIso({}, {}, rep)
    verts = cube.vertices(C.n)
    for v in verts:
        if len(C.over(v)) != len(D.over(v)):
            rep.fail("objects", vkey(v), "fibre sizes differ")
    for u in verts:
        for w in verts:
            if u != w and cube.geq(u, w):
                nc = sum(len(C.B(x, y)) for x in C.over(u) for y in C.over(w))
                nd = sum(len(D.B(x, y)) for x in D.over(u) for y in D.over(w))
                if nc != nd:
                    rep.fail("components", (vkey(u), vkey(w)), f"{nc} components vs {nd}")
    if not rep.ok:
        return FlowcatIso({}, {}, rep)

    def attempt(theta: dict) -> Optional[tuple]:
        emap: dict = {}
        for u, v in cube.edges(C.n):
            for x in C.over(u):
                for y in C.over(v):
                    cs, ds = C.B(x, y), D.B(theta[x], theta[y])
                    if len(cs) != len(ds):
                        return None
                    same = set(cs) == set(ds)
                    emap[(x, y)] = {c: (c if same else d) for c, d in zip(sorted(cs), sorted(ds))}
        full = _extend(C, D, theta, emap)
        if full is None:
            return None
        r = check_flowcat_iso(C, D, theta, full)
        return (full, r) if r.ok else None

    def by_name() -> Optional[dict]:
        theta = {}
        for v in verts:
            dn = {split_obj(y)[1] if "/" in y else y: y for y in D.over(v)}
            for x in C.over(v):
                name = split_obj(x)[1] if "/" in x else x
                if name not in dn:
                    return None
                theta[x] = dn[name]
        return theta

    theta = by_name()
    if theta is not None:
        res = attempt(theta)
        if res is not None:
            return FlowcatIso(theta, res[0], res[1])
    # bounded backtracking over fibre bijections, then over edge fibre bijections
    nodes = [0]
    fibres = [(C.over(v), D.over(v)) for v in verts]

    def search(i: int, theta: dict):
        nodes[0] += 1
        if nodes[0] > max_nodes:
            return None
        if i == len(fibres):
            return _search_edges(C, D, theta, nodes, max_nodes)
        xs, ys = fibres[i]
        for perm in itertools.permutations(ys):
            t2 = dict(theta)
            t2.update(zip(xs, perm))
            if not _partial_ok(C, D, t2):
                continue
            out = search(i + 1, t2)
            if out is not None:
                return out
        return None

    found = search(0, {})
    if found is None:
        rep.fail("search", None, "no isomorphism found" + (" (search bound hit)" if nodes[0] > max_nodes else ""))
        return FlowcatIso({}, {}, rep)
    theta, full, r = found
    return FlowcatIso(theta, full, r)


def _partial_ok(C, D, theta) -> bool:
    for x, y in theta.items():
        for g in range(C.group.m):
            gx = C.g_objects[g][x]
            if gx in theta and theta[gx] != D.g_objects[g][y]:
                return False
    for (x, y), cs in C.components.items():
        if x in theta and y in theta and len(cs) != len(D.B(theta[x], theta[y])):
            return False
    return True


def _search_edges(C, D, theta, nodes, max_nodes):
    keys = [(x, y) for u, v in cube.edges(C.n) for x in C.over(u) for y in C.over(v) if C.B(x, y)]

    def rec(i, emap):
        nodes[0] += 1
        if nodes[0] > max_nodes:
            return None
        if i == len(keys):
            full = _extend(C, D, theta, emap)
            if full is None:
                return None
            r = check_flowcat_iso(C, D, theta, full)
            return (theta, full, r) if r.ok else None
        x, y = keys[i]
        cs = C.B(x, y)
        for perm in itertools.permutations(D.B(theta[x], theta[y])):
            e2 = dict(emap)
            e2[(x, y)] = dict(zip(cs, perm))
            out = rec(i + 1, e2)
            if out is not None:
                return out
        return None

    return rec(0, {})


def _extend(C, D, theta, emap) -> Optional[dict]:
    """Extend edge-component maps to all components via canonical decompositions."""
    full = dict(emap)
    inv_d: dict = {}
    for (x, z), cs in C.components.items():
        if (x, z) in full:
            continue
        out = {}
        for c in cs:
            objs, parts = canonical_decomposition(C, x, z, c)
            dobjs = [theta[o] for o in objs]
            # recompose in D along the same chain
            cur = emap[(objs[0], objs[1])][parts[0]]
            for k in range(1, len(parts)):
                e = emap[(objs[k], objs[k + 1])][parts[k]]
                table = D.composition.get((dobjs[0], dobjs[k], dobjs[k + 1]), {})
                cur = table.get((e, cur))
                if cur is None:
                    return None
            out[c] = cur
        full[(x, z)] = out
    return full


def check_flowcat_iso(C, D, theta: dict, comps: dict) -> Report:
    rep = Report("flowcat_iso")
    for x, y in theta.items():
        rep.checks += 1
        if C.f(x) != D.f(y):
            rep.fail("objects", x, "does not commute with f")
    if sorted(theta.values()) != sorted(D.objects):
        rep.fail("objects", None, "not a bijection on objects")
    for (x, y), cs in C.components.items():
        rep.checks += 1
        f = comps.get((x, y), {})
        if sorted(f) != sorted(cs) or sorted(f.values()) != sorted(D.B(theta[x], theta[y])):
            rep.fail("components", (x, y), "not a bijection of components")
    if not rep.ok:
        return rep
    for (x, y, z), table in C.composition.items():
        rep.checks += 1
        dt = D.composition.get((theta[x], theta[y], theta[z]), {})
        for (b, a), c in table.items():
            if dt.get((comps[(y, z)][b], comps[(x, y)][a])) != comps[(x, z)][c]:
                rep.fail("composition", (x, y, z), f"not preserved at {(b, a)!r}")
                break
    for g in range(C.group.m):
        for x in C.objects:
            rep.checks += 1
            if theta[C.g_objects[g][x]] != D.g_objects[g][theta[x]]:
                rep.fail("group", (g, x), "does not commute with G_g on objects")
        for (x, y), cs in C.components.items():
            gx, gy = C.g_objects[g][x], C.g_objects[g][y]
            for c in cs:
                lhs = comps[(gx, gy)][C.g_components[(g, x, y)][c]]
                rhs = D.g_components[(g, theta[x], theta[y])][comps[(x, y)][c]]
                if lhs != rhs:
                    rep.fail("group", (g, x, y), f"does not commute with G_g at {c!r}")
                    break
    return rep


def relabel_flowcat(C: CubicalFlowCategory, obj_map: dict, comp_map: dict) -> CubicalFlowCategory:
    """Rename objects and components (comp_map: (x, y) -> {c: new})."""
    o = obj_map
    cm = lambda x, y, c: comp_map.get((x, y), {}).get(c, c)
    objects = {o[x]: v for x, v in C.objects.items()}
    comps = {(o[x], o[y]): tuple(cm(x, y, c) for c in cs) for (x, y), cs in C.components.items()}
    composition = {
        (o[x], o[y], o[z]): {(cm(y, z, b), cm(x, y, a)): cm(x, z, c) for (b, a), c in t.items()}
        for (x, y, z), t in C.composition.items()
    }
    g_obj = {g: {o[x]: o[y] for x, y in f.items()} for g, f in C.g_objects.items()}
    g_comp = {}
    for (g, x, y), f in C.g_components.items():
        gx, gy = C.g_objects[g][x], C.g_objects[g][y]
        g_comp[(g, o[x], o[y])] = {cm(x, y, a): cm(gx, gy, b) for a, b in f.items()}
    return CubicalFlowCategory(C.n, objects, comps, composition, C.group, g_obj, g_comp, C.V)


# JSON

def flowcat_to_json(C: CubicalFlowCategory) -> dict:
    return {
        "n": C.n,
        "objects": {x: vkey(v) for x, v in sorted(C.objects.items())},
        "components": [{"x": x, "y": y, "labels": list(cs)} for (x, y), cs in sorted(C.components.items())],
        "composition": [
            {"x": x, "y": y, "z": z, "table": [[b, a, c] for (b, a), c in sorted(t.items())]}
            for (x, y, z), t in sorted(C.composition.items())
        ],
        "group": {
            "m": C.group.m, "n_block": C.group.n_block, "perm": list(C.group.perm),
            "objects": {str(g): f for g, f in sorted(C.g_objects.items())},
            "components": [{"g": g, "x": x, "y": y, "map": f} for (g, x, y), f in sorted(C.g_components.items())],
        },
        "V": C.V.to_json(),
    }


def flowcat_from_json(d: dict) -> CubicalFlowCategory:
    gd = d["group"]
    G = CyclicAction(int(gd["m"]), int(gd["n_block"]), tuple(gd["perm"]))
    return CubicalFlowCategory(
        int(d["n"]),
        {x: parse_vkey(v) for x, v in d["objects"].items()},
        {(e["x"], e["y"]): tuple(e["labels"]) for e in d["components"]},
        {(e["x"], e["y"], e["z"]): {(b, a): c for b, a, c in e["table"]} for e in d["composition"]},
        G,
        {int(g): dict(f) for g, f in gd["objects"].items()},
        {(e["g"], e["x"], e["y"]): dict(e["map"]) for e in gd["components"]},
        RepLabel.from_json(d.get("V")),
    )
