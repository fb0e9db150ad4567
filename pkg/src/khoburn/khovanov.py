"""Link diagrams, the cube of resolutions and the Khovanov-Burnside functor.

PD convention: a crossing is (e0, e1, e2, e3), edge labels read
counterclockwise starting from the incoming under-strand.  The 0-smoothing
joins e0-e1 and e2-e3, the 1-smoothing joins e0-e3 and e1-e2.  A crossing is
positive when the over-strand runs from e3 to e1.

Cube convention: the Burnside functor lives on 2^N with morphisms u -> v for
u >= v.  The vertex w carries the resolution of the state s = 1 - w, so an
edge u -> v of the cube is the Khovanov edge from state 1-u to state 1-v and
the correspondence F(u, v) applies multiplication or comultiplication from
the labels on F(u) to the labels on F(v).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import cube, linalg
from .burnside import BurnsideFunctor, Correspondence, compose, totalize


class PDError(ValueError):
    """Malformed planar diagram input."""


@dataclass(frozen=True)
class LinkDiagram:
    pd: tuple                 # crossings as 4-tuples of edge indices 0..E-1
    labels: tuple             # original edge label of each edge index
    signs: tuple
    free_circles: int = 0
    ends: tuple = field(default=(), compare=False, repr=False)

    @property
    def n(self) -> int:
        return len(self.pd)

    @property
    def n_plus(self) -> int:
        return sum(1 for s in self.signs if s > 0)

    @property
    def n_minus(self) -> int:
        return sum(1 for s in self.signs if s < 0)

    @property
    def n_edges(self) -> int:
        return len(self.labels)

    def to_json(self) -> dict:
        return {
            "pd": [[self.labels[e] for e in x] for x in self.pd],
            "signs": list(self.signs),
            "components": None,
            "free_circles": self.free_circles,
        }


def _edge_ends(pd) -> tuple:
    ends: dict = {}
    for c, x in enumerate(pd):
        for p, e in enumerate(x):
            ends.setdefault(e, []).append((c, p))
    return tuple(tuple(ends[e]) for e in range(len(ends)))


def _other_end(ends, e, cp):
    a, b = ends[e]
    return b if a == cp else a


def parse_pd(data) -> LinkDiagram:
    """Build a validated LinkDiagram from JSON text or an already-parsed dict.

    Accepted keys: ``pd`` (list of 4-lists of labels), optional ``signs``
    (one of +1/-1 per crossing), optional ``components`` (total number of
    link components; components beyond those met by crossings are free
    unknotted circles).
    """
    if isinstance(data, (str, bytes)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise PDError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict) or "pd" not in data:
        raise PDError("expected an object with a 'pd' key")
    raw = data["pd"]
    if not isinstance(raw, list):
        raise PDError("'pd' must be a list of crossings")
    for c, x in enumerate(raw):
        if not isinstance(x, list) or len(x) != 4:
            raise PDError(f"crossing {c}: expected 4 edge labels, got {x!r}")
        for e in x:
            if not isinstance(e, (int, str)) or isinstance(e, bool):
                raise PDError(f"crossing {c}: bad edge label {e!r}")
    counts: dict = {}
    order: list = []
    for x in raw:
        for e in x:
            if e not in counts:
                order.append(e)
            counts[e] = counts.get(e, 0) + 1
    for e in order:
        if counts[e] != 2:
            raise PDError(f"edge label {e!r} appears {counts[e]} times (expected 2)")
    index = {e: i for i, e in enumerate(order)}
    pd = tuple(tuple(index[e] for e in x) for x in raw)
    ends = _edge_ends(pd)
    _check_planar(pd, ends, order)
    heads = _orient(pd, ends, data.get("signs"), order)
    signs = []
    for c, x in enumerate(pd):
        if heads[x[3]] == (c, 3):
            signs.append(1)
        elif heads[x[1]] == (c, 1):
            signs.append(-1)
        else:
            raise PDError(f"crossing {c}: over-strand is not consistently oriented")
    given = data.get("signs")
    if given is not None:
        if len(given) != len(pd) or any(s not in (1, -1) for s in given):
            raise PDError("'signs' must list +1/-1 for every crossing")
        for c, (a, b) in enumerate(zip(signs, given)):
            if a != b:
                raise PDError(f"crossing {c}: sign {b} inconsistent with orientation")
    n_comp = len(_components(pd, ends))
    comps = data.get("components")
    free = 0
    if comps is not None:
        if not isinstance(comps, int) or comps < n_comp:
            raise PDError(f"'components' = {comps!r} is less than the {n_comp} traced components")
        free = comps - n_comp
    return LinkDiagram(pd, tuple(order), tuple(signs), free, ends)


def _components(pd, ends) -> list:
    """Strands traced straight through crossings, as lists of (edge, head end)."""
    seen: set = set()
    comps = []
    for e0 in range(len(ends)):
        if e0 in seen:
            continue
        comp = []
        e, head = e0, ends[e0][1]
        while True:
            seen.add(e)
            comp.append((e, head))
            c, p = head
            out = (c, (p + 2) % 4)
            e = pd[c][out[1]]
            head = _other_end(ends, e, out)
            if e == e0 and head == ends[e0][1]:
                break
            if e == e0:
                raise PDError(f"edge {e0}: strand closes up with reversed orientation")
        comps.append(comp)
    return comps


def _orient(pd, ends, signs, labels) -> dict:
    """Head end of every edge, fixed by the under-strand rule e0 -> e2."""
    heads: dict = {}
    for comp in _components(pd, ends):
        fwd = bwd = False
        for e, (c, p) in comp:
            tail = _other_end(ends, e, (c, p))
            if p == 0 or tail[1] == 2:
                fwd = True
            if p == 2 or tail[1] == 0:
                bwd = True
        if fwd and bwd:
            e = comp[0][0]
            raise PDError(f"inconsistent orientation on the component through edge {labels[e]!r}")
        if not fwd and not bwd and signs is not None:
            # component only passes over: use the given sign of its first crossing
            e, (c, p) = comp[0]
            want = signs[c]
            fwd = (p == 3) == (want == 1)
            bwd = not fwd
        for e, head in comp:
            heads[e] = head if not bwd else _other_end(ends, e, head)
    return heads


def _check_planar(pd, ends, labels):
    if not pd:
        return
    # faces of the 4-valent map: leave along a dart, turn to the next corner counterclockwise
    darts = {(c, p) for c in range(len(pd)) for p in range(4)}
    faces = 0
    while darts:
        start = min(darts)
        d = start
        while True:
            darts.discard(d)
            c, p = d
            c2, p2 = _other_end(ends, pd[c][p], (c, p))
            d = (c2, (p2 + 3) % 4)
            if d == start:
                break
            if d not in darts:
                raise PDError("PD code does not describe a planar map")
        faces += 1
    # connected pieces of the crossing graph
    parent = list(range(len(pd)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for (c1, _), (c2, _) in ends:
        parent[find(c1)] = find(c2)
    pieces = len({find(i) for i in range(len(pd))})
    V, E = len(pd), len(ends)
    if V - E + faces != 2 * pieces:
        raise PDError(f"PD code is not planar (V - E + F = {V - E + faces}, expected {2 * pieces})")


def smoothing_partner(p: int, bit: int) -> int:
    if bit == 0:
        return (1, 0, 3, 2)[p]
    return (3, 2, 1, 0)[p]


def right_corners(bit: int) -> tuple:
    """Corners reached by walking along the surgery arc and turning right."""
    return (0, 2) if bit == 0 else (1, 3)


@dataclass(frozen=True)
class ResolvedState:
    """Circles of a resolution as cyclic lists of (edge, start corner, end corner)."""

    state: tuple
    circles: tuple

    def edge_sets(self) -> list:
        return [frozenset(seg[0] for seg in c) for c in self.circles]

    def circle_of_edge(self) -> dict:
        out = {}
        for i, c in enumerate(self.circles):
            for seg in c:
                out[seg[0]] = i
        return out


def resolve(D: LinkDiagram, state) -> ResolvedState:
    state = tuple(state)
    if len(state) != D.n:
        raise ValueError(f"state has length {len(state)}, diagram has {D.n} crossings")
    ends = D.ends
    seen: set = set()
    circles = []
    for e0 in range(D.n_edges):
        if e0 in seen:
            continue
        segs = []
        e, start = e0, ends[e0][0]
        while True:
            seen.add(e)
            stop = _other_end(ends, e, start)
            segs.append((e, start, stop))
            c, p = stop
            nxt = (c, smoothing_partner(p, state[c]))
            e = D.pd[c][nxt[1]]
            start = nxt
            if e == e0 and start == ends[e0][0]:
                break
        circles.append(tuple(segs))
    circles.extend(() for _ in range(D.free_circles))
    return ResolvedState(state, tuple(circles))


def circle_count(D: LinkDiagram, state) -> int:
    return len(resolve(D, state).circles)


def state_of(w) -> tuple:
    return tuple(1 - b for b in w)


def _labelings(c: int) -> tuple:
    return tuple("".join(p) for p in itertools.product("1x", repeat=c))


def _edge_correspondence(D, res_u, res_v, k, Fu, Fv) -> Correspondence:
    """Merge or split at crossing k from the u-resolution to the v-resolution."""
    cu, cv = res_u.edge_sets(), res_v.edge_sets()
    at_k = set(D.pd[k])
    tu = [i for i, s in enumerate(cu) if s & at_k]
    tv = [i for i, s in enumerate(cv) if s & at_k]
    index_v = {s: i for i, s in enumerate(cv) if not (s & at_k) and s}
    # untouched circles, including free ones matched by position
    keep = []
    free_u = [i for i, s in enumerate(cu) if not s]
    free_v = [i for i, s in enumerate(cv) if not s]
    keep.extend(zip(free_u, free_v))
    for i, s in enumerate(cu):
        if s and not (s & at_k):
            keep.append((i, index_v[s]))
    nv = len(cv)
    els, s_map, t_map = [], {}, {}

    def emit(x, lab_v):
        y = "".join(lab_v)
        a = f"{x}>{y}"
        els.append(a)
        s_map[a] = x
        t_map[a] = y

    for x in Fu:
        base = [None] * nv
        for i, j in keep:
            base[j] = x[i]
        if len(tu) == 2 and len(tv) == 1:
            l1, l2 = x[tu[0]], x[tu[1]]
            if l1 == "x" and l2 == "x":
                continue
            base[tv[0]] = "1" if l1 == l2 == "1" else "x"
            emit(x, base)
        elif len(tu) == 1 and len(tv) == 2:
            if x[tu[0]] == "1":
                for a, b in (("1", "x"), ("x", "1")):
                    lab = base[:]
                    lab[tv[0]], lab[tv[1]] = a, b
                    emit(x, lab)
            else:
                lab = base[:]
                lab[tv[0]] = lab[tv[1]] = "x"
                emit(x, lab)
        else:
            raise AssertionError(f"crossing {k}: neither merge nor split ({len(tu)} -> {len(tv)})")
    return Correspondence(Fu, Fv, tuple(els), s_map, t_map)


def ladybug_arcs(D: LinkDiagram, res_u: ResolvedState, i: int, j: int) -> tuple:
    """The two distinguished arcs (as edge sets) of a ladybug at crossings i, j.

    The surgery endpoints cut the circle into four arcs; an arc is
    distinguished when one walks onto it along a surgery arc and turns right.
    Arc 1 is the one containing the smaller edge index.
    """
    circ_of = res_u.circle_of_edge()
    C = res_u.circles[circ_of[D.pd[i][0]]]
    L = len(C)
    # passage between segment t and t+1 happens at crossing of C[t] end
    cuts = [t for t in range(L) if C[t][2][0] in (i, j)]
    if len(cuts) != 4:
        raise AssertionError("not a ladybug configuration")
    arc_of_seg = {}
    for a in range(4):
        t = (cuts[a] + 1) % L
        while True:
            arc_of_seg[t] = a
            if t == cuts[(a + 1) % 4]:
                break
            t = (t + 1) % L
    hits = []
    for t in cuts:
        c, p_in = C[t][2]
        p_out = C[(t + 1) % L][1][1]
        r = [p for p in (p_in, p_out) if p in right_corners(res_u.state[c])]
        if len(r) != 1:
            raise AssertionError("smoothing strand without a unique right corner")
        hits.append(arc_of_seg[t] if r[0] == p_in else arc_of_seg[(t + 1) % L])
    arcs = sorted(set(hits))
    if len(arcs) != 2 or (arcs[1] - arcs[0]) % 4 != 2:
        raise AssertionError(f"right-turn rule did not select an opposite pair: {hits}")
    sets = [frozenset(C[t][0] for t, a in arc_of_seg.items() if a == k) for k in arcs]
    sets.sort(key=min)
    return tuple(sets)


def khovanov_functor(D: LinkDiagram, arc: int = 0) -> BurnsideFunctor:
    """The Khovanov-Burnside functor; ``arc`` picks which distinguished arc drives ladybug matchings."""
    N = D.n
    res = {w: resolve(D, state_of(w)) for w in cube.vertices(N)}
    vsets = {w: _labelings(len(r.circles)) for w, r in res.items()}
    edges = {}
    for u, v in cube.edges(N):
        (k,) = cube.changed_coords(u, v)
        edges[(u, v)] = _edge_correspondence(D, res[u], res[v], k, vsets[u], vsets[v])
    squares = {}
    for u, v, vp, w in cube.two_faces(N):
        if (u, vp, v, w) in squares:
            continue
        A = compose(edges[(v, w)], edges[(u, v)])
        B = compose(edges[(vp, w)], edges[(u, vp)])
        fa, fb = A.fibers(), B.fibers()
        if {k: len(x) for k, x in fa.items()} != {k: len(x) for k, x in fb.items()}:
            raise AssertionError(f"face {(u, v, vp, w)}: composite counts differ")
        sq = {}
        for key, els in fa.items():
            other = fb[key]
            if len(els) == 1:
                sq[els[0]] = other[0]
                continue
            (i,) = cube.changed_coords(u, v)
            (j,) = cube.changed_coords(u, vp)
            arcs = ladybug_arcs(D, res[u], i, j)
            sq.update(_ladybug_match(els, other, res[v], res[vp], arcs[arc]))
        squares[(u, v, vp, w)] = sq
    F = BurnsideFunctor(N, vsets, edges, squares, {"kind": "khovanov"})
    F.diagram = D
    F.resolutions = res
    return F


def _ladybug_match(els, other, res_v, res_vp, arc1) -> dict:
    e1 = min(arc1)
    c1 = res_v.circle_of_edge()[e1]
    c1p = res_vp.circle_of_edge()[e1]

    def mid_label(elem, circ):
        # elem = (b, a) with a = "x>y"; y labels the intermediate circles
        y = elem[1].split(">")[1]
        return y[circ]

    by_label = {mid_label(b, c1p): b for b in other}
    return {a: by_label[mid_label(a, c1)] for a in els}


def quantum_grading(D: LinkDiagram, w, label: str) -> int:
    s = D.n - sum(w)
    return D.n_plus - 2 * D.n_minus + s + label.count("1") - label.count("x")


def homological_grading(D: LinkDiagram, w) -> int:
    return D.n - sum(w) - D.n_minus


@dataclass
class BigradedComplex:
    """Cochain complex with ``diffs[(i, q)]`` from gens[(i, q)] to gens[(i+1, q)]."""

    gens: dict
    diffs: dict
    ring: str = "Z"

    def d(self, i: int, q: int) -> np.ndarray:
        if (i, q) in self.diffs:
            return self.diffs[(i, q)]
        return np.zeros((len(self.gens.get((i + 1, q), ())), len(self.gens.get((i, q), ()))), dtype=np.int64)

    def q_values(self) -> list:
        return sorted({q for _, q in self.gens})

    def i_values(self) -> list:
        return sorted({i for i, _ in self.gens})

    def d_squared_zero(self) -> bool:
        for i, q in self.gens:
            if not (self.d(i + 1, q) @ self.d(i, q) == 0).all():
                return False
        return True

    def generator_counts(self) -> dict:
        return {k: len(v) for k, v in sorted(self.gens.items()) if v}


def ckh(D: LinkDiagram, F: Optional[BurnsideFunctor] = None) -> BigradedComplex:
    """The bigraded Khovanov complex as a regrading of totalize(F)."""
    if F is None:
        F = khovanov_functor(D)
    T = totalize(F, check=False)
    gens: dict = {}
    where: dict = {}
    for d, basis in T.bases.items():
        for w, x in basis:
            key = (homological_grading(D, w), quantum_grading(D, w, x))
            where[(w, x)] = (key, len(gens.setdefault(key, [])))
            gens[key].append((w, x))
    diffs = {}
    for d, M in T.diffs.items():
        rows, cols = T.bases[d - 1], T.bases[d]
        for r, c in zip(*np.nonzero(M)):
            (ki, ri), (kj, cj) = where[rows[r]], where[cols[c]]
            if ki[1] != kj[1] or ki[0] != kj[0] + 1:
                raise AssertionError(f"differential breaks the bigrading: {kj} -> {ki}")
            if kj not in diffs:
                diffs[kj] = np.zeros((len(gens.get((kj[0] + 1, kj[1]), ())), len(gens[kj])), dtype=np.int64)
            diffs[kj][ri, cj] = M[r, c]
    return BigradedComplex(gens, diffs)


def homology(C: BigradedComplex, coeffs: str = "Z") -> dict:
    """Homology per bidegree: {'rank', 'torsion'} over Z, dimensions over F2/Q."""
    coeffs = coeffs.upper()
    if coeffs not in ("Z", "F2", "Q"):
        raise ValueError(f"unknown coefficients {coeffs!r}")
    if not C.d_squared_zero():
        raise ValueError("input is not a chain complex (d o d != 0)")
    out = {}
    cache: dict = {}

    def info(i, q):
        if (i, q) not in cache:
            M = C.d(i, q)
            if M.size == 0:
                cache[(i, q)] = (0, [], 0)
            else:
                inv = linalg.smith_invariants(M)
                cache[(i, q)] = (len(inv), [x for x in inv if x > 1], linalg.rank_f2(M))
        return cache[(i, q)]

    for (i, q), g in sorted(C.gens.items()):
        dim = len(g)
        r_out, _, f_out = info(i, q)
        r_in, tors_in, f_in = info(i - 1, q)
        if coeffs == "F2":
            h = dim - f_out - f_in
            if h:
                out[(i, q)] = h
        elif coeffs == "Q":
            h = dim - r_out - r_in
            if h:
                out[(i, q)] = h
        else:
            h = dim - r_out - r_in
            if h or tors_in:
                out[(i, q)] = {"rank": h, "torsion": tors_in}
    return out


def euler_from_homology(H: dict) -> dict:
    """sum (-1)^i q^j dim H^{i,j} from a Q- or F2-dimension table."""
    poly: dict = {}
    for (i, q), h in H.items():
        poly[q] = poly.get(q, 0) + (-1) ** (i % 2) * h
    return {k: v for k, v in sorted(poly.items()) if v}


def _poly_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for i, x in a.items():
        for j, y in b.items():
            out[i + j] = out.get(i + j, 0) + x * y
    return {k: v for k, v in out.items() if v}


def state_sum(D: LinkDiagram) -> dict:
    """Sum over states of (-1)^|s| q^|s| (q + 1/q)^c(s), shifted by (-1)^n- q^(n+ - 2n-)."""
    total: dict = {}
    for s in cube.vertices(D.n):
        c = circle_count(D, s)
        term = {sum(s): (-1) ** (sum(s) % 2)}
        for _ in range(c):
            term = _poly_mul(term, {1: 1, -1: 1})
        for k, v in term.items():
            total[k] = total.get(k, 0) + v
    shift = {D.n_plus - 2 * D.n_minus: (-1) ** (D.n_minus % 2)}
    return dict(sorted(_poly_mul(total, shift).items()))
