"""Periodic diagrams, the induced Z_m-action and equivariant Khovanov homology over F_2."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import cube, linalg
from .actions import MusytAction
from .burnside import BurnsideFunctor, Report
from .cube import CyclicAction
from .khovanov import (
    BigradedComplex,
    LinkDiagram,
    PDError,
    ckh,
    homology,
    khovanov_functor,
    parse_pd,
    _components,
)


@dataclass
class PeriodicDiagram:
    diagram: LinkDiagram
    sigma_crossings: tuple     # crossing c -> sigma(c)
    sigma_edges: dict          # edge label -> edge label
    m: int
    source: dict = field(default_factory=dict, repr=False)


def parse_periodic(data) -> PeriodicDiagram:
    if isinstance(data, (str, bytes)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise PDError(f"invalid JSON: {exc}") from exc
    for key in ("pd", "sigma_crossings", "sigma_edges", "m"):
        if key not in data:
            raise PDError(f"periodic input needs key {key!r}")
    D = parse_pd(data)
    se = data["sigma_edges"]
    if isinstance(se, dict):
        lab = {str(e): e for e in D.labels}
        se = {lab.get(k, k): v for k, v in se.items()}
    else:
        se = {a: b for a, b in se}
    m = data["m"]
    if not isinstance(m, int) or m < 1:
        raise PDError("'m' must be a positive integer")
    sc = data["sigma_crossings"]
    if not isinstance(sc, list) or not all(isinstance(c, int) for c in sc):
        raise PDError("'sigma_crossings' must be a list of crossing indices")
    return PeriodicDiagram(D, tuple(sc), se, m, dict(data))


@dataclass
class PeriodicReport:
    ok: bool
    failures: list
    renumbering: Optional[tuple] = None    # old crossing index -> new index
    n_block: int = 0
    shift: Optional[int] = None

    def to_json(self) -> dict:
        return {"ok": self.ok, "failures": self.failures,
                "renumbering": list(self.renumbering) if self.renumbering else None,
                "n_block": self.n_block}


def _perm_order(p: dict) -> int:
    order = 1
    for x in p:
        k, y = 1, p[x]
        while y != x:
            y = p[y]
            k += 1
        order = order * k // _gcd(order, k)
    return order


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def validate_periodic(P: PeriodicDiagram) -> PeriodicReport:
    D = P.diagram
    N, m = D.n, P.m
    fails = []
    sc = list(P.sigma_crossings)
    if sorted(sc) != list(range(N)):
        return PeriodicReport(False, ["sigma_crossings is not a permutation of the crossings"])
    labels = set(D.labels)
    se = P.sigma_edges
    if set(se) != labels or set(se.values()) != labels:
        return PeriodicReport(False, ["sigma_edges is not a permutation of the edge labels"])
    oc = _perm_order(dict(enumerate(sc))) if N else 1
    oe = _perm_order(se) if se else 1
    if m % oc or m % oe or (N and oc != m):
        fails.append(f"sigma has order {oc} on crossings and {oe} on edges, expected {m}")
    # PD invariance: crossing tuples map to crossing tuples, same starting corner
    shift = None
    for sh in (0, 2):
        good = True
        for c, x in enumerate(D.pd):
            y = D.pd[sc[c]]
            for p in range(4):
                if se[D.labels[x[p]]] != D.labels[y[(p + sh) % 4]]:
                    good = False
                    break
            if not good:
                break
        if good:
            shift = sh
            break
    if shift is None:
        fails.append("sigma does not map the PD code to itself")
    else:
        for c in range(N):
            if D.signs[c] != D.signs[sc[c]]:
                fails.append(f"sigma does not preserve the sign of crossing {c}")
                break
    # free orbits of size m, and renumbering to the standard block action
    seen: set = set()
    orbits = []
    for c in range(N):
        if c in seen:
            continue
        orb = [c]
        while sc[orb[-1]] != c:
            orb.append(sc[orb[-1]])
        seen.update(orb)
        orbits.append(orb)
    if any(len(o) != m for o in orbits):
        fails.append("crossing orbits are not all free of size m")
    if fails:
        return PeriodicReport(False, fails, shift=shift)
    nb = len(orbits)
    ren = [0] * N
    for o, orb in enumerate(orbits):
        for b, c in enumerate(orb):
            ren[c] = b * nb + o
    return PeriodicReport(True, [], tuple(ren), nb, shift)


def normalize(P: PeriodicDiagram, rep: Optional[PeriodicReport] = None) -> PeriodicDiagram:
    """Reorder crossings so that sigma is the standard block action on 2^(n m)."""
    rep = rep or validate_periodic(P)
    if not rep.ok:
        raise ValueError("; ".join(rep.failures))
    D = P.diagram
    N = D.n
    new_pd = [None] * N
    for c, r in enumerate(rep.renumbering):
        new_pd[r] = [D.labels[e] for e in D.pd[c]]
    data = {"pd": new_pd, "signs": [D.signs[c] for c in sorted(range(N), key=lambda c: rep.renumbering[c])]}
    if D.free_circles:
        data["components"] = len(_components(D.pd, D.ends)) + D.free_circles
    D2 = parse_pd(data)
    sc = tuple((r + rep.n_block) % N if N else r for r in range(N))
    return PeriodicDiagram(D2, sc, dict(P.sigma_edges), P.m, P.source)


def _circle_map(D: LinkDiagram, res_a, res_b, sigma_idx: dict) -> list:
    """Index in res_b of the image of each circle of res_a under the edge map."""
    where = {s: i for i, s in enumerate(res_b.edge_sets()) if s}
    free_b = [i for i, s in enumerate(res_b.edge_sets()) if not s]
    out = []
    k = 0
    for s in res_a.edge_sets():
        if s:
            out.append(where[frozenset(sigma_idx[e] for e in s)])
        else:
            out.append(free_b[k])
            k += 1
    return out


def induced_action(P: PeriodicDiagram, F: Optional[BurnsideFunctor] = None) -> tuple:
    """(F, phi) for the normalized diagram; phi permutes circle labels along sigma.

    ``P`` must already be normalized (see :func:`normalize`).
    """
    D = P.diagram
    N, m = D.n, P.m
    nb = N // m if m else 0
    G = CyclicAction(m, nb) if N else CyclicAction(m, 0, ())
    if N and tuple(P.sigma_crossings) != tuple(G.perm):
        raise ValueError("diagram is not normalized to the standard block action")
    if F is None:
        F = khovanov_functor(D)
    idx = {lab: i for i, lab in enumerate(D.labels)}
    sig = {idx[a]: idx[b] for a, b in P.sigma_edges.items()}
    powers = [dict((e, e) for e in range(D.n_edges))]
    for _ in range(1, m):
        powers.append({e: sig[powers[-1][e]] for e in range(D.n_edges)})
    res = F.resolutions
    vert, edge = {}, {}
    for g in range(m):
        for w in cube.vertices(N):
            gw = G.act_vertex(g, w)
            cmap = _circle_map(D, res[w], res[gw], powers[g])
            f = {}
            for x in F.F(w):
                y = [None] * len(x)
                for i, ch in enumerate(x):
                    y[cmap[i]] = ch
                f[x] = "".join(y)
            vert[(g, w)] = f
        for u, v in cube.edges(N):
            fu, fv = vert[(g, u)], vert[(g, v)]
            out = {}
            for a in F.edge(u, v).elements:
                x, y = a.split(">")
                out[a] = f"{fu[x]}>{fv[y]}"
            edge[(g, u, v)] = out
    return F, MusytAction(G, vert, edge)


@dataclass
class EquivariantComplex:
    """The F_2 Khovanov complex with the generator permutation of t per bidegree."""

    complex: BigradedComplex
    m: int
    action: dict       # (i, q) -> permutation matrix of t on generators (uint8)

    def t(self, i, q) -> np.ndarray:
        n = len(self.complex.gens.get((i, q), ()))
        return self.action.get((i, q), np.eye(n, dtype=np.uint8))


def equivariant_complex(P: PeriodicDiagram, F=None, phi=None) -> EquivariantComplex:
    if F is None or phi is None:
        F, phi = induced_action(P)
    C = ckh(P.diagram, F)
    G = phi.group
    act = {}
    for key, gens in C.gens.items():
        idx = {g: k for k, g in enumerate(gens)}
        T = np.zeros((len(gens), len(gens)), dtype=np.uint8)
        for k, (w, x) in enumerate(gens):
            img = (G.act_vertex(1, w), phi.phi(1, w)[x])
            T[idx[img], k] = 1
        act[key] = T
    F2 = BigradedComplex(C.gens, {k: linalg.to_f2(v) for k, v in C.diffs.items()}, ring="F2")
    E = EquivariantComplex(F2, P.m, act)
    for (i, q) in C.gens:
        d = F2.d(i, q)
        if d.size and not (linalg.matmul_f2(E.t(i + 1, q), d) == linalg.matmul_f2(d, E.t(i, q))).all():
            raise AssertionError(f"t does not commute with d at {(i, q)}")
    return E


@dataclass
class GroupModule:
    """A finite-dimensional F_2[Z_m]-module given by the matrix of the generator t."""

    m: int
    T: np.ndarray

    def __post_init__(self):
        self.T = linalg.to_f2(self.T)
        n = self.T.shape[0]
        if self.T.shape != (n, n):
            raise ValueError("generator matrix must be square")
        P = np.eye(n, dtype=np.uint8)
        for _ in range(self.m):
            P = linalg.matmul_f2(self.T, P)
        if not (P == np.eye(n, dtype=np.uint8)).all():
            raise ValueError("generator matrix does not satisfy t^m = 1")

    @property
    def dim(self) -> int:
        return self.T.shape[0]

    @staticmethod
    def trivial(m: int) -> "GroupModule":
        return GroupModule(m, np.eye(1, dtype=np.uint8))

    @staticmethod
    def free(m: int, rank: int = 1) -> "GroupModule":
        return GroupModule(m, free_shift(m, rank))

    def power(self, k: int) -> np.ndarray:
        P = np.eye(self.dim, dtype=np.uint8)
        for _ in range(k % self.m):
            P = linalg.matmul_f2(self.T, P)
        return P


def free_shift(m: int, rank: int) -> np.ndarray:
    """t on R^rank, basis e_i t^k at index i*m + k."""
    T = np.zeros((rank * m, rank * m), dtype=np.uint8)
    for i in range(rank):
        for k in range(m):
            T[i * m + (k + 1) % m, i * m + k] = 1
    return T


def _submodule_span(T: np.ndarray, m: int, vecs: list) -> list:
    """F_2 row-echelon ints spanning the R-submodule generated by vecs."""
    rows = []
    for v in vecs:
        w = v.copy()
        for _ in range(m):
            rows.append(w)
            w = linalg.matmul_f2(T, w)
    if not rows:
        return []
    return linalg._echelon(linalg.column_ints(np.array(rows, dtype=np.uint8).T))


def _generators(T: np.ndarray, m: int, basis: np.ndarray) -> list:
    """Greedy R-module generators of the subspace spanned by the columns of basis."""
    gens: list = []
    span: list = []
    cols = [basis[:, k] for k in range(basis.shape[1])]
    cols.sort(key=lambda v: (int(v.sum()), tuple(-int(x) for x in v)))
    target = len(linalg._echelon(linalg.column_ints(basis))) if cols else 0
    for v in cols:
        if len(span) == target:
            break
        iv = linalg.column_ints(v.reshape(-1, 1))[0]
        if linalg.in_span_f2(span, iv):
            continue
        gens.append(v)
        span = _submodule_span(T, m, gens)
    return gens


def _map_from_generators(m: int, T_target: np.ndarray, images: list) -> np.ndarray:
    """Matrix of the R-linear map R^r -> N sending e_i to images[i]."""
    dim = T_target.shape[0]
    M = np.zeros((dim, len(images) * m), dtype=np.uint8)
    for i, v in enumerate(images):
        w = v.copy()
        for k in range(m):
            M[:, i * m + k] = w
            w = linalg.matmul_f2(T_target, w)
    return M


@dataclass
class Resolution:
    """Free resolution ... -> R^{r_1} -> R^{r_0} -> M over R = F_2[Z_m].

    ``ranks[j]`` is r_j; ``maps[0]`` is the augmentation P_0 -> M and
    ``maps[j]`` (j >= 1) is P_j -> P_{j-1}, all as F_2 matrices.
    ``coeffs[j]`` lists, for j >= 1, the image of each generator of P_j as a
    vector in P_{j-1}.
    """

    module: GroupModule
    ranks: list
    maps: list
    coeffs: list
    finite: bool = False      # True when the last map is injective (resolution complete)

    @property
    def length(self) -> int:
        return len(self.ranks) - 1

    def check_exact(self) -> list:
        """Rank verification of exactness at M and at every P_j; returns problems."""
        m = self.module.m
        bad = []
        if linalg.rank_f2(self.maps[0]) != self.module.dim:
            bad.append("augmentation is not surjective")
        for j in range(len(self.ranks)):
            dim_p = self.ranks[j] * m
            kernel = dim_p - (linalg.rank_f2(self.maps[j]) if self.maps[j].size else 0)
            if j + 1 < len(self.maps):
                if linalg.matmul_f2(self.maps[j], self.maps[j + 1]).any():
                    bad.append(f"d o d != 0 at P_{j}")
                image = linalg.rank_f2(self.maps[j + 1]) if self.maps[j + 1].size else 0
                if kernel != image:
                    bad.append(f"not exact at P_{j}: kernel {kernel}, image {image}")
            elif self.finite and kernel:
                bad.append(f"resolution stops at P_{j} with kernel of dimension {kernel}")
        return bad


def module_resolution(M: GroupModule, L: int) -> Resolution:
    if L < 0:
        raise ValueError("length must be >= 0")
    m = M.m
    basis = np.eye(M.dim, dtype=np.uint8)
    gens = _generators(M.T, m, basis)
    ranks = [len(gens)]
    aug = _map_from_generators(m, M.T, gens) if gens else np.zeros((M.dim, 0), dtype=np.uint8)
    maps = [aug]
    coeffs = [gens]
    prev = aug
    finite = False
    for j in range(1, L + 1):
        K = linalg.nullspace_f2(prev)
        if K.shape[1] == 0:
            finite = True
            break
        Tp = free_shift(m, ranks[-1])
        g = _generators(Tp, m, K)
        d = _map_from_generators(m, Tp, g)
        ranks.append(len(g))
        maps.append(d)
        coeffs.append(g)
        prev = d
    else:
        finite = linalg.nullspace_f2(prev).shape[1] == 0
    return Resolution(M, ranks, maps, coeffs, finite)


def _hom_blocks(res: Resolution, Tc: np.ndarray, j: int) -> np.ndarray:
    """Hom_R(P_j, C) -> Hom_R(P_{j+1}, C) in generator coordinates (C^{r_j} -> C^{r_{j+1}})."""
    m = res.module.m
    n = Tc.shape[0]
    rj, rj1 = res.ranks[j], res.ranks[j + 1]
    powers = [np.eye(n, dtype=np.uint8)]
    for _ in range(1, m):
        powers.append(linalg.matmul_f2(Tc, powers[-1]))
    out = np.zeros((n * rj1, n * rj), dtype=np.uint8)
    for l, v in enumerate(res.coeffs[j + 1]):
        for k in range(rj):
            blk = np.zeros((n, n), dtype=np.uint8)
            for p in range(m):
                if v[k * m + p]:
                    blk ^= powers[p]
            out[l * n:(l + 1) * n, k * n:(k + 1) * n] = blk
    return out


@dataclass
class EKhResult:
    fine: dict          # (j, i, q) -> dim of the j-th graded piece of H^{i+j}
    table: dict         # (j, q) -> sum over i
    total: dict         # (n, q) -> dim H^n of the total complex
    resolution: Resolution

    def to_json(self) -> dict:
        return {
            "ekh": [{"j": j, "q": q, "dim": d} for (j, q), d in sorted(self.table.items())],
            "fine": [{"j": j, "i": i, "q": q, "dim": d} for (j, i, q), d in sorted(self.fine.items())],
            "total": [{"n": n, "q": q, "dim": d} for (n, q), d in sorted(self.total.items())],
            "resolution_ranks": self.resolution.ranks,
        }


def _total_complex(E: EquivariantComplex, res: Resolution, q: int, jtop: int, hom) -> tuple:
    """Tot^n = sum_j Hom(P_j, C^{n-j, q}); returns (blocks per n, differential per n)."""
    C = E.complex
    irange = [i for i in C.i_values() if C.gens.get((i, q))]
    imin, imax = min(irange), max(irange)
    blocks: dict = {}
    for n in range(imin, imax + jtop + 1):
        bl = []
        for j in range(0, min(jtop, len(res.ranks) - 1) + 1):
            i = n - j
            dim_c = len(C.gens.get((i, q), ()))
            size = hom.dim(j, i, q, dim_c)
            if size:
                bl.append((j, i, size))
        blocks[n] = bl
    diffs = {}
    for n, bl in blocks.items():
        tgt = blocks.get(n + 1, [])
        rows = sum(s for _, _, s in tgt)
        cols = sum(s for _, _, s in bl)
        D = np.zeros((rows, cols), dtype=np.uint8)
        roff = {}
        o = 0
        for j, i, s in tgt:
            roff[(j, i)] = o
            o += s
        c0 = 0
        for j, i, s in bl:
            if (j, i + 1) in roff:
                blk = hom.d_c(j, i, q)
                r = roff[(j, i + 1)]
                D[r:r + blk.shape[0], c0:c0 + s] ^= blk
            if (j + 1, i) in roff:
                blk = hom.d_p(j, i, q)
                r = roff[(j + 1, i)]
                D[r:r + blk.shape[0], c0:c0 + s] ^= blk
            c0 += s
        diffs[n] = D
    return blocks, diffs


class _GeneratorHom:
    """Hom_R(P_j, C^i) identified with (C^i)^{r_j}."""

    def __init__(self, E: EquivariantComplex, res: Resolution):
        self.E, self.res = E, res

    def dim(self, j, i, q, dim_c):
        return dim_c * self.res.ranks[j]

    def d_c(self, j, i, q):
        d = self.E.complex.d(i, q) % 2
        r = self.res.ranks[j]
        return np.kron(np.eye(r, dtype=np.int64), d).astype(np.uint8) % 2

    def d_p(self, j, i, q):
        return _hom_blocks(self.res, self.E.t(i, q), j)


class _DenseHom:
    """Hom_R(P_j, C^i) as F_2-linear maps X: P_j -> C^i with T_C X = X T_P (oracle path)."""

    def __init__(self, E: EquivariantComplex, res: Resolution):
        self.E, self.res = E, res
        self.cache: dict = {}

    def basis(self, j, i, q):
        key = (j, i, q)
        if key not in self.cache:
            m = self.res.module.m
            n = len(self.E.complex.gens.get((i, q), ()))
            p = self.res.ranks[j] * m
            Tc = self.E.t(i, q).astype(np.int64)
            Tp = free_shift(m, self.res.ranks[j]).astype(np.int64)
            # vec(T_C X - X T_P) = (I (x) T_C - T_P^T (x) I) vec(X), column-major vec
            A = (np.kron(np.eye(p, dtype=np.int64), Tc) + np.kron(Tp.T, np.eye(n, dtype=np.int64))) % 2
            self.cache[key] = linalg.nullspace_f2(A) if n * p else np.zeros((0, 0), dtype=np.uint8)
        return self.cache[key]

    def dim(self, j, i, q, dim_c):
        if dim_c == 0 or j >= len(self.res.ranks):
            return 0
        return self.basis(j, i, q).shape[1]

    def _express(self, target_basis, vecs):
        # solve target_basis @ y = v over F_2 for each column v
        cols = []
        Bm = target_basis
        for v in vecs.T:
            aug = np.concatenate([Bm, v.reshape(-1, 1)], axis=1)
            ns = linalg.nullspace_f2(aug)
            sol = None
            for c in ns.T:
                if c[-1]:
                    sol = c[:-1]
                    break
            if sol is None:
                raise AssertionError("image is not an equivariant map")
            cols.append(sol)
        return np.array(cols, dtype=np.uint8).T if cols else np.zeros((Bm.shape[1], 0), dtype=np.uint8)

    def d_c(self, j, i, q):
        m = self.res.module.m
        Bs = self.basis(j, i, q)
        Bt = self.basis(j, i + 1, q)
        n0 = len(self.E.complex.gens.get((i, q), ()))
        n1 = len(self.E.complex.gens.get((i + 1, q), ()))
        p = self.res.ranks[j] * m
        d = self.E.complex.d(i, q).astype(np.int64) % 2
        imgs = []
        for x in Bs.T:
            X = x.reshape((n0, p), order="F").astype(np.int64)
            imgs.append(((d @ X) % 2).reshape(-1, order="F"))
        V = np.array(imgs, dtype=np.uint8).T if imgs else np.zeros((n1 * p, 0), dtype=np.uint8)
        return self._express(Bt, V)

    def d_p(self, j, i, q):
        m = self.res.module.m
        Bs = self.basis(j, i, q)
        Bt = self.basis(j + 1, i, q)
        n = len(self.E.complex.gens.get((i, q), ()))
        p0 = self.res.ranks[j] * m
        p1 = self.res.ranks[j + 1] * m
        dP = self.res.maps[j + 1].astype(np.int64)
        imgs = []
        for x in Bs.T:
            X = x.reshape((n, p0), order="F").astype(np.int64)
            imgs.append(((X @ dP) % 2).reshape(-1, order="F"))
        V = np.array(imgs, dtype=np.uint8).T if imgs else np.zeros((n * p1, 0), dtype=np.uint8)
        return self._express(Bt, V)


def _filtered_cohomology(blocks, diffs, jmax) -> tuple:
    fine: dict = {}
    total: dict = {}
    for n, bl in blocks.items():
        D = diffs[n]
        Din = diffs.get(n - 1)
        dim = sum(s for _, _, s in bl)
        if dim == 0:
            continue
        B = Din if Din is not None and Din.size else np.zeros((dim, 0), dtype=np.uint8)
        rank_b = linalg.rank_f2(B) if B.size else 0
        rank_d = linalg.rank_f2(D) if D.size else 0
        h = dim - rank_d - rank_b
        if h:
            total[n] = h
        prev = None
        # F^p: blocks with resolution degree >= p
        js = sorted({j for j, _, _ in bl})
        offs = []
        o = 0
        for j, i, s in bl:
            offs.append((j, i, o, s))
            o += s
        dims = {}
        for p in range(0, max(js) + 2):
            cols = [c for j, i, o0, s in offs if j >= p for c in range(o0, o0 + s)]
            if not cols:
                dims[p] = 0
                continue
            sub = D[:, cols] if D.size else np.zeros((0, len(cols)), dtype=np.uint8)
            K = linalg.nullspace_f2(sub) if sub.shape[0] else np.eye(len(cols), dtype=np.uint8)
            Z = np.zeros((dim, K.shape[1]), dtype=np.uint8)
            Z[cols, :] = K
            both = np.concatenate([Z, B], axis=1) if B.size else Z
            dims[p] = (linalg.rank_f2(both) if both.size else 0) - rank_b
        for p in range(0, max(js) + 1):
            g = dims[p] - dims.get(p + 1, 0)
            if g and p <= jmax:
                fine[(p, n - p)] = g
    return fine, total


def ekh(P: PeriodicDiagram, M: GroupModule, jmax: int, *, oracle: bool = False,
        E: Optional[EquivariantComplex] = None, L: Optional[int] = None) -> EKhResult:
    """EKh^{j,q}: the j-th resolution-degree graded piece of hyper-Ext(M, CKh^{*,q}).

    The total-degree hyper-Ext dimensions are reported alongside.
    """
    if jmax < 0:
        raise ValueError("jmax must be >= 0")
    if M.m != P.m:
        raise ValueError("module and diagram have different group orders")
    if E is None:
        E = equivariant_complex(P)
    C = E.complex
    i_vals = [i for (i, _), g in C.gens.items() if g]
    span = (max(i_vals) - min(i_vals)) if i_vals else 0
    if L is None:
        L = jmax + span + 2
    res = module_resolution(M, L)
    fine_all: dict = {}
    total_all: dict = {}
    hom = _DenseHom(E, res) if oracle else _GeneratorHom(E, res)
    jtop = min(L, res.length)
    for q in C.q_values():
        if not any(C.gens.get((i, q)) for i in C.i_values()):
            continue
        blocks, diffs = _total_complex(E, res, q, jtop, hom)
        fine, total = _filtered_cohomology(blocks, diffs, jmax)
        # only degrees whose cohomology is unaffected by truncation
        imin = min(i for i in C.i_values() if C.gens.get((i, q)))
        for (p, i), d in fine.items():
            if p + i <= jtop + imin - 1 or res.finite:
                fine_all[(p, i, q)] = d
        for n, d in total.items():
            if n <= jtop + imin - 1 or res.finite:
                total_all[(n, q)] = d
    table: dict = {}
    for (j, i, q), d in fine_all.items():
        if j <= jmax:
            table[(j, q)] = table.get((j, q), 0) + d
    return EKhResult(dict(sorted(fine_all.items())), dict(sorted(table.items())),
                     dict(sorted(total_all.items())), res)


def kh_f2_by_q(P: PeriodicDiagram) -> dict:
    """q -> total dimension of Kh^{*,q}(D; F_2)."""
    H = homology(ckh(P.diagram), "F2")
    out: dict = {}
    for (i, q), d in H.items():
        out[q] = out.get(q, 0) + d
    return dict(sorted(out.items()))
