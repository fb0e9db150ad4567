"""Acceptance criteria 1-9, one PASS/FAIL line each."""

import math
import random
import time

import numpy as np
import pytest

from khoburn import actions as Ac
from khoburn import burnside as B
from khoburn import corpus, cube, linalg
from khoburn import flowcat as Fc
from khoburn import khovanov as K
from khoburn import periodic as Pe
from khoburn import realize as Re
from khoburn.verify import periodic_setup

from oracles import assert_permutohedral, surjections

CORPUS = dict(sorted(corpus.diagrams().items()))
PERIODIC = dict(sorted(corpus.periodic_diagrams().items()))
RANDOM_INSTANCES = 300


@pytest.fixture(scope="module")
def setups():
    return {name: periodic_setup(data) for name, data in PERIODIC.items()}


def _subgroup_indices(m):
    return [i for i in range(1, m + 1) if m % i == 0]


def test_criterion_1_d_squared_zero(criterion):
    t0 = time.perf_counter()
    bad = []
    for name, data in CORPUS.items():
        C = K.ckh(K.parse_pd(data))
        for (i, q), M in C.diffs.items():
            nxt = C.diffs.get((i + 1, q))
            if nxt is not None and (nxt.astype(np.int64) @ M.astype(np.int64)).any():
                bad.append(name)
    dt = time.perf_counter() - t0
    criterion(1, not bad and dt < 60, f"{len(CORPUS)} diagrams, d.d = 0 over Z, {dt:.1f}s {bad or ''}")


def test_criterion_2_euler_audit(criterion):
    bad = []
    for name, data in CORPUS.items():
        D = K.parse_pd(data)
        if K.euler_from_homology(K.homology(K.ckh(D), "Q")) != K.state_sum(D):
            bad.append(name)
    criterion(2, not bad, f"graded Euler characteristic = state sum on {len(CORPUS)} diagrams {bad or ''}")


def _mutate_square(F):
    """Swap the images of two composites with equal endpoints in one 2-face."""
    for key, sq in sorted(F.squares.items()):
        u, v, vp, w = key
        fib: dict = {}
        for b, a in sq:
            fib.setdefault((F.edge(u, v).s[a], F.edge(v, w).t[b]), []).append((b, a))
        pair = next((x for x in fib.values() if len(x) == 2), None)
        if pair:
            x, y = pair
            sq = dict(sq)
            sq[x], sq[y] = sq[y], sq[x]
            squares = {k: s for k, s in F.squares.items() if k not in (key, (u, vp, v, w))}
            squares[key] = sq
            return B.BurnsideFunctor(F.n, F.vertex_sets, F.edges, squares)
    return None


def test_criterion_3_hexagons(criterion):
    bad = [name for name, data in CORPUS.items() if not B.validate_functor(K.khovanov_functor(K.parse_pd(data))).ok]
    mutant = _mutate_square(K.khovanov_functor(K.parse_pd(CORPUS["trefoil_3braid_p2"])))
    caught = mutant is not None and not B.validate_functor(mutant).ok
    criterion(3, not bad and caught, f"hexagons commute on {len(CORPUS)} functors, ladybug mutation detected={caught}")


def _roundtrips(F, phi, rng):
    psi = Ac.musyt_to_sz(F, phi)
    if not (Ac.validate_musyt(F, phi).ok and Ac.validate_sz(F, psi).ok):
        return False
    if not Ac.musyt_equal(Ac.sz_to_musyt(F, psi), phi):
        return False
    psi2 = Ac.random_sz_from_musyt(rng, F, phi)
    if not (Ac.validate_sz(F, psi2).ok and Ac.roundtrip_sz(F, psi2).ok):
        return False
    C = Fc.burnside_to_flowcat(F, phi)
    cnt = iter(range(1 << 30))
    cmap = {k: {c: f"c{next(cnt)}" for c in cs} for k, cs in sorted(C.components.items())}
    C = Fc.relabel_flowcat(C, {x: x for x in C.objects}, cmap)
    D = Fc.burnside_to_flowcat(*Fc.flowcat_to_burnside(C)[:2])
    iso = Fc.flowcat_natural_iso(C, D)
    return iso.ok and Fc.check_flowcat_iso(C, D, iso.objects, iso.components).ok


def test_criterion_4_roundtrips(criterion, setups):
    t0 = time.perf_counter()
    bad = []
    for k in range(RANDOM_INSTANCES):
        rng = random.Random(f"acceptance:{k}")
        m = (2, 3)[k % 2]
        F, phi = Ac.random_musyt_instance(rng, m)
        assert F.n <= 3 and max((len(x) for x in F.vertex_sets.values()), default=0) <= 3
        if not _roundtrips(F, phi, rng):
            bad.append(f"random-{k}")
    for name, (_, F, phi) in setups.items():
        if not _roundtrips(F, phi, random.Random(name)):
            bad.append(name)
    dt = time.perf_counter() - t0
    criterion(4, not bad and dt < 120,
              f"{RANDOM_INSTANCES} random + {len(setups)} corpus instances, {dt:.1f}s {bad[:5] or ''}")


def test_criterion_5_realizations(criterion, setups):
    t0 = time.perf_counter()
    bad = []
    for name, (P, F, phi) in setups.items():
        C = Fc.burnside_to_flowcat(F, phi)
        r = Re.compare_realizations(Re.hocolim_cells(F, Ac.musyt_to_sz(F, phi)), Re.flowcat_cells(C))
        if not (r.ok and r.f2_equal and r.equivariant):
            bad.append(name)
        for index in _subgroup_indices(P.m):
            rep = Re.fixed_cell_comparison(F, phi, index, C)
            if not all(c.ok and c.f2_equal and c.equivariant for c in rep.comparisons.values()):
                bad.append(f"{name}/H{index}")
    dt = time.perf_counter() - t0
    criterion(5, not bad and dt < 60, f"+-1 diagonal iso on {len(setups)} diagrams and all subgroups, {dt:.1f}s {bad or ''}")


def test_criterion_6_action_axioms(criterion, setups):
    bad = []
    for name, (P, F, phi) in setups.items():
        if not Ac.validate_musyt(F, phi).ok or not Ac.validate_sz(F, Ac.musyt_to_sz(F, phi)).ok:
            bad.append(name)
    criterion(6, not bad, f"MD-1..5 and EB-1/2 on {len(setups)} diagrams {bad or ''}")


def _rank(M):
    return linalg.rank_f2(M) if M.size else 0


def _resolution_exact(M):
    res = Pe.module_resolution(M, 6)
    if _rank(res.maps[0]) != M.dim:
        return False
    for j in range(len(res.maps) - 1):
        dj, dj1 = res.maps[j], res.maps[j + 1]
        if res.ranks[j] * M.m - _rank(dj) != _rank(dj1):
            return False
    return not res.finite or res.ranks[-1] * M.m == _rank(res.maps[-1])


def test_criterion_7_ekh_sanity(criterion, setups):
    bad = []
    for name, (P, F, phi) in setups.items():
        Pn = Pe.normalize(P)
        E = Pe.equivariant_complex(P, F, phi)
        table = Pe.ekh(Pn, Pe.GroupModule.free(P.m), 4, E=E).table
        j0 = {q: d for (j, q), d in table.items() if j == 0}
        if j0 != Pe.kh_f2_by_q(Pn) or any(d for (j, q), d in table.items() if 1 <= j <= 4):
            bad.append(name)
    modules = [Pe.GroupModule.trivial(2), Pe.GroupModule.trivial(3), Pe.GroupModule.free(2),
               Pe.GroupModule.free(3), Pe.GroupModule(2, np.array([[1, 1], [0, 1]]))]
    inexact = [k for k, M in enumerate(modules) if not _resolution_exact(M)]
    criterion(7, not bad and not inexact, f"free-module EKh = Kh_F2 on {len(setups)} diagrams, resolutions exact to 6 {bad or ''}")


def test_criterion_8_permutohedra(criterion):
    ok = True
    for r in range(1, 6):
        P = cube.face_poset((1,) * r, (0,) * r)
        ok &= P.f_vector() == {r - k: surjections(r, k) for k in range(r, 0, -1)}
        ok &= P.f_vector()[0] == math.factorial(r)
    ok &= cube.face_poset((1, 1, 1), (0, 0, 0)).f_vector() == {0: 6, 1: 6, 2: 1}
    count = 0
    for m in (2, 3):
        for n in range(1, 4):
            if n * m > 6:
                continue
            a = cube.CyclicAction(m, n)
            for index in _subgroup_indices(m):
                H = a.subgroup(index)
                fv = cube.fixed_subcube(a, index).fixed_vertices()
                for u in fv:
                    for v in fv:
                        if u == v or not cube.geq(u, v):
                            continue
                        FP = cube.fixed_face_poset(u, v, a, index)
                        orbits = [tuple(o) for o in a.coordinate_orbits(H) if u[o[0]] and not v[o[0]]]
                        which = {i: k for k, o in enumerate(orbits) for i in o}
                        assert_permutohedral(
                            FP.chains,
                            lambda c: tuple(frozenset(which[i] for i in b) for b in cube.chain_to_partition(c)),
                            len(orbits))
                        maximal = [c for c in FP.chains if len(c) == len(orbits) + 1]
                        ok &= len(maximal) == math.factorial(len(orbits))
                        count += 1
    criterion(8, ok and count > 0, f"f-vectors r<=5, {count} fixed intervals are lower permutohedra")


def test_criterion_9_fixed_point_functors(criterion, setups):
    bad = []
    for name, (P, F, phi) in setups.items():
        for index in _subgroup_indices(P.m):
            FH, _ = Ac.fixed_point_functor(F, phi, index)
            rep = Re.fixed_cell_comparison(F, phi, index)
            main = rep.comparisons["fixed_functor~hocolim_fixed"]
            if not (B.validate_functor(FH).ok and rep.valid_functor and main.f2_equal):
                bad.append(f"{name}/H{index}")
    criterion(9, not bad, f"F^H valid and F2 models equal for every subgroup of {len(setups)} diagrams {bad or ''}")
