"""Verification suites shared by the command line and the test-suite.

Every suite returns a JSON-ready dict with an ``ok`` flag and per-case
entries sorted by case name, so that reports are reproducible byte for byte.
"""

from __future__ import annotations

import os
import random
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Optional

from . import actions as Ac
from . import burnside as Bu
from . import corpus
from . import flowcat as Fc
from . import khovanov as Kh
from . import periodic as Pe
from . import realize as Re

SUITES = ("functor", "musyt", "sz", "roundtrips", "realize", "fixed")


def worker_count() -> int:
    raw = os.environ.get("KHOBURN_THREADS", "")
    try:
        k = int(raw)
    except ValueError:
        k = 1
    return max(1, min(k, os.cpu_count() or 1))


def parallel_map(fn: Callable, items: list) -> list:
    """Map in a process pool capped by KHOBURN_THREADS; order of results follows ``items``."""
    k = worker_count()
    if k <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=k) as ex:
        return list(ex.map(fn, items))


class PeriodicityError(ValueError):
    def __init__(self, failures):
        super().__init__("; ".join(str(f) for f in failures))
        self.failures = failures


def periodic_setup(data):
    """Parse, validate and normalize; returns (P, F, phi); raises PeriodicityError."""
    P = Pe.parse_periodic(data)
    rep = Pe.validate_periodic(P)
    if not rep.ok:
        raise PeriodicityError(rep.failures)
    P = Pe.normalize(P, rep)
    F, phi = Pe.induced_action(P)
    return P, F, phi


def _inputs(data: Optional[dict], periodic_only: bool) -> list:
    if data is not None:
        return [("input", data)]
    src = corpus.periodic_diagrams() if periodic_only else corpus.diagrams()
    return sorted(src.items())


def _case_functor(item) -> tuple:
    name, data = item
    if "vertex_sets" in data:
        F = Bu.functor_from_json(data)
    else:
        F = Kh.khovanov_functor(Kh.parse_pd(data))
    rep = Bu.validate_functor(F)
    return name, rep.to_json()


def _case_musyt(item) -> tuple:
    name, data = item
    _, F, phi = periodic_setup(data)
    return name, Ac.validate_musyt(F, phi).to_json()


def _case_sz(item) -> tuple:
    name, data = item
    _, F, phi = periodic_setup(data)
    psi = Ac.musyt_to_sz(F, phi)
    rep = Ac.validate_sz(F, psi).to_json()
    back = Ac.sz_to_musyt(F, psi)
    rep["musyt_roundtrip_identity"] = Ac.musyt_equal(back, phi)
    rep["ok"] = rep["ok"] and rep["musyt_roundtrip_identity"]
    return name, rep


def roundtrip_case(F: Bu.BurnsideFunctor, phi: Ac.MusytAction, rng: random.Random) -> dict:
    """All three round trips on one (F, phi)."""
    out = {}
    base = Ac.validate_musyt(F, phi)
    out["musyt_valid"] = base.ok
    psi = Ac.musyt_to_sz(F, phi)
    out["sz_valid"] = Ac.validate_sz(F, psi).ok
    out["musyt_sz_musyt_identity"] = Ac.musyt_equal(Ac.sz_to_musyt(F, psi), phi)
    psi2 = Ac.random_sz_from_musyt(rng, F, phi)
    out["random_sz_valid"] = Ac.validate_sz(F, psi2).ok
    w = Ac.roundtrip_sz(F, psi2)
    out["sz_musyt_sz_witness"] = w.ok
    C = Fc.burnside_to_flowcat(F, phi)
    out["flowcat_valid"] = Fc.validate_flowcat(C).ok
    # opaque component names so the comparison is not name matching
    cnt = iter(range(1 << 30))
    cmap = {k: {c: f"c{next(cnt)}" for c in cs} for k, cs in sorted(C.components.items())}
    C2 = Fc.relabel_flowcat(C, {x: x for x in C.objects}, cmap)
    F2, phi2, _ = Fc.flowcat_to_burnside(C2)
    D = Fc.burnside_to_flowcat(F2, phi2)
    out["bps_musyt_bps_witness"] = Fc.flowcat_natural_iso(C2, D).ok
    out["ok"] = all(out.values())
    return out


def _case_roundtrip_random(arg) -> tuple:
    seed, k = arg
    rng = random.Random(f"{seed}:{k}")
    m = rng.choice([2, 3])
    F, phi = Ac.random_musyt_instance(rng, m)
    res = roundtrip_case(F, phi, rng)
    res.update(m=m, n=F.n, max_size=max((len(x) for x in F.vertex_sets.values()), default=0))
    return f"random-{k:04d}", res


def _case_roundtrip_periodic(item) -> tuple:
    name, data = item
    _, F, phi = periodic_setup(data)
    return name, roundtrip_case(F, phi, random.Random(name))


def _case_realize(item) -> tuple:
    name, data = item
    _, F, phi = periodic_setup(data)
    bps = Re.flowcat_cells(Fc.burnside_to_flowcat(F, phi))
    sz = Re.hocolim_cells(F, Ac.musyt_to_sz(F, phi))
    cmp = Re.compare_realizations(sz, bps)
    res = cmp.to_json()
    res["n_cells"] = len(bps.cells)
    res["d_squared_zero"] = bps.d_squared_zero() and sz.d_squared_zero()
    res["ok"] = res["ok"] and res["f2_equal"] and res["d_squared_zero"]
    return name, res


def _case_fixed(item) -> tuple:
    name, data = item
    P, F, phi = periodic_setup(data)
    C = Fc.burnside_to_flowcat(F, phi)
    per = {}
    for index in range(1, P.m + 1):
        if P.m % index == 0:
            per[str(index)] = Re.fixed_cell_comparison(F, phi, index, C).to_json()
    return name, {"ok": all(r["ok"] for r in per.values()), "subgroups": per}


def run_suite(suite: str, data: Optional[dict] = None, seed: int = 0, count: int = 200) -> dict:
    """Run one suite on an input (or the bundled corpus when ``data`` is None)."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    if suite == "functor":
        cases = parallel_map(_case_functor, _inputs(data, False))
    elif suite == "musyt":
        cases = parallel_map(_case_musyt, _inputs(data, True))
    elif suite == "sz":
        cases = parallel_map(_case_sz, _inputs(data, True))
    elif suite == "roundtrips":
        cases = parallel_map(_case_roundtrip_periodic, _inputs(data, True))
        if data is None:
            cases += parallel_map(_case_roundtrip_random, [(seed, k) for k in range(count)])
    elif suite == "realize":
        cases = parallel_map(_case_realize, _inputs(data, True))
    else:
        cases = parallel_map(_case_fixed, _inputs(data, True))
    cases = sorted(cases)
    return {"suite": suite, "seed": seed, "ok": all(c["ok"] for _, c in cases), "cases": dict(cases)}
