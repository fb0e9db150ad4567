"""Bundled diagrams and small generators (braid closures, symmetry inference)."""

from __future__ import annotations

import json
from importlib import resources
from typing import Optional


def braid_closure_pd(word, strands: int) -> list:
    """PD code of the closure of a braid word.

    ``word`` lists generators as nonzero ints: +i is sigma_i (strand i over
    strand i+1 as they move up), -i its inverse.  Edge labels start at 1.
    Strands that meet no crossing are dropped; the returned "components"
    count in :func:`braid_closure` accounts for them.
    """
    cur = list(range(1, strands + 1))
    nxt = strands + 1
    pd = []
    for g in word:
        i = abs(g) - 1
        if not 0 <= i < strands - 1:
            raise ValueError(f"generator {g} out of range for {strands} strands")
        a, b = cur[i], cur[i + 1]
        c, d = nxt, nxt + 1
        nxt += 2
        pd.append([b, d, c, a] if g > 0 else [a, b, d, c])
        cur[i], cur[i + 1] = c, d
    # close up: the top label on each position is glued to the bottom label
    rename = {}
    for i in range(strands):
        rename[cur[i]] = i + 1
    pd = [[rename.get(e, e) for e in x] for x in pd]
    used = sorted({e for x in pd for e in x})
    dense = {e: k + 1 for k, e in enumerate(used)}
    return [[dense[e] for e in x] for x in pd]


def _closure_components(word, strands: int) -> int:
    perm = list(range(strands))
    for g in word:
        i = abs(g) - 1
        perm[i], perm[i + 1] = perm[i + 1], perm[i]
    seen, comps = set(), 0
    for s in range(strands):
        if s in seen:
            continue
        comps += 1
        while s not in seen:
            seen.add(s)
            s = perm[s]
    return comps


def braid_closure(word, strands: int) -> dict:
    return {"pd": braid_closure_pd(word, strands), "components": _closure_components(word, strands)}


def infer_sigma_edges(pd, sigma_crossings) -> Optional[dict]:
    """Edge-label permutation induced by a crossing permutation, or None.

    Each crossing tuple must go to its image with the corner positions
    shifted by 0 or 2 (a rotation preserves the counterclockwise order and
    the under-strand; the starting corner may move to the other incoming
    end only when that end is also an under-strand end, i.e. never, so in
    practice the shift is 0).  Both shifts are tried.
    """
    for shift in (0, 2):
        sig: dict = {}
        ok = True
        for c, x in enumerate(pd):
            y = pd[sigma_crossings[c]]
            for p in range(4):
                e, f = x[p], y[(p + shift) % 4]
                if sig.setdefault(e, f) != f:
                    ok = False
                    break
            if not ok:
                break
        if ok and sorted(sig.values(), key=str) == sorted(sig, key=str):
            return sig
    return None


def periodic_braid_closure(beta, strands: int, m: int) -> dict:
    """The closure of beta^m with its rotation symmetry of order m."""
    word = list(beta) * m
    d = braid_closure(word, strands)
    L = len(beta)
    sc = [(c + L) % len(word) for c in range(len(word))]
    se = infer_sigma_edges(d["pd"], sc)
    if se is None:
        raise ValueError("closure rotation did not induce an edge permutation")
    d.update(sigma_crossings=sc, sigma_edges=[[k, v] for k, v in sorted(se.items())], m=m)
    return d


def _load(kind: str) -> dict:
    base = resources.files("khoburn") / "corpus"
    out = {}
    for f in sorted(base.iterdir(), key=lambda p: p.name):
        if f.name.endswith(".json"):
            data = json.loads(f.read_text())
            if data.get("kind", "diagram") == kind:
                out[f.name[:-5]] = data
    return out


def diagrams() -> dict:
    """Every bundled diagram (periodic ones included), keyed by name."""
    d = _load("diagram")
    for k, v in _load("periodic").items():
        d[k] = v
    return dict(sorted(d.items()))


def periodic_diagrams() -> dict:
    return _load("periodic")
