"""Command line interface.

Exit codes: 0 success, 2 input/parse error, 3 internal invariant or
verification failure, 4 periodicity validation failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import actions as Ac
from . import burnside as Bu
from . import cube
from . import flowcat as Fc
from . import khovanov as Kh
from . import periodic as Pe
from . import realize as Re
from . import verify as Ve

EXIT_OK, EXIT_PARSE, EXIT_INVARIANT, EXIT_PERIODIC = 0, 2, 3, 4


class CLIError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


@dataclass
class RunConfig:
    command: str
    inputs: list
    coeffs: str = "z"
    jmax: int = 4
    index: Optional[int] = None
    fmt: str = "table"
    seed: int = 0
    figure: Optional[str] = None


def _read_json(path: str):
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path) as fh:
                text = fh.read()
    except OSError as exc:
        raise CLIError(EXIT_PARSE, f"cannot read {path}: {exc}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CLIError(EXIT_PARSE, f"{path}: invalid JSON: {exc}")


def _parse_diagram(data) -> Kh.LinkDiagram:
    try:
        return Kh.parse_pd(data)
    except Kh.PDError as exc:
        raise CLIError(EXIT_PARSE, f"PD parse error: {exc}")


def _periodic(data):
    try:
        return Ve.periodic_setup(data)
    except Kh.PDError as exc:
        raise CLIError(EXIT_PARSE, f"PD parse error: {exc}")
    except Ve.PeriodicityError as exc:
        raise CLIError(EXIT_PERIODIC, f"periodicity validation failed: {exc}")


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def _group_str(entry) -> str:
    if isinstance(entry, int):
        return str(entry)
    parts = []
    if entry["rank"]:
        parts.append("Z" if entry["rank"] == 1 else f"Z^{entry['rank']}")
    for t in entry["torsion"]:
        parts.append(f"Z/{t}")
    return "+".join(parts) or "0"


def _poly_str(p: dict) -> str:
    return " ".join(f"{c:+d}q^{e}" for e, c in sorted(p.items())) or "0"


def _table(header: list, rows: list) -> str:
    lines = ["\t".join(header)]
    lines += ["\t".join(str(x) for x in r) for r in rows]
    return "\n".join(lines)


def cmd_kh(cfg: RunConfig) -> tuple:
    D = _parse_diagram(_read_json(cfg.inputs[0]))
    C = Kh.ckh(D)
    if not C.d_squared_zero():
        raise CLIError(EXIT_INVARIANT, "d o d != 0")
    coeffs = {"z": "Z", "f2": "F2", "q": "Q"}[cfg.coeffs]
    H = Kh.homology(C, coeffs)
    Hq = H if coeffs != "Z" else Kh.homology(C, "Q")
    euler = Kh.euler_from_homology(Hq)
    ss = Kh.state_sum(D)
    audit = euler == ss
    if not audit:
        raise CLIError(EXIT_INVARIANT, f"Euler audit failed: {euler} != {ss}")
    if cfg.figure:
        from .plotting import kh_figure

        kh_figure({k: _group_str(v) for k, v in H.items()}, cfg.figure, f"Kh ({coeffs})")
    if cfg.fmt == "json":
        rows = []
        for (i, q), v in sorted(H.items()):
            e = {"i": i, "q": q}
            e.update(v if isinstance(v, dict) else {"dim": v})
            rows.append(e)
        return EXIT_OK, _dump({"coeffs": coeffs, "homology": rows,
                               "state_sum": {str(k): v for k, v in ss.items()}, "euler_audit": audit})
    body = _table(["i", "q", "H"], [(i, q, _group_str(v)) for (i, q), v in sorted(H.items())])
    return EXIT_OK, f"{body}\n# state sum: {_poly_str(ss)}\n# euler audit: {'pass' if audit else 'FAIL'}"


def _module(name: str, m: int) -> Pe.GroupModule:
    if name == "trivial":
        return Pe.GroupModule.trivial(m)
    if name == "free":
        return Pe.GroupModule.free(m)
    data = _read_json(name)
    try:
        M = Pe.GroupModule(int(data["m"]), np.array(data["T"], dtype=np.int64))
    except (KeyError, TypeError, ValueError) as exc:
        raise CLIError(EXIT_PARSE, f"bad module file: {exc}")
    if M.m != m:
        raise CLIError(EXIT_PARSE, f"module has m={M.m}, diagram has m={m}")
    return M


def cmd_ekh(cfg: RunConfig, module: str) -> tuple:
    P, F, phi = _periodic(_read_json(cfg.inputs[0]))
    M = _module(module, P.m)
    E = Pe.equivariant_complex(P, F, phi)
    res = Pe.ekh(P, M, cfg.jmax, E=E)
    kh = Pe.kh_f2_by_q(P)
    free = Pe.ekh(P, Pe.GroupModule.free(P.m), 0, E=E).table
    sanity = all(free.get((0, q), 0) == d for q, d in kh.items()) and len(free) == len(kh)
    if not sanity:
        raise CLIError(EXIT_INVARIANT, "free-module EKh differs from Kh(F2)")
    if cfg.figure:
        from .plotting import ekh_figure

        ekh_figure(res.table, cfg.figure, f"EKh (M={module}, jmax={cfg.jmax})")
    if cfg.fmt == "json":
        out = res.to_json()
        out.update(m=P.m, module=module, jmax=cfg.jmax,
                   kh_f2=[{"q": q, "dim": d} for q, d in kh.items()], free_sanity=sanity)
        return EXIT_OK, _dump(out)
    qs = sorted({q for _, q in res.table} | set(kh))
    header = ["q"] + [f"j={j}" for j in range(cfg.jmax + 1)] + ["Kh_F2(free j=0)"]
    rows = [[q] + [res.table.get((j, q), 0) for j in range(cfg.jmax + 1)] + [kh.get(q, 0)] for q in qs]
    return EXIT_OK, _table(header, rows) + f"\n# free-module sanity: {'pass' if sanity else 'FAIL'}"


def cmd_functor_dump(cfg: RunConfig) -> tuple:
    data = _read_json(cfg.inputs[0])
    if "sigma_crossings" in data:
        P, F, phi = _periodic(data)
        out = {"functor": Bu.functor_to_json(F), "action": Ac.musyt_to_json(phi), "m": P.m}
    else:
        F = Kh.khovanov_functor(_parse_diagram(data))
        out = {"functor": Bu.functor_to_json(F)}
    return EXIT_OK, _dump(out)


def cmd_verify(cfg: RunConfig, suite: str, count: int) -> tuple:
    data = _read_json(cfg.inputs[0]) if cfg.inputs else None
    if data is not None and suite == "functor" and "vertex_sets" not in data:
        _parse_diagram(data)
    try:
        rep = Ve.run_suite(suite, data, cfg.seed, count)
    except Kh.PDError as exc:
        raise CLIError(EXIT_PARSE, f"PD parse error: {exc}")
    except Ve.PeriodicityError as exc:
        raise CLIError(EXIT_PERIODIC, f"periodicity validation failed: {exc}")
    except (KeyError, TypeError, ValueError) as exc:
        raise CLIError(EXIT_PARSE, f"bad input: {exc}")
    code = EXIT_OK if rep["ok"] else EXIT_INVARIANT
    if cfg.fmt == "json":
        return code, _dump(rep)
    rows = [(name, "pass" if c["ok"] else "FAIL") for name, c in rep["cases"].items()]
    return code, _table(["case", "result"], rows) + f"\n# {suite}: {'pass' if rep['ok'] else 'FAIL'}"


def cmd_realize_compare(cfg: RunConfig, dump: bool) -> tuple:
    P, F, phi = _periodic(_read_json(cfg.inputs[0]))
    C = Fc.burnside_to_flowcat(F, phi)
    out: dict = {"m": P.m}
    if cfg.index is None:
        bps = Re.flowcat_cells(C)
        sz = Re.hocolim_cells(F, Ac.musyt_to_sz(F, phi))
        cmp = Re.compare_realizations(sz, bps)
        ok = cmp.ok and cmp.f2_equal
        out.update(comparison=cmp.to_json(), n_cells=len(bps.cells))
        if dump:
            out["models"] = {"bps": bps.to_json(), "sz": sz.to_json()}
    else:
        if cfg.index < 1 or P.m % cfg.index:
            raise CLIError(EXIT_PARSE, f"--index must divide m={P.m}")
        rep = Re.fixed_cell_comparison(F, phi, cfg.index, C)
        ok = rep.ok
        out.update(fixed=rep.to_json())
    out["ok"] = ok
    code = EXIT_OK if ok else EXIT_INVARIANT
    if cfg.fmt == "json":
        return code, _dump(out)
    if cfg.index is None:
        c = out["comparison"]
        rows = [("cells", out["n_cells"]), ("f2_equal", c["f2_equal"]), ("sign_iso", c["signs"] is not None),
                ("equivariant", c["equivariant"])]
        if c["signs"]:
            rows.append(("negative_cells", sum(1 for s in c["signs"].values() if s < 0)))
    else:
        f = out["fixed"]
        rows = [("index", cfg.index), ("fixed_cells", f["n_cells"]), ("fixed_functor_valid", f["valid_functor"])]
        rows += [(k, v["ok"] and v["f2_equal"]) for k, v in sorted(f["comparisons"].items())]
    return code, _table(["key", "value"], rows) + f"\n# realize: {'pass' if ok else 'FAIL'}"


def cmd_permutohedron(cfg: RunConfig, r: int, m: Optional[int]) -> tuple:
    if r < 1 or r > 7:
        raise CLIError(EXIT_PARSE, "r must be between 1 and 7")
    if m is None:
        top, bottom = (1,) * r, (0,) * r
        P = cube.face_poset(top, bottom)
        out = {"r": r, "f_vector": {str(k): v for k, v in P.f_vector().items()},
               "maximal_chains": P.f_vector().get(0, 0), "euler": P.euler_characteristic()}
    else:
        if r % m:
            raise CLIError(EXIT_PARSE, "r must be a multiple of m for the fixed poset")
        a = cube.CyclicAction(m, r // m)
        index = cfg.index or 1
        if m % index:
            raise CLIError(EXIT_PARSE, f"--index must divide m={m}")
        FP = cube.fixed_face_poset((1,) * r, (0,) * r, a, index)
        f: dict = {}
        for c in FP.chains:
            d = FP.target.dim(FP.iso[c])
            f[d] = f.get(d, 0) + 1
        out = {"r": r, "m": m, "index": index, "fixed_chains": len(FP.chains),
               "f_vector": {str(k): v for k, v in sorted(f.items())},
               "lower_permutohedron_rank": FP.target.rank,
               "isomorphic": cube.posets_isomorphic(FP.chains, FP.target.chains)}
    if cfg.fmt == "json":
        return EXIT_OK, _dump(out)
    rows = [(k, v) for k, v in out["f_vector"].items()]
    return EXIT_OK, _table(["dim", "faces"], rows)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="khoburn", description="Burnside functors, Khovanov homology and cyclic actions.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "table"), default="table", dest="fmt")
    common.add_argument("--seed", type=int, default=0)
    sub = p.add_subparsers(dest="command", required=True)

    kh = sub.add_parser("kh", parents=[common], help="Khovanov homology of a PD code")
    kh.add_argument("input")
    kh.add_argument("--coeffs", choices=("z", "f2", "q"), default="z")
    kh.add_argument("--figure", help="write a PNG plot of the table here")

    ek = sub.add_parser("ekh", parents=[common], help="equivariant Khovanov homology of a periodic diagram")
    ek.add_argument("input")
    ek.add_argument("--module", default="trivial", help="trivial, free or a JSON file {m, T}")
    ek.add_argument("--jmax", type=int, default=4)
    ek.add_argument("--figure")

    fn = sub.add_parser("functor", help="Burnside functor operations")
    fsub = fn.add_subparsers(dest="action", required=True)
    fd = fsub.add_parser("dump", parents=[common], help="print the Khovanov functor (and action) as JSON")
    fd.add_argument("input")

    ve = sub.add_parser("verify", parents=[common], help="run a verification suite")
    ve.add_argument("suite", choices=Ve.SUITES)
    ve.add_argument("input", nargs="?", help="input file (default: the bundled corpus)")
    ve.add_argument("--count", type=int, default=200, help="random instances for the roundtrips suite")

    re_ = sub.add_parser("realize", help="cell models of the realizations")
    rsub = re_.add_subparsers(dest="action", required=True)
    rc = rsub.add_parser("compare", parents=[common], help="compare the two cell models")
    rc.add_argument("input")
    rc.add_argument("--index", type=int, help="compare fixed-cell models for the subgroup of this index")
    rc.add_argument("--dump", action="store_true", help="include both cell models in JSON output")

    pm = sub.add_parser("permutohedron", help="permutohedron combinatorics")
    psub = pm.add_subparsers(dest="action", required=True)
    pf = psub.add_parser("faces", parents=[common], help="f-vector of the face poset of the r-cube interval")
    pf.add_argument("r", type=int)
    pf.add_argument("--m", type=int, help="group order for the fixed face poset")
    pf.add_argument("--index", type=int)
    return p


def run(argv=None) -> tuple:
    """Parse arguments and execute; returns (exit code, output text)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_PARSE, ""
    cfg = RunConfig(args.command, [x for x in [getattr(args, "input", None)] if x],
                    coeffs=getattr(args, "coeffs", "z"), jmax=getattr(args, "jmax", 4),
                    index=getattr(args, "index", None), fmt=args.fmt, seed=args.seed,
                    figure=getattr(args, "figure", None))
    if cfg.jmax < 0:
        return EXIT_PARSE, "error: --jmax must be >= 0"
    try:
        if args.command == "kh":
            return cmd_kh(cfg)
        if args.command == "ekh":
            return cmd_ekh(cfg, args.module)
        if args.command == "functor":
            return cmd_functor_dump(cfg)
        if args.command == "verify":
            return cmd_verify(cfg, args.suite, args.count)
        if args.command == "realize":
            return cmd_realize_compare(cfg, args.dump)
        return cmd_permutohedron(cfg, args.r, args.m)
    except CLIError as exc:
        return exc.code, f"error: {exc}"
    except (AssertionError, ArithmeticError) as exc:
        return EXIT_INVARIANT, f"error: internal invariant failed: {exc}"


def main(argv=None) -> int:
    code, text = run(argv)
    if text:
        print(text, file=sys.stderr if text.startswith("error:") else sys.stdout)
    return code


if __name__ == "__main__":
    sys.exit(main())
