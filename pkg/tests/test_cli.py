import json
from pathlib import Path

import pytest

from khoburn import cli
from khoburn import khovanov as K
from khoburn import periodic as Pe

CORPUS = Path(cli.__file__).parent / "corpus"


def path(name):
    return str(CORPUS / f"{name}.json")


def run_json(*argv):
    code, text = cli.run([*argv, "--format", "json"])
    return code, (json.loads(text) if code == 0 else text)


def test_kh_unknot():
    code, out = run_json("kh", path("unknot_0"))
    assert code == 0 and out["euler_audit"]
    assert [(h["i"], h["q"], h["rank"]) for h in out["homology"]] == [(0, -1, 1), (0, 1, 1)]


def test_kh_f2_matches_library():
    code, out = run_json("kh", path("trefoil_p3"), "--coeffs", "f2")
    assert code == 0
    lib = K.homology(K.ckh(K.parse_pd(json.loads(Path(path("trefoil_p3")).read_text()))), "F2")
    got = {(h["i"], h["q"]): h["dim"] if "dim" in h else h["rank"] for h in out["homology"]}
    assert got == {k: v for k, v in lib.items() if v}


def test_kh_table_format():
    code, text = cli.run(["kh", path("hopf_p2")])
    assert code == 0
    assert "\t" in text.splitlines()[0]


def test_malformed_pd_exit_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"pd": [[1, 2, 3]]}))
    code, text = cli.run(["kh", str(bad)])
    assert code == cli.EXIT_PARSE and text.startswith("error:")
    bad.write_text("{nope")
    assert cli.run(["kh", str(bad)])[0] == cli.EXIT_PARSE
    assert cli.run(["kh", str(tmp_path / "missing.json")])[0] == cli.EXIT_PARSE


def test_bad_arguments_exit_2():
    assert cli.run(["kh"])[0] == cli.EXIT_PARSE
    assert cli.run(["bogus"])[0] == cli.EXIT_PARSE


def test_wrong_period_exit_4(tmp_path):
    data = json.loads(Path(path("hopf_p2")).read_text())
    data["m"] = 3
    f = tmp_path / "wrong.json"
    f.write_text(json.dumps(data))
    code, text = cli.run(["ekh", str(f)])
    assert code == cli.EXIT_PERIODIC and text.startswith("error:")


def test_ekh_matches_library():
    code, out = run_json("ekh", path("trefoil_p3"), "--jmax", "2")
    assert code == 0
    data = json.loads(Path(path("trefoil_p3")).read_text())
    P = Pe.normalize(Pe.parse_periodic(data))
    res = Pe.ekh(P, Pe.GroupModule.trivial(3), 2)
    assert {(e["j"], e["q"]): e["dim"] for e in out["ekh"]} == res.table


def test_ekh_free_jmax0_is_kh():
    code, out = run_json("ekh", path("hopf_p2"), "--module", "free", "--jmax", "0")
    assert code == 0 and out["free_sanity"]
    assert {e["q"]: e["dim"] for e in out["ekh"]} == {e["q"]: e["dim"] for e in out["kh_f2"]}


def test_ekh_module_file(tmp_path):
    f = tmp_path / "mod.json"
    f.write_text(json.dumps({"m": 2, "T": [[0, 1], [1, 0]]}))
    code, out = run_json("ekh", path("hopf_p2"), "--module", str(f), "--jmax", "2")
    assert code == 0
    # F2[Z/2] is free: nothing above j = 0
    assert all(e["j"] == 0 for e in out["ekh"])


def test_verify_roundtrips():
    code, out = run_json("verify", "roundtrips", "--count", "20")
    assert code == 0 and out["ok"]
    assert len(out["cases"]) >= 20


def test_verify_realize_has_signs():
    code, out = run_json("verify", "realize", path("trefoil_p3"))
    assert code == 0 and out["ok"]
    case = out["cases"]["input"]
    assert case["n_cells"] == 30 and set(case["signs"].values()) <= {1, -1}


def test_verify_mutated_functor_exit_3(tmp_path):
    code, out = run_json("functor", "dump", path("trefoil_3braid_p2"))
    assert code == 0
    fn = out["functor"]
    # swap the images of two composites in one square
    for sq in fn["squares"]:
        if len(sq["pairs"]) >= 2:
            a, b = sq["pairs"][0], sq["pairs"][1]
            a[1], b[1] = b[1], a[1]
            break
    f = tmp_path / "fn.json"
    f.write_text(json.dumps(fn))
    code, _ = cli.run(["verify", "functor", str(f)])
    assert code == cli.EXIT_INVARIANT


def test_output_is_byte_stable():
    a = cli.run(["verify", "roundtrips", "--count", "10", "--seed", "3", "--format", "json"])
    b = cli.run(["verify", "roundtrips", "--count", "10", "--seed", "3", "--format", "json"])
    assert a == b
    assert cli.run(["kh", path("figure_eight")]) == cli.run(["kh", path("figure_eight")])


def test_figure_written(tmp_path):
    png = tmp_path / "kh.png"
    code, _ = cli.run(["kh", path("trefoil_p3"), "--figure", str(png)])
    assert code == 0 and png.read_bytes()[:4] == b"\x89PNG"
    png2 = tmp_path / "ekh.png"
    assert cli.run(["ekh", path("hopf_p2"), "--figure", str(png2)])[0] == 0
    assert png2.stat().st_size > 0


def test_permutohedron_faces():
    code, out = run_json("permutohedron", "faces", "3")
    assert code == 0
    assert out["f_vector"] == {"0": 6, "1": 6, "2": 1}
    code, out = run_json("permutohedron", "faces", "4", "--m", "2")
    assert code == 0 and out["isomorphic"]


@pytest.mark.parametrize("index", [None, "1"])
def test_realize_compare(index):
    argv = ["realize", "compare", path("hopf_p2")]
    if index:
        argv += ["--index", index]
    code, out = run_json(*argv)
    assert code == 0 and out["ok"]
