import json
import subprocess
import sys

import pytest

from higherconvex.cli import main
from higherconvex.sets import GroupedSet, read_set, write_set


@pytest.fixture
def setdir(tmp_path):
    write_set(tmp_path / "cubes15.txt", GroupedSet([n ** 3 for n in range(1, 16)]))
    write_set(tmp_path / "ap8.txt", GroupedSet(range(1, 9)))
    write_set(tmp_path / "ap16.txt", GroupedSet(range(1, 17)))
    write_set(tmp_path / "ap64.txt", GroupedSet(range(1, 65)))
    return tmp_path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_gen_families(tmp_path, capsys):
    code, out, _ = run(capsys, "gen", "powers", 3, "-N", 5)
    assert code == 0 and out.split()[-5:] == ["1", "8", "27", "64", "125"]
    code, out, _ = run(capsys, "gen", "ap", 2, "-N", 4)
    assert out.split()[-4:] == ["1", "3", "5", "7"]
    target = tmp_path / "rc.txt"
    assert run(capsys, "gen", "random-convex", 2, "-N", 10, "--seed", 4, "--out", target)[0] == 0
    first = target.read_bytes()
    run(capsys, "gen", "random-convex", 2, "-N", 10, "--seed", 4, "--out", target)
    assert target.read_bytes() == first
    assert len(read_set(target)) == 10


def test_gen_bad_family(capsys):
    assert run(capsys, "gen", "geometric", 1, "-N", 3)[0] == 1


def test_pigeonhole(setdir, capsys):
    code, out, _ = run(capsys, "pigeonhole", "--in", setdir / "ap8.txt")
    assert code == 0 and "t=2, L=4, m=1" in out


def test_witness3_end_to_end(setdir, capsys):
    batch = setdir / "batch.json"
    code, out, _ = run(capsys, "witness3", "--k", 2, "--in", setdir / "cubes15.txt", "--verify-oracle",
                       "--out", batch)
    assert code == 0
    assert "286 certified witnesses" in out and "inside the oracle set" in out
    assert json.loads(batch.read_text())["count"] == 286


def test_witness3_failures(setdir, capsys):
    # level one: the claimed N^2/2 is not reached by the construction
    assert run(capsys, "witness3", "--k", 1, "--in", setdir / "cubes15.txt")[0] == 2
    code, _, err = run(capsys, "witness3", "--k", 3, "--in", setdir / "cubes15.txt")
    assert code == 1 and "NotKConvex" in err


def test_witness4(setdir, capsys):
    code, out, _ = run(capsys, "witness4", "--k", 1, "--map", "power: 2", "--in", setdir / "ap16.txt",
                       "--verify-oracle")
    assert code == 0 and "m L^2 / 2 = 32" in out
    code, _, err = run(capsys, "witness4", "--k", 1, "--map", "power: 2", "--in", setdir / "ap8.txt")
    assert code == 1 and "TooSmall" in err


def test_threefold(setdir, capsys):
    code, out, _ = run(capsys, "threefold", "--in", setdir / "ap64.txt", "--assert")
    assert code == 0 and "additive ratio 5.45394" in out


def test_sumset_and_convexity(setdir, capsys):
    out_file = setdir / "s.txt"
    code, out, _ = run(capsys, "sumset", "--in", setdir / "ap8.txt", "--m", 2, "--n", 1, "--verify-oracle",
                       "--out", out_file)
    assert code == 0 and "= 22" in out and len(read_set(out_file)) == 22
    code, out, _ = run(capsys, "convexity", "--in", setdir / "cubes15.txt")
    assert code == 0 and out.startswith("order 2")
    code, out, _ = run(capsys, "convexity", "--in", setdir / "ap16.txt", "--map", "poly: 0,-300,0,1",
                       "--k", 1, "--steps", "1")
    assert code == 2 and "fail" in out


def test_corollary_and_report(setdir, capsys):
    code, out, _ = run(capsys, "corollary", "--part", 1, "--k", 2, "--delta", "1/2", "--in", setdir / "ap16.txt")
    assert code == 0 and "part 1" in out
    code, _, err = run(capsys, "corollary", "--part", 1, "--k", 2, "--delta", "1/100",
                       "--in", setdir / "ap64.txt")
    assert code == 1 and "HypothesisViolated" in err
    code, out, _ = run(capsys, "report", "--family", "powers 3", "--sizes", "7,15", "--k", 2, "--format", "csv")
    assert code == 0 and out.startswith("family,N,k,map")
    code, out, _ = run(capsys, "report", "--family", "powers 3", "--sizes", "15", "--k", 2,
                       "--check", "theorem3", "--format", "json")
    assert code == 0 and json.loads(out)["rows"][0]["verdict"] == "pass"


def test_report_is_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for target in (a, b):
        run(capsys, "report", "--family", "random-convex 2", "--seed", 9, "--sizes", "8,16", "--k", "1,2",
            "--format", "json", "--jobs", 2, "--out", target)
    assert a.read_bytes() == b.read_bytes()


def test_usage_errors(tmp_path, capsys):
    assert run(capsys, "bogus")[0] == 1
    assert run(capsys, "sumset", "--in", tmp_path / "missing.txt")[0] == 1
    bad = tmp_path / "bad.txt"
    bad.write_text("1\nnope\n")
    code, _, err = run(capsys, "sumset", "--in", bad)
    assert code == 1 and "ParseError" in err
    assert run(capsys, "--help")[0] == 0


def test_console_entry_point(setdir):
    proc = subprocess.run([sys.executable, "-m", "higherconvex.cli", "pigeonhole", "--in",
                           str(setdir / "ap8.txt")], capture_output=True, text=True)
    assert proc.returncode == 0 and "t=2, L=4, m=1" in proc.stdout
