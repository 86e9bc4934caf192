import pytest

from flopgw import data_path
from flopgw.cli import main
from flopgw.degeneration import blowup_geometry, enumerate_blowup_triples
from flopgw.models import local_model

GEOM = str(data_path("local_p1.geom"))
TX = str(data_path("local_p1_X.gw"))
TXP = str(data_path("local_p1_Xp.gw"))
TXPP = str(data_path("local_p1_Xpp.gw"))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_flop_round_trip_is_byte_identical(capsys, tmp_path):
    code, out, _ = run(capsys, "transform-flop", "--geometry", GEOM, "--table", TX)
    assert code == 0
    assert out == data_path("local_p1_Xp.gw").read_text()
    mid = tmp_path / "xp.gw"
    mid.write_text(out)
    code, back, _ = run(capsys, "transform-flop", "--geometry", GEOM, "--table", str(mid))
    assert code == 0 and back == data_path("local_p1_X.gw").read_text()
    code, again, _ = run(capsys, "transform-flop", "--geometry", GEOM, "--table", TX)
    assert again == out


def test_empty_table_gives_empty_output(capsys, tmp_path):
    p = tmp_path / "e.gw"
    p.write_text("#% gwtable v1\nlattice X\n")
    code, out, _ = run(capsys, "transform-flop", "--geometry", GEOM, "--table", str(p))
    assert code == 0
    assert out.splitlines()[:2] == ["#% gwtable v1", "lattice Xp"]
    assert len(out.splitlines()) == 3


def test_flop_rejections_are_listed(capsys, tmp_path):
    p = tmp_path / "bad.gw"
    p.write_text("#% gwtable v1\nlattice X\n0 1 1,0 H 1\n")
    code, _, err = run(capsys, "transform-flop", "--geometry", GEOM, "--table", str(p))
    assert code == 1 and "multiple of [C] with insertions" in err


def test_transition_commands(capsys):
    code, out, _ = run(capsys, "transform-transition", "--geometry", GEOM, "--table", TX)
    assert code == 0 and out == data_path("local_p1_Xpp.gw").read_text()
    code, out, _ = run(capsys, "transform-transition", "--geometry", GEOM, "--table", TX,
                       "--beta", "2", "--labels", "Dpp,Dpp,Dpp")
    assert code == 0 and out == "10/3\n"
    code, _, err = run(capsys, "transform-transition", "--geometry", GEOM, "--table", TX,
                       "--beta", "0", "--labels", "Dpp")
    assert code == 1 and "beta != 0" in err


def test_shipped_checks_all_pass(capsys):
    code, out, _ = run(capsys, "check", "--geometry", GEOM, "--table", TX, "--table", TXP,
                       "--table", TXPP)
    assert code == 0
    assert out.splitlines()[-1] == "summary: 6 PASS, 0 FAIL"
    assert "discrepancy = -1 (expected -1)" in out


def test_corrupted_fixture_fails(capsys, tmp_path):
    text = data_path("local_p1_Xpp.gw").read_text().replace("10/3", "11/3")
    p = tmp_path / "xpp.gw"
    p.write_text(text)
    code, out, _ = run(capsys, "check", "--geometry", GEOM, "--table", TX, "--table", str(p),
                       "--check", "transition:Dpp,Dpp,Dpp")
    assert code == 2
    assert "FAIL transition Dpp,Dpp,Dpp" in out
    assert "11/3 * q^[2]" in out and "10/3 * q^[2]" in out


def test_no_checks_gives_empty_pass_report(capsys, tmp_path):
    p = tmp_path / "g.geom"
    p.write_text("#% flopgw-geometry v1\nlattice X a\neffective X 1\n")
    code, out, _ = run(capsys, "check", "--geometry", str(p))
    assert code == 0
    assert out == "#% flopgw-report v1\nsummary: 0 PASS, 0 FAIL\n"


def test_enumerate_matches_library(capsys):
    code, out, _ = run(capsys, "enumerate", "--geometry", GEOM, "--kind", "blowup",
                       "--beta", "1,1", "--genus", "1", "--legs", "1")
    geom = blowup_geometry(local_model(1))
    expected = enumerate_blowup_triples(1, 1, (1, 1), geom, max_vertices=3, max_genus=1,
                                        max_weight=3)
    assert code == 0
    assert out.splitlines()[-1] == f"count {len(expected)}"
    assert sum(line.startswith("Y1[") for line in out.splitlines()) == len(expected)


def test_enumerate_non_effective(capsys):
    code, out, _ = run(capsys, "enumerate", "--geometry", GEOM, "--beta=-1,0")
    assert code == 0 and "not effective" in out and out.endswith("count 0\n")


def test_malformed_geometry(capsys, tmp_path):
    p = tmp_path / "g.geom"
    p.write_text("#% flopgw-geometry v1\nlattice X a\neffective X one\n")
    code, _, err = run(capsys, "enumerate", "--geometry", str(p), "--beta", "1")
    assert code == 1 and ":3:" in err


def test_usage_errors_exit_1(capsys):
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 1
    code, _, err = run(capsys, "enumerate", "--geometry", GEOM, "--beta", "0,1",
                       "--max-vertices", "0")
    assert code == 1 and "positive" in err
    code, _, err = run(capsys, "check", "--geometry", GEOM, "--table", TX, "--check", "nope:1")
    assert code == 1 and "unknown check" in err


def test_ring_and_series_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "ring-nf", "--geometry", GEOM, "w^3", "v^2*w", "--integrate")
    assert code == 0 and out == "2 * v*w^2  [integral 2]\n0  [integral 0]\n"
    code, out, _ = run(capsys, "series-truncate", "--geometry", GEOM, "--lattice", "X",
                       "--cutoff", "2", "-1 * q^[-1,0] / (1 - q^[-1,0])")
    assert code == 1
    code, out, _ = run(capsys, "series-truncate", "--geometry", GEOM, "--lattice", "X",
                       "--cutoff", "2", "1 * q^[1,0] / (1 - q^[1,0])")
    assert out == "1 * q^[1,0] + 1 * q^[2,0]\n"
    dest = tmp_path / "o.txt"
    run(capsys, "ring-nf", "--geometry", GEOM, "--out", str(dest), "w^3")
    assert dest.read_text() == "2 * v*w^2\n"
