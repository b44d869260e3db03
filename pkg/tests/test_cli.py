"""Command-line interface: every subcommand, both output modes, exit codes.

Note the argparse quirk: values starting with "-" need the --opt=value form,
e.g. --params=-1,17.
"""

import json

import pytest

from flatperm.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_prototypes_h2(capsys):
    code, out = run(capsys, "prototypes", "--locus", "h2", "--D", "17")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].split("\t") == ["locus", "a", "b", "c", "e", "D", "spin"]
    rows = [ln.split("\t") for ln in lines[1:]]
    assert ["h2", "0", "4", "1", "-1", "17", "1"] in rows
    assert len(rows) == 6


def test_prototypes_without_spin_column_values(capsys):
    code, out = run(capsys, "prototypes", "--locus", "h2", "--D", "12")
    assert code == 0 and len(out.strip().splitlines()) > 1
    code, out = run(capsys, "prototypes", "--locus", "prym", "--D", "17")
    rows = [ln.split("\t") for ln in out.strip().splitlines()[1:]]
    assert [r[:6] for r in rows] == [
        ["prym", "0", "1", "1", "-3", "17"],
        ["prym", "0", "2", "1", "-1", "17"],
    ]


def test_surface_build_and_save(capsys, tmp_path):
    out_file = tmp_path / "s.json"
    code, out = run(
        capsys, "surface", "--make", "L", "--params=-1,17", "--out", str(out_file)
    )
    assert code == 0
    info = json.loads(out)
    assert info["D"] == 17 and info["genus"] == 2 and info["stratum"] == [2]
    assert info["marked_points"] == ["w1", "w2", "w3", "w4", "w5"]
    assert out_file.exists()
    # the saved surface is usable by decompose
    code, out = run(
        capsys, "decompose", "--surface", str(out_file), "--dir", "1,0", "--json"
    )
    assert code == 0
    dec = json.loads(out)
    assert dec["permutation"] == "(1 2)"
    assert len(dec["cylinders"]) == 2


def test_decompose_human_readable(capsys):
    code, out = run(
        capsys, "decompose", "--make", "Z", "--params=-3,17", "--dir", "2,1"
    )
    assert code == 0
    assert "permutation (1 3)" in out
    assert out.count("cylinder width=") == 3


def test_decompose_field_element_direction(capsys):
    # directions may have exact quadratic components in canonical text form
    code, out = run(
        capsys,
        "decompose",
        "--make",
        "L",
        "--params=-1,33",
        "--dir=-1/2+1/2*sqrt(33),1",
        "--json",
    )
    assert code == 0
    assert json.loads(out)["permutation"] == "(4 5)"


def test_hlk_output(capsys):
    code, out = run(capsys, "hlk", "--make", "L", "--params=-1,17")
    assert code == 0
    data = json.loads(out)
    assert data["types"] == {"w1": "c", "w2": "v", "w3": "h", "w4": "0", "w5": "0"}
    assert data["integral"] == 2 and data["counts"] == [1, 1, 1]


def test_verify_json_schema(capsys):
    code, out = run(
        capsys, "verify", "--locus", "prym", "--from", "12", "--to", "17", "--json"
    )
    assert code == 0
    data = json.loads(out)
    assert data["locus"] == "prym"
    assert data["mismatches"] == 0 and data["matches"] == 3
    # D = 16 has no Prym prototypes at all, so it contributes no components
    assert [d["D"] for d in data["discriminants"]] == [12, 17]
    for d in data["discriminants"]:
        for comp in d["components"]:
            assert comp["match"] is True
            assert comp["concluded"] == comp["expected"]


def test_verify_tsv_and_plain(capsys):
    code, out = run(
        capsys, "verify", "--locus", "h2", "--from", "12", "--to", "13", "--tsv"
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("D\tlocus\tlabel")
    assert len(lines) == 3
    code, out = run(capsys, "verify", "--locus", "h2", "--from", "12", "--to", "13")
    assert code == 0
    assert "2 matched, 0 mismatched" in out


def test_cli_error_paths(capsys):
    with pytest.raises(SystemExit):
        main(["surface", "--make", "L", "--params", "1"])  # wrong arity
    with pytest.raises(SystemExit):
        main(["decompose", "--dir", "1,0"])  # no surface given
    with pytest.raises(SystemExit):
        main(["decompose", "--make", "L", "--params=-1,17", "--dir", "1"])
