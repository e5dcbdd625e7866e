import json

import pytest

from netclear.cli import main

T3 = "from,to,amount\nA,B,5\nB,C,3\nC,A,7\n"
P4 = "from,to,amount\n1,2,4\n2,3,2\n3,1,5\n3,4,3\n4,3,3\n"
P4_PREFS = "participant,rank,counterparty\n1,1,2\n2,1,3\n3,1,4\n3,2,1\n4,1,3\n"


@pytest.fixture
def t3_file(tmp_path):
    path = tmp_path / "t3.csv"
    path.write_text(T3)
    return path


def test_stats(t3_file, capsys):
    assert main(["stats", "--input", str(t3_file)]) == 0
    out = capsys.readouterr().out
    assert "has-cycle: yes" in out
    assert "scc-count: 1" in out
    assert "A,12,2,10" in out
    assert "total-excess: 22" in out


def test_compress_maxvol_writes_everything(t3_file, tmp_path, capsys):
    report = tmp_path / "r.json"
    out_net = tmp_path / "out.csv"
    flow = tmp_path / "flow.csv"
    code = main(
        [
            "compress",
            "--input",
            str(t3_file),
            "--algorithm",
            "maxvol",
            "--report",
            str(report),
            "--output",
            str(out_net),
            "--flow-out",
            str(flow),
        ]
    )
    assert code == 0
    payload = json.loads(report.read_text())
    assert payload["volume"] == 9
    assert out_net.read_text().count("\n") == 4  # format line, header, 2 arcs
    assert "A,B,3" in flow.read_text()
    assert "volume: 9" in capsys.readouterr().out


def test_compress_pref_p4(tmp_path):
    net_file = tmp_path / "p4.csv"
    net_file.write_text(P4)
    prefs_file = tmp_path / "prefs.csv"
    prefs_file.write_text(P4_PREFS)
    report = tmp_path / "r.json"
    code = main(
        [
            "compress",
            "--input",
            str(net_file),
            "--algorithm",
            "pref",
            "--prefs",
            str(prefs_file),
            "--epsilon",
            "1/1",
            "--report",
            str(report),
        ]
    )
    assert code == 0
    payload = json.loads(report.read_text())
    assert payload["volume"] == 12
    assert payload["iterations"] == 2
    assert payload["parameters"]["epsilon"] == {"num": 1, "den": 1}


def test_validate_ok(t3_file, tmp_path):
    flow = tmp_path / "flow.csv"
    flow.write_text("from,to,flow\nA,B,3\nB,C,3\nC,A,3\n")
    assert main(["validate", "--input", str(t3_file), "--flow", str(flow)]) == 0


def test_validate_imbalance_lists_on_stderr(t3_file, tmp_path, capsys):
    flow = tmp_path / "flow.csv"
    flow.write_text("from,to,flow\nA,B,3\n")
    assert main(["validate", "--input", str(t3_file), "--flow", str(flow)]) == 1
    err = capsys.readouterr().err
    assert "imbalance at A: -3" in err
    assert "imbalance at B: +3" in err


def test_decompose(t3_file, tmp_path, capsys):
    flow = tmp_path / "flow.csv"
    flow.write_text("from,to,flow\nA,B,3\nB,C,3\nC,A,3\n")
    assert main(["decompose", "--input", str(t3_file), "--flow", str(flow)]) == 0
    assert "A->B->C->A: 3" in capsys.readouterr().out


def test_generate_to_stdout_and_determinism(capsys):
    assert main(["generate", "--nodes", "4", "--arcs", "8", "--seed", "9"]) == 0
    first = capsys.readouterr().out
    assert main(["generate", "--nodes", "4", "--arcs", "8", "--seed", "9"]) == 0
    assert capsys.readouterr().out == first
    assert first.startswith("#format=1\nfrom,to,amount\n")


def test_simulate(tmp_path, capsys):
    cfg = tmp_path / "sim.cfg"
    cfg.write_text(
        "instances = 2\nnodes = 4\narcs = 8\nmax_capacity = 5\nseed = 11\n"
        "algorithms = maxvol,pref\nepsilon = 1/2\n"
    )
    report = tmp_path / "sim.json"
    table = tmp_path / "sim.csv"
    code = main(
        ["simulate", "--config", str(cfg), "--report", str(report), "--csv", str(table)]
    )
    assert code == 0
    payload = json.loads(report.read_text())
    assert len(payload["instances"]) == 4
    assert payload["rng"] == "python-random-mt19937"
    assert "aggregates" in payload
    lines = table.read_text().splitlines()
    assert lines[0] == "#format=1"
    assert len(lines) == 6  # format, header, 4 rows
    assert "maxvol" in capsys.readouterr().out


# -- exit-code contract, table-driven ---------------------------------------------


def _bad_network_file(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_exit_codes(tmp_path, t3_file, capsys):
    flow_bad = tmp_path / "bad_flow.csv"
    flow_bad.write_text("from,to,flow\nA,B,1\n")
    flow_ok = tmp_path / "ok_flow.csv"
    flow_ok.write_text("from,to,flow\nA,B,3\nB,C,3\nC,A,3\n")

    cases = [
        # usage errors: exit 2
        (["unknown-command"], 2),
        (["stats"], 2),  # missing --input
        (["compress", "--input", str(t3_file), "--algorithm", "pref"], 2),  # no --prefs
        (["compress", "--input", str(t3_file), "--algorithm", "simplex"], 2),
        (["compress", "--input", str(t3_file), "--algorithm", "maxvol", "--epsilon", "x"], 2),
        # IO errors: exit 2
        (["stats", "--input", str(tmp_path / "missing.csv")], 2),
        # parse errors: exit 2
        (["stats", "--input", _bad_network_file(tmp_path, "h.csv", "bad header\nA,B,1\n")], 2),
        (["stats", "--input", _bad_network_file(tmp_path, "f.csv", "from,to,amount\nA,B\n")], 2),
        # validation errors: exit 1
        (["stats", "--input", _bad_network_file(tmp_path, "s.csv", "from,to,amount\nA,A,1\n")], 1),
        (["stats", "--input", _bad_network_file(tmp_path, "r.csv", "from,to,amount\nA,B,1.5\n")], 1),
        (["validate", "--input", str(t3_file), "--flow", str(flow_bad)], 1),
        # happy paths: exit 0
        (["stats", "--input", str(t3_file)], 0),
        (["validate", "--input", str(t3_file), "--flow", str(flow_ok)], 0),
    ]
    for argv, expected in cases:
        code = main(argv)
        capsys.readouterr()  # keep output quiet between cases
        assert code == expected, f"{argv} -> {code}, expected {expected}"


def test_generate_bad_config_exits_2(capsys):
    assert main(["generate", "--nodes", "3", "--arcs", "2", "--seed", "1"]) == 2
    assert "error" in capsys.readouterr().err
