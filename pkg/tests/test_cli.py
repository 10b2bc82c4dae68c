"""Command line interface: dispatch, validation, exit codes, batch isolation."""

import json

from orbicalc.cli import main, run_batch, run_request


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_sw_dim_command(capsys):
    code, report = run_cli(capsys, "sw-dim", "--wps", "2", "3", "5", "--degree", "2")
    assert code == 0
    assert report["result"]["d"] == "0"
    assert report["result"]["I"] == ["0", "0", "-4/5"]
    assert report["result"]["points"][2]["delta"] == 4


def test_virtual_genus_command(capsys):
    code, report = run_cli(capsys, "virtual-genus", "--wps", "2", "3", "5", "--degree", "15")
    assert code == 0
    assert report["result"]["virtual_genus"] == "9/4"


def test_pairing_command(capsys):
    code, report = run_cli(
        capsys, "pairing", "--wps", "2", "3", "5",
        "--degree", "15", "--curve-degree", "15",
    )
    assert code == 0
    assert report["result"]["pairing"] == "15/2"


def test_malformed_weights_exit_2(capsys):
    code, report = run_cli(capsys, "sw-dim", "--wps", "2", "4", "5", "--degree", "2")
    assert code == 2
    assert report["error"]["kind"] == "validation"
    assert "coprime" in report["error"]["message"]


def test_adjunction_examples(capsys):
    code, report = run_cli(
        capsys, "adjunction-check", "--wps", "2", "3", "5", "--example", "axis"
    )
    assert code == 0
    assert report["result"]["equal"] and report["result"]["suborbifold"]
    code, report = run_cli(
        capsys, "adjunction-check", "--wps", "2", "3", "5", "--example", "lambda"
    )
    assert code == 0
    assert report["result"]["lhs"] == "9/4"
    assert report["result"]["g_sigma"] == "1/4"
    assert report["result"]["contributions"][0]["value"] == "2"
    assert not report["result"]["suborbifold"]


def test_adjunction_presentation_file(tmp_path, capsys):
    doc = {
        "curve": {"degree": "15"},
        "domain": {"genus": 0, "point_orders": [2]},
        "marked_points": [
            {
                "label": "z1",
                "ambient": "p1",
                "germ": {"x": [[3, "1"]], "y": [[5, "1"]]},
                "expand_orbit": True,
            }
        ],
    }
    path = tmp_path / "presentation.json"
    path.write_text(json.dumps(doc))
    code, report = run_cli(
        capsys, "adjunction-check", "--wps", "2", "3", "5", "--file", str(path)
    )
    assert code == 0
    assert report["result"]["equal"]


def test_intersection_example(capsys):
    code, report = run_cli(
        capsys, "intersection-check", "--wps", "2", "3", "5", "--example", "lambda-pair"
    )
    assert code == 0
    assert report["result"]["expected"] == "15/2"
    assert report["result"]["total"] == "15/2"
    assert report["result"]["equal"]


def test_local_int_command(capsys):
    code, report = run_cli(
        capsys, "local-int",
        "--germ1", '{"x": [[1, "1"]], "y": [[2, "1"]]}',
        "--germ2", '{"x": [[1, "1"]], "y": [[2, "-1"]]}',
    )
    assert code == 0
    assert report["result"]["intersection"] == 2


def test_local_int_common_branch_exit_3(capsys):
    germ = '{"x": [[3, "1"]], "y": [[5, "2"]]}'
    code, report = run_cli(capsys, "local-int", "--germ1", germ, "--germ2", germ)
    assert code == 3
    assert report["error"]["kind"] == "computation"
    assert report["error"]["type"] == "CommonBranch"


def test_local_int_zeta_coefficients(capsys):
    code, report = run_cli(
        capsys, "local-int",
        "--germ1", '{"x": [[3, "1"]], "y": [[5, "zeta(3)"]]}',
        "--germ2", '{"x": [[3, "1"]], "y": [[5, "2*zeta(3)^2"]]}',
    )
    assert code == 0
    assert report["result"]["intersection"] == 15


def test_self_int_command(capsys):
    code, report = run_cli(capsys, "self-int", "--l1", "3", "--l2", "5")
    assert code == 0
    assert report["result"] == {"value": "4", "exact": True, "method": "gap-count"}
    code, report = run_cli(capsys, "self-int", "--l1", "4", "--l2", "6")
    assert code == 3
    assert report["error"]["type"] == "NotCoprime"


def test_index_dim_command(capsys):
    code, report = run_cli(capsys, "index-dim", "--chern", "3")
    assert code == 0
    assert report["result"] == {"d_tilde": 5, "dim_parametrized": 10, "dim_moduli": 4}
    code, report = run_cli(
        capsys, "index-dim", "--chern", "1", "--point", "3,1,1"
    )
    assert code == 3
    assert report["error"]["type"] == "NonIntegralIndex"


def test_delta_command(capsys):
    code, report = run_cli(
        capsys, "delta", "--modulus", "5", "--weight", "3", "--fiber", "2"
    )
    assert code == 0
    assert report["result"]["delta"] == 4


def test_example111_command(capsys):
    code, report = run_cli(capsys, "example111", "--n", "4")
    assert code == 0
    assert report["result"]["pairs"] == [[1, 1]]
    code, report = run_cli(capsys, "example111", "--n", "2")
    assert code == 0
    assert report["result"]["pairs"] == []


def test_analyze_command(capsys):
    code, report = run_cli(capsys, "analyze", "--wps", "2", "3", "5")
    assert code == 0
    assert report["result"]["survivor"] == {
        "degree": 2, "count": 1, "coverage": ["p2", "p3"], "excluded": ["p1"],
    }


def test_citations_always_present(capsys):
    code, report = run_cli(capsys, "sw-dim", "--wps", "2", "3", "5", "--degree", "2")
    assert code == 0
    assert report["citations"] == ["SW-3.3", "DELTA-3.4"]
    assert "notes" not in report


def test_trace_flag_adds_notes(capsys):
    code, report = run_cli(
        capsys, "sw-dim", "--wps", "2", "3", "5", "--degree", "2", "--trace"
    )
    assert code == 0
    assert report["citations"] == ["SW-3.3", "DELTA-3.4"]
    assert report["notes"][-1] == "d(E) = 0"
    assert any("delta = 4" in line for line in report["notes"])
    code, report = run_cli(
        capsys, "adjunction-check", "--wps", "2", "3", "5", "--example", "lambda", "--trace"
    )
    assert report["notes"][-1].endswith("equal")


def test_unknown_payload_fields_rejected():
    report, code = run_request(
        {"command": "sw-dim", "space": {"wps": [2, 3, 5]}, "payload": {"degree": 2, "mystery": 1}}
    )
    assert code == 2
    assert "mystery" in report["error"]["message"]


def test_unknown_command_rejected():
    report, code = run_request({"command": "frobnicate"})
    assert code == 2


def test_floats_rejected():
    report, code = run_request(
        {"command": "virtual-genus", "space": {"wps": [2, 3, 5]}, "payload": {"degree": 1.5}}
    )
    assert code == 2
    assert "float" in report["error"]["message"]


def test_sw_dim_general_space():
    request = {
        "command": "sw-dim",
        "space": {
            "points": [
                {"label": "p1", "order": 2, "weights": [1, 1]},
                {"label": "p2", "order": 3, "weights": [2, 2]},
                {"label": "p3", "order": 5, "weights": [2, 3]},
            ],
        },
        "payload": {
            "fiber_weights": [0, 2, 2],
            "c1_squared": "2/15",
            "c1_dot_canonical": "-2/3",
        },
    }
    report, code = run_request(request)
    assert code == 0
    assert report["result"]["d"] == "0"


def test_batch_isolation(tmp_path, capsys):
    batch = [
        {"command": "delta", "payload": {"modulus": 5, "weight": 3, "fiber": 2}},
        {"command": "sw-dim", "space": {"wps": [2, 4, 5]}, "payload": {"degree": 2}},
        {"command": "virtual-genus", "space": {"wps": [2, 3, 5]}, "payload": {"degree": "15"}},
    ]
    path = tmp_path / "batch.json"
    path.write_text(json.dumps(batch))
    code = main(["batch", str(path)])
    reports = json.loads(capsys.readouterr().out)
    assert code == 2  # max of 0, 2, 0
    assert [r["status"] for r in reports] == [0, 2, 0]
    assert reports[2]["report"]["result"]["virtual_genus"] == "9/4"


def test_batch_empty(tmp_path, capsys):
    path = tmp_path / "empty.json"
    path.write_text("[]")
    code = main(["batch", str(path)])
    assert code == 0
    assert json.loads(capsys.readouterr().out) == []


def test_batch_toml(tmp_path, capsys):
    path = tmp_path / "batch.toml"
    path.write_text(
        '[[requests]]\ncommand = "delta"\n'
        "[requests.payload]\nmodulus = 5\nweight = 3\nfiber = 2\n"
    )
    code = main(["batch", str(path)])
    reports = json.loads(capsys.readouterr().out)
    assert code == 0
    assert reports[0]["report"]["result"]["delta"] == 4


def test_batch_bad_file_reports_position(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('[{"command": "delta",]')
    code = main(["batch", str(path)])
    assert code == 2
    out = json.loads(capsys.readouterr().out)
    assert "line 1" in out["error"]["message"]


def test_run_batch_aggregates_status():
    reports, status = run_batch(
        [{"command": "example111", "payload": {"n": 4}}, {"command": "nope"}]
    )
    assert status == 2
    assert [r["status"] for r in reports] == [0, 2]


def test_reports_have_no_floats(capsys):
    code, report = run_cli(capsys, "sw-dim", "--wps", "2", "3", "5", "--degree", "1")
    assert code == 0

    def walk(node):
        assert not isinstance(node, float)
        if isinstance(node, dict):
            for v in node.values():
                walk(v)
        elif isinstance(node, list):
            for v in node:
                walk(v)

    walk(report)


def test_batch_of_ledger_checks(tmp_path, capsys):
    # the three standard checks in one batch: all reports verdict-equal
    batch = [
        {"command": "adjunction-check", "space": {"wps": [2, 3, 5]},
         "payload": {"presentation": {"example": "axis"}}},
        {"command": "adjunction-check", "space": {"wps": [2, 3, 5]},
         "payload": {"presentation": {"example": "lambda"}}},
        {"command": "intersection-check", "space": {"wps": [2, 3, 5]},
         "payload": {"first": {"example": "lambda", "coefficient": "1"},
                     "second": {"example": "lambda", "coefficient": "2"},
                     "meetings": [["z1", "z1"]]}},
    ]
    path = tmp_path / "ledgers.json"
    path.write_text(json.dumps(batch))
    code = main(["batch", str(path)])
    reports = json.loads(capsys.readouterr().out)
    assert code == 0
    assert all(r["status"] == 0 for r in reports)
    assert all(r["report"]["result"]["equal"] for r in reports)
