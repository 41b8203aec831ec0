import json
from pathlib import Path

import pytest

from liecochain.cli import main

HERE = Path(__file__).parent
FIXTURES = HERE / "fixtures"
GOLDEN = HERE / "golden"


def fixture(name):
    return str(FIXTURES / f"{name}.lch")


GOLDEN_RUNS = [
    ("so3_so2_h2", 0, ["cohomology", "--input", fixture("so3"),
                       "--algebra", "so3", "--subgroup", "so2", "--degree", "2"]),
    ("so3_o2_h2", 0, ["cohomology", "--input", fixture("so3"),
                      "--algebra", "so3", "--subgroup", "o2", "--degree", "2"]),
    ("solvable_report", 1, ["report", "--input", fixture("solvable"),
                            "--action", "act", "--points", "P", "Q"]),
    ("shear_report", 0, ["report", "--input", fixture("abelian_shear"),
                         "--action", "act", "--points", "P", "Q"]),
    ("intro_cochain", 0, ["check", "cochain", "--input", fixture("intro"),
                          "--action", "act", "--chain", "chi",
                          "--forms", "alpha", "nu", "--fields", "R1",
                          "--points", "P0"]),
    ("solvable_cochain", 1, ["check", "cochain", "--input", fixture("solvable"),
                             "--action", "act", "--chain", "chi",
                             "--forms", "omega", "--fields", "Z1", "Z2",
                             "--points", "P"]),
    ("intro_validate", 0, ["validate", "--input", fixture("intro")]),
    ("intro_rho", 0, ["rho", "--input", fixture("intro"), "--action", "act",
                      "--chain", "chi", "--form", "alpha"]),
    ("intro_surjective", 0, ["certify", "surjective", "--input", fixture("intro"),
                             "--action", "act", "--chain", "chi", "--form", "cert"]),
    ("shear_isotropy", 0, ["isotropy", "--input", fixture("abelian_shear"),
                           "--action", "act", "--point", "P"]),
]


def run_cli(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


@pytest.mark.parametrize("name,expected_code,argv",
                         GOLDEN_RUNS, ids=[g[0] for g in GOLDEN_RUNS])
def test_golden_json(name, expected_code, argv, capsys):
    code, out = run_cli(argv + ["--format", "json"], capsys)
    assert code == expected_code
    expected = (GOLDEN / f"{name}.json").read_text()
    assert out == expected


@pytest.mark.parametrize("name,expected_code,argv",
                         GOLDEN_RUNS, ids=[g[0] for g in GOLDEN_RUNS])
def test_byte_identical_across_runs(name, expected_code, argv, capsys):
    _, first = run_cli(argv + ["--format", "json"], capsys)
    _, second = run_cli(argv + ["--format", "json"], capsys)
    assert first.encode() == second.encode()


def test_byte_identical_across_hash_seeds():
    import subprocess, sys, os
    argv = ["report", "--input", fixture("solvable"), "--action", "act",
            "--points", "P", "Q", "--format", "json"]
    outs = []
    for seed in ("1", "1234"):
        env = dict(os.environ, PYTHONHASHSEED=seed)
        proc = subprocess.run([sys.executable, "-m", "liecochain.cli"] + argv,
                              capture_output=True, env=env)
        assert proc.returncode == 1
        outs.append(proc.stdout)
    assert outs[0] == outs[1]


def test_json_schema_keys(capsys):
    _, out = run_cli(["cohomology", "--input", fixture("so3"), "--algebra", "so3",
                      "--subgroup", "so2", "--degree", "2", "--format", "json"], capsys)
    report = json.loads(out)
    assert list(report.keys()) == ["tool_version", "command", "verdicts", "timing_ms"]
    assert report["command"] == "cohomology"
    assert report["timing_ms"] == 0
    v = report["verdicts"][0]
    assert list(v.keys())[:3] == ["check", "subject", "verdict"]
    assert v["dims"] == {"A_rel": 1, "H": 1}
    assert v["representatives"] == ["a1^a2"]


def test_every_requested_check_reported(capsys):
    _, out = run_cli(["check", "cochain", "--input", fixture("intro"),
                      "--action", "act", "--chain", "chi",
                      "--forms", "alpha", "nu", "--fields", "R1",
                      "--points", "P0", "--format", "json"], capsys)
    report = json.loads(out)
    subjects = [(v["check"], v["subject"]) for v in report["verdicts"]]
    assert ("cochain_condition", "alpha") in subjects
    assert ("cochain_condition", "nu") in subjects
    assert ("stability", "R1") in subjects


def test_skipped_checks_carry_reason(tmp_path, capsys):
    # an unknown chain name is an input error
    code, out = run_cli(["check", "cochain", "--input", fixture("solvable"),
                         "--action", "act", "--chain", "badchain",
                         "--forms", "omega", "--format", "json"], capsys)
    assert code == 2
    # a chain that is not vertical fails the precondition and the requested
    # sub-checks are reported as skipped, never silently dropped
    text = (FIXTURES / "solvable.lch").read_text()
    bad_path = tmp_path / "solvable_bad.lch"
    bad_path.write_text(text + "chain badchain on M = D(x)^D(z)\n")
    code, out = run_cli(["check", "cochain", "--input", str(bad_path),
                         "--action", "act", "--chain", "badchain",
                         "--forms", "omega", "--format", "json"], capsys)
    report = json.loads(out)
    assert code == 1
    by_check = {v["check"]: v for v in report["verdicts"]}
    assert by_check["chain_basis"]["verdict"] == "fail"
    assert by_check["cochain_condition"]["verdict"] == "skipped"
    assert by_check["cochain_condition"]["reason"]


def test_exit_codes_for_input_errors(capsys):
    assert main(["validate", "--input", str(FIXTURES / "nosuch.lch")]) == 2
    assert main(["cohomology", "--input", fixture("so3"), "--algebra", "nope",
                 "--degree", "2"]) == 2
    assert main(["report", "--input", fixture("intro"), "--action", "act",
                 "--points", "NOPE"]) == 2
    # usage errors from the argument parser are also exit 2
    assert main(["no-such-command"]) == 2
    assert main(["cohomology", "--input", fixture("so3")]) == 2
    assert main(["check", "cochain", "--input", fixture("intro"),
                 "--action", "act"]) == 2


def test_cohomology_degree_out_of_range_is_input_error(capsys):
    assert main(["cohomology", "--input", fixture("so3"), "--algebra", "so3",
                 "--degree", "7"]) == 2


def test_ambiguous_object_name_is_input_error(tmp_path, capsys):
    ws = tmp_path / "amb.lch"
    ws.write_text("""chart M { coords = [x, y] }
lie_algebra g { dim 1 }
vectorfield v on M = D(x)
action act { algebra g chart M generators = [v] orbit_dim 1 }
form T on M = d(x)
chain T on M = D(x)
""")
    assert main(["check", "invariant", "--input", str(ws),
                 "--action", "act", "--object", "T"]) == 2
    assert "ambiguous" in capsys.readouterr().err


def test_point_on_wrong_chart_is_input_error(tmp_path, capsys):
    ws = tmp_path / "two_charts.lch"
    ws.write_text("""chart M { coords = [x, y, z] }
chart N { coords = [u, v] }
lie_algebra g { dim 1 }
vectorfield w on M = D(y)
action act { algebra g chart M generators = [w] orbit_dim 1 }
chain chi on M = D(y)
form f on M = d(y)
point P on N = (0, 0)
""")
    assert main(["rho", "--input", str(ws), "--action", "act",
                 "--chain", "chi", "--form", "f", "--points", "P"]) == 2
    assert "chart" in capsys.readouterr().err


def test_verbose_header(capsys, monkeypatch):
    monkeypatch.setenv("LIECOCHAIN_COLOR", "0")
    code, out = run_cli(["validate", "--input", fixture("so3"), "-v"], capsys)
    assert code == 0
    assert out.splitlines()[0].startswith("liecochain 0.1.0 | validate |")


def test_parse_error_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.lch"
    bad.write_text("chart M { coords = [x, x] }\n")
    assert main(["validate", "--input", str(bad)]) == 2
    err = capsys.readouterr().err
    assert "bad.lch:1" in err


def test_stdin_input(capsys, monkeypatch):
    import io
    text = (FIXTURES / "so3.lch").read_text()
    monkeypatch.setattr("sys.stdin", io.StringIO(text))
    code, out = run_cli(["cohomology", "--input", "-", "--algebra", "so3",
                         "--subgroup", "so2", "--degree", "2", "--format", "json"],
                        capsys)
    assert code == 0
    assert json.loads(out)["verdicts"][0]["dims"]["H"] == 1


def test_text_output_plain_without_tty(capsys, monkeypatch):
    monkeypatch.setenv("LIECOCHAIN_COLOR", "0")
    code, out = run_cli(["validate", "--input", fixture("intro")], capsys)
    assert code == 0
    assert "[pass] jacobi ab2" in out
    assert "\x1b[" not in out


def test_check_invariant_subcommand(capsys):
    code, out = run_cli(["check", "invariant", "--input", fixture("solvable"),
                         "--action", "act", "--object", "chi", "--format", "json"],
                        capsys)
    assert code == 0
    assert json.loads(out)["verdicts"][0]["verdict"] == "pass"
    # a coordinate form that is not invariant fails with a witness
    code, out = run_cli(["check", "invariant", "--input", fixture("solvable"),
                         "--action", "act", "--object", "omega", "--format", "json"],
                        capsys)
    assert code == 0  # omega = dx^dz / y is invariant
    code, out = run_cli(["check", "invariant", "--input", fixture("abelian_shear"),
                         "--action", "act", "--object", "alpha", "--format", "json"],
                        capsys)
    assert code == 1
    v = json.loads(out)["verdicts"][0]
    assert v["verdict"] == "fail" and "generator 1" in v["witness"]


def test_check_vertical_subcommand(capsys):
    code, out = run_cli(["check", "vertical", "--input", fixture("solvable"),
                         "--action", "act", "--object", "chi", "--points", "P",
                         "--format", "json"], capsys)
    assert code == 0
    v = json.loads(out)["verdicts"][0]
    assert v["witness"] == "-y*K(z)"
    assert v["frame"] == [1, 2]


def test_check_semibasic_subcommand(capsys):
    text = (FIXTURES / "intro.lch").read_text() + "form mu on M = A(x)*d(x)\n"
    import tempfile, os
    fd, path = tempfile.mkstemp(suffix=".lch")
    os.write(fd, text.encode())
    os.close(fd)
    try:
        code, out = run_cli(["check", "semibasic", "--input", path,
                             "--action", "act", "--object", "mu",
                             "--format", "json"], capsys)
        assert code == 0
        assert json.loads(out)["verdicts"][0]["verdict"] == "pass"
        code, out = run_cli(["check", "semibasic", "--input", path,
                             "--action", "act", "--object", "alpha",
                             "--format", "json"], capsys)
        assert code == 1
    finally:
        os.unlink(path)


def test_text_uses_display_notation_json_uses_surface_syntax(capsys, monkeypatch):
    monkeypatch.setenv("LIECOCHAIN_COLOR", "0")
    argv = ["check", "cochain", "--input", fixture("solvable"), "--action", "act",
            "--chain", "chi", "--fields", "Z1", "--points", "P"]
    _, text_out = run_cli(argv, capsys)
    assert "∂x∧∂y" in text_out      # residual shown as y²·K(z)·∂x∧∂y
    _, json_out = run_cli(argv + ["--format", "json"], capsys)
    report = json.loads(json_out)
    stability = next(v for v in report["verdicts"] if v["check"] == "stability")
    assert stability["witness"] == "y^2*K(z)*D(x)^D(y)"
    assert not any(k.startswith("_") for v in report["verdicts"] for k in v)
    _, coh_text = run_cli(["cohomology", "--input", fixture("so3"), "--algebra", "so3",
                           "--subgroup", "so2", "--degree", "2"], capsys)
    assert "α¹∧α²" in coh_text


def test_cohomology_trivial_subgroup(capsys):
    _, out = run_cli(["cohomology", "--input", fixture("abelian_shear"),
                      "--algebra", "ab2", "--degree", "1", "--format", "json"], capsys)
    report = json.loads(out)
    assert report["verdicts"][0]["dims"] == {"A_rel": 2, "H": 2}


def test_rotation_action_validates(capsys):
    code, out = run_cli(["validate", "--input", fixture("rotations"),
                         "--format", "json"], capsys)
    assert code == 0
    report = json.loads(out)
    assert all(v["verdict"] in ("pass", "skipped") for v in report["verdicts"])


def test_rotation_isotropy_at_pole(capsys):
    code, out = run_cli(["isotropy", "--input", fixture("rotations"),
                         "--action", "rot", "--point", "P", "--format", "json"],
                        capsys)
    assert code == 0
    v = json.loads(out)["verdicts"][0]
    assert v["dims"] == {"isotropy": 1, "fixed_tangent": 1, "fixed_vertical": 0}
    assert v["witness"] == "e3"


def test_report_with_components(capsys):
    # connected circle isotropy leaves a one-dimensional relative space
    code, out = run_cli(["report", "--input", fixture("rotations"),
                         "--action", "rot", "--points", "P", "--format", "json"],
                        capsys)
    assert code == 0
    dims = json.loads(out)["verdicts"][0]["dims"]
    assert dims == {"isotropy": 1, "A_rel": 1, "H": 1}
    # attaching the reflection component kills it: no invariant chain exists
    code, out = run_cli(["report", "--input", fixture("rotations"),
                         "--action", "rot", "--points", "P",
                         "--components", "o2", "--format", "json"], capsys)
    assert code == 1
    report = json.loads(out)
    assert report["verdicts"][0]["dims"] == {"isotropy": 1, "A_rel": 0, "H": 0}
    assert report["verdicts"][-1]["witness"] == "no invariant chain can exist"
