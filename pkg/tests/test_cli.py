"""Command-line interface: artifacts, tables, exit codes, round trips."""

import json

from bivirus import cli, fixtures
from bivirus.model import model_hash, model_to_dict, save_model

# Frozen canonical digests of the built-in models; a change to any fixture
# constant is a deliberate, reviewed event.
FIXTURE_HASHES = {
    "example1": "2cf1fa45b52760bc958edd0a6363e76d2f525970713f2e50295a37e893687cdb",
    "example2": "7403b2a2d1e0bfe20af02eca3e7756dc39e5b701516714a844dc118e03c144b7",
    "mixed-n2": "1d5037d90a1b723d24d337c8c9f19b54ffa549c4f16498b8a288a877b48b9812",
    "scalar1": "5fd198b25d85dfd9f00a62a226491b9679e90681a73281a469f795d7b8df5509",
}

FAST = ["--random-seeds", "150", "--confirm-tail", "100"]


def run_cli(args):
    return cli.main([str(a) for a in args])


def test_fixture_integrity():
    assert set(FIXTURE_HASHES) == set(fixtures.fixture_names())
    for name, digest in FIXTURE_HASHES.items():
        assert model_hash(fixtures.get_fixture(name)) == digest, name


def test_validate_pass(capsys):
    assert run_cli(["validate", "--fixture", "example1"]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "PASS" in out and "FAIL" not in out


def test_validate_assumption_failure(tmp_path, capsys):
    model = fixtures.get_fixture("scalar1")
    doc = model_to_dict(model)
    doc["B1"] = [[0.9]]  # R1 < 1
    path = tmp_path / "weak.json"
    path.write_text(json.dumps(doc))
    code = run_cli(["validate", "--model", path])
    assert code == cli.EXIT_ASSUMPTION
    out = capsys.readouterr().out
    assert "single-virus" in out


def test_equilibria_table_rounded(tmp_path, capsys):
    code = run_cli(
        ["equilibria", "--fixture", "scalar1", "--out", tmp_path] + FAST
    )
    assert code == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "0.5000" in out and "0.6667" in out
    assert (tmp_path / "atlas.json").exists()


def test_equilibria_example1_values(tmp_path, capsys):
    code = run_cli(["equilibria", "--fixture", "example1", "--out", tmp_path])
    assert code == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "10 equilibria" in out
    assert "0.6157" in out  # boundary profile at 4 decimals
    data = json.loads((tmp_path / "atlas.json").read_text())
    assert data["complete"] is True
    assert len(data["equilibria"]) == 10
    # table is sorted by class then n_k
    classes = [e["class"] for e in data["equilibria"]]
    assert classes[0] == "healthy"
    assert classes.count("coexistence") == 7


def test_count_example2(tmp_path, capsys):
    code = run_cli(["count", "--fixture", "example2", "--out", tmp_path] + FAST)
    assert code == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "Morse vector c: 1 0 0 0 0 0 0 1 2" in out
    assert "✓" in out and "✗" not in out
    data = json.loads((tmp_path / "count.json").read_text())
    assert data["ph_sum"] == 1
    assert data["c"] == [1, 0, 0, 0, 0, 0, 0, 1, 2]


def test_count_round_trip_byte_identical(tmp_path):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    assert (
        run_cli(["equilibria", "--fixture", "example2", "--out", out_a] + FAST)
        == cli.EXIT_OK
    )
    assert (
        run_cli(["count", "--fixture", "example2", "--out", out_a] + FAST)
        == cli.EXIT_OK
    )
    assert (
        run_cli(["count", "--atlas", out_a / "atlas.json", "--out", out_b])
        == cli.EXIT_OK
    )
    in_process = (out_a / "count.json").read_bytes()
    from_file = (out_b / "count.json").read_bytes()
    assert in_process == from_file


def test_exit_codes_stable_across_formats(tmp_path):
    for fmt in ("table", "json"):
        code = run_cli(
            ["count", "--fixture", "scalar1", "--out", tmp_path, "--format", fmt]
            + FAST
        )
        assert code == cli.EXIT_OK


def test_degenerate_model_exit_code(tmp_path, capsys):
    model = fixtures.get_fixture("scalar1")
    doc = model_to_dict(model)
    doc["B2"] = [[2.0]]  # same ratio for both viruses: continuum of roots
    path = tmp_path / "degenerate.json"
    path.write_text(json.dumps(doc))
    code = run_cli(["equilibria", "--model", path, "--out", tmp_path] + FAST)
    assert code == cli.EXIT_DEGENERATE


def test_counting_violation_on_complete_atlas_exit_code(tmp_path):
    # Deleting a stable coexistence entry from a complete atlas breaks the
    # index sum; `count` on the doctored file must exit with the
    # counting-violation code.
    assert (
        run_cli(["equilibria", "--fixture", "example2", "--out", tmp_path] + FAST)
        == cli.EXIT_OK
    )
    atlas_path = tmp_path / "atlas.json"
    data = json.loads(atlas_path.read_text())
    kept = [
        rec
        for rec in data["equilibria"]
        if not (rec["class"] == "coexistence" and rec["n_k"] == 8)
    ]
    assert len(kept) == len(data["equilibria"]) - 1
    data["equilibria"] = kept
    doctored = tmp_path / "doctored.json"
    doctored.write_text(json.dumps(data))
    code = run_cli(["count", "--atlas", doctored, "--out", tmp_path])
    assert code == cli.EXIT_COUNTING


def test_unknown_fixture_lists_available(capsys):
    code = run_cli(["validate", "--fixture", "nope"])
    assert code == cli.EXIT_ERROR
    err = capsys.readouterr().err
    for name in fixtures.fixture_names():
        assert name in err


def test_malformed_model_file(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"n": 2')
    code = run_cli(["validate", "--model", path])
    assert code == cli.EXIT_ERROR
    assert "line" in capsys.readouterr().err


def test_simulate_writes_csv(tmp_path):
    code = run_cli(
        [
            "simulate",
            "--fixture",
            "scalar1",
            "--out",
            tmp_path,
            "--x0",
            "0.2,0.1",
            "--t-max",
            "50",
        ]
    )
    assert code == cli.EXIT_OK
    text = (tmp_path / "trajectory_0.csv").read_text()
    assert text.splitlines()[0] == "t,x1_1,x2_1"
    assert len(text.splitlines()) > 10


def test_simulate_face_start_stays_on_face(tmp_path):
    code = run_cli(
        [
            "simulate",
            "--fixture",
            "scalar1",
            "--out",
            tmp_path,
            "--x0",
            "0.4,0.0",
            "--t-max",
            "50",
        ]
    )
    assert code == cli.EXIT_OK
    rows = (tmp_path / "trajectory_0.csv").read_text().splitlines()[1:]
    x2 = [float(r.split(",")[2]) for r in rows]
    assert max(abs(v) for v in x2) == 0.0


def test_basins_tally(tmp_path, capsys):
    code = run_cli(
        [
            "basins",
            "--fixture",
            "mixed-n2",
            "--out",
            tmp_path,
            "--samples",
            "20",
        ]
        + FAST
    )
    assert code == cli.EXIT_OK
    data = json.loads((tmp_path / "basins.json").read_text())
    assert data["samples"] == 20
    assert data["unresolved"] == 0
    assert len(data["tally"]) == 1


def test_report_directory(tmp_path):
    code = run_cli(
        [
            "report",
            "--fixture",
            "scalar1",
            "--out",
            tmp_path,
            "--samples",
            "10",
        ]
        + FAST
    )
    assert code == cli.EXIT_OK
    index = json.loads((tmp_path / "index.json").read_text())
    for artifact in index["artifacts"].values():
        assert (tmp_path / artifact).exists()
    assert index["complete"] is True
    assert index["model_hash"] == FIXTURE_HASHES["scalar1"]


def test_outdir_env_variable(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(cli.OUTDIR_ENV, str(tmp_path / "envout"))
    code = run_cli(["equilibria", "--fixture", "scalar1"] + FAST)
    assert code == cli.EXIT_OK
    assert (tmp_path / "envout" / "atlas.json").exists()


def test_model_file_round_trip_through_cli(tmp_path, capsys):
    path = tmp_path / "model.json"
    save_model(fixtures.get_fixture("example2"), path)
    code = run_cli(["validate", "--model", path])
    assert code == cli.EXIT_OK
