"""End-to-end checks for the command line interface and suite runner."""

import dataclasses
import json

import numpy as np

from cayleykit.cli import (
    EXIT_CHECK_FAILED,
    EXIT_MALFORMED,
    EXIT_OK,
    EXIT_UNREADABLE,
    SuiteConfig,
    classify_plane,
    main,
    run_suite,
)

# -- suite runner ----------------------------------------------------------------------


def _cfg(**kw):
    return SuiteConfig(**kw)


def test_structure_suite_is_all_green():
    report = run_suite(_cfg(suite="structure"))
    assert report["summary"]["fail"] == 0
    assert report["summary"]["warn"] == 0
    assert report["summary"]["total"] >= 10


def test_checks_are_sorted_and_well_formed():
    report = run_suite(_cfg(suite="structure"))
    names = [c["name"] for c in report["checks"]]
    assert names == sorted(names)
    for c in report["checks"]:
        assert c["status"] in ("pass", "warn", "fail")
        assert c["name"] and c["claim"]


def test_planes_suite_small_sample():
    report = run_suite(_cfg(suite="planes", samples=40, seed=3))
    assert report["summary"]["fail"] == 0


def test_graphs_suite_small_sample():
    report = run_suite(_cfg(suite="graphs", samples=40, seed=3))
    assert report["summary"]["fail"] == 0


def test_angles_suite_small_sample():
    report = run_suite(_cfg(suite="angles", samples=40, seed=3))
    assert report["summary"]["fail"] == 0


def test_index_suite():
    report = run_suite(_cfg(suite="index"))
    assert report["summary"]["fail"] == 0
    assert report["summary"]["warn"] == 0


def test_torus_suite_small_cutoff():
    report = run_suite(_cfg(suite="torus", K=1, samples=40, seed=3))
    assert report["summary"]["fail"] == 0


def test_report_is_json_serializable_with_exact_entries():
    report = run_suite(_cfg(suite="structure", backend="exact"))
    doc = json.dumps(report, sort_keys=True)
    assert "structure" in doc


def test_config_echo_round_trips():
    cfg = _cfg(suite="index", seed=11, samples=50)
    report = run_suite(cfg)
    assert report["config"]["suite"] == "index"
    assert report["config"]["seed"] == 11
    assert report["config"]["samples"] == 50


# -- exit codes through main() ---------------------------------------------------------


def test_main_verify_structure_exits_zero(capsys):
    assert main(["verify-structure", "--quiet"]) == EXIT_OK
    assert capsys.readouterr().out == ""


def test_main_writes_json_report(tmp_path, capsys):
    out = tmp_path / "report.json"
    code = main(["index", "--json", str(out), "--quiet"])
    assert code == EXIT_OK
    report = json.loads(out.read_text())
    assert report["tool"] == "cayleykit"
    assert report["summary"]["fail"] == 0
    capsys.readouterr()


def test_same_seed_gives_identical_reports(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        code = main(["angles", "--seed", "7", "--samples", "30",
                     "--json", str(path), "--quiet"])
        assert code == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    capsys.readouterr()


def test_unreadable_file_exit_code(tmp_path, capsys):
    missing = tmp_path / "nope.txt"
    assert main(["classify-plane", str(missing)]) == EXIT_UNREADABLE
    capsys.readouterr()


def test_malformed_number_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("1 0 zebra 0\n0 1 0 0\n")
    assert main(["classify-plane", str(bad)]) == EXIT_MALFORMED
    capsys.readouterr()


def test_ragged_rows_exit_code(tmp_path, capsys):
    bad = tmp_path / "ragged.txt"
    bad.write_text("1 0 0 0\n0 1 0\n")
    assert main(["classify-plane", str(bad)]) == EXIT_MALFORMED
    capsys.readouterr()


def test_odd_dimensions_exit_code(tmp_path, capsys):
    bad = tmp_path / "odd.txt"
    bad.write_text("1 0 0\n0 1 0\n")
    assert main(["classify-plane", str(bad)]) == EXIT_MALFORMED
    capsys.readouterr()


def test_reject_flag_refuses_skewed_frame(tmp_path, capsys):
    skew = tmp_path / "skew.txt"
    skew.write_text(
        "2 0 0 0 0 0 0 0\n0 1 0 0 0 0 0 0\n"
        "0 0 1 0 0 0 0 0\n0 0 0 1 0 0 0 0\n")
    assert main(["classify-plane", str(skew), "--reject"]) == EXIT_MALFORMED
    capsys.readouterr()


def test_skewed_frame_is_fixed_and_warned(tmp_path):
    skew = tmp_path / "skew.txt"
    skew.write_text(
        "2 0 0 0 0 0 0 0\n0 1 0 0 0 0 0 0\n"
        "0 0 1 0 0 0 0 0\n0 0 0 1 0 0 0 0\n")
    report = classify_plane(str(skew), _cfg(suite="planes"))
    by_name = {c["name"]: c for c in report["checks"]}
    ortho = by_name["input:orthonormality"]
    assert ortho["status"] == "warn"
    assert ortho["details"]["action"] == "orthonormalized"
    assert by_name["plane:complex"]["details"]["is_complex"] is True


def test_classify_coordinate_complex_plane(tmp_path):
    frame = tmp_path / "c2.txt"
    frame.write_text(
        "1 0 0 0 0 0 0 0\n0 1 0 0 0 0 0 0\n"
        "0 0 1 0 0 0 0 0\n0 0 0 1 0 0 0 0\n")
    report = classify_plane(str(frame), _cfg(suite="planes"))
    by_name = {c["name"]: c for c in report["checks"]}
    assert by_name["plane:complex"]["details"]["is_complex"] is True
    calib = by_name["plane:calibration"]
    assert calib["details"]["is_cayley"] is True
    assert abs(calib["details"]["calibration_value"] - 1.0) < 1e-12


def test_classify_half_dimensional_counterexample(tmp_path):
    frame = tmp_path / "line.txt"
    frame.write_text("1 0 0 0\n0 0 0 1\n")
    report = classify_plane(str(frame), _cfg(suite="planes"))
    by_name = {c["name"]: c for c in report["checks"]}
    assert by_name["plane:complex"]["details"]["is_complex"] is False
    assert "plane:calibration" not in by_name


def test_fraction_tokens_and_comments_accepted(tmp_path, capsys):
    frame = tmp_path / "frac.txt"
    frame.write_text(
        "# a coordinate plane with exact entries\n"
        "3/5 4/5 0 0 0 0 0 0\n-4/5 3/5 0 0 0 0 0 0\n"
        "0 0 1 0 0 0 0 0\n0 0 0 1 0 0 0 0\n")
    assert main(["classify-plane", str(frame), "--quiet"]) == EXIT_OK
    capsys.readouterr()


def test_graph_verify_solution_file(tmp_path, capsys):
    tilt = tmp_path / "zero.txt"
    tilt.write_text("\n".join("0 0 0 0" for _ in range(4)) + "\n")
    assert main(["graph-verify", str(tilt), "--quiet"]) == EXIT_OK
    capsys.readouterr()


def test_graph_verify_non_solution_fails(tmp_path, capsys):
    tilt = tmp_path / "tilt.txt"
    tilt.write_text("\n".join("0.05 0.05 0.05 0.05" for _ in range(4)) + "\n")
    assert main(["graph-verify", str(tilt)]) == EXIT_CHECK_FAILED
    capsys.readouterr()


def test_graph_verify_wrong_shape(tmp_path, capsys):
    tilt = tmp_path / "small.txt"
    tilt.write_text("0 0\n0 0\n")
    assert main(["graph-verify", str(tilt)]) == EXIT_MALFORMED
    capsys.readouterr()


def test_graph_solve_from_file(tmp_path, capsys):
    start = tmp_path / "start.txt"
    start.write_text("\n".join("0.04 -0.03 0.02 0.01" for _ in range(4)) + "\n")
    out = tmp_path / "sol.json"
    code = main(["graph-solve", str(start), "--json", str(out), "--quiet"])
    assert code == EXIT_OK
    report = json.loads(out.read_text())
    by_name = {c["name"]: c for c in report["checks"]}
    assert by_name["newton:converged"]["status"] == "pass"
    sol = np.array(by_name["newton:converged"]["details"]["solution"])
    assert sol.shape == (4, 4)
    capsys.readouterr()


def test_graph_solve_seeded(capsys):
    assert main(["graph-solve", "--seed", "5", "--quiet"]) == EXIT_OK
    capsys.readouterr()


def test_index_flags_topology(tmp_path, capsys):
    out = tmp_path / "ix.json"
    code = main(["index", "--sign", "-16", "--euler", "24",
                 "--self-int", "0", "--json", str(out), "--quiet"])
    assert code == EXIT_OK
    report = json.loads(out.read_text())
    by_name = {c["name"]: c for c in report["checks"]}
    assert by_name["index:from-topology"]["details"]["index"] == 4
    capsys.readouterr()


def test_index_flags_both_routes_agree(tmp_path, capsys):
    out = tmp_path / "ix2.json"
    code = main(["index", "--sign", "-16", "--euler", "24", "--self-int", "0",
                 "--c1sq", "0", "--c2", "24", "--c2nu", "0",
                 "--json", str(out), "--quiet"])
    assert code == EXIT_OK
    report = json.loads(out.read_text())
    by_name = {c["name"]: c for c in report["checks"]}
    assert by_name["index:route-agreement"]["status"] == "pass"
    assert by_name["index:from-chern"]["details"]["index"] == 4
    capsys.readouterr()


def test_index_incomplete_flags(capsys):
    assert main(["index", "--sign", "-16"]) == EXIT_MALFORMED
    capsys.readouterr()


def test_non_integral_chern_combination(capsys):
    assert main(["index", "--c1sq", "1", "--c2", "0", "--c2nu", "0"]) \
        == EXIT_MALFORMED
    capsys.readouterr()


def test_bad_ladder_values(capsys):
    assert main(["torus", "--t-ladder", "a,b,c"]) == EXIT_MALFORMED
    assert main(["torus", "--t-ladder", "0.1,0.01"]) == EXIT_MALFORMED
    capsys.readouterr()


def test_global_flags_accepted_before_subcommand(capsys):
    assert main(["--seed", "9", "--quiet", "index"]) == EXIT_OK
    capsys.readouterr()


def test_config_validation_rejects_bad_values():
    for kw in ({"suite": "bogus"}, {"tol": 0.0}, {"samples": 0},
               {"K": -1}, {"backend": "decimal"}):
        try:
            _cfg(**kw)
        except Exception:
            continue
        raise AssertionError("expected rejection for %r" % (kw,))


def test_replace_keeps_frozen_config_usable():
    cfg = _cfg(suite="all", seed=2)
    cfg2 = dataclasses.replace(cfg, suite="index")
    assert cfg.suite == "all" and cfg2.suite == "index"
    assert cfg2.seed == 2
