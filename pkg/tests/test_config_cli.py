import numpy as np
import pytest

from fradiff import (
    ConfigError,
    FracPLaplacian,
    PorousMedium,
    fit_decay_exponent,
    initial_field,
    parse_config,
    run_scenario,
)
from fradiff.cli import main
from fradiff.runner import csv_header, read_report_csv

BASE = """
operator.kind = porous_medium
operator.m = 2.0
grid.dim = 1
grid.n = 41
mesh.alpha = 0.5
mesh.t_end = 300.0
mesh.steps = 60
mesh.kind = graded
ic.preset = bump
"""


def test_parse_config_round_trip():
    cfg = parse_config(BASE)
    assert cfg.operator == PorousMedium(m=2.0)
    assert cfg.grid.npoints == (41,)
    assert cfg.mesh.alpha == 0.5
    assert cfg.mesh.grading == 4.0  # graded default r = 2/alpha
    assert cfg.ic_preset == "bump"


def test_parse_config_comments_and_unknown_keys():
    cfg = parse_config(BASE + "\n# a comment\n")
    assert cfg.mesh.nsteps == 60
    with pytest.raises(ConfigError, match="bogus.key"):
        parse_config(BASE + "bogus.key = 1\n")


def test_parse_config_operator_terms():
    text = BASE.replace("operator.kind = porous_medium\noperator.m = 2.0",
                        "operator.kind = frac_sum\n"
                        "operator.terms = 0.4:2:1, 0.6:3:1.5")
    cfg = parse_config(text)
    assert cfg.operator.terms == ((0.4, 2.0, 1.0), (0.6, 3.0, 1.5))


def test_parse_config_rejects_vanishing_datum():
    with pytest.raises(ConfigError, match="vanish identically"):
        parse_config(BASE + "ic.amplitude = 0.0\n")


def test_initial_field_presets_nonnegative():
    for preset in ("bump", "eigen", "plateau", "random"):
        cfg = parse_config(BASE + f"ic.preset = {preset}\n".replace(
            "ic.preset = bump", ""))
        cfg = parse_config(BASE.replace("ic.preset = bump",
                                        f"ic.preset = {preset}"))
        u0 = initial_field(cfg)
        assert np.all(u0.values >= 0.0)
        assert np.max(u0.values) > 0.0
        assert np.all(u0.values[cfg.grid.boundary_mask()] == 0.0)


def test_random_preset_is_seeded():
    cfg_a = parse_config(BASE.replace("ic.preset = bump", "ic.preset = random"))
    cfg_b = parse_config(BASE.replace("ic.preset = bump", "ic.preset = random"))
    assert np.array_equal(initial_field(cfg_a).values,
                          initial_field(cfg_b).values)


def test_csv_header_schema():
    assert csv_header((2.0,)) == "t,norm_s2,sa_ratio,az_slack,caputo_v,bound_value"
    assert csv_header((2.0, 3.5)) == (
        "t,norm_s2,norm_s3.5,sa_ratio,az_slack,caputo_v,bound_value"
    )


def test_run_writes_deterministic_csv(tmp_path):
    cfg_file = tmp_path / "case.cfg"
    out = tmp_path / "out.csv"
    cfg_file.write_text(BASE + f"ic.preset = random\noutput.csv = {out}\n"
                        .replace("ic.preset = bump", ""))
    text = BASE.replace("ic.preset = bump", "ic.preset = random")
    cfg_file.write_text(text + f"output.csv = {out}\n")
    assert main(["run", str(cfg_file)]) == 0
    first = out.read_bytes()
    assert main(["run", str(cfg_file)]) == 0
    assert out.read_bytes() == first
    assert first.decode().splitlines()[0] == csv_header((2.0,))


def test_csv_round_trip_matches_in_process_fit(tmp_path):
    out = tmp_path / "fit.csv"
    cfg = parse_config(BASE + f"output.csv = {out}\n")
    report = run_scenario(cfg)
    in_process = report.fitted[2.0][0]
    table = read_report_csv(str(out))
    re_fit = fit_decay_exponent(table["t"], table["norm_s2"])[0]
    assert abs(re_fit - in_process) < 1e-12


def test_cli_ml_and_fode(capsys):
    assert main(["ml", "--alpha", "0.5", "--z", "-1.0"]) == 0
    out = capsys.readouterr().out
    assert abs(float(out.strip()) - 0.4275835761558071) < 1e-12
    assert main(["fode", "--alpha", "0.5", "--gamma", "2", "--c", "1",
                 "--v0", "1", "--t-end", "10", "--steps", "100"]) == 0


def test_cli_check_sa(tmp_path):
    cfg_file = tmp_path / "case.cfg"
    cfg_file.write_text(BASE)
    assert main(["check-sa", str(cfg_file), "--snapshot", "3"]) == 0
    assert main(["check-sa", str(cfg_file), "--snapshot", "999"]) == 2


def test_cli_usage_and_config_errors(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["not-a-command"])
    assert exc.value.code == 2
    bad = tmp_path / "bad.cfg"
    bad.write_text(BASE + "operator.nonsense = 1\n")
    assert main(["run", str(bad)]) == 2
    assert main(["run", str(tmp_path / "missing.cfg")]) == 2


def test_2d_config_parses():
    text = """
operator.kind = directional_frac
operator.terms = 0.5:1, 0.5:1
grid.dim = 2
grid.n = 11,11
mesh.alpha = 0.5
mesh.t_end = 1.0
mesh.steps = 4
ic.preset = bump
"""
    cfg = parse_config(text)
    assert cfg.grid.dim == 2
    u0 = initial_field(cfg)
    assert u0.values.shape == (11, 11)
