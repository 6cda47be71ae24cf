import json
from fractions import Fraction

import pytest

from qavg.cli import main
from qavg.config import ConfigError, ExperimentConfig, config_from_dict, load_config, parse_point


# -- config ---------------------------------------------------------------


def test_defaults_validate():
    cfg = ExperimentConfig().validate()
    assert cfg.pattern == [1, -1, 1, -1]
    assert cfg.tolerances.trend_factor == 1.5


def test_json_roundtrip(tmp_path):
    cfg = ExperimentConfig(q_list=[3, 5], d=6, seeds=[1, 2], point=["5/6", "1/3"])
    path = tmp_path / "c.json"
    path.write_text(cfg.to_json())
    back = load_config(path)
    assert back == cfg
    assert back.exponent_point() == (Fraction(5, 6), Fraction(1, 3))


@pytest.mark.parametrize(
    "data, where",
    [
        ({"q": [3]}, "config"),
        ({"tolerances": {"identity": 1e-8, "slack": 1}}, "tolerances"),
        ({"q_list": [4]}, "q_list"),
        ({"q_list": [15]}, "q_list"),
        ({"d": 4, "coeffs": [1, 1, 1]}, "coeffs"),
        ({"coeffs": [1, 0, 1, 1]}, "q_list"),
        ({"families": ["gaussian"]}, "families"),
        ({"d": 1}, "d"),
        ({"q_list": []}, "q_list"),
    ],
)
def test_invalid_configs_name_the_field(data, where):
    with pytest.raises(ConfigError, match=f"^{where}"):
        config_from_dict(data).validate()


def test_budget_in_config():
    with pytest.raises(ConfigError, match="grid budget exceeded"):
        config_from_dict({"q_list": [3], "grid_budget": 80}).validate()


def test_parse_point():
    assert parse_point("4/5, 1/5") == (Fraction(4, 5), Fraction(1, 5))
    with pytest.raises(ConfigError):
        parse_point("4/5")
    with pytest.raises(ConfigError):
        parse_point("1/0,1")


def test_unreadable_config(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    with pytest.raises(ConfigError):
        load_config(bad)


# -- CLI ------------------------------------------------------------------


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_fourier_writes_csv(tmp_path, capsys):
    code, out, _ = run(capsys, "verify-fourier", "--q", "3,5", "--dim", "2", "--trials", "5", "--out", str(tmp_path))
    assert code == 0
    assert "12/12 checks passed" in out
    lines = (tmp_path / "fourier.csv").read_text().splitlines()
    assert lines[0] == "q,d,coeffs,check,lhs,rhs,status,value,tolerance"
    assert len(lines) == 13


def test_verify_sigma_count_rows(tmp_path, capsys):
    code, out, _ = run(capsys, "verify-sigma", "--q", "3", "--coeffs=1,-1,1,-1", "--out", str(tmp_path))
    assert code == 0
    assert "q=3 count 33,33,exact-match" in out
    assert "point-count,33,33,exact-match" in (tmp_path / "sigma.csv").read_text()


def test_outputs_are_deterministic(tmp_path, capsys):
    for sub in ("a", "b"):
        run(capsys, "verify-kernel-bounds", "--q", "3", "--trials", "5", "--seed", "7", "--out", str(tmp_path / sub))
        run(capsys, "verify-averaging", "--q", "3", "--seed", "7", "--out", str(tmp_path / sub))
    for name in ("kernel_bounds.csv", "averaging.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert not list(tmp_path.rglob("*.tmp"))


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"q_list": [5], "d": 2, "trials": 3}))
    code, out, _ = run(capsys, "verify-fourier", "--config", str(cfg), "--q", "3", "--out", str(tmp_path))
    assert code == 0
    assert "q=3 d=2" in out and "q=5" not in out


@pytest.mark.parametrize(
    "argv, message",
    [
        (["verify-fourier", "--q", "9", "--dim", "8"], "grid budget exceeded"),
        (["verify-fourier", "--q", "4"], "even characteristic"),
        (["verify-sigma", "--q", "3", "--dim", "3"], "even d"),
        (["verify-averaging", "--q", "3", "--coeffs=1,1,1,2"], "theorem hypothesis fails: no d/2-dimensional subspace"),
        (["sharpness", "--q", "3,5", "--point", "5/6,1/3"], "probe meaningless"),
        (["sharpness", "--q", "3,5", "--point", "1/2,1/2"], "probe meaningless"),
        (["sharpness", "--q", "3,5", "--point", "1,1"], "probe meaningless"),
        (["sharpness", "--q", "3,5"], "--point"),
        (["verify-fourier", "--q", "3", "--coeffs", "1,x"], "integers"),
    ],
)
def test_usage_errors_exit_2(tmp_path, capsys, argv, message):
    code, _, err = run(capsys, *argv, "--out", str(tmp_path))
    assert code == 2
    assert message in err


def test_no_families_exit_2(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"families": []}))
    code, _, err = run(capsys, "verify-kernel-bounds", "--config", str(cfg), "--out", str(tmp_path))
    assert code == 2 and "no families" in err


def test_env_grid_budget(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("QAVG_GRID_BUDGET", "50")
    code, _, err = run(capsys, "verify-sigma", "--q", "3", "--out", str(tmp_path))
    assert code == 2 and "grid budget exceeded" in err


def test_math_failure_exit_1(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"tolerances": {"battery_ceiling": 0.1}}))
    code, out, _ = run(capsys, "verify-averaging", "--config", str(cfg), "--q", "3", "--out", str(tmp_path))
    assert code == 1 and "FAIL" in out


def test_sharpness_csv_has_fit_rows(tmp_path, capsys):
    code, out, _ = run(capsys, "sharpness", "--q", "3,5,7", "--point", "4/5,1/5", "--out", str(tmp_path))
    assert code == 0
    text = (tmp_path / "sharpness.csv").read_text()
    assert "sharpness-fit,subspace" in text and "sharpness-fit,delta" in text


def test_region_json(capsys):
    code, out, _ = run(capsys, "region", "--dim", "4", "--point", "4/5,1/5")
    doc = json.loads(out)
    assert code == 0
    assert doc["classification"] == "outside"
    assert ["5/6", "1/3"] in doc["vertices"]
    code, out, _ = run(capsys, "region", "--dim", "4", "--general", "--point", "4/5,1/5")
    assert json.loads(out)["classification"] == "vertex"
    code, out, _ = run(capsys, "region", "--dim", "4", "--point", "0,0")
    assert json.loads(out)["classification"] == "vertex"


def test_dump_grid_and_plot_script(tmp_path, capsys):
    code, out, _ = run(capsys, "dump-grid", "--q", "3", "--what", "kernel", "--out", str(tmp_path))
    assert code == 0
    assert (tmp_path / "kernel_q3_d4.csv").read_text().startswith("index,x_coords,re,im\n")
    code, out, _ = run(capsys, "plot-script", "--csv", "r/averaging.csv")
    assert code == 0 and "plot 'r/averaging.csv'" in out
