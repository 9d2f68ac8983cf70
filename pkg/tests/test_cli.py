import math
from pathlib import Path

import numpy as np
import pytest

from cherenkov_wigner import cli
from cherenkov_wigner.cli import (ParseError, ScenarioConfig, ValidationError,
                                  parse_config, run_study)
from cherenkov_wigner.units import (IncompatibleDimensions, UnitContext,
                                    convert_units)

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"


def write_config(tmp_path, text, name="study.cfg"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


MINIMAL_SPREADING = """
study = spreading-time
beta = 0.99
sigma = 1e-4
omega = 1e-5
medium.n = 1.7
sweep.variable = theta-k
sweep.start = 20
sweep.stop = 80
sweep.samples = 13
"""


def test_parse_minimal_with_defaults(tmp_path):
    cfg = parse_config(write_config(tmp_path, MINIMAL_SPREADING))
    assert cfg.study == "spreading-time"
    assert cfg.beta == 0.99
    assert cfg.phi_k == 0.5 * math.pi  # documented default
    assert cfg.sweep_samples == 13


def test_parse_rejects_unknown_key(tmp_path):
    path = write_config(tmp_path, MINIMAL_SPREADING + "bogus.key = 1\n")
    with pytest.raises(ParseError, match="unknown key"):
        parse_config(path)


def test_parse_rejects_duplicate_and_malformed(tmp_path):
    path = write_config(tmp_path, MINIMAL_SPREADING + "beta = 0.5\n")
    with pytest.raises(ParseError, match="duplicate"):
        parse_config(path)
    path = write_config(tmp_path, "study spreading-time\n")
    with pytest.raises(ParseError, match="expected"):
        parse_config(path)


def test_validation_below_threshold_singular_angles(tmp_path):
    path = write_config(tmp_path, """
study = singular-angles
beta = 0.5
medium.n = 1.5
omega = 1e-6
""")
    with pytest.raises(ValidationError, match="Cherenkov threshold"):
        parse_config(path)


def test_validation_requires_sweep(tmp_path):
    path = write_config(tmp_path, "study = spreading-time\n")
    with pytest.raises(ValidationError, match="sweep.variable"):
        parse_config(path)


def test_validation_map_requires_t_out(tmp_path):
    path = write_config(tmp_path, """
study = wigner-map
beta = 0.99
medium.n = 1.4
omega = 1e-5
sigma = 1e-5
theta-k = 43.82
""")
    with pytest.raises(ValidationError, match="t-out"):
        parse_config(path)


def test_config_round_trip(tmp_path):
    cfg = parse_config(write_config(tmp_path, MINIMAL_SPREADING))
    canon = write_config(tmp_path, cfg.canonical_text(), "canon.cfg")
    cfg2 = parse_config(canon)
    for field in ScenarioConfig.__dataclass_fields__:
        a = getattr(cfg, field)
        b = getattr(cfg2, field)
        if isinstance(a, float):
            assert math.isclose(a, b, rel_tol=1e-14), field
        else:
            assert a == b, field


def test_unit_constants():
    from cherenkov_wigner.units import LAMBDAC_CM, TC_SECONDS
    assert abs(TC_SECONDS - 1.3e-21) < 0.05e-21
    assert abs(LAMBDAC_CM - 3.9e-11) < 0.05e-11


def test_unit_conversions():
    assert abs(convert_units(1e6, "t_c", "fs") - 1.288) < 2e-3
    assert abs(convert_units(1e6, "lambda_c", "um") - 0.386) < 1e-3
    assert abs(convert_units(1e-5, "m_e", "eV") - 5.10999) < 1e-5
    assert abs(convert_units(2.0, "MeV", "m_e") - 3.913905) < 1e-5


def test_unit_round_trip(rng):
    ctx = UnitContext()
    pairs = [("t_c", "fs"), ("as", "ps"), ("m_e", "eV"), ("lambda_c", "nm"),
             ("cm", "um")]
    for a, b in pairs:
        x = float(rng.uniform(0.1, 10.0))
        back = convert_units(convert_units(x, a, b, ctx), b, a, ctx)
        assert abs(back - x) < 1e-12 * x


def test_incompatible_dimensions():
    with pytest.raises(IncompatibleDimensions):
        convert_units(1.0, "t_c", "eV")
    with pytest.raises(IncompatibleDimensions):
        convert_units(1.0, "parsec", "nm")


def test_spreading_time_study_output(tmp_path):
    cfg = parse_config(write_config(tmp_path, MINIMAL_SPREADING))
    artifacts, flagged = run_study(cfg, tmp_path, "csv+svg")
    csv = artifacts[0]
    lines = csv.read_text().splitlines()
    rows = [l for l in lines if not l.startswith("#")]
    assert len(rows) == 13
    assert any(l.endswith(".svg") is False for l in lines)
    assert artifacts[1].suffix == ".svg"
    assert not flagged


def test_single_sample_sweep_no_plot(tmp_path):
    text = MINIMAL_SPREADING.replace("sweep.samples = 13",
                                     "sweep.samples = 1")
    cfg = parse_config(write_config(tmp_path, text))
    artifacts, _ = run_study(cfg, tmp_path, "csv+svg")
    rows = [l for l in artifacts[0].read_text().splitlines()
            if not l.startswith("#")]
    assert len(rows) == 1
    assert all(a.suffix == ".csv" for a in artifacts)


def test_csv_determinism(tmp_path):
    cfg = parse_config(write_config(tmp_path, MINIMAL_SPREADING))
    a1, _ = run_study(cfg, tmp_path / "run1", "csv")
    a2, _ = run_study(cfg, tmp_path / "run2", "csv")
    assert a1[0].read_bytes() == a2[0].read_bytes()


def test_fig5_spreading_time_extremum_and_sign_changes(tmp_path):
    # spreading-time table shows the extremum at the Cherenkov angle and
    # two sign-change rows of 1/t_d
    path = write_config(tmp_path, """
study = spreading-time
beta = 0.99
sigma = 1e-4
omega = 1e-5
medium.n = 1.7
sweep.variable = theta-k
sweep.start = 40
sweep.stop = 70
sweep.samples = 301
""")
    cfg = parse_config(path)
    artifacts, _ = run_study(cfg, tmp_path, "csv")
    rows = [l.split(",") for l in artifacts[0].read_text().splitlines()
            if not l.startswith("#")]
    thetas = np.array([float(r[0]) for r in rows])
    inv = np.array([float(r[2]) for r in rows])
    flips = np.sum(np.sign(inv[:-1]) * np.sign(inv[1:]) < 0)
    assert flips == 2
    theta_ch = math.degrees(math.acos(1 / (0.99 * 1.7)))
    # |t_d| maxima sit next to the Cherenkov angle
    peak = thetas[int(np.argmin(np.abs(inv)))]
    assert abs(peak - theta_ch) < 0.5


def test_cli_main_exit_codes(tmp_path):
    path = write_config(tmp_path, MINIMAL_SPREADING)
    code = cli.main(["spreading-time", "--config", str(path),
                     "--out-dir", str(tmp_path / "out")])
    assert code == 0
    code = cli.main(["singular-angles", "--config", str(path),
                     "--out-dir", str(tmp_path / "out")])
    assert code == 1  # study mismatch


def test_cli_main_error_on_bad_config(tmp_path):
    path = write_config(tmp_path, "study = nonsense\n")
    assert cli.main(["spreading-time", "--config", str(path)]) == 1


@pytest.mark.parametrize("config", sorted(CONFIG_DIR.glob("*.cfg")),
                         ids=lambda p: p.name)
def test_bundled_configs_run(config, tmp_path):
    cfg = parse_config(config)
    artifacts, flagged = run_study(cfg, tmp_path, "csv+svg")
    assert artifacts, config.name
    for art in artifacts:
        assert art.exists()


def test_n_sweep_gated_by_cherenkov_threshold(tmp_path):
    # the shift curve exists only above the radiation threshold n >= 1/beta
    path = write_config(tmp_path, """
study = arrival-shift
beta = 0.7
sigma = 1e-5
omega = 1e-6
medium.n = 1.5
p-perp = 1e-5
theta-k = 10
sweep.variable = n
sweep.start = 1.2
sweep.stop = 1.8
sweep.samples = 25
""")
    cfg = parse_config(path)
    artifacts, _ = run_study(cfg, tmp_path, "csv")
    rows = [l.split(",") for l in artifacts[0].read_text().splitlines()
            if not l.startswith("#")]
    n_min = 1.0 / 0.7
    for row in rows:
        n_val, dt = float(row[0]), float(row[1])
        if n_val < n_min:
            assert math.isnan(dt)
        else:
            assert math.isfinite(dt)


def test_flagged_study_exits_two(tmp_path):
    # emission angles below 1/gamma trip the WKB small-angle flag
    path = write_config(tmp_path, """
study = arrival-shift
beta = 0.999
sigma = 1e-6
omega = 1e-6
medium.n = 1.3
p-perp = 1e-6
sweep.variable = theta-k
sweep.start = 1
sweep.stop = 3
sweep.samples = 3
""")
    code = cli.main(["arrival-shift", "--config", str(path),
                     "--out-dir", str(tmp_path / "out")])
    assert code == 2
