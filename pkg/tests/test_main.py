import pytest
import yaml

from mimo_rwma.constants import DEFAULTS
from mimo_rwma.main import DEFAULT_CONFIG_TEMPLATE, _build_parser, _merge_settings, build_config, main
from mimo_rwma.parser import ConfigError, parse_bool, parse_int, parse_snr_list
from mimo_rwma.report import read_results_csv


def _settings(argv):
    return _merge_settings(_build_parser().parse_args(argv))


def test_template_matches_defaults():
    data = yaml.safe_load(DEFAULT_CONFIG_TEMPLATE)
    for key in ("tx", "rx", "modulation", "frames", "sampler", "iters", "ns", "seed", "info_bytes", "init"):
        assert data[key] == DEFAULTS[key]
    assert data["snr_db"] == DEFAULTS["snr_db"]
    assert data["sigma2_override"] is None
    assert data["target_frame_errors"] == DEFAULTS["target_frame_errors"] == 50


def test_init_config_writes_template(tmp_path):
    target = tmp_path / "conf" / "mimo.yaml"
    assert main(["--init-config", str(target)]) == 0
    assert yaml.safe_load(target.read_text(encoding="utf-8"))["sampler"] == "rwma"


def test_defaults_build_reference_config():
    cfg = build_config(_settings([]))
    assert (cfg.tx, cfg.rx, cfg.modulation) == (3, 3, "qam16")
    assert cfg.frames == 300
    assert cfg.target_frame_errors == 50
    assert cfg.sampler.init == "zero_forcing"
    assert cfg.sampler.iterations == 200
    assert cfg.sampler.temperature_scale == 10.0
    assert tuple(cfg.snr_db) == (0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0)


def test_cli_overrides_yaml(tmp_path):
    config = tmp_path / "mimo.yaml"
    config.write_text("tx: 2\nrx: 2\nmodulation: qpsk\nsnr_db: [1, 3]\nrecord_timing: false\n", encoding="utf-8")
    cfg = build_config(_settings(["--config", str(config), "--rx", "4", "--snr", "5,7，9"]))
    assert (cfg.tx, cfg.rx, cfg.modulation) == (2, 4, "qpsk")
    assert tuple(cfg.snr_db) == (5.0, 7.0, 9.0)
    assert cfg.record_timing is False


def test_no_timing_flag():
    assert build_config(_settings(["--no-timing"])).record_timing is False


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        _settings(["--config", str(tmp_path / "absent.yaml")])


@pytest.mark.parametrize(
    "argv",
    [
        ["--mod", "qam64"],
        ["--frames", "0"],
        ["--tx", "3", "--rx", "2"],
        ["--sampler", "gibbs"],
        ["--ns", "0"],
        ["--temp-scale", "0.5"],
        ["--snr", ""],
        ["--iters", "abc"],
    ],
)
def test_invalid_arguments_exit_with_two(argv, tmp_path, capsys):
    assert main(argv + ["--out", str(tmp_path / "r.csv")]) == 2
    assert capsys.readouterr().err.startswith("错误:")
    assert not (tmp_path / "r.csv").exists()


def test_end_to_end_run(tmp_path):
    out = tmp_path / "runs" / "exact.csv"
    argv = [
        "--tx", "2", "--rx", "2", "--mod", "qpsk", "--snr", "6,10",
        "--frames", "2", "--sampler", "exact", "--ns", "0", "--info-bytes", "2",
        "--out", str(out), "--no-timing", "--log-level", "WARNING",
    ]
    assert main(argv) == 0
    points = read_results_csv(str(out))
    assert [p.snr_db for p in points] == [6.0, 10.0]
    assert all(p.sampler == "exact" and p.ns == 0 and p.seconds == 0.0 for p in points)
    assert (tmp_path / "runs" / "exact.meta.json").exists()


def test_parse_helpers():
    assert parse_bool("是", "flag") is True
    assert parse_bool(None, "flag", default=True) is True
    with pytest.raises(ConfigError):
        parse_bool("maybe", "flag")
    assert parse_int("", "n", 5) == 5
    with pytest.raises(ConfigError):
        parse_int("3", "n", min_value=4)
    assert parse_snr_list([0, 2.5]) == [0.0, 2.5]
    assert parse_snr_list(" 0, 2 ,4 ") == [0.0, 2.0, 4.0]
    with pytest.raises(ConfigError):
        parse_snr_list("0,x")
