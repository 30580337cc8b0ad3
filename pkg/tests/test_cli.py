import csv
import subprocess
import sys

import numpy as np
import pytest

from terrainlink import dump_profile, load_profile
from terrainlink.cli import main
from terrainlink.config import parse_config
from terrainlink.errors import ConfigError
from terrainlink.fading import load_envelope
from terrainlink.linksim import load_records, load_stats

from conftest import hill_points


@pytest.fixture
def flat_csv(tmp_path):
    path = tmp_path / "flat.csv"
    d = np.linspace(0, 100_000, 201)
    path.write_text("distance_m,elevation_m\n" + "".join(f"{x},50\n" for x in d))
    return path


@pytest.fixture
def hill_csv(tmp_path):
    from terrainlink import TerrainProfile
    d, e = hill_points()
    path = tmp_path / "hill.csv"
    path.write_bytes(dump_profile(TerrainProfile(tuple(d), tuple(e))))
    return path


def read_sweep(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [(float(r["distance_m"]), float(r["loss_db"]), r["mode"]) for r in rows]


class TestSweep:
    def test_free_space_two_decades(self, tmp_path):
        out = tmp_path / "fs.csv"
        code = main(["sweep", "--model", "freespace", "--d-min", "1000", "--d-max", "100000",
                     "--n-points", "21", "--log", "--out", str(out)])
        assert code == 0
        rows = read_sweep(out)
        assert out.read_text().splitlines()[0] == "distance_m,loss_db,mode"
        assert rows[-1][1] - rows[0][1] == pytest.approx(40.0, abs=1e-9)
        assert [r[0] for r in rows] == sorted(r[0] for r in rows)
        assert rows[0][0] == 1000.0 and rows[-1][0] == 100000.0

    def test_grid_order_matches_request(self, tmp_path):
        out = tmp_path / "lin.csv"
        main(["sweep", "--d-min", "100", "--d-max", "1000", "--n-points", "10", "--out", str(out)])
        np.testing.assert_allclose([r[0] for r in read_sweep(out)], np.linspace(100, 1000, 10))

    def test_tirem_flat_is_line_of_sight(self, tmp_path, flat_csv):
        out = tmp_path / "t.csv"
        code = main(["sweep", "--model", "tirem", "--profile", str(flat_csv), "--d-min", "1000",
                     "--d-max", "50000", "--n-points", "12", "--out", str(out)])
        assert code == 0
        assert {r[2] for r in read_sweep(out)} == {"LineOfSight"}

    def test_single_point_is_usage_error(self, tmp_path, capsys):
        out = tmp_path / "x.csv"
        code = main(["sweep", "--d-min", "1", "--d-max", "2", "--n-points", "1", "--out", str(out)])
        assert code == 1
        assert not out.exists()
        assert "n-points" in capsys.readouterr().err

    @pytest.mark.parametrize("dmin, dmax", [("0", "10"), ("10", "5"), ("-1", "5")])
    def test_bad_range(self, dmin, dmax):
        assert main(["sweep", f"--d-min={dmin}", f"--d-max={dmax}"]) == 1

    def test_beyond_profile(self, tmp_path, hill_csv):
        code = main(["sweep", "--model", "tirem", "--profile", str(hill_csv), "--d-min", "1000",
                     "--d-max", "50000", "--out", str(tmp_path / "x.csv")])
        assert code == 1

    def test_out_of_range_frequency_exit_2(self, tmp_path, capsys):
        code = main(["sweep", "--freq-mhz", "25000", "--d-min", "1", "--d-max", "2",
                     "--out", str(tmp_path / "x.csv")])
        assert code == 2
        assert "PROPFQ" in capsys.readouterr().err

    def test_stdout(self, capsys):
        assert main(["sweep", "--d-min", "1000", "--d-max", "2000", "--n-points", "2"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "distance_m,loss_db,mode" and len(lines) == 3

    def test_plot_written_alongside(self, tmp_path):
        out, fig = tmp_path / "a.csv", tmp_path / "a.png"
        code = main(["sweep", "--d-min", "1000", "--d-max", "100000", "--log",
                     "--out", str(out), "--plot", str(fig)])
        assert code == 0
        assert out.exists()
        assert fig.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def write_config(tmp_path, text, name="scenario.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return path


HIGH_SNR = """\
model = freespace
seed = 3
link.distance_m = 100
radio.tx_power_w = 1.0
traffic.horizon_s = 100
"""


class TestRun:
    def test_high_snr_stats_row(self, tmp_path):
        cfg = write_config(tmp_path, HIGH_SNR)
        out = tmp_path / "run.csv"
        assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
        stats_text = (tmp_path / "run_stats.csv").read_text()
        assert stats_text.splitlines() == [
            "packets_sent,packets_received,packets_dropped,throughput_bps",
            "90,90,0,921.6",
        ]
        rows = load_records(out.read_text())
        assert len(rows) == 90
        assert out.read_text().splitlines()[0] == "t_s,rx_power_dbm,snr_db,ber,verdict"
        assert load_stats(stats_text)["packets_received"] == 90

    def test_byte_identical_reruns(self, tmp_path, hill_csv):
        text = (f"model = tirem\nprofile = {hill_csv.name}\nseed = 9\n"
                "radio.tx_power_w = 5\nfading.enabled = true\nfading.k_factor = 0.5\n")
        cfg = write_config(tmp_path, text)
        outputs = []
        for tag in ("a", "b"):
            out = tmp_path / f"{tag}.csv"
            stats = tmp_path / f"{tag}.stats.csv"
            assert main(["run", "--config", str(cfg), "--out", str(out), "--stats", str(stats)]) == 0
            outputs.append((out.read_bytes(), stats.read_bytes()))
        assert outputs[0] == outputs[1]

    def test_missing_profile(self, tmp_path, capsys):
        missing = tmp_path / "nowhere" / "terrain.csv"
        cfg = write_config(tmp_path, f"model = tirem\nprofile = {missing}\nradio.tx_power_w = 1\n")
        out = tmp_path / "run.csv"
        code = main(["run", "--config", str(cfg), "--out", str(out)])
        assert code == 3
        assert str(missing) in capsys.readouterr().err
        assert list(tmp_path.glob("run*")) == []

    def test_failure_leaves_no_partial_output(self, tmp_path):
        cfg = write_config(tmp_path, HIGH_SNR + "radio.modulation = qam\n")
        out = tmp_path / "run.csv"
        code = main(["run", "--config", str(cfg), "--out", str(out)])
        assert code == 1
        assert sorted(p.name for p in tmp_path.iterdir()) == ["scenario.cfg"]

    def test_missing_tx_power_is_usage_error(self, tmp_path):
        cfg = write_config(tmp_path, "model = freespace\n")
        assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "r.csv")]) == 1

    def test_flag_overrides_config(self, tmp_path):
        cfg = write_config(tmp_path, HIGH_SNR)
        out = tmp_path / "run.csv"
        assert main(["run", "--config", str(cfg), "--out", str(out), "--tx-power", "1e-18",
                     "--distance", "10000"]) == 0
        assert load_stats((tmp_path / "run_stats.csv").read_text())["packets_received"] == 0

    def test_run_plot(self, tmp_path):
        cfg = write_config(tmp_path, HIGH_SNR)
        fig = tmp_path / "link.png"
        assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "r.csv"), "--plot", str(fig)]) == 0
        assert fig.stat().st_size > 0

    def test_run_needs_out_file(self, tmp_path):
        cfg = write_config(tmp_path, HIGH_SNR)
        assert main(["run", "--config", str(cfg)]) == 1


class TestFade:
    def test_unit_mean(self, tmp_path):
        out = tmp_path / "env.csv"
        code = main(["fade", "--k-factor", "0.5", "--max-velocity", "1.0", "--offset", "0",
                     "--dt", "0.01", "--n", "1000000", "--seed", "1", "--out", str(out)])
        assert code == 0
        trace = load_envelope(out.read_text())
        assert len(trace) == 10**6
        assert trace.power_norm.mean() == pytest.approx(1.0, rel=0.005)

    def test_zero_velocity_constant(self, tmp_path):
        out = tmp_path / "env.csv"
        assert main(["fade", "--max-velocity", "0", "--n", "100", "--out", str(out)]) == 0
        trace = load_envelope(out.read_text())
        assert len(set(trace.power_norm.tolist())) == 1

    def test_zero_samples(self, tmp_path):
        out = tmp_path / "env.csv"
        assert main(["fade", "--n", "0", "--out", str(out)]) == 1
        assert not out.exists()

    def test_domain_error(self, tmp_path):
        assert main(["fade", "--k-factor", "-1", "--out", str(tmp_path / "e.csv")]) == 2

    def test_plot(self, tmp_path):
        fig = tmp_path / "env.svg"
        assert main(["fade", "--n", "500", "--out", str(tmp_path / "e.csv"), "--plot", str(fig)]) == 0
        assert b"<svg" in fig.read_bytes()


class TestConfig:
    def test_dotted_keys_and_comments(self):
        cfg = parse_config("# comment\nmodel = tworay\nradio.tx_power_w = 2.5  # inline\n"
                           "tworay.strict = yes\nground.preset = sea_water\n")
        assert cfg.model.value == "tworay"
        assert cfg.radio().tx_power_W == 2.5
        assert cfg.get("tworay.strict") is True
        assert cfg.ground().relative_permittivity == 81

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="radio.colour"):
            parse_config("radio.colour = blue\n")

    def test_bad_value(self):
        with pytest.raises(ConfigError, match="link.tx_height_m"):
            parse_config("link.tx_height_m = tall\n")

    def test_explicit_ground_needs_both(self):
        with pytest.raises(ConfigError):
            parse_config("ground.relative_permittivity = 10\n").ground()

    def test_profile_relative_to_config(self, tmp_path, hill_csv):
        cfg = parse_config(f"profile = {hill_csv.name}\n", base_dir=tmp_path)
        assert cfg.load_terrain() == load_profile(hill_csv)

    def test_unknown_model_exit_code(self, tmp_path):
        cfg = write_config(tmp_path, "model = hata\n")
        assert main(["sweep", "--config", str(cfg), "--d-min", "1", "--d-max", "2"]) == 1


def test_module_entry_point(tmp_path):
    out = tmp_path / "s.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "terrainlink", "sweep", "--d-min", "1000", "--d-max", "2000",
         "--n-points", "3", "--out", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert len(read_sweep(out)) == 3


def test_argparse_errors_are_usage_errors(capsys):
    assert main(["sweep", "--d-min", "abc", "--d-max", "2"]) == 1
    assert main(["bogus"]) == 1
