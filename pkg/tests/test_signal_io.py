import numpy as np
import pytest

from vibropair import (
    CsvFormatError,
    differentiate,
    export_hysteresis,
    export_measured,
    export_trajectory,
    hysteresis_trace,
    idle_impulse,
    load_csv,
    lowpass,
    preset,
    simulate,
)


def _write(path, lines):
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


class TestLoadCsv:
    def test_roundtrip_measured(self, tmp_path):
        t = np.arange(0.0, 0.1, 1.0 / 5000.0)
        x2 = np.sin(10.0 * t) * 1e-3
        path = tmp_path / "trace.csv"
        export_measured(t, x2, path, comments=["synthetic run"])
        trace = load_csv(path)
        assert trace.fs == pytest.approx(5000.0)
        assert np.array_equal(trace.t, t)
        assert np.array_equal(trace.x2, x2)
        assert trace.x1 is None

    def test_roundtrip_with_platform_column(self, tmp_path):
        path = tmp_path / "trace.csv"
        _write(path, ["t,x1,x2", "0,0,1", "0.001,0.1,2", "0.002,0.2,3"])
        trace = load_csv(path)
        assert trace.x1 is not None
        assert list(trace.x1) == [0.0, 0.1, 0.2]
        assert list(trace.x2) == [1.0, 2.0, 3.0]

    def test_comments_and_blank_lines_ignored(self, tmp_path):
        path = tmp_path / "trace.csv"
        _write(path, ["# preamble", "", "t,x2", "# midstream", "0,1",
                      "0.001,2", "", "0.002,3"])
        assert len(load_csv(path)) == 3

    def test_trajectory_export_is_loadable(self, tmp_path):
        traj = simulate(idle_impulse(gap=0.005, t_end=0.05))
        path = tmp_path / "traj.csv"
        export_trajectory(traj, path)
        trace = load_csv(path)
        assert np.array_equal(trace.x2, traj.x2)
        assert trace.fs == pytest.approx(1.0 / traj.dt)

    def test_bad_header_reports_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        _write(path, ["# c", "time,pos", "0,1", "1,2"])
        with pytest.raises(CsvFormatError, match="line 2"):
            load_csv(path)

    def test_non_numeric_reports_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        _write(path, ["t,x2", "0,1", "0.001,oops"])
        with pytest.raises(CsvFormatError, match="line 3"):
            load_csv(path)

    def test_field_count_mismatch(self, tmp_path):
        path = tmp_path / "bad.csv"
        _write(path, ["t,x2", "0,1", "0.001,2,3"])
        with pytest.raises(CsvFormatError, match="line 3"):
            load_csv(path)

    def test_non_finite_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        _write(path, ["t,x2", "0,1", "0.001,nan"])
        with pytest.raises(CsvFormatError, match="non-finite"):
            load_csv(path)

    def test_non_monotone_time_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        _write(path, ["t,x2", "0,1", "0.002,2", "0.001,3"])
        with pytest.raises(CsvFormatError, match="strictly increasing"):
            load_csv(path)

    def test_non_uniform_time_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        _write(path, ["t,x2", "0,1", "0.001,2", "0.0025,3"])
        with pytest.raises(CsvFormatError, match="non-uniform"):
            load_csv(path)

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("# only comments\n", encoding="utf-8")
        with pytest.raises(CsvFormatError, match="header"):
            load_csv(path)


class TestDifferentiate:
    def test_exact_on_linear_signal(self):
        fs = 5000.0
        t = np.arange(200) / fs
        v = differentiate(0.25 * t - 1.0, fs)
        assert np.allclose(v, 0.25, rtol=1e-12)

    def test_sine_derivative(self):
        fs = 5000.0
        t = np.arange(5000) / fs
        w = 2.0 * np.pi * 10.0
        v = differentiate(np.sin(w * t), fs)
        assert np.allclose(v[2:-2], w * np.cos(w * t)[2:-2], atol=w * 1e-4)

    def test_too_short_rejected(self):
        with pytest.raises(ValueError):
            differentiate([0.0, 1.0], 100.0)


class TestLowpass:
    FS = 5000.0

    def test_dc_gain_unity(self):
        out = lowpass(np.full(2000, 3.7), self.FS)
        assert np.allclose(out, 3.7, rtol=1e-9)

    def test_passband_preserved_stopband_rejected(self):
        t = np.arange(5000) / self.FS
        slow = np.sin(2.0 * np.pi * 5.0 * t)
        fast = np.sin(2.0 * np.pi * 1500.0 * t)
        out = lowpass(slow + 0.5 * fast, self.FS, fc=200.0)
        mid = slice(500, 4500)
        assert np.std(out[mid] - slow[mid]) < 0.02 * np.std(slow)

    def test_zero_phase_on_slow_sine(self):
        t = np.arange(5000) / self.FS
        x = np.sin(2.0 * np.pi * 5.0 * t)
        out = lowpass(x, self.FS, fc=200.0)
        lag = np.argmax(np.correlate(out[1000:4000], x[1000:4000], "full")) - 2999
        assert lag == 0

    def test_bad_cutoff_rejected(self):
        with pytest.raises(ValueError):
            lowpass(np.zeros(100), self.FS, fc=0.0)
        with pytest.raises(ValueError):
            lowpass(np.zeros(100), self.FS, fc=2500.0)


class TestExports:
    def test_trajectory_export_records_events(self, tmp_path):
        traj = simulate(idle_impulse(gap=0.005, t_end=0.05))
        path = tmp_path / "traj.csv"
        export_trajectory(traj, path)
        text = path.read_text(encoding="utf-8")
        assert text.startswith("t,x1,x2,v2,p,f,mode\n")
        assert "# event,IMPACT," in text
        assert "# event,SEPARATION," in text

    def test_export_is_deterministic(self, tmp_path):
        sc = idle_impulse(gap=0.005, t_end=0.05)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        export_trajectory(simulate(sc), a)
        export_trajectory(simulate(sc), b)
        assert a.read_bytes() == b.read_bytes()

    def test_full_precision_roundtrip(self, tmp_path):
        rng = np.random.default_rng(11)
        t = np.arange(50) / 5000.0
        x2 = rng.normal(0.0, 1e-3, 50)
        path = tmp_path / "m.csv"
        export_measured(t, x2, path)
        trace = load_csv(path)
        assert np.array_equal(trace.x2, x2)  # 17 significant digits

    def test_hysteresis_export(self, tmp_path):
        params = preset("steel", alpha=0.5)
        trace = hysteresis_trace([0.0, 1e-4, 0.0], 1e-3, params)
        path = tmp_path / "h.csv"
        export_hysteresis(trace, path, comments=["cycle"])
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "# cycle"
        assert lines[1] == "p,p_dot,f"
        assert len(lines) == 5
