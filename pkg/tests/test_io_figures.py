"""Versioned CSV handling and figure-data exports."""

import numpy as np
import pytest

from eis_kit import io
from eis_kit.circuit import CalCell
from eis_kit.dft import AnalyzerConfig, tdm_sweep
from eis_kit.dose import DoseResponsePoint, box_stats
from eis_kit.errors import ConfigurationError, SchemaError
from eis_kit.figures import export_figure_data, read_figure_data
from eis_kit.noise import NoiseBudget, composite_noise_terms
from eis_kit.regarima import acf, residual_histogram
from eis_kit.synth import synth_cohort


class TestVersionedCsv:
    def test_round_trip_preserves_values(self, tmp_path):
        path = tmp_path / "x.csv"
        rows = [(1, 0.1 + 0.2, 3.330000000000001e-07), (2, -1.5, 2.0)]
        io.write_csv(path, "demo", ("a", "b", "c"), rows)
        columns, out = io.read_csv(path, "demo")
        assert columns == ["a", "b", "c"]
        assert out[0][1] == 0.1 + 0.2  # exact float round trip
        assert out[0][2] == 3.330000000000001e-07

    def test_missing_header_rejected(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(SchemaError):
            io.read_csv(path, "demo")

    def test_wrong_schema_rejected(self, tmp_path):
        path = tmp_path / "x.csv"
        io.write_csv(path, "demo", ("a",), [(1,)])
        with pytest.raises(SchemaError):
            io.read_csv(path, "other")

    def test_wrong_major_version_rejected(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("# eis-kit v9.0.0 demo\na\n1\n")
        with pytest.raises(SchemaError) as excinfo:
            io.read_csv(path, "demo")
        assert "major version" in str(excinfo.value)

    def test_ragged_row_reports_location(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("# eis-kit v0.1.0 demo\na,b\n1,2\n3\n")
        with pytest.raises(SchemaError) as excinfo:
            io.read_csv(path, "demo")
        assert "row 4" in str(excinfo.value)

    def test_non_numeric_cell_reports_location(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("# eis-kit v0.1.0 demo\na,b\n1,oops\n")
        with pytest.raises(SchemaError) as excinfo:
            io.read_csv(path, "demo")
        assert "row 3" in str(excinfo.value) and "column 2" in str(excinfo.value)


class TestKeyValue:
    def test_parse_with_comments(self, tmp_path):
        path = tmp_path / "cfg.txt"
        path.write_text("# comment\nkey = value # trailing\n\nother=2\n")
        assert io.read_keyvalue(path) == {"key": "value", "other": "2"}

    def test_malformed_line(self, tmp_path):
        path = tmp_path / "cfg.txt"
        path.write_text("just a line\n")
        with pytest.raises(ConfigurationError):
            io.read_keyvalue(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError):
            io.read_keyvalue(tmp_path / "nope.txt")


class TestSubjectRoundTrip:
    def test_series_and_reference_round_trip(self, tmp_path):
        records = synth_cohort(tmp_path, 1, duration_h=2.0, seed=5)
        subject = io.read_subject_series(records[0]["series"], records[0]["ref"])
        assert subject.n_samples == 120
        refs = io.read_reference(records[0]["ref"])
        assert len(refs) == 3  # 0 h, 1 h and end-of-recording survive a 2 h run
        # writing again reproduces identical bytes
        out = tmp_path / "copy.csv"
        io.write_subject_series(out, subject)
        assert out.read_bytes() == (tmp_path / "s01_series.csv").read_bytes()


class TestFigureExports:
    def test_sweep_round_trip(self, tmp_path):
        cfg = AnalyzerConfig(fs_sample=40960.0, rng_seed=0)
        ms = tdm_sweep(cfg, [CalCell(1000.0)], [100.0, 200.0])
        path = tmp_path / "sweep.csv"
        export_figure_data("sweep", ms, path)
        cols = read_figure_data("sweep", path)
        # identical in-memory values after re-ingestion (repr round trip)
        assert cols["zmod_ohm"].tolist() == [m.zmod for m in ms]
        assert cols["zphase_deg"].tolist() == [m.zphase for m in ms]
        assert cols["timestamp_s"].tolist() == [m.timestamp for m in ms]
        assert cols["freq_hz"].tolist() == [100.0, 200.0]

    def test_noise_spectrum_round_trip(self, tmp_path):
        budget = NoiseBudget()
        f_grid = [10.0, 100.0, 1000.0]
        terms = [composite_noise_terms(budget, f) for f in f_grid]
        path = tmp_path / "spec.csv"
        export_figure_data("noise_spectrum", (f_grid, terms), path)
        cols = read_figure_data("noise_spectrum", path)
        # exact: repr round trip
        assert cols["psd_v2_per_hz"].tolist() == [t.total for t in terms]
        assert cols["term_flicker"].tolist() == [t.flicker for t in terms]

    def test_acf_schema(self, tmp_path):
        rng = np.random.default_rng(0)
        result = acf(rng.standard_normal(500), 10)
        path = tmp_path / "acf.csv"
        export_figure_data("acf", result, path)
        cols = read_figure_data("acf", path)
        assert cols["lag"].tolist() == list(range(11))
        assert np.all(cols["band_hi"] == -cols["band_lo"])
        assert cols["r"].tolist() == result.r.tolist()

    def test_histogram_schema(self, tmp_path):
        hist = residual_histogram(np.random.default_rng(1).standard_normal(100), 5)
        path = tmp_path / "hist.csv"
        export_figure_data("histogram", hist, path)
        cols = read_figure_data("histogram", path)
        assert cols["count"].sum() == 100
        assert cols["bin_left"].tolist() == hist.edges[:-1].tolist()

    def test_box_schema(self, tmp_path):
        pts = [DoseResponsePoint(50.0, 4.0, float(v), i) for i, v in enumerate(range(8))]
        stats = box_stats(pts, 50.0)
        path = tmp_path / "box.csv"
        export_figure_data("box", [(50.0, stats)], path)
        cols = read_figure_data("box", path)
        assert cols["median"][0] == stats.median
        assert cols["iqr"][0] == stats.iqr

    def test_prediction_round_trip(self, tmp_path):
        from eis_kit.regarima import fit, predict
        from eis_kit import io as io_mod

        records = synth_cohort(tmp_path / "c", 1, duration_h=2.0, seed=31)
        subject = io_mod.read_subject_series(records[0]["series"], records[0]["ref"])
        model = fit(subject, (1, 0, 0), ("zmod", "rh"))
        result = predict(model, subject)
        path = tmp_path / "pred.csv"
        export_figure_data("prediction", result, path)
        cols = read_figure_data("prediction", path)
        assert cols["predicted_mg_dl"].tolist() == result.fitted.tolist()
        assert cols["residual_mg_dl"].tolist() == result.residuals.tolist()

    def test_cdr_round_trip(self, tmp_path):
        rows = [(5.0, 4.0, 16.6, 0.5), (200.0, 4.0, 29.4, 0.4)]
        path = tmp_path / "cdr.csv"
        export_figure_data("cdr", rows, path)
        cols = read_figure_data("cdr", path)
        assert cols["mean_delta_z_pct"].tolist() == [16.6, 29.4]
        assert cols["ph"].tolist() == [4.0, 4.0]

    def test_unknown_kind(self, tmp_path):
        with pytest.raises(ConfigurationError):
            export_figure_data("pie-chart", None, tmp_path / "x.csv")
        with pytest.raises(ConfigurationError):
            read_figure_data("pie-chart", tmp_path / "x.csv")
