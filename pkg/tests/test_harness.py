"""Tests for ingestion, analysis runs with artifacts, and efficiency grids."""

import json
import os

import numpy as np
import pytest
import scipy.io.wavfile

from faultband import (
    EfficiencyGrid,
    EnvsiConfig,
    IngestionError,
    NtfConfig,
    ParameterError,
    RunConfig,
    Signal,
    SimConfig,
    analyze,
    efficiency,
    ingest,
    write_efficiency,
    write_signal,
)

FAST_SIM = SimConfig(duration=3.0)


class TestIngestCsv:
    def test_reads_one_float_per_line(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("0.0\n1.0\n0.0\n-1.0\n")
        sig = ingest(str(path), sample_rate=4.0)
        assert np.array_equal(sig.samples, [0.0, 1.0, 0.0, -1.0])
        assert sig.sample_rate == 4.0

    def test_blank_lines_are_skipped(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("1.0\n\n2.0\n   \n3.0\n")
        assert ingest(str(path), sample_rate=1.0).samples.size == 3

    def test_bad_line_is_reported_with_its_number(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("1.0\n2.0\noops\n")
        with pytest.raises(IngestionError, match=r"x\.csv:3.*oops"):
            ingest(str(path), sample_rate=1.0)

    def test_requires_a_sample_rate(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("1.0\n")
        with pytest.raises(IngestionError, match="sample_rate"):
            ingest(str(path))

    def test_missing_file(self, tmp_path):
        with pytest.raises(IngestionError, match="no such file"):
            ingest(str(tmp_path / "absent.csv"), sample_rate=1.0)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("")
        with pytest.raises(IngestionError, match="no samples"):
            ingest(str(path), sample_rate=1.0)

    def test_non_finite_sample_is_located(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("1.0\nnan\n2.0\n")
        with pytest.raises(IngestionError, match="index 1"):
            ingest(str(path), sample_rate=1.0)

    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(0)
        sig = Signal(rng.normal(size=64), 100.0)
        path = str(tmp_path / "out.csv")
        write_signal(sig, path, format="csv")
        back = ingest(path, sample_rate=100.0)
        assert np.array_equal(back.samples, sig.samples)


class TestIngestWav:
    def test_float32_round_trip_is_bit_exact(self, tmp_path):
        rng = np.random.default_rng(1)
        sig = Signal(rng.normal(size=128), 8000.0)
        path = str(tmp_path / "out.wav")
        write_signal(sig, path, format="wav")
        back = ingest(path)
        assert back.sample_rate == 8000.0
        assert np.array_equal(back.samples, sig.samples.astype(np.float32).astype(np.float64))

    def test_int16_samples_are_scaled_to_unit_range(self, tmp_path):
        path = str(tmp_path / "i16.wav")
        scipy.io.wavfile.write(path, 4000, np.array([-32768, 16384, 32767], dtype=np.int16))
        sig = ingest(path)
        assert np.allclose(sig.samples, [-1.0, 0.5, 32767.0 / 32768.0])

    def test_header_rate_wins_and_conflicts_are_errors(self, tmp_path):
        path = str(tmp_path / "out.wav")
        write_signal(Signal(np.zeros(16), 8000.0), path, format="wav")
        assert ingest(path, sample_rate=8000.0).sample_rate == 8000.0
        with pytest.raises(IngestionError, match="contradicts"):
            ingest(path, sample_rate=44100.0)

    def test_stereo_is_rejected(self, tmp_path):
        path = str(tmp_path / "st.wav")
        scipy.io.wavfile.write(path, 4000, np.zeros((8, 2), dtype=np.float32))
        with pytest.raises(IngestionError, match="single-channel"):
            ingest(path)

    def test_wav_output_needs_integer_rate(self, tmp_path):
        with pytest.raises(ParameterError, match="integer sample rate"):
            write_signal(Signal(np.zeros(4), 100.5), str(tmp_path / "x.wav"), format="wav")


class TestIngestRawFloat32:
    def test_round_trip_is_bit_exact(self, tmp_path):
        rng = np.random.default_rng(2)
        sig = Signal(rng.normal(size=100).astype(np.float32).astype(np.float64), 1000.0)
        path = str(tmp_path / "out.f32")
        write_signal(sig, path, format="f32le")
        assert os.path.getsize(path) == 400
        back = ingest(path, sample_rate=1000.0)
        assert np.array_equal(back.samples, sig.samples)

    def test_truncated_file_reports_the_offset(self, tmp_path):
        path = tmp_path / "bad.raw"
        path.write_bytes(np.zeros(10, dtype="<f4").tobytes() + b"\x00\x00")
        with pytest.raises(IngestionError, match="trailing 2 bytes at offset 40"):
            ingest(str(path), sample_rate=1.0)

    def test_requires_a_sample_rate(self, tmp_path):
        path = tmp_path / "x.bin"
        path.write_bytes(np.zeros(4, dtype="<f4").tobytes())
        with pytest.raises(IngestionError, match="sample_rate"):
            ingest(str(path))

    def test_empty_file(self, tmp_path):
        path = tmp_path / "x.f32"
        path.write_bytes(b"")
        with pytest.raises(IngestionError, match="empty"):
            ingest(str(path), sample_rate=1.0)


class TestFormatHandling:
    def test_inference_by_extension(self, tmp_path):
        for name in ("a.f32", "b.raw", "c.bin"):
            path = tmp_path / name
            path.write_bytes(np.array([1.5], dtype="<f4").tobytes())
            assert ingest(str(path), sample_rate=2.0).samples[0] == 1.5

    def test_unknown_extension_needs_explicit_format(self, tmp_path):
        path = tmp_path / "x.txt"
        path.write_text("1.0\n")
        with pytest.raises(IngestionError, match="cannot infer"):
            ingest(str(path), sample_rate=1.0)
        assert ingest(str(path), format="csv", sample_rate=1.0).samples[0] == 1.0

    def test_unknown_format_name(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("1.0\n")
        with pytest.raises(IngestionError, match="unknown format"):
            ingest(str(path), format="flac", sample_rate=1.0)

    def test_unknown_write_format(self, tmp_path):
        with pytest.raises(ParameterError, match="unknown output format"):
            write_signal(Signal(np.zeros(4), 1.0), str(tmp_path / "x"), format="flac")


class TestRunConfigValidation:
    def test_needs_a_selector(self):
        with pytest.raises(ParameterError):
            RunConfig(source=FAST_SIM, selectors=())

    def test_rejects_unknown_selectors(self):
        with pytest.raises(ParameterError, match="unknown selector"):
            RunConfig(source=FAST_SIM, selectors=("kurtosis", "wavelet"))

    def test_ntf_needs_a_solver_config(self):
        with pytest.raises(ParameterError):
            RunConfig(source=FAST_SIM, selectors=("ntf",), ntf_configs=())

    def test_segment_count_positive(self):
        with pytest.raises(ParameterError):
            RunConfig(source=FAST_SIM, segment_count=0)

    def test_ses_max_hz_non_negative(self):
        with pytest.raises(ParameterError):
            RunConfig(source=FAST_SIM, ses_max_hz=-1.0)


class TestEfficiencyGridValidation:
    def test_trials_positive(self):
        with pytest.raises(ParameterError):
            EfficiencyGrid(aci_values=(1.0,), anci_values=(1.0,), trials=0)

    def test_percent_shape_checked(self):
        with pytest.raises(ParameterError, match="shape"):
            EfficiencyGrid(
                aci_values=(1.0, 2.0),
                anci_values=(1.0,),
                trials=1,
                success_percent={"ntf": np.zeros((1, 1))},
            )

    def test_percent_range_checked(self):
        with pytest.raises(ParameterError, match=r"\[0, 100\]"):
            EfficiencyGrid(
                aci_values=(1.0,),
                anci_values=(1.0,),
                trials=1,
                success_percent={"ntf": np.full((1, 1), 120.0)},
            )


@pytest.fixture(scope="module")
def small_run(tmp_path_factory):
    """One fast end-to-end analyze() with artifacts, shared by tests below."""
    out = str(tmp_path_factory.mktemp("run"))
    config = RunConfig(
        source=FAST_SIM,
        segment_count=6,
        ntf_configs=(NtfConfig(max_iterations=30),),
        out_dir=out,
        dump_slices=(0,),
    )
    report = analyze(config)
    return config, report, out


class TestAnalyze:
    def test_returns_a_faulty_verdict_on_the_default_record(self, small_run):
        _, report, _ = small_run
        assert report.verdict == "faulty"
        assert report.envsi_values[report.chosen_class] > 0.1

    def test_writes_the_expected_artifacts(self, small_run):
        _, _, out = small_run
        names = set(os.listdir(out))
        assert "report.json" in names
        assert "tensor_slice_0.csv" in names
        for method in ("kurtosis", "alpha", "cv", "pearson"):
            assert f"selector_{method}.csv" in names
            assert f"ses_{method}.csv" in names
        assert "selector_ntf_beta-1_class0.csv" in names
        assert "ses_ntf_beta-1.csv" in names
        assert "factors_beta-1_H.csv" in names

    def test_report_json_contents(self, small_run):
        _, report, out = small_run
        with open(os.path.join(out, "report.json")) as fh:
            record = json.load(fh)
        entry = record["ntf"]["-1"]
        assert entry["verdict"] == report.verdict
        assert entry["chosen_class"] == report.chosen_class
        assert entry["envsi"] == pytest.approx(float(report.envsi_values[report.chosen_class]))
        assert set(record["selectors"]) == {"kurtosis", "alpha", "cv", "pearson"}
        assert record["best"]["beta"] == -1.0
        for method_entry in record["selectors"].values():
            assert 0.0 <= method_entry["envsi"] <= 1.0

    def test_reruns_are_byte_identical(self, small_run, tmp_path):
        config, _, out = small_run
        from dataclasses import replace

        out2 = str(tmp_path / "again")
        analyze(replace(config, out_dir=out2))
        for name in ("report.json", "selector_kurtosis.csv", "factors_beta-1_H.csv"):
            with open(os.path.join(out, name), "rb") as fh:
                first = fh.read()
            with open(os.path.join(out2, name), "rb") as fh:
                second = fh.read()
            assert first == second, name

    def test_comparison_only_run(self):
        report = analyze(RunConfig(source=FAST_SIM, selectors=("kurtosis",)))
        assert len(report.curves) == 1
        assert np.isnan(report.beta)
        assert report.verdict in ("faulty", "healthy")

    def test_ingest_errors_carry_the_stage_label(self, tmp_path):
        config = RunConfig(source=str(tmp_path / "absent.csv"), sample_rate=4.0)
        with pytest.raises(IngestionError, match="^ingest:"):
            analyze(config)

    def test_selector_errors_carry_the_stage_label(self):
        # five harmonics of 5 kHz exceed the envelope band of a 25 kHz record
        config = RunConfig(
            source=FAST_SIM,
            selectors=("kurtosis",),
            envsi=EnvsiConfig(fault_frequency=5000.0),
        )
        with pytest.raises(ParameterError, match="^kurtosis:"):
            analyze(config)

    def test_slice_dump_needs_the_tensor(self, tmp_path):
        with pytest.raises(ParameterError, match="slices"):
            analyze(
                RunConfig(
                    source=FAST_SIM,
                    selectors=("kurtosis",),
                    dump_slices=(0,),
                    out_dir=str(tmp_path / "run"),
                )
            )

    def test_slice_index_is_range_checked(self, tmp_path):
        config = RunConfig(
            source=FAST_SIM,
            segment_count=6,
            ntf_configs=(NtfConfig(max_iterations=2),),
            out_dir=str(tmp_path / "out"),
            dump_slices=(6,),
        )
        with pytest.raises(ParameterError, match="out of range"):
            analyze(config)


class TestEfficiency:
    def test_success_needs_the_indicator_above_threshold(self):
        """With the centroid clause disarmed, success tracks the indicator."""
        grid = efficiency(
            (0.0, 4.0),
            (0.0,),
            trials=2,
            methods=("kurtosis",),
            sim_template=FAST_SIM,
            segment_count=6,
            centroid_tolerance=20000.0,
        )
        counts = grid.success_counts["kurtosis"]
        assert counts[0, 0] == 0  # no cyclic component: indicator below 0.1
        assert counts[1, 0] == 2  # strong cyclic component: always detected

    def test_success_also_needs_the_centroid_near_the_carrier(self):
        """A vanishing tolerance vetoes trials even when the indicator fires."""
        grid = efficiency(
            (4.0,),
            (0.0,),
            trials=2,
            methods=("kurtosis",),
            sim_template=FAST_SIM,
            segment_count=6,
            centroid_tolerance=1e-6,
        )
        assert grid.success_counts["kurtosis"][0, 0] == 0

    def test_split_runs_pool_to_the_same_counts(self):
        """Trial seeds depend only on the absolute trial index."""
        kwargs = dict(
            methods=("kurtosis",),
            sim_template=FAST_SIM,
            segment_count=6,
            centroid_tolerance=20000.0,
        )
        full = efficiency((0.0, 4.0), (0.0,), trials=4, **kwargs)
        first = efficiency((0.0, 4.0), (0.0,), trials=2, **kwargs)
        second = efficiency((0.0, 4.0), (0.0,), trials=2, trial_offset=2, **kwargs)
        assert np.array_equal(
            full.success_counts["kurtosis"],
            first.success_counts["kurtosis"] + second.success_counts["kurtosis"],
        )

    def test_percentages_follow_counts(self):
        grid = efficiency(
            (4.0,),
            (0.0,),
            trials=2,
            methods=("kurtosis",),
            sim_template=FAST_SIM,
            segment_count=6,
            centroid_tolerance=20000.0,
        )
        assert grid.success_percent["kurtosis"][0, 0] == pytest.approx(100.0)

    def test_rejects_unknown_methods(self):
        with pytest.raises(ParameterError, match="unknown methods"):
            efficiency((1.0,), (1.0,), trials=1, methods=("sonar",))

    def test_rejects_non_positive_trials(self):
        with pytest.raises(ParameterError):
            efficiency((1.0,), (1.0,), trials=0)

    def test_write_efficiency_artifacts(self, tmp_path):
        grid = EfficiencyGrid(
            aci_values=(1.0, 2.0),
            anci_values=(0.5,),
            trials=4,
            success_counts={"kurtosis": np.array([[1], [4]])},
            success_percent={"kurtosis": np.array([[25.0], [100.0]])},
        )
        out = str(tmp_path / "eff")
        write_efficiency(grid, out)
        with open(os.path.join(out, "efficiency.json")) as fh:
            summary = json.load(fh)
        assert summary["trials"] == 4
        assert summary["success_percent"]["kurtosis"] == [[25.0], [100.0]]
        with open(os.path.join(out, "efficiency_kurtosis.csv")) as fh:
            lines = fh.read().splitlines()
        assert lines[0] == "aci\\anci,0.5"
        assert lines[1].startswith("1,25")
