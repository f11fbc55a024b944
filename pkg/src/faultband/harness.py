"""Run orchestration: file ingestion, full analysis runs with on-disk
artifacts, and Monte-Carlo efficiency grids over burst amplitudes."""

from __future__ import annotations

import json
import os
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field, replace

import numpy as np
import scipy.io.wavfile

from .dependence import build_tensor, dependence_map
from .diagnosis import (
    DECISION_THRESHOLD,
    DiagnosisReport,
    EnvsiConfig,
    diagnose,
    selector_diagnosis,
)
from .errors import FaultbandError, IngestionError, ParameterError
from .ntf import NtfConfig, export_factors, decompose
from .selectors import (
    SelectorCurve,
    alpha_selector,
    cv_selector,
    energy_centroid,
    pearson_selector,
    spectral_kurtosis,
)
from .signal_model import Signal, SimConfig, simulate
from .spectral import StftConfig, stft_spectrogram

VALID_SELECTORS = ("ntf", "kurtosis", "alpha", "cv", "pearson")

#: Iteration budget used for Monte-Carlo trials unless overridden; kept well
#: below the library default so a full grid stays desk-scale.
EFFICIENCY_MAX_ITERATIONS = 250


@dataclass(frozen=True)
class RunConfig:
    """Everything one `analyze` run needs.

    ``source`` is either a :class:`SimConfig` (the record is synthesised) or
    a file path, in which case ``source_format``/``sample_rate`` apply as in
    :func:`ingest`.  ``seed`` echoes the master seed the run was derived
    from; the component configs carry their own seeds.
    """

    source: SimConfig | str
    source_format: str | None = None
    sample_rate: float | None = None
    stft: StftConfig = StftConfig()
    segment_count: int = 30
    ntf_configs: tuple[NtfConfig, ...] = (NtfConfig(),)
    envsi: EnvsiConfig = EnvsiConfig(fault_frequency=30.0)
    selectors: tuple[str, ...] = VALID_SELECTORS
    threshold: float = DECISION_THRESHOLD
    out_dir: str | None = None
    dump_slices: tuple[int, ...] = ()
    ses_max_hz: float = 1000.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.selectors:
            raise ParameterError("at least one selector method must be enabled")
        unknown = set(self.selectors) - set(VALID_SELECTORS)
        if unknown:
            raise ParameterError(f"unknown selector methods: {sorted(unknown)}")
        if "ntf" in self.selectors and not self.ntf_configs:
            raise ParameterError("the ntf method requires at least one NtfConfig")
        if self.segment_count < 1:
            raise ParameterError("segment_count must be >= 1")
        if self.ses_max_hz < 0:
            raise ParameterError("ses_max_hz must be >= 0 (0 keeps the full band)")
        object.__setattr__(self, "selectors", tuple(self.selectors))
        object.__setattr__(self, "ntf_configs", tuple(self.ntf_configs))
        object.__setattr__(self, "dump_slices", tuple(self.dump_slices))


@dataclass(frozen=True)
class EfficiencyGrid:
    """Per-cell Monte-Carlo success rates over the amplitude grid."""

    aci_values: tuple[float, ...]
    anci_values: tuple[float, ...]
    trials: int
    success_counts: dict[str, np.ndarray] = field(default_factory=dict)
    success_percent: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ParameterError("trials must be >= 1")
        shape = (len(self.aci_values), len(self.anci_values))
        for method, percent in self.success_percent.items():
            if percent.shape != shape:
                raise ParameterError(f"{method}: grid shape mismatch")
            if np.any(percent < 0) or np.any(percent > 100):
                raise ParameterError(f"{method}: percentages must lie in [0, 100]")


def _infer_format(path: str) -> str:
    ext = os.path.splitext(path)[1].lower()
    if ext == ".csv":
        return "csv"
    if ext == ".wav":
        return "wav"
    if ext in (".f32", ".raw", ".bin"):
        return "f32le"
    raise IngestionError(f"{path}: cannot infer format from extension {ext!r}")


def ingest(path: str, format: str | None = None, sample_rate: float | None = None) -> Signal:
    """Read a record from CSV (one float per line), WAV, or raw float32.

    ``sample_rate`` is mandatory for csv and f32le sources; for WAV the rate
    comes from the header (a conflicting explicit rate is an error).
    """
    if not os.path.isfile(path):
        raise IngestionError(f"{path}: no such file")
    fmt = format if format is not None else _infer_format(path)

    if fmt == "csv":
        if sample_rate is None:
            raise IngestionError(f"{path}: sample_rate is required for csv input")
        values = []
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                text = line.strip()
                if not text:
                    continue
                try:
                    values.append(float(text))
                except ValueError:
                    raise IngestionError(
                        f"{path}:{lineno}: not a number: {text!r}"
                    ) from None
        if not values:
            raise IngestionError(f"{path}: no samples found")
        samples = np.asarray(values, dtype=np.float64)
        rate = float(sample_rate)
    elif fmt == "wav":
        try:
            header_rate, data = scipy.io.wavfile.read(path)
        except Exception as exc:
            raise IngestionError(f"{path}: unreadable WAV: {exc}") from exc
        if data.ndim != 1:
            raise IngestionError(f"{path}: only single-channel WAV is supported")
        if data.size == 0:
            raise IngestionError(f"{path}: no samples found")
        if sample_rate is not None and float(sample_rate) != float(header_rate):
            raise IngestionError(
                f"{path}: header rate {header_rate} Hz contradicts requested {sample_rate} Hz"
            )
        if data.dtype.kind == "i":
            samples = data.astype(np.float64) / float(2 ** (8 * data.dtype.itemsize - 1))
        elif data.dtype.kind == "f":
            samples = data.astype(np.float64)
        else:
            raise IngestionError(f"{path}: unsupported WAV sample type {data.dtype}")
        rate = float(header_rate)
    elif fmt == "f32le":
        if sample_rate is None:
            raise IngestionError(f"{path}: sample_rate is required for f32le input")
        size = os.path.getsize(path)
        if size == 0:
            raise IngestionError(f"{path}: empty file")
        if size % 4:
            raise IngestionError(
                f"{path}: {size} bytes is not a whole number of float32 samples "
                f"(trailing {size % 4} bytes at offset {size - size % 4})"
            )
        samples = np.fromfile(path, dtype="<f4").astype(np.float64)
        rate = float(sample_rate)
    else:
        raise IngestionError(f"{path}: unknown format {fmt!r}")

    finite = np.isfinite(samples)
    if not finite.all():
        raise IngestionError(
            f"{path}: non-finite sample at index {int(np.argmin(finite))}"
        )
    return Signal(samples=samples, sample_rate=rate)


def write_signal(signal: Signal, path: str, format: str = "csv") -> None:
    """Write samples as CSV (one float per line), float32 WAV, or raw float32."""
    if format == "csv":
        np.savetxt(path, signal.samples, fmt="%.17g")
    elif format == "wav":
        rate = int(round(signal.sample_rate))
        if rate != signal.sample_rate:
            raise ParameterError("WAV output requires an integer sample rate")
        scipy.io.wavfile.write(path, rate, signal.samples.astype(np.float32))
    elif format == "f32le":
        signal.samples.astype("<f4").tofile(path)
    else:
        raise ParameterError(f"unknown output format {format!r}")


@contextmanager
def _stage(name: str):
    """Prefix package errors with the pipeline stage they arose in."""
    try:
        yield
    except FaultbandError as exc:
        if str(exc).startswith(f"{name}:"):
            raise
        raise type(exc)(f"{name}: {exc}") from exc


def _resolve_source(config: RunConfig) -> Signal:
    if isinstance(config.source, SimConfig):
        return simulate(config.source)
    return ingest(config.source, config.source_format, config.sample_rate)


def _comparison_curve(name: str, spec, full_map) -> SelectorCurve:
    if name == "kurtosis":
        return spectral_kurtosis(spec)
    if name == "alpha":
        return alpha_selector(spec)
    if name == "cv":
        return cv_selector(spec)
    return pearson_selector(full_map)


def _curve_rows(curve: SelectorCurve) -> np.ndarray:
    return np.column_stack([curve.freq_bins, curve.values])


def _write_csv(path: str, rows: np.ndarray, header: str) -> None:
    np.savetxt(path, rows, fmt="%.17g", delimiter=",", header=header, comments="")


def _ses_rows(ses, max_hz: float) -> np.ndarray:
    rows = np.column_stack([ses.freq_bins, ses.amplitudes])
    if max_hz > 0:
        rows = rows[rows[:, 0] <= max_hz]
    return rows


def _centroid_or_none(curve: SelectorCurve) -> float | None:
    value = energy_centroid(curve)
    return None if np.isnan(value) else value


def analyze(config: RunConfig) -> DiagnosisReport:
    """Run the full pipeline and return the best factorisation's report.

    Builds the segment tensor, decomposes it once per configured solver
    setting, scores every factor class, and also pushes each enabled
    comparison selector through the same filter/spectrum/indicator path.
    When ``config.out_dir`` is set, a JSON report plus CSV curves are
    written there.  The returned report belongs to the solver run whose
    chosen class scored highest (first one wins ties).
    """
    with _stage("ingest"):
        signal = _resolve_source(config)

    ntf_reports: list[tuple[NtfConfig, object, DiagnosisReport]] = []
    tensor = None
    if "ntf" in config.selectors:
        with _stage("dependence"):
            tensor = build_tensor(signal, config.segment_count, config.stft)
        for ntf_cfg in config.ntf_configs:
            with _stage("ntf"):
                factors = decompose(tensor, ntf_cfg)
            with _stage("diagnosis"):
                report = diagnose(signal, factors, config.envsi, config.threshold)
            ntf_reports.append((ntf_cfg, factors, report))

    comparison_names = [name for name in config.selectors if name != "ntf"]
    comparisons: dict[str, tuple[SelectorCurve, object, float]] = {}
    if comparison_names:
        with _stage("spectral"):
            full_spec = stft_spectrogram(signal, config.stft)
        full_map = None
        if "pearson" in comparison_names:
            with _stage("dependence"):
                full_map = dependence_map(full_spec)
        for name in comparison_names:
            with _stage(name):
                curve = _comparison_curve(name, full_spec, full_map)
                _, ses, value = selector_diagnosis(signal, curve, config.envsi)
            comparisons[name] = (curve, ses, value)

    if config.out_dir is not None:
        _write_artifacts(config, signal, tensor, ntf_reports, comparisons)

    if ntf_reports:
        best = max(ntf_reports, key=lambda item: item[2].envsi_values[item[2].chosen_class])
        return best[2]
    # Comparison-only runs still return a single-curve report via the best
    # comparison selector, so the caller always gets a verdict.
    name = max(comparisons, key=lambda n: comparisons[n][2])
    curve, ses, value = comparisons[name]
    filtered, _, _ = selector_diagnosis(signal, curve, config.envsi)
    return DiagnosisReport(
        curves=(curve,),
        envsi_values=np.array([value]),
        chosen_class=0,
        beta=float("nan"),
        verdict="faulty" if value > config.threshold else "healthy",
        threshold=config.threshold,
        filtered_signal=filtered,
        envelope_spectra=(ses,),
        zero_curve_classes=(0,) if not np.any(curve.values) else (),
    )


def _config_record(config: RunConfig) -> dict:
    if isinstance(config.source, SimConfig):
        source: object = {"simulation": asdict(config.source)}
    else:
        source = {"path": config.source, "format": config.source_format,
                  "sample_rate": config.sample_rate}
    return {
        "source": source,
        "stft": asdict(config.stft),
        "segment_count": config.segment_count,
        "envsi": asdict(config.envsi),
        "selectors": list(config.selectors),
        "threshold": config.threshold,
        "ses_max_hz": config.ses_max_hz,
        "seed": config.seed,
    }


def _write_artifacts(config, signal, tensor, ntf_reports, comparisons) -> None:
    out = config.out_dir
    os.makedirs(out, exist_ok=True)

    record = {"config": _config_record(config), "ntf": {}, "selectors": {}}
    for ntf_cfg, factors, report in ntf_reports:
        beta_tag = f"{ntf_cfg.beta:g}"
        chosen = report.chosen_class
        record["ntf"][beta_tag] = {
            "rank": ntf_cfg.rank,
            "rng_seed": ntf_cfg.rng_seed,
            "iterations": factors.iterations_run,
            "final_objective": float(factors.objective_trace[-1]),
            "envsi_per_class": [float(v) for v in report.envsi_values],
            "chosen_class": chosen,
            "envsi": float(report.envsi_values[chosen]),
            "verdict": report.verdict,
            "zero_curve_classes": list(report.zero_curve_classes),
            "energy_centroid_hz": _centroid_or_none(report.curves[chosen]),
        }
        for k, curve in enumerate(report.curves):
            _write_csv(
                os.path.join(out, f"selector_ntf_beta{beta_tag}_class{k}.csv"),
                _curve_rows(curve),
                "freq_hz,value",
            )
        _write_csv(
            os.path.join(out, f"ses_ntf_beta{beta_tag}.csv"),
            _ses_rows(report.envelope_spectra[chosen], config.ses_max_hz),
            "freq_hz,amplitude",
        )
        export_factors(factors, out, stem=f"factors_beta{beta_tag}")

    for name, (curve, ses, value) in comparisons.items():
        record["selectors"][name] = {
            "envsi": float(value),
            "verdict": "faulty" if value > config.threshold else "healthy",
            "energy_centroid_hz": _centroid_or_none(curve),
        }
        _write_csv(os.path.join(out, f"selector_{name}.csv"), _curve_rows(curve), "freq_hz,value")
        _write_csv(
            os.path.join(out, f"ses_{name}.csv"), _ses_rows(ses, config.ses_max_hz),
            "freq_hz,amplitude",
        )

    if ntf_reports:
        best_cfg, _, best_report = max(
            ntf_reports, key=lambda item: item[2].envsi_values[item[2].chosen_class]
        )
        record["best"] = {
            "beta": best_cfg.beta,
            "envsi": float(best_report.envsi_values[best_report.chosen_class]),
            "verdict": best_report.verdict,
        }
    elif comparisons:
        name = max(comparisons, key=lambda n: comparisons[n][2])
        record["best"] = {
            "method": name,
            "envsi": float(comparisons[name][2]),
            "verdict": "faulty" if comparisons[name][2] > config.threshold else "healthy",
        }

    for index in config.dump_slices:
        if tensor is None:
            raise ParameterError("tensor slices requested but the ntf method is disabled")
        if not 0 <= index < tensor.segment_count:
            raise ParameterError(f"slice {index} out of range (M={tensor.segment_count})")
        np.savetxt(
            os.path.join(out, f"tensor_slice_{index}.csv"),
            tensor.values[:, :, index],
            fmt="%.17g",
            delimiter=",",
        )

    with open(os.path.join(out, "report.json"), "w", encoding="utf-8") as fh:
        json.dump(record, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def efficiency(
    aci_values,
    anci_values,
    trials: int,
    methods=("ntf",),
    seed: int = 0,
    sim_template: SimConfig = SimConfig(),
    stft: StftConfig = StftConfig(),
    segment_count: int = 30,
    ntf_config: NtfConfig | None = None,
    envsi_cfg: EnvsiConfig | None = None,
    threshold: float = DECISION_THRESHOLD,
    centroid_tolerance: float = 500.0,
    trial_offset: int = 0,
) -> EfficiencyGrid:
    """Monte-Carlo success rates over a grid of burst amplitudes.

    For every (cyclic amplitude, interference amplitude) cell, ``trials``
    records are synthesised with per-trial seeds derived from ``seed`` and
    the cell/trial indices, and each enabled method is scored.  A trial
    counts as a success when the method's indicator exceeds ``threshold``
    AND the energy centroid of its selector curve lies within
    ``centroid_tolerance`` of the true cyclic carrier.  Trial seeds depend
    only on (cell, trial_offset + trial index), so a run with ``t1 + t2``
    trials equals the pooled counts of two runs with ``t1`` and ``t2``
    (the second using ``trial_offset=t1``).
    """
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    methods = tuple(methods)
    unknown = set(methods) - set(VALID_SELECTORS)
    if unknown:
        raise ParameterError(f"unknown methods: {sorted(unknown)}")
    if ntf_config is None:
        ntf_config = NtfConfig(max_iterations=EFFICIENCY_MAX_ITERATIONS)
    if envsi_cfg is None:
        envsi_cfg = EnvsiConfig(fault_frequency=sim_template.soi.fault_frequency)

    aci_values = tuple(float(v) for v in aci_values)
    anci_values = tuple(float(v) for v in anci_values)
    counts = {m: np.zeros((len(aci_values), len(anci_values)), dtype=np.int64) for m in methods}

    comparison_names = [m for m in methods if m != "ntf"]
    for i, aci in enumerate(aci_values):
        for j, anci in enumerate(anci_values):
            for t in range(trials):
                ss = np.random.SeedSequence(seed, spawn_key=(i, j, trial_offset + t))
                sim_seed, ntf_seed = (int(s) for s in ss.generate_state(2))
                cfg = replace(
                    sim_template,
                    soi=replace(sim_template.soi, amplitude=aci),
                    impulses=replace(sim_template.impulses, amplitude_scale=anci),
                    rng_seed=sim_seed,
                )
                signal = simulate(cfg)
                carrier = cfg.soi.carrier_frequency

                if "ntf" in methods:
                    tensor = build_tensor(signal, segment_count, stft)
                    factors = decompose(tensor, replace(ntf_config, rng_seed=ntf_seed))
                    report = diagnose(signal, factors, envsi_cfg, threshold)
                    curve = report.curves[report.chosen_class]
                    value = float(report.envsi_values[report.chosen_class])
                    if value > threshold and abs(energy_centroid(curve) - carrier) <= centroid_tolerance:
                        counts["ntf"][i, j] += 1

                if comparison_names:
                    spec = stft_spectrogram(signal, stft)
                    full_map = dependence_map(spec) if "pearson" in comparison_names else None
                    for name in comparison_names:
                        curve = _comparison_curve(name, spec, full_map)
                        _, _, value = selector_diagnosis(signal, curve, envsi_cfg)
                        if value > threshold and abs(energy_centroid(curve) - carrier) <= centroid_tolerance:
                            counts[name][i, j] += 1

    percent = {m: counts[m] * (100.0 / trials) for m in methods}
    return EfficiencyGrid(
        aci_values=aci_values,
        anci_values=anci_values,
        trials=trials,
        success_counts=counts,
        success_percent=percent,
    )


def write_efficiency(grid: EfficiencyGrid, out_dir: str) -> None:
    """Write the grid as one CSV per method plus a JSON summary."""
    os.makedirs(out_dir, exist_ok=True)
    summary = {
        "aci_values": list(grid.aci_values),
        "anci_values": list(grid.anci_values),
        "trials": grid.trials,
        "success_percent": {m: grid.success_percent[m].tolist() for m in grid.success_percent},
    }
    with open(os.path.join(out_dir, "efficiency.json"), "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for method, percent in grid.success_percent.items():
        header = "aci\\anci," + ",".join(f"{v:g}" for v in grid.anci_values)
        rows = np.column_stack([np.asarray(grid.aci_values), percent])
        _write_csv(os.path.join(out_dir, f"efficiency_{method}.csv"), rows, header)
