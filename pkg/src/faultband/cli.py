"""Command-line interface with three subcommands: simulate, analyze, efficiency.

A flat ``key = value`` config file mirroring the long flag names may be
passed with ``--config``; explicit command-line flags override file values.
Exit codes: 0 success, 2 bad configuration, 3 ingestion failure, 4 numerical
failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict

from .diagnosis import DECISION_THRESHOLD, EnvsiConfig
from .errors import IngestionError, NumericalError, ParameterError, SizeError
from .harness import (
    EFFICIENCY_MAX_ITERATIONS,
    RunConfig,
    VALID_SELECTORS,
    analyze,
    efficiency,
    write_efficiency,
    write_signal,
)
from .ntf import NtfConfig
from .signal_model import ImpulseNoiseParams, SimConfig, SoiParams, simulate
from .spectral import StftConfig

_EXTENSIONS = {"csv": "csv", "wav": "wav", "f32le": "f32"}


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key=value file mirroring these flags")
    p.add_argument("--seed", type=int, default=0, help="master random seed")
    p.add_argument("--out", help="output directory")


def _add_sim_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--sample-rate", type=float, default=None,
                   help="sampling rate in Hz (default 25000 for synthesis; "
                        "required for csv/f32le input)")
    p.add_argument("--duration", type=float, default=30.0, help="record length, s")
    p.add_argument("--fault-freq", type=float, default=30.0,
                   help="cyclic burst repetition rate, Hz")
    p.add_argument("--amp-ci", type=float, default=4.0, help="cyclic burst amplitude")
    p.add_argument("--amp-nci", type=float, default=20.0,
                   help="interference burst amplitude scale")
    p.add_argument("--sigma", type=float, default=1.2, help="Gaussian noise variance")
    p.add_argument("--carrier-ci", type=float, default=2500.0,
                   help="cyclic burst carrier, Hz")
    p.add_argument("--carrier-nci", type=float, default=6000.0,
                   help="interference burst carrier, Hz")
    p.add_argument("--decay-ci", type=float, default=1000.0,
                   help="cyclic burst decay rate, 1/s")
    p.add_argument("--decay-nci", type=float, default=1000.0,
                   help="interference burst decay rate, 1/s")
    p.add_argument("--impulse-rate", type=float, default=1.5,
                   help="expected interference bursts per second")


def _add_stft_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--window", default="hamming",
                   choices=["hamming", "hann", "rectangular"])
    p.add_argument("--window-length", type=int, default=256)
    p.add_argument("--overlap", type=float, default=0.85)
    p.add_argument("--fft-length", type=int, default=512)


def _add_envsi_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--harmonics", type=int, default=5,
                   help="number of fault harmonics scored")
    p.add_argument("--harmonic-tol", type=float, default=None,
                   help="peak search half-width per harmonic, Hz "
                        "(default: two envelope-spectrum bins)")
    p.add_argument("--envsi-band-top", type=float, default=None,
                   help="denominator band top, Hz (default: end of the last "
                        "harmonic window)")
    p.add_argument("--threshold", type=float, default=DECISION_THRESHOLD,
                   help="indicator level separating faulty from healthy")


def _add_ntf_flags(p: argparse.ArgumentParser, default_iters: int) -> None:
    p.add_argument("--beta", type=float, action="append",
                   help="divergence shape: -1, 0, or positive; repeatable "
                        "(default -1)")
    p.add_argument("--rank", type=int, default=4, help="number of factor classes")
    p.add_argument("--max-iters", type=int, default=default_iters)
    p.add_argument("--tol", type=float, default=1e-8,
                   help="relative objective tolerance over a 10-sweep window")
    p.add_argument("--restarts", type=int, default=1,
                   help="seeded restarts; lowest objective wins")


def _build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(
        prog="faultband",
        description="Informative-band identification and envelope diagnostics "
                    "for cyclostationary vibration records.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    commands: dict[str, argparse.ArgumentParser] = {}

    p_sim = sub.add_parser("simulate", help="synthesise a benchmark record")
    _add_common_flags(p_sim)
    _add_sim_flags(p_sim)
    p_sim.add_argument("--format", default="csv", choices=sorted(_EXTENSIONS))
    commands["simulate"] = p_sim

    p_an = sub.add_parser("analyze", help="run the full diagnosis pipeline")
    _add_common_flags(p_an)
    _add_sim_flags(p_an)
    _add_stft_flags(p_an)
    _add_envsi_flags(p_an)
    _add_ntf_flags(p_an, default_iters=1000)
    p_an.add_argument("--input", help="record to analyse (default: synthesise one)")
    p_an.add_argument("--format", default=None, choices=sorted(_EXTENSIONS),
                      help="input file format (default: by extension)")
    p_an.add_argument("--segments", type=int, default=30,
                      help="number of record segments for the tensor")
    p_an.add_argument("--selectors", nargs="+", default=list(VALID_SELECTORS),
                      choices=list(VALID_SELECTORS))
    p_an.add_argument("--dump-slice", type=int, action="append", default=None,
                      help="tensor slice index to dump as CSV; repeatable")
    p_an.add_argument("--ses-max-hz", type=float, default=1000.0,
                      help="truncate exported envelope spectra at this "
                           "frequency (0 keeps everything)")
    commands["analyze"] = p_an

    p_eff = sub.add_parser("efficiency", help="Monte-Carlo success-rate grid")
    _add_common_flags(p_eff)
    _add_sim_flags(p_eff)
    _add_stft_flags(p_eff)
    _add_envsi_flags(p_eff)
    _add_ntf_flags(p_eff, default_iters=EFFICIENCY_MAX_ITERATIONS)
    p_eff.add_argument("--grid-aci", type=float, nargs="+", default=[1.0, 2.0, 4.0],
                       help="cyclic amplitude axis")
    p_eff.add_argument("--grid-anci", type=float, nargs="+", default=[10.0, 20.0, 30.0],
                       help="interference amplitude axis")
    p_eff.add_argument("--trials", type=int, default=10, help="trials per cell")
    p_eff.add_argument("--selectors", nargs="+", default=["ntf"],
                       choices=list(VALID_SELECTORS), help="methods to score")
    p_eff.add_argument("--segments", type=int, default=30)
    p_eff.add_argument("--trial-offset", type=int, default=0,
                       help="index of the first trial (for split runs)")
    p_eff.add_argument("--centroid-tol", type=float, default=500.0,
                       help="allowed distance between selector centroid and "
                            "the true carrier, Hz")
    commands["efficiency"] = p_eff
    return parser, commands


def _load_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                text = line.split("#", 1)[0].strip()
                if not text:
                    continue
                if "=" not in text:
                    raise ParameterError(f"{path}:{lineno}: expected 'flag = value'")
                key, _, value = text.partition("=")
                values[key.strip().lstrip("-")] = value.strip()
    except OSError as exc:
        raise ParameterError(f"cannot read config file {path}: {exc}") from exc
    return values


def _convert_flag_value(action: argparse.Action, raw: str):
    convert = action.type if action.type is not None else str
    if action.nargs in ("+", "*") or type(action).__name__ == "_AppendAction":
        parts = [p for chunk in raw.split(",") for p in chunk.split()]
        return [convert(p) for p in parts]
    value = convert(raw)
    if action.choices is not None and value not in action.choices:
        raise ParameterError(
            f"config file: {value!r} is not one of {sorted(action.choices)}"
        )
    return value


def _apply_file_defaults(sub: argparse.ArgumentParser, values: dict[str, str]) -> None:
    by_flag: dict[str, argparse.Action] = {}
    for action in sub._actions:
        for opt in action.option_strings:
            by_flag[opt.lstrip("-")] = action
    defaults = {}
    for key, raw in values.items():
        action = by_flag.get(key)
        if action is None or key == "config":
            raise ParameterError(f"config file: unknown flag {key!r}")
        defaults[action.dest] = _convert_flag_value(action, raw)
    sub.set_defaults(**defaults)


def _sim_config(args: argparse.Namespace) -> SimConfig:
    return SimConfig(
        soi=SoiParams(
            amplitude=args.amp_ci,
            fault_frequency=args.fault_freq,
            carrier_frequency=args.carrier_ci,
            decay=args.decay_ci,
        ),
        impulses=ImpulseNoiseParams(
            amplitude_scale=args.amp_nci,
            carrier_frequency=args.carrier_nci,
            decay=args.decay_nci,
            expected_count_per_second=args.impulse_rate,
        ),
        gaussian_sigma=args.sigma,
        sample_rate=args.sample_rate if args.sample_rate is not None else 25000.0,
        duration=args.duration,
        rng_seed=args.seed,
    )


def _cmd_simulate(args: argparse.Namespace) -> None:
    if not args.out:
        raise ParameterError("simulate requires --out DIR")
    config = _sim_config(args)
    signal = simulate(config)
    os.makedirs(args.out, exist_ok=True)
    samples_file = f"signal.{_EXTENSIONS[args.format]}"
    write_signal(signal, os.path.join(args.out, samples_file), args.format)
    sidecar = {
        "samples_file": samples_file,
        "format": args.format,
        "sample_count": int(signal.samples.size),
        "sample_rate": config.sample_rate,
        "rng_seed": config.rng_seed,
        "duration": config.duration,
        "gaussian_sigma": config.gaussian_sigma,
        "soi": asdict(config.soi),
        "impulses": asdict(config.impulses),
    }
    with open(os.path.join(args.out, "params.json"), "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {signal.samples.size} samples at {config.sample_rate:g} Hz "
          f"to {os.path.join(args.out, samples_file)}")


def _run_config(args: argparse.Namespace) -> RunConfig:
    betas = args.beta if args.beta else [-1.0]
    ntf_configs = tuple(
        NtfConfig(
            rank=args.rank,
            beta=beta,
            max_iterations=args.max_iters,
            relative_objective_tolerance=args.tol,
            rng_seed=args.seed,
            restarts=args.restarts,
        )
        for beta in betas
    )
    envsi_cfg = EnvsiConfig(
        fault_frequency=args.fault_freq,
        harmonic_count=args.harmonics,
        harmonic_tolerance=args.harmonic_tol,
        total_band_top=args.envsi_band_top,
    )
    stft = StftConfig(
        window=args.window,
        window_length=args.window_length,
        overlap=args.overlap,
        fft_length=args.fft_length,
    )
    if args.input:
        source: SimConfig | str = args.input
    else:
        source = _sim_config(args)
    return RunConfig(
        source=source,
        source_format=args.format,
        sample_rate=args.sample_rate,
        stft=stft,
        segment_count=args.segments,
        ntf_configs=ntf_configs,
        envsi=envsi_cfg,
        selectors=tuple(args.selectors),
        threshold=args.threshold,
        out_dir=args.out,
        dump_slices=tuple(args.dump_slice or ()),
        ses_max_hz=args.ses_max_hz,
        seed=args.seed,
    )


def _cmd_analyze(args: argparse.Namespace) -> None:
    report = analyze(_run_config(args))
    scores = ", ".join(f"{v:.4f}" for v in report.envsi_values)
    print(f"class indicators: [{scores}]")
    print(f"chosen class: {report.chosen_class}")
    print(f"indicator: {report.envsi_values[report.chosen_class]:.4f} "
          f"(threshold {report.threshold:g})")
    print(f"verdict: {report.verdict}")
    if args.out:
        print(f"artifacts written to {args.out}")


def _cmd_efficiency(args: argparse.Namespace) -> None:
    ntf_cfg = NtfConfig(
        rank=args.rank,
        beta=args.beta[0] if args.beta else -1.0,
        max_iterations=args.max_iters,
        relative_objective_tolerance=args.tol,
        restarts=args.restarts,
    )
    envsi_cfg = EnvsiConfig(
        fault_frequency=args.fault_freq,
        harmonic_count=args.harmonics,
        harmonic_tolerance=args.harmonic_tol,
        total_band_top=args.envsi_band_top,
    )
    grid = efficiency(
        args.grid_aci,
        args.grid_anci,
        args.trials,
        methods=tuple(args.selectors),
        seed=args.seed,
        sim_template=_sim_config(args),
        stft=StftConfig(
            window=args.window,
            window_length=args.window_length,
            overlap=args.overlap,
            fft_length=args.fft_length,
        ),
        segment_count=args.segments,
        ntf_config=ntf_cfg,
        envsi_cfg=envsi_cfg,
        threshold=args.threshold,
        centroid_tolerance=args.centroid_tol,
        trial_offset=args.trial_offset,
    )
    for method in grid.success_percent:
        print(f"{method} success %  (rows: cyclic amplitude, cols: interference amplitude)")
        header = "        " + "  ".join(f"{v:7g}" for v in grid.anci_values)
        print(header)
        for i, aci in enumerate(grid.aci_values):
            cells = "  ".join(f"{v:7.1f}" for v in grid.success_percent[method][i])
            print(f"{aci:7g} {cells}")
    if args.out:
        write_efficiency(grid, args.out)
        print(f"grid written to {args.out}")


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, commands = _build_parser()
    try:
        known, _ = parser.parse_known_args(argv)
        config_path = getattr(known, "config", None)
        if config_path:
            _apply_file_defaults(commands[known.command], _load_config_file(config_path))
        args = parser.parse_args(argv)
        if args.command == "simulate":
            _cmd_simulate(args)
        elif args.command == "analyze":
            _cmd_analyze(args)
        else:
            _cmd_efficiency(args)
    except (ParameterError, SizeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except IngestionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
