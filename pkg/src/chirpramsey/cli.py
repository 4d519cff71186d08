"""Command line front end.

Subcommands: simulate (one fringe per configured alpha), scan (repeat a
simulation over reference frequencies, fields, or readout phases), calibrate
(solve for the drive amplitude), reproduce (run a built-in scenario and
report pass/fail).  Exit codes: 0 success, 1 configuration problem,
2 convergence or calibration failure, 3 scenario report failure.

Output files are CSV with '# key: value' provenance headers (config hash,
seed, package version; no timestamps) so a rerun of the same command is
byte-identical.
"""

from __future__ import annotations

import argparse
import math
import os
import sys as _sys
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .config import (ConfigError, ExperimentConfig, _parse_angle, config_sha256,
                     parse_config_file)
from .io import (_atomic_write, provenance_lines, write_fringe_csv,
                 write_peaks_csv, write_spectrum_csv)
from .pulses import CalibrationError, ConvergenceError, calibrate_rabi, swept_transitions
from .ramsey import RamseyKernel, shot_noise
from .scenarios import (FIGURES, FIGURE_SUMMARIES, bfield_data, fig4_data,
                        fig5_data, fig6_data, reproduce, two_level_rabi_mhz)
from .spectra import classify_by_slope, fft_spectrum, find_peaks, phase_cycle_combine
from .spinmodel import SpinSystem, build_hamiltonian
from .units import GAMMA_E_MHZ_PER_G

SCAN_KINDS = ("ref_freq", "b_field", "alpha")


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chirpramsey",
                                description="chirped-pulse Ramsey simulator")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config=True):
        if config:
            sp.add_argument("--config", required=True, help="experiment file")
        sp.add_argument("--out", default=None, help="output directory")
        sp.add_argument("--seed", type=int, default=None,
                        help="photon-noise seed (overrides the config)")
        sp.add_argument("--workers", type=int, default=1,
                        help="worker processes for scans")

    common(sub.add_parser("simulate", help="one fringe per configured alpha"))
    scan = sub.add_parser("scan", help="sweep one parameter of a simulation")
    common(scan)
    scan.add_argument("--scan", required=True, choices=SCAN_KINDS,
                      dest="scan_kind")
    scan.add_argument("--values", required=True,
                      help="comma-separated values (MHz, gauss, or rad; "
                           "alpha accepts pi shorthand like 0.5pi)")
    common(sub.add_parser("calibrate", help="solve for the drive amplitude"))
    rep = sub.add_parser("reproduce", help="run a built-in scenario")
    rep.add_argument("--figure", required=True, choices=FIGURES)
    rep.add_argument("--out", default=None, help="output directory")
    return p


def _resolve_rabi(cfg: ExperimentConfig) -> float:
    if cfg.pulse.rabi_mhz is not None:
        return cfg.pulse.rabi_mhz
    return two_level_rabi_mhz(cfg.pulse.w_start_mhz, cfg.pulse.w_bdw_mhz,
                              cfg.pulse.tau_p_ns, cfg.pulse.rabi_target)


def _provenance(cfg: ExperimentConfig, seed) -> dict:
    return {"config_sha256": config_sha256(cfg),
            "seed": "none" if seed is None else seed,
            "version": __version__}


def _outdir(cfg: ExperimentConfig, args) -> str:
    out = args.out if args.out is not None else cfg.output.directory
    os.makedirs(out, exist_ok=True)
    return out


def _seed(cfg: ExperimentConfig, args):
    return args.seed if args.seed is not None else cfg.output.seed


def _postprocess(cfg: ExperimentConfig, record, seed_offset: int, seed):
    """Apply the configured photon noise; per-record seeds stay distinct."""
    if cfg.output.photons_per_point is None:
        return record
    contrast = 1.0 if cfg.output.contrast is None else cfg.output.contrast
    per_record = None if seed is None else seed + seed_offset
    return shot_noise(record, cfg.output.photons_per_point, contrast,
                      seed=per_record)


def _analyze(cfg: ExperimentConfig, record):
    spec = fft_spectrum(record, window=cfg.analysis.window,
                        window_tau_us=cfg.analysis.window_tau_us,
                        zero_pad_factor=cfg.analysis.zero_pad_factor)
    peaks = find_peaks(spec, threshold=cfg.analysis.peak_threshold,
                       min_separation_mhz=cfg.analysis.min_separation_mhz)
    peaks = classify_by_slope(peaks, record.meta["system"],
                              record.meta["w_ref_mhz"])
    return spec, peaks


def _simulate_value(cfg: ExperimentConfig, rabi_mhz: float, scan_kind: str,
                    value: float):
    """One fringe record for one scan point (top level so pools can run it)."""
    sysm = cfg.system
    seq = cfg.sequence
    w_ref = seq.w_ref_mhz
    alpha = seq.alphas_rad[0]
    if scan_kind == "ref_freq":
        w_ref = value
    elif scan_kind == "b_field":
        sysm = SpinSystem(d_zfs_mhz=sysm.d_zfs_mhz,
                          omega0_mhz=GAMMA_E_MHZ_PER_G * value,
                          omega_perp_mhz=sysm.omega_perp_mhz,
                          nuclei=sysm.nuclei, mode=sysm.mode)
    elif scan_kind == "alpha":
        alpha = value
    kernel = RamseyKernel(sysm, cfg.pulse.build(rabi_mhz),
                          frame=cfg.pulse.w_frame_mhz, engine=seq.engine)
    return kernel.fringe(seq.dt1_ns, seq.n_points, w_ref,
                         alpha_const_rad=alpha, t1_start_ns=seq.t1_start_ns,
                         t2star_us=seq.t2star_us)


def _cmd_simulate(args) -> int:
    cfg = parse_config_file(args.config)
    out = _outdir(cfg, args)
    seed = _seed(cfg, args)
    prov = _provenance(cfg, seed)
    rabi = _resolve_rabi(cfg)
    kernel = RamseyKernel(cfg.system, cfg.pulse.build(rabi),
                          frame=cfg.pulse.w_frame_mhz,
                          engine=cfg.sequence.engine)
    seq = cfg.sequence
    for k, alpha in enumerate(seq.alphas_rad):
        rec = kernel.fringe(seq.dt1_ns, seq.n_points, seq.w_ref_mhz,
                            alpha_const_rad=alpha,
                            t1_start_ns=seq.t1_start_ns,
                            t2star_us=seq.t2star_us)
        rec = _postprocess(cfg, rec, k, seed)
        spec, peaks = _analyze(cfg, rec)
        write_fringe_csv(os.path.join(out, f"fringe_a{k}.csv"), rec, prov)
        write_spectrum_csv(os.path.join(out, f"spectrum_a{k}.csv"), spec, prov)
        write_peaks_csv(os.path.join(out, f"peaks_a{k}.csv"), peaks, prov)
        print(f"alpha {alpha:g} rad: {len(peaks)} peaks, "
              f"rabi {rabi:.4f} MHz -> {out}/fringe_a{k}.csv")
    return 0


def _scan_values(kind: str, text: str) -> list[float]:
    tokens = [t for t in (s.strip() for s in text.split(",")) if t]
    if not tokens:
        raise ConfigError("scan needs at least one value")
    if kind == "alpha":
        return [_parse_angle(t, f"value {i + 1}") for i, t in enumerate(tokens)]
    try:
        return [float(t) for t in tokens]
    except ValueError as exc:
        raise ConfigError(f"bad scan value: {exc}") from None


def _cmd_scan(args) -> int:
    cfg = parse_config_file(args.config)
    values = _scan_values(args.scan_kind, args.values)
    out = _outdir(cfg, args)
    seed = _seed(cfg, args)
    prov = _provenance(cfg, seed)
    rabi = _resolve_rabi(cfg)

    tasks = [(cfg, rabi, args.scan_kind, v) for v in values]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            records = list(pool.map(_simulate_value, *zip(*tasks)))
    else:
        records = [_simulate_value(*t) for t in tasks]

    summary = ["scan_value,freq_MHz,abs_amp,class"]
    spectra = []
    for k, (value, rec) in enumerate(zip(values, records)):
        rec = _postprocess(cfg, rec, k, seed)
        spec, peaks = _analyze(cfg, rec)
        spectra.append(spec)
        write_fringe_csv(os.path.join(out, f"fringe_s{k}.csv"), rec, prov)
        write_spectrum_csv(os.path.join(out, f"spectrum_s{k}.csv"), spec, prov)
        write_peaks_csv(os.path.join(out, f"peaks_s{k}.csv"), peaks, prov)
        for p in peaks:
            summary.append(f"{value!r},{p.freq_mhz!r},{p.abs_amp!r},{p.label}")

    _atomic_write(os.path.join(out, "summary.csv"),
                  provenance_lines(prov) + summary)

    if (args.scan_kind == "alpha" and len(values) == 2
            and abs(abs(values[1] - values[0]) - math.pi) < 1e-9):
        s_sum, s_diff = phase_cycle_combine(spectra[0], spectra[1])
        write_spectrum_csv(os.path.join(out, "spectrum_sum.csv"), s_sum, prov)
        write_spectrum_csv(os.path.join(out, "spectrum_diff.csv"), s_diff, prov)
        print(f"phase pair combined -> {out}/spectrum_sum.csv, "
              f"{out}/spectrum_diff.csv")
    print(f"{len(values)} scan points -> {out}/summary.csv")
    return 0


def _cmd_calibrate(args) -> int:
    cfg = parse_config_file(args.config)
    template = cfg.pulse.build(rabi_mhz=1.0)
    h0 = build_hamiltonian(cfg.system)
    transition = None
    if cfg.system.dim > 2:
        hits = swept_transitions(cfg.system, template)
        if not hits:
            raise ConfigError("no single-quantum transition inside the sweep "
                              "window; nothing to calibrate on")
        transition = hits[0].upper_lower_basis()
    res = calibrate_rabi(h0, template, cfg.pulse.rabi_target,
                         transition=transition, frame=cfg.pulse.w_frame_mhz)
    print(f"rabi_mhz = {res.rabi_mhz!r}")
    print(f"seed_mhz = {res.seed_mhz!r}")
    print(f"seed_ratio = {res.seed_ratio!r}")
    print(f"transfer = {res.transfer!r} (target {res.target!r})")
    print(f"evaluations = {res.n_evals}")
    return 0


def _write_figure_outputs(figure: str, out: str) -> None:
    os.makedirs(out, exist_ok=True)
    prov = {"figure": figure, "version": __version__}
    if figure == "fig4":
        for w, spec in fig4_data()["spectra"].items():
            write_spectrum_csv(os.path.join(out, f"spectrum_wref{w:g}.csv"),
                               spec, prov)
    elif figure == "fig5":
        data = fig5_data()
        write_spectrum_csv(os.path.join(out, "spectrum_sum.csv"), data["sum"], prov)
        write_spectrum_csv(os.path.join(out, "spectrum_diff.csv"), data["diff"], prov)
    elif figure == "bfield":
        for om, entry in bfield_data()["per"].items():
            write_spectrum_csv(os.path.join(out, f"spectrum_omega{om:g}.csv"),
                               entry["spectrum"], prov)
    elif figure == "fig6":
        data = fig6_data()
        for tag in ("secular", "full"):
            write_spectrum_csv(os.path.join(out, f"spectrum_{tag}_diff.csv"),
                               data[tag]["diff"], prov)
        write_spectrum_csv(os.path.join(out, "spectrum_secular_sum.csv"),
                           data["secular"]["sum"], prov)


def _cmd_reproduce(args) -> int:
    print(f"{args.figure}: {FIGURE_SUMMARIES[args.figure]}")
    report = reproduce(args.figure)
    for line in report.lines():
        print(line)
    if args.out is not None:
        _write_figure_outputs(args.figure, args.out)
        print(f"spectra -> {args.out}/")
    return 0 if report.passed else 3


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handler = {"simulate": _cmd_simulate, "scan": _cmd_scan,
               "calibrate": _cmd_calibrate, "reproduce": _cmd_reproduce}
    try:
        return handler[args.command](args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 1
    except (ConvergenceError, CalibrationError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
