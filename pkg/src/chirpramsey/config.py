"""Strict line-based experiment configuration.

Format: '[section]' headers with 'key = value' lines; '#' comment lines and
blank lines are ignored.  Unknown sections or keys, duplicate scalar keys,
and malformed values are rejected with the offending line number (silently
misspelled physics keys are the dominant failure mode, so nothing is
tolerated).  Units are part of every key name.  'nucleus' and 'alpha_rad'
may repeat; angles accept plain radians or a 'pi' suffix (0.5pi, -pi).
Parsing a serialized configuration reproduces the same object.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .pulses import ChirpPulse
from .ramsey import ENGINES
from .spinmodel import NuclearSpin, SpinSystem, Species
from .spectra import WINDOWS
from .units import GAMMA_E_MHZ_PER_G


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class PulseParams:
    """Pulse block; rabi_mhz None means calibrate to rabi_target transfer."""

    w_start_mhz: float
    w_bdw_mhz: float
    tau_p_ns: float
    rabi_mhz: float | None
    rabi_target: float = 0.5
    phase0_rad: float = 0.0
    w_frame_mhz: float | None = None

    def build(self, rabi_mhz: float | None = None) -> ChirpPulse:
        rabi = self.rabi_mhz if rabi_mhz is None else rabi_mhz
        if rabi is None:
            raise ConfigError("rabi_mhz is 'auto' but no calibrated value was supplied")
        return ChirpPulse(w_start_mhz=self.w_start_mhz, w_bdw_mhz=self.w_bdw_mhz,
                          tau_p_ns=self.tau_p_ns, rabi_mhz=rabi,
                          phase0_rad=self.phase0_rad)


@dataclass(frozen=True)
class SequenceParams:
    dt1_ns: float
    n_points: int
    w_ref_mhz: float
    alphas_rad: tuple[float, ...] = (0.0,)
    t1_start_ns: float = 0.0
    t2star_us: float | None = None
    engine: str = "numeric"


@dataclass(frozen=True)
class AnalysisParams:
    window: str = "none"
    window_tau_us: float | None = None
    zero_pad_factor: int = 4
    peak_threshold: float = 0.1
    min_separation_mhz: float = 1.0


@dataclass(frozen=True)
class OutputParams:
    directory: str = "."
    seed: int | None = None
    photons_per_point: int | None = None
    contrast: float | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    system: SpinSystem
    pulse: PulseParams
    sequence: SequenceParams
    analysis: AnalysisParams = field(default_factory=AnalysisParams)
    output: OutputParams = field(default_factory=OutputParams)


def _parse_float(text: str, where: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{where}: expected a number, got {text!r}") from None


def _parse_int(text: str, where: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{where}: expected an integer, got {text!r}") from None


def _parse_angle(text: str, where: str) -> float:
    import math
    t = text.strip().lower()
    if t.endswith("pi"):
        head = t[:-2].strip()
        if head in ("", "+"):
            return math.pi
        if head == "-":
            return -math.pi
        return _parse_float(head, where) * math.pi
    return _parse_float(t, where)


def _parse_nucleus(text: str, where: str) -> NuclearSpin:
    parts = text.split()
    if not 2 <= len(parts) <= 5:
        raise ConfigError(f"{where}: nucleus takes 'SPECIES a_par_mhz "
                          f"[a_perp_mhz [gamma_mhz_per_t [quadrupole_mhz]]]'")
    species = parts[0].upper()
    if species not in ("C13", "N14"):
        raise ConfigError(f"{where}: unknown species {parts[0]!r}")
    nums = [_parse_float(p, where) for p in parts[1:]]
    nums += [0.0] * (4 - len(nums))
    return NuclearSpin(species=Species(species), a_par_mhz=nums[0],
                       a_perp_mhz=nums[1], gamma_mhz_per_t=nums[2],
                       quadrupole_mhz=nums[3])


_SECTION_KEYS = {
    "system": {"d_mhz", "omega0_mhz", "b_par_gauss", "omega_perp_mhz",
               "b_perp_gauss", "mode", "nucleus"},
    "pulse": {"w_start_mhz", "w_bdw_mhz", "tau_p_ns", "rabi_mhz",
              "rabi_target", "phase0_rad", "w_frame_mhz"},
    "sequence": {"dt1_ns", "n_points", "w_ref_mhz", "alpha_rad",
                 "t1_start_ns", "t2star_us", "engine"},
    "analysis": {"window", "window_tau_us", "zero_pad_factor",
                 "peak_threshold", "min_separation_mhz"},
    "output": {"directory", "seed", "photons_per_point", "contrast"},
}
_REPEATABLE = {"nucleus", "alpha_rad"}


def parse_config(text: str) -> ExperimentConfig:
    section = None
    values: dict[str, dict] = {name: {} for name in _SECTION_KEYS}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        where = f"line {lineno}"
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if section not in _SECTION_KEYS:
                raise ConfigError(f"{where}: unknown section [{section}]")
            continue
        if "=" not in line:
            raise ConfigError(f"{where}: expected 'key = value', got {raw!r}")
        if section is None:
            raise ConfigError(f"{where}: key outside any [section]")
        key, _, val = line.partition("=")
        key, val = key.strip().lower(), val.strip()
        if key not in _SECTION_KEYS[section]:
            raise ConfigError(f"{where}: unknown key {key!r} in [{section}]")
        if not val:
            raise ConfigError(f"{where}: empty value for {key!r}")
        bucket = values[section]
        if key in _REPEATABLE:
            bucket.setdefault(key, []).append((val, where))
        elif key in bucket:
            raise ConfigError(f"{where}: duplicate key {key!r} in [{section}]")
        else:
            bucket[key] = (val, where)
    return _build_config(values)


def _take_float(bucket, key, default=None):
    if key not in bucket:
        return default
    val, where = bucket[key]
    return _parse_float(val, where)


def _take_int(bucket, key, default=None):
    if key not in bucket:
        return default
    val, where = bucket[key]
    return _parse_int(val, where)


def _take_choice(bucket, key, choices, default):
    if key not in bucket:
        return default
    val, where = bucket[key]
    if val not in choices:
        raise ConfigError(f"{where}: {key} must be one of {sorted(choices)}, got {val!r}")
    return val


def _require(bucket, key, section):
    if key not in bucket:
        raise ConfigError(f"missing required key {key!r} in [{section}]")


def _build_config(values: dict) -> ExperimentConfig:
    sysv = values["system"]
    if "omega0_mhz" in sysv and "b_par_gauss" in sysv:
        raise ConfigError("give either omega0_mhz or b_par_gauss, not both")
    if "omega_perp_mhz" in sysv and "b_perp_gauss" in sysv:
        raise ConfigError("give either omega_perp_mhz or b_perp_gauss, not both")
    omega0 = _take_float(sysv, "omega0_mhz", None)
    if omega0 is None:
        b = _take_float(sysv, "b_par_gauss", 0.0)
        omega0 = GAMMA_E_MHZ_PER_G * b
    omega_perp = _take_float(sysv, "omega_perp_mhz", None)
    if omega_perp is None:
        b = _take_float(sysv, "b_perp_gauss", 0.0)
        omega_perp = GAMMA_E_MHZ_PER_G * b
    nuclei = tuple(_parse_nucleus(val, where)
                   for val, where in sysv.get("nucleus", []))
    system = SpinSystem(
        d_zfs_mhz=_take_float(sysv, "d_mhz", 2870.0),
        omega0_mhz=omega0,
        omega_perp_mhz=omega_perp,
        nuclei=nuclei,
        mode=_take_choice(sysv, "mode", {"secular", "full"}, "secular"),
    )

    pulsev = values["pulse"]
    for key in ("w_start_mhz", "w_bdw_mhz", "tau_p_ns", "rabi_mhz"):
        _require(pulsev, key, "pulse")
    rabi_val, rabi_where = pulsev["rabi_mhz"]
    rabi = None if rabi_val.lower() == "auto" else _parse_float(rabi_val, rabi_where)
    pulse = PulseParams(
        w_start_mhz=_take_float(pulsev, "w_start_mhz"),
        w_bdw_mhz=_take_float(pulsev, "w_bdw_mhz"),
        tau_p_ns=_take_float(pulsev, "tau_p_ns"),
        rabi_mhz=rabi,
        rabi_target=_take_float(pulsev, "rabi_target", 0.5),
        phase0_rad=_take_float(pulsev, "phase0_rad", 0.0),
        w_frame_mhz=_take_float(pulsev, "w_frame_mhz", None),
    )

    seqv = values["sequence"]
    for key in ("dt1_ns", "n_points", "w_ref_mhz"):
        _require(seqv, key, "sequence")
    alphas = tuple(_parse_angle(val, where)
                   for val, where in seqv.get("alpha_rad", [("0", "default")]))
    sequence = SequenceParams(
        dt1_ns=_take_float(seqv, "dt1_ns"),
        n_points=_take_int(seqv, "n_points"),
        w_ref_mhz=_take_float(seqv, "w_ref_mhz"),
        alphas_rad=alphas,
        t1_start_ns=_take_float(seqv, "t1_start_ns", 0.0),
        t2star_us=_take_float(seqv, "t2star_us", None),
        engine=_take_choice(seqv, "engine", set(ENGINES), "numeric"),
    )

    anav = values["analysis"]
    analysis = AnalysisParams(
        window=_take_choice(anav, "window", set(WINDOWS), "none"),
        window_tau_us=_take_float(anav, "window_tau_us", None),
        zero_pad_factor=_take_int(anav, "zero_pad_factor", 4),
        peak_threshold=_take_float(anav, "peak_threshold", 0.1),
        min_separation_mhz=_take_float(anav, "min_separation_mhz", 1.0),
    )

    outv = values["output"]
    directory = outv["directory"][0] if "directory" in outv else "."
    output = OutputParams(
        directory=directory,
        seed=_take_int(outv, "seed", None),
        photons_per_point=_take_int(outv, "photons_per_point", None),
        contrast=_take_float(outv, "contrast", None),
    )
    return ExperimentConfig(system=system, pulse=pulse, sequence=sequence,
                            analysis=analysis, output=output)


def parse_config_file(path: str) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def serialize_config(cfg: ExperimentConfig) -> str:
    """Canonical text form; parsing it returns an equal ExperimentConfig."""
    out = ["[system]",
           f"d_mhz = {cfg.system.d_zfs_mhz!r}",
           f"omega0_mhz = {cfg.system.omega0_mhz!r}",
           f"omega_perp_mhz = {cfg.system.omega_perp_mhz!r}",
           f"mode = {cfg.system.mode}"]
    for n in cfg.system.nuclei:
        out.append(f"nucleus = {n.species.value} {n.a_par_mhz!r} {n.a_perp_mhz!r} "
                   f"{n.gamma_mhz_per_t!r} {n.quadrupole_mhz!r}")
    p = cfg.pulse
    out += ["", "[pulse]",
            f"w_start_mhz = {p.w_start_mhz!r}",
            f"w_bdw_mhz = {p.w_bdw_mhz!r}",
            f"tau_p_ns = {p.tau_p_ns!r}",
            "rabi_mhz = auto" if p.rabi_mhz is None else f"rabi_mhz = {p.rabi_mhz!r}",
            f"rabi_target = {p.rabi_target!r}",
            f"phase0_rad = {p.phase0_rad!r}"]
    if p.w_frame_mhz is not None:
        out.append(f"w_frame_mhz = {p.w_frame_mhz!r}")
    s = cfg.sequence
    out += ["", "[sequence]",
            f"dt1_ns = {s.dt1_ns!r}",
            f"n_points = {s.n_points}",
            f"w_ref_mhz = {s.w_ref_mhz!r}"]
    out += [f"alpha_rad = {a!r}" for a in s.alphas_rad]
    out.append(f"t1_start_ns = {s.t1_start_ns!r}")
    if s.t2star_us is not None:
        out.append(f"t2star_us = {s.t2star_us!r}")
    out.append(f"engine = {s.engine}")
    a = cfg.analysis
    out += ["", "[analysis]", f"window = {a.window}"]
    if a.window_tau_us is not None:
        out.append(f"window_tau_us = {a.window_tau_us!r}")
    out += [f"zero_pad_factor = {a.zero_pad_factor}",
            f"peak_threshold = {a.peak_threshold!r}",
            f"min_separation_mhz = {a.min_separation_mhz!r}"]
    o = cfg.output
    out += ["", "[output]", f"directory = {o.directory}"]
    if o.seed is not None:
        out.append(f"seed = {o.seed}")
    if o.photons_per_point is not None:
        out.append(f"photons_per_point = {o.photons_per_point}")
    if o.contrast is not None:
        out.append(f"contrast = {o.contrast!r}")
    return "\n".join(out) + "\n"


def config_sha256(cfg: ExperimentConfig) -> str:
    return hashlib.sha256(serialize_config(cfg).encode()).hexdigest()[:16]
