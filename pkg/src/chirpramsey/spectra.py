"""FFT spectra of fringe records, phase-cycle combination, peak analysis.

Records are demeaned before the transform (the closed-form dc term carries no
line information and would leak into the low bins).  Spectra are one-sided,
scaled by 2/N with N the native record length, so an input cosine of unit
amplitude produces a unit peak.  Zero padding (default 4x) refines peak
interpolation without moving line positions by more than half a native bin.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .ramsey import FringeRecord
from .spinmodel import SpinSystem, TransitionTable, transition_table

WINDOWS = ("none", "exponential")


@dataclass(frozen=True, eq=False)
class Spectrum:
    """One-sided complex spectrum of a real fringe record."""

    freq_mhz: np.ndarray
    amp: np.ndarray
    dt1_ns: float
    n_native: int
    n_fft: int
    window: str = "none"
    window_tau_us: float | None = None
    source_id: str = ""

    @property
    def bin_mhz(self) -> float:
        """Native resolution 1/(N dt1), independent of zero padding."""
        return 1000.0 / (self.n_native * self.dt1_ns)

    @property
    def df_mhz(self) -> float:
        return float(self.freq_mhz[1] - self.freq_mhz[0])

    @property
    def nyquist_mhz(self) -> float:
        return 500.0 / self.dt1_ns

    def index_of(self, f_mhz: float) -> int:
        return int(np.argmin(np.abs(self.freq_mhz - f_mhz)))

    def amp_at(self, f_mhz: float) -> complex:
        return complex(self.amp[self.index_of(f_mhz)])

    @property
    def total_power(self) -> float:
        """Sum of squares of the (demeaned, windowed) time-domain samples."""
        f = np.abs(self.amp * (self.n_native / 2.0)) ** 2
        weights = np.full(f.shape, 2.0)
        weights[0] = 1.0
        if self.n_fft % 2 == 0:
            weights[-1] = 1.0
        return float((weights * f).sum() / self.n_fft)

    def same_axes(self, other: "Spectrum") -> bool:
        return (self.n_fft == other.n_fft
                and self.n_native == other.n_native
                and self.dt1_ns == other.dt1_ns
                and self.window == other.window
                and self.window_tau_us == other.window_tau_us)


def fft_spectrum(record: FringeRecord, window: str = "none",
                 window_tau_us: float | None = None,
                 zero_pad_factor: int = 4) -> Spectrum:
    """One-sided spectrum of a fringe record with the dc component removed."""
    n = record.p0.size
    if n < 8:
        raise ValueError("record too short for a spectrum (need >= 8 points)")
    if window not in WINDOWS:
        raise ValueError(f"window must be one of {WINDOWS}, got {window!r}")
    if zero_pad_factor < 1:
        raise ValueError("zero_pad_factor must be >= 1")
    x = record.p0 - record.p0.mean()
    if window == "exponential":
        if not window_tau_us or window_tau_us <= 0:
            raise ValueError("exponential window requires window_tau_us > 0")
        x = x * np.exp(-(record.t1_ns - record.t1_ns[0]) / (1000.0 * window_tau_us))
    n_fft = n * zero_pad_factor
    amp = np.fft.rfft(x, n_fft) * (2.0 / n)
    freq = np.fft.rfftfreq(n_fft, d=record.dt1_ns * 1e-3)
    return Spectrum(freq_mhz=freq, amp=amp, dt1_ns=record.dt1_ns, n_native=n,
                    n_fft=n_fft, window=window, window_tau_us=window_tau_us,
                    source_id=record.record_id)


def phase_cycle_combine(spec_a: Spectrum, spec_b: Spectrum) -> tuple[Spectrum, Spectrum]:
    """Binwise (sum, diff) of a phase pair: sum keeps DQ, diff keeps SQ."""
    if not spec_a.same_axes(spec_b):
        raise ValueError("phase-cycle spectra must share axes and window")
    mk = lambda amp, tag: replace(
        spec_a, amp=amp, source_id=f"{tag}({spec_a.source_id},{spec_b.source_id})")
    return mk(spec_a.amp + spec_b.amp, "sum"), mk(spec_a.amp - spec_b.amp, "diff")


@dataclass(frozen=True)
class Peak:
    freq_mhz: float
    abs_amp: float
    amp: complex
    bin: int
    label: str = "unknown"


@dataclass(frozen=True)
class PeakList:
    entries: tuple[Peak, ...]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def frequencies(self, label: str = "") -> np.ndarray:
        return np.array([p.freq_mhz for p in self.entries
                         if p.label.startswith(label) or not label])

    def select(self, label: str) -> tuple[Peak, ...]:
        return tuple(p for p in self.entries if p.label == label)

    def nearest(self, f_mhz: float) -> Peak:
        if not self.entries:
            raise ValueError("empty peak list")
        return min(self.entries, key=lambda p: abs(p.freq_mhz - f_mhz))


def find_peaks(spec: Spectrum, threshold: float = 0.1,
               min_separation_mhz: float = 1.0) -> PeakList:
    """Local maxima of |amp| above threshold*max, parabolic refined, separated.

    Candidates closer than min_separation to a stronger accepted peak are
    dropped (greedy by amplitude).
    """
    if not 0 < threshold < 1:
        raise ValueError("threshold must lie in (0, 1)")
    mag = np.abs(spec.amp)
    floor = threshold * mag.max()
    inner = mag[1:-1]
    cand = np.flatnonzero((inner > mag[:-2]) & (inner >= mag[2:]) & (inner >= floor)) + 1

    peaks = []
    for i in cand:
        a, b, c = mag[i - 1], mag[i], mag[i + 1]
        denom = a - 2 * b + c
        delta = 0.0 if denom == 0 else 0.5 * (a - c) / denom
        delta = float(np.clip(delta, -0.5, 0.5))
        freq = spec.freq_mhz[i] + delta * spec.df_mhz
        amp_ref = b - 0.25 * (a - c) * delta
        peaks.append(Peak(freq_mhz=float(freq), abs_amp=float(amp_ref),
                          amp=complex(spec.amp[i]), bin=int(i)))

    peaks.sort(key=lambda p: -p.abs_amp)
    kept: list[Peak] = []
    for p in peaks:
        if all(abs(p.freq_mhz - k.freq_mhz) >= min_separation_mhz for k in kept):
            kept.append(p)
    kept.sort(key=lambda p: p.freq_mhz)
    return PeakList(entries=tuple(kept))


def flip_ratio(amp_a: complex, amp_b: complex) -> float:
    """1 for a line that inverts between the phase pair, 0 for an invariant one."""
    num = abs(amp_a - amp_b)
    den = num + abs(amp_a + amp_b)
    return num / den if den else 0.0


def classify_peaks(peaks: PeakList, pair: tuple[Spectrum, Spectrum],
                   dead_zone: tuple[float, float] = (0.3, 0.7)) -> PeakList:
    """Label peaks by their behavior under the alpha -> alpha + pi cycle.

    Sign-flipping lines are single quantum, invariant lines double quantum;
    ratios inside the dead zone stay unknown.  Zero-quantum lines do not flip
    either, so this discriminator alone reports them as DQ; use
    classify_by_slope to tell them apart.
    """
    spec_a, spec_b = pair
    lo, hi = dead_zone
    out = []
    for p in peaks:
        r = flip_ratio(spec_a.amp[p.bin], spec_b.amp[p.bin])
        label = "SQ" if r > hi else "DQ" if r < lo else "unknown"
        out.append(replace(p, label=label))
    return PeakList(entries=tuple(out))


def transition_slopes(sys: SpinSystem, delta_mhz: float = 1.0):
    """d(freq)/d(Omega_0) per transition, by matching two transition tables.

    Secular expectations: |slope| = 1 for SQ, 2 for DQ, 0 for nuclear-flip
    lines.  Entries are matched by their eigenstate dominant-character index
    pair, which is stable under the small field step.
    """
    base = transition_table(sys)
    bumped = transition_table(replace(sys, omega0_mhz=sys.omega0_mhz + delta_mhz))
    ref = {(t.basis_a, t.basis_b): t.freq_mhz for t in bumped}
    out = []
    for t in base:
        f2 = ref.get((t.basis_a, t.basis_b))
        if f2 is not None:
            out.append((t, (f2 - t.freq_mhz) / delta_mhz))
    return out


def classify_by_slope(peaks: PeakList, sys: SpinSystem, w_ref_mhz: float,
                      delta_mhz: float = 1.0, match_tol_mhz: float = 1.0) -> PeakList:
    """Label peaks by how the matching model line moves with Omega_0.

    Model lines are placed at |freq - w_ref| for SQ transitions and at freq
    for the rest (the reference phase law shifts only single-quantum lines).
    """
    slopes = transition_slopes(sys, delta_mhz)
    out = []
    for p in peaks:
        best, best_err = None, match_tol_mhz
        for t, df in slopes:
            pos = abs(t.freq_mhz - w_ref_mhz) if t.is_sq else t.freq_mhz
            err = abs(pos - p.freq_mhz)
            if err <= best_err:
                best, best_err = abs(df), err
        if best is None:
            label = "unknown"
        elif abs(best - 2.0) < 0.2:
            label = "DQ"
        elif abs(best - 1.0) < 0.2:
            label = "SQ"
        elif best < 0.2:
            label = "ZQ"
        else:
            label = "unknown"
        out.append(replace(p, label=label))
    return PeakList(entries=tuple(out))


def lorentzian_linewidth(spec: Spectrum, f_center_mhz: float | None = None,
                         search_mhz: float | None = None) -> float:
    """Lorentzian FWHM around a line, from the half-power width of |amp|.

    The width is read at half of the peak power |amp|^2, which for a
    Lorentzian line equals the 1/(pi T2*) full width at half maximum of the
    underlying absorption profile (the half-height of plain |amp| would
    overestimate it by sqrt(3)).
    """
    power = np.abs(spec.amp) ** 2
    if f_center_mhz is None:
        i0 = int(np.argmax(power))
    else:
        sel = np.abs(spec.freq_mhz - f_center_mhz) <= (search_mhz or 5 * spec.bin_mhz)
        if not sel.any():
            raise ValueError("no bins inside the search window")
        idx = np.flatnonzero(sel)
        i0 = int(idx[np.argmax(power[idx])])
    half = power[i0] / 2.0

    def cross(direction):
        i = i0
        while 0 < i < power.size - 1 and power[i + direction] >= half:
            i += direction
        j = i + direction
        if j < 0 or j >= power.size:
            raise ValueError("line not resolved inside the spectrum")
        frac = (power[i] - half) / (power[i] - power[j])
        return spec.freq_mhz[i] + frac * (spec.freq_mhz[j] - spec.freq_mhz[i])

    return float(abs(cross(+1) - cross(-1)))


def group_peaks(peaks: PeakList, gap_mhz: float) -> list[tuple[Peak, ...]]:
    """Split frequency-sorted peaks into clusters separated by > gap_mhz."""
    ordered = sorted(peaks, key=lambda p: p.freq_mhz)
    groups: list[list[Peak]] = []
    for p in ordered:
        if groups and p.freq_mhz - groups[-1][-1].freq_mhz <= gap_mhz:
            groups[-1].append(p)
        else:
            groups.append([p])
    return [tuple(g) for g in groups]
