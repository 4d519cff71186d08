"""Two-pulse chirped Ramsey sequences and their closed-form signal oracles.

The sequence is: chirped excitation pulse, free evolution for t1, an
identical readout pulse whose waveform phase is offset by the phase law
alpha(t1) = 2*pi*w_ref*t1 + alpha_const, then readout of the total m_S = 0
population.  Sweeping t1 encodes every coherence as a fringe; single-quantum
components appear shifted to |gap - w_ref| while double-quantum components
are unaffected by w_ref.

The readout pulse with waveform phase beta has propagator
exp(-i beta N) V exp(+i beta N) with V the phase-zero propagator and N the
excited-manifold projector, which is exact here because the pulse Hamiltonian
is block-diagonal with respect to N.  One propagated pulse therefore serves
every (t1, w_ref, alpha) combination, and the per-point work is two small
matrix products.  Nuclear spins start maximally mixed: each nuclear product
configuration is propagated independently and the populations are averaged.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .linalg import is_hermitian
from .pulses import ChirpPulse, PassageParams, pulse_propagator, resolve_frame, \
    sequential_passage_model
from .spinmodel import SpinSystem, build_hamiltonian, excitation_diag, m0_indices
from .units import ANG

ENGINES = ("numeric", "analytic_passage")


@dataclass(frozen=True)
class PhaseLaw:
    """Readout-pulse phase offset: alpha(t1) = 2*pi*w_ref*t1 + alpha_const."""

    w_ref_mhz: float
    alpha_const_rad: float = 0.0

    def alpha_rad(self, t1_ns):
        return ANG * self.w_ref_mhz * np.asarray(t1_ns, dtype=float) + self.alpha_const_rad


@dataclass(frozen=True)
class RamseySequence:
    """Pulse pair plus t1 grid; both pulses are identical up to the phase law."""

    pulse: ChirpPulse
    dt1_ns: float
    n_points: int
    phase_law: PhaseLaw
    t1_start_ns: float = 0.0
    t2star_us: float | None = None

    def __post_init__(self):
        if not self.dt1_ns > 0:
            raise ValueError("dt1_ns must be positive")
        if self.n_points < 1:
            raise ValueError("n_points must be >= 1")
        if self.t2star_us is not None and self.t2star_us <= 0:
            raise ValueError("t2star_us must be positive when set")

    @property
    def t1_grid_ns(self) -> np.ndarray:
        return self.t1_start_ns + self.dt1_ns * np.arange(self.n_points)

    @property
    def nyquist_mhz(self) -> float:
        return 500.0 / self.dt1_ns


@dataclass(eq=False)
class FringeRecord:
    """P(m_S = 0) versus free evolution time."""

    t1_ns: np.ndarray
    p0: np.ndarray
    p0_sigma: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.t1_ns = np.asarray(self.t1_ns, dtype=float)
        self.p0 = np.asarray(self.p0, dtype=float)
        if self.t1_ns.shape != self.p0.shape:
            raise ValueError("t1 and p0 must have equal length")
        if self.p0.size and (self.p0.min() < -1e-9 or self.p0.max() > 1 + 1e-9):
            raise ValueError("p0 must lie in [0, 1]")
        np.clip(self.p0, 0.0, 1.0, out=self.p0)

    @property
    def dt1_ns(self) -> float:
        return float(self.t1_ns[1] - self.t1_ns[0]) if self.t1_ns.size > 1 else 0.0

    @property
    def record_id(self) -> str:
        return self.meta.get("record_id", "")


def _record_id(*parts) -> str:
    text = "|".join(repr(p) for p in parts)
    return hashlib.sha256(text.encode()).hexdigest()[:12]


class RamseyKernel:
    """Precomputed pulse propagators and eigensystem for fast fringe sweeps.

    Building the kernel does all the heavy work (pulse propagation or the
    passage-model construction, plus one diagonalization of the static
    Hamiltonian); each fringe() call then costs two matrix products per t1
    point.  Reuse one kernel for scans over w_ref or alpha_const.
    """

    def __init__(self, sys: SpinSystem, pulse: ChirpPulse, frame=None,
                 engine: str = "numeric", tol: float = 1e-7,
                 passage_params=None):
        if engine not in ENGINES:
            raise ValueError(f"engine must be one of {ENGINES}, got {engine!r}")
        self.sys = sys
        self.pulse = pulse
        self.engine = engine
        self.w_frame_mhz = resolve_frame(frame, pulse)
        h0 = build_hamiltonian(sys)
        self.integrator: dict = {}
        if engine == "numeric":
            prop = pulse_propagator(h0, pulse, frame=self.w_frame_mhz, tol=tol)
            v1 = prop.u
            v2 = prop.u
            self.integrator = {"dt_ns": prop.dt_ns, "n_steps": prop.n_steps,
                               "cauchy_error": prop.cauchy_error}
        else:
            v1 = sequential_passage_model(sys, pulse, frame=self.w_frame_mhz,
                                          params=passage_params, kind="excitation")
            v2 = sequential_passage_model(sys, pulse, frame=self.w_frame_mhz,
                                          params=passage_params, kind="readout")
        assert is_hermitian(h0)
        evals, q = np.linalg.eigh(h0)
        self.n_diag = excitation_diag(sys)
        self.m0 = m0_indices(sys)
        self.v1 = v1
        self.v2 = v2
        self.evals = evals
        self.q = q
        # state after pulse 1 (one column per nuclear configuration), carried
        # to the lab frame and expressed in the eigenbasis of h0
        frame_phase = np.exp(-1j * ANG * self.w_frame_mhz * pulse.tau_p_ns * self.n_diag)
        self.c0 = q.conj().T @ (frame_phase[:, None] * v1[:, self.m0])

    def fringe(self, dt1_ns: float, n_points: int, w_ref_mhz: float,
               alpha_const_rad: float = 0.0, t1_start_ns: float = 0.0,
               t2star_us: float | None = None) -> FringeRecord:
        t1 = t1_start_ns + dt1_ns * np.arange(n_points)
        # evolve each eigencomponent, re-express in the product basis, apply
        # the phase law on the excited manifold, then the readout pulse
        evolved = np.exp(-1j * np.outer(t1, self.evals))[:, :, None] * self.c0[None, :, :]
        w = np.matmul(self.q[None, :, :], evolved)
        alpha = ANG * w_ref_mhz * t1 + alpha_const_rad
        law = np.where(self.n_diag[None, :] > 0.5,
                       np.exp(1j * alpha)[:, None], 1.0)
        out = np.matmul(self.v2[None, :, :], law[:, :, None] * w)
        p0 = (np.abs(out[:, self.m0, :]) ** 2).sum(axis=1).mean(axis=1)
        if t2star_us is not None:
            dc = p0.mean()
            p0 = dc + (p0 - dc) * np.exp(-t1 / (1000.0 * t2star_us))
        meta = {
            "engine": self.engine,
            "w_ref_mhz": w_ref_mhz,
            "alpha_const_rad": alpha_const_rad,
            "dt1_ns": dt1_ns,
            "n_points": n_points,
            "t1_start_ns": t1_start_ns,
            "t2star_us": t2star_us,
            "w_frame_mhz": self.w_frame_mhz,
            "pulse": self.pulse,
            "system": self.sys,
            "integrator": dict(self.integrator),
        }
        meta["record_id"] = _record_id(self.sys, self.pulse, self.engine,
                                       w_ref_mhz, alpha_const_rad, dt1_ns,
                                       n_points, t1_start_ns, t2star_us,
                                       self.w_frame_mhz)
        return FringeRecord(t1_ns=t1, p0=p0, meta=meta)

    def fringe_for(self, seq: RamseySequence,
                   alpha_shift_rad: float = 0.0) -> FringeRecord:
        law = seq.phase_law
        return self.fringe(seq.dt1_ns, seq.n_points, law.w_ref_mhz,
                           law.alpha_const_rad + alpha_shift_rad,
                           seq.t1_start_ns, seq.t2star_us)


def run_ramsey(sys: SpinSystem, seq: RamseySequence, engine: str = "numeric",
               frame=None, tol: float = 1e-7, passage_params=None) -> FringeRecord:
    """Simulate one chirped Ramsey fringe record."""
    kernel = RamseyKernel(sys, seq.pulse, frame=frame, engine=engine, tol=tol,
                          passage_params=passage_params)
    return kernel.fringe_for(seq)


def run_phase_pair(sys: SpinSystem, seq: RamseySequence, engine: str = "numeric",
                   frame=None, tol: float = 1e-7, passage_params=None):
    """Two records differing only by pi in the readout phase constant."""
    kernel = RamseyKernel(sys, seq.pulse, frame=frame, engine=engine, tol=tol,
                          passage_params=passage_params)
    return kernel.fringe_for(seq), kernel.fringe_for(seq, alpha_shift_rad=np.pi)


def analytic_two_level(omega0_mhz: float, phi1_rad: float, phi2_rad: float, t1_ns):
    """Two-level Ramsey fringe after two half passages:
    P0 = (1 - cos(2 pi omega0 t1 + phi1 + phi2)) / 2."""
    t1 = np.asarray(t1_ns, dtype=float)
    return 0.5 * (1.0 - np.cos(ANG * omega0_mhz * t1 + phi1_rad + phi2_rad))


def three_level_amplitudes(theta_rad: float) -> tuple[float, float]:
    """Branch amplitudes A1 = sin^2(theta/2) cos(theta/2), A2 = cos^4(theta/2)."""
    c = np.cos(theta_rad / 2)
    s = np.sin(theta_rad / 2)
    return float(s * s * c), float(c ** 4)


def analytic_three_level(theta_rad: float, phi_rad: float, omega_p_mhz: float,
                         omega_m_mhz: float, alpha_rad: float, t1_ns,
                         carry_phase_rad: float = 0.0):
    """Closed-form S=1 Ramsey population for ideal sequential passages.

    P0 = 2 A1^2 + A2^2 + 2 A1^2 cos(2 pi (w_p - w_m) t1)
         - 2 A1 A2 [cos(2 pi w_m t1 + 5 phi/2 - alpha + carry)
                    + cos(2 pi w_p t1 + 5 phi/2 - alpha + carry)]
    where w_p, w_m are the two single-quantum frequencies already shifted by
    the reference, alpha is the constant readout phase offset, and carry is
    any extra phase the excited amplitudes hold at t1 = 0 (the rotating-frame
    bookkeeping across the excitation pulse contributes w_frame * tau_p).
    Both passages are assumed to share one (theta, phi); the double-quantum
    term carries neither phi nor alpha.
    """
    t1 = np.asarray(t1_ns, dtype=float)
    a1, a2 = three_level_amplitudes(theta_rad)
    ph = 2.5 * phi_rad - alpha_rad + carry_phase_rad
    return (2 * a1 * a1 + a2 * a2
            + 2 * a1 * a1 * np.cos(ANG * (omega_p_mhz - omega_m_mhz) * t1)
            - 2 * a1 * a2 * (np.cos(ANG * omega_m_mhz * t1 + ph)
                             + np.cos(ANG * omega_p_mhz * t1 + ph)))


def shot_noise(record: FringeRecord, photons_per_point: int, contrast: float,
               seed=None) -> FringeRecord:
    """Photon-count readout model applied to a fringe record.

    The population maps to a detection probability (1 - contrast) +
    contrast * p0 (bright state = m_S 0), a binomial photon count is drawn
    per point, and the count is mapped back through the contrast so the
    estimate converges to p0 as photons_per_point grows.  contrast = 0
    carries no signal and yields a flat record.
    """
    if photons_per_point < 1:
        raise ValueError("photons_per_point must be >= 1")
    if not 0 <= contrast <= 1:
        raise ValueError("contrast must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    p_eff = (1.0 - contrast) + contrast * record.p0
    counts = rng.binomial(photons_per_point, p_eff)
    rate = counts / photons_per_point
    sigma_rate = np.sqrt(p_eff * (1.0 - p_eff) / photons_per_point)
    if contrast > 0:
        p0 = (rate - (1.0 - contrast)) / contrast
        sigma = sigma_rate / contrast
    else:
        p0 = rate
        sigma = sigma_rate
    meta = dict(record.meta)
    meta.update(photons_per_point=photons_per_point, contrast=contrast,
                noise_seed=seed)
    return FringeRecord(t1_ns=record.t1_ns.copy(), p0=np.clip(p0, 0.0, 1.0),
                        p0_sigma=sigma, meta=meta)
