"""Chirped drive pulses: numeric propagation, passage analysis, calibration.

A ChirpPulse sweeps its instantaneous frequency linearly from w_start across
w_bdw during tau_p.  Numerical propagation runs in a rotating frame generated
by w_frame * N, where N projects onto the electron |m_S| = 1 manifold (for a
two-level system, onto the upper state).  The static Hamiltonian is
block-diagonalized with respect to N during the pulse and counter-rotating
drive terms are dropped (RWA).  With this convention a single linear drive
addresses both S=1 single-quantum transitions, which both lie above the
m_S = 0 level by roughly the zero-field splitting.

Stepping uses piecewise-constant midpoint sampling of the drive phase.  Each
step unitary factors as diag(z^n) @ expm(-i Hc dt) @ diag(z^n)^dagger with
z = exp(-i dphi_mid), so a single Hermitian eigendecomposition per step size
serves the whole pulse.  Steps are combined by pairwise products in chunks,
and the step count doubles until the propagator is Cauchy-stable below tol.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from .linalg import expm_hermitian, spin_operators
from .spinmodel import SpinSystem, Transition, transition_table
from .units import ANG


class ConvergenceError(RuntimeError):
    """Step refinement hit its cap before reaching the requested tolerance."""


class CalibrationError(RuntimeError):
    """Amplitude calibration could not bracket or reach the target transfer."""


@dataclass(frozen=True)
class ChirpPulse:
    """Linear frequency chirp: w_start .. w_start + w_bdw over tau_p.

    rabi is the rotating-frame drive amplitude Omega_1 in MHz (half the peak
    amplitude of the underlying linear lab drive); phase0 adds a constant
    waveform phase in rad.
    """

    w_start_mhz: float
    w_bdw_mhz: float
    tau_p_ns: float
    rabi_mhz: float
    phase0_rad: float = 0.0

    def __post_init__(self):
        if not self.tau_p_ns > 0:
            raise ValueError("tau_p_ns must be positive")
        if not self.w_bdw_mhz > 0:
            raise ValueError("w_bdw_mhz must be positive")
        if self.rabi_mhz < 0:
            raise ValueError("rabi_mhz must be >= 0")

    @property
    def rate_mhz_per_ns(self) -> float:
        return self.w_bdw_mhz / self.tau_p_ns

    @property
    def w_center_mhz(self) -> float:
        return self.w_start_mhz + 0.5 * self.w_bdw_mhz

    @property
    def w_end_mhz(self) -> float:
        return self.w_start_mhz + self.w_bdw_mhz

    def instantaneous_freq_mhz(self, t_ns):
        return self.w_start_mhz + self.rate_mhz_per_ns * np.asarray(t_ns, dtype=float)

    def waveform_phase_rad(self, t_ns):
        t = np.asarray(t_ns, dtype=float)
        return self.phase0_rad + ANG * (self.w_start_mhz + 0.5 * self.rate_mhz_per_ns * t) * t


@dataclass(frozen=True)
class FrameSpec:
    """Rotating-frame frequency; populations must not depend on the choice."""

    w_frame_mhz: float

    @classmethod
    def centered(cls, pulse: ChirpPulse) -> "FrameSpec":
        return cls(pulse.w_center_mhz)


def resolve_frame(frame, pulse: ChirpPulse) -> float:
    if frame is None:
        return pulse.w_center_mhz
    if isinstance(frame, FrameSpec):
        return frame.w_frame_mhz
    return float(frame)


@dataclass(frozen=True, eq=False)
class PulsePropagation:
    """Converged pulse propagator plus the step bookkeeping that produced it."""

    u: np.ndarray
    dt_ns: float
    n_steps: int
    cauchy_error: float
    w_frame_mhz: float
    n_diag: np.ndarray


def drive_and_projector(dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Electron drive operator and excited-manifold diagonal for a given dim.

    dim == 2 is the two-level analog (upper state first); dim divisible by 3
    is an S=1 electron as the leading tensor factor.
    """
    if dim == 2:
        sx, _, _ = spin_operators(0.5)
        return sx.astype(complex), np.array([1.0, 0.0])
    if dim % 3 == 0 and dim >= 3:
        nper = dim // 3
        sx, _, _ = spin_operators(1.0)
        drive = np.kron(sx, np.eye(nper))
        n = np.ones(dim)
        n[nper:2 * nper] = 0.0
        return drive.astype(complex), n
    raise ValueError(f"cannot infer electron structure for dimension {dim}")


def _block_project(h: np.ndarray, n_diag: np.ndarray) -> np.ndarray:
    """Drop matrix elements connecting different eigenspaces of N (RWA)."""
    mask = np.equal.outer(n_diag, n_diag)
    return np.where(mask, h, 0.0)


def _polar_unitary(m: np.ndarray) -> np.ndarray:
    w, _, vh = np.linalg.svd(m)
    return w @ vh


def _ordered_product(stack: np.ndarray) -> np.ndarray:
    """Product stack[-1] @ ... @ stack[0] by pairwise reduction."""
    while stack.shape[0] > 1:
        if stack.shape[0] % 2:
            head, tail = stack[:-1], stack[-1:]
        else:
            head, tail = stack, None
        prod = head[1::2] @ head[0::2]
        stack = prod if tail is None else np.concatenate([prod, tail])
    return stack[0]


def _chirp_unitary(hc, n_diag, pulse, w_frame_mhz, n_steps):
    dim = hc.shape[0]
    dt = pulse.tau_p_ns / n_steps
    e_step = expm_hermitian(hc, dt)
    excited = n_diag > 0.5
    chunk = max(64, min(1 << 16, (1 << 22) // (dim * dim)))
    u = np.eye(dim, dtype=complex)
    for lo in range(0, n_steps, chunk):
        hi = min(lo + chunk, n_steps)
        t_mid = (np.arange(lo, hi) + 0.5) * dt
        dphi = pulse.waveform_phase_rad(t_mid) - ANG * w_frame_mhz * t_mid
        z = np.exp(-1j * dphi)
        rf = np.ones((hi - lo, dim), dtype=complex)
        rf[:, excited] = z[:, None]
        steps = rf[:, :, None] * e_step[None, :, :] * rf.conj()[:, None, :]
        u = _polar_unitary(_ordered_product(steps)) @ u
    return u


def _auto_dt0(hc, pulse, w_frame_mhz):
    # resolve the largest of: rotating-frame level spread, instantaneous
    # drive detuning, and the drive amplitude (dt <= 1/(20 f_max))
    ev = np.linalg.eigvalsh(hc)
    span = (ev[-1] - ev[0]) / ANG
    detune = max(abs(pulse.w_start_mhz - w_frame_mhz), abs(pulse.w_end_mhz - w_frame_mhz))
    f_max = max(span, detune, pulse.rabi_mhz, 1.0)
    return min(50.0 / f_max, pulse.tau_p_ns / 8)


MAX_STEPS = 1 << 23


def pulse_propagator(h0, pulse: ChirpPulse, frame=None, tol: float = 1e-8,
                     dt0=None, max_doublings: int = 24) -> PulsePropagation:
    """Propagate one chirped pulse in the rotating frame under the RWA.

    h0 is the static lab-frame Hamiltonian in rad/ns.  The step count starts
    at the resolution rule (dt <= 1/(20 f_max), overridable via dt0) and
    doubles until successive propagators differ by less than tol entrywise.
    The returned unitary is the finer of the last compared pair.
    """
    h0 = np.asarray(h0, dtype=complex)
    if h0.ndim != 2 or h0.shape[0] != h0.shape[1]:
        raise ValueError("h0 must be a square matrix")
    drive, n_diag = drive_and_projector(h0.shape[0])
    w_frame = resolve_frame(frame, pulse)
    hc = _block_project(h0, n_diag) - ANG * w_frame * np.diag(n_diag) \
        + ANG * pulse.rabi_mhz * drive
    dt_init = dt0 if dt0 is not None else _auto_dt0(hc, pulse, w_frame)
    n_steps = max(8, math.ceil(pulse.tau_p_ns / dt_init))
    u_prev = _chirp_unitary(hc, n_diag, pulse, w_frame, n_steps)
    for _ in range(max_doublings):
        if 2 * n_steps > MAX_STEPS:
            break
        n_steps *= 2
        u = _chirp_unitary(hc, n_diag, pulse, w_frame, n_steps)
        err = float(np.abs(u - u_prev).max())
        if err < tol:
            return PulsePropagation(u=u, dt_ns=pulse.tau_p_ns / n_steps,
                                    n_steps=n_steps, cauchy_error=err,
                                    w_frame_mhz=w_frame, n_diag=n_diag)
        u_prev = u
    raise ConvergenceError(
        f"propagator not Cauchy-stable below {tol:g} within {n_steps} steps")


def passage_transfer(h0, pulse: ChirpPulse, transition: tuple[int, int],
                     frame=None, tol: float = 1e-6) -> float:
    """Probability of ending in basis state `up` after one pulse from `lo`."""
    up, lo = transition
    prop = pulse_propagator(h0, pulse, frame=frame, tol=tol)
    return float(np.abs(prop.u[up, lo]) ** 2)


@dataclass(frozen=True)
class CalibrationResult:
    rabi_mhz: float
    seed_mhz: float
    transfer: float
    target: float
    n_evals: int

    @property
    def seed_ratio(self) -> float:
        return self.rabi_mhz / self.seed_mhz if self.seed_mhz else float("nan")


def lz_seed_rabi_mhz(pulse: ChirpPulse, target: float) -> float:
    """Landau-Zener amplitude heuristic: Omega_1^2 = -(2k/pi^2) ln(1-target)."""
    k_ang = ANG * pulse.rate_mhz_per_ns
    return math.sqrt(-2.0 * k_ang * math.log1p(-target)) / math.pi / ANG


def calibrate_rabi(h0, pulse: ChirpPulse, target: float,
                   transition: tuple[int, int] | None = None, frame=None,
                   transfer_tol: float = 1e-4, eval_tol: float = 1e-6) -> CalibrationResult:
    """Find the drive amplitude giving the requested single-passage transfer.

    Seeds the bracket from the Landau-Zener formula (a heuristic, not ground
    truth), expands it geometrically until the target is enclosed, then
    root-finds on the simulated transfer.  The swept transition should be the
    first one crossed so its transfer amplitude is not re-driven later.
    """
    if not 0 <= target < 1:
        raise CalibrationError(f"target transfer must be in [0, 1), got {target}")
    h0 = np.asarray(h0, dtype=complex)
    if transition is None:
        if h0.shape[0] != 2:
            raise CalibrationError("transition=(up, lo) is required for dim > 2")
        transition = (0, 1)
    if target == 0:
        return CalibrationResult(0.0, 0.0, 0.0, 0.0, 0)

    evals = 0

    def transfer_of(rabi):
        nonlocal evals
        evals += 1
        return passage_transfer(h0, replace(pulse, rabi_mhz=rabi), transition,
                                frame=frame, tol=eval_tol)

    seed = lz_seed_rabi_mhz(pulse, target)
    lo = 0.0
    hi = seed
    t_hi = transfer_of(hi)
    t_prev = t_hi
    for _ in range(40):
        if t_hi >= target:
            break
        lo = hi
        hi *= 1.6
        t_hi = transfer_of(hi)
        if t_hi < t_prev - 1e-6:
            # over-driven: transfer is no longer monotone in amplitude
            warnings.warn("transfer decreased while expanding the bracket "
                          "(over-driven regime); narrowing to the last "
                          "monotone interval", stacklevel=2)
            break
        t_prev = t_hi
    if t_hi < target:
        raise CalibrationError(
            f"could not bracket target transfer {target} (reached {t_hi:.4f} "
            f"at rabi {hi:.3f} MHz)")

    root, info = brentq(lambda r: transfer_of(r) - target, lo, hi,
                        xtol=1e-9 * max(hi, 1.0), rtol=8.9e-16, full_output=True)
    final = transfer_of(root)
    if abs(final - target) > transfer_tol:
        raise CalibrationError(
            f"calibration stalled: transfer {final:.6f} vs target {target}")
    return CalibrationResult(rabi_mhz=float(root), seed_mhz=seed,
                             transfer=final, target=target, n_evals=evals)


@dataclass(frozen=True)
class PassageParams:
    """Effective flip angle and accumulated phase of one swept passage."""

    theta_rad: float
    phi_rad: float

    def __post_init__(self):
        if not 0 <= self.theta_rad <= math.pi:
            raise ValueError("theta_rad must lie in [0, pi]")


# coupling of the embedded S=1 drive on one SQ transition is rabi/sqrt(2);
# the two-level propagator uses rabi/2, hence the sqrt(2) rescale below
S1_COUPLING_SCALE = math.sqrt(2.0)


def fit_passage_params(pulse: ChirpPulse, gap_mhz: float, frame=None,
                       coupling_scale: float = S1_COUPLING_SCALE,
                       tol: float = 1e-8) -> PassageParams:
    """Extract (theta, phi) for one transition from a two-level propagation.

    The transition is reduced to a two-level problem at its gap frequency and
    propagated through the pulse; theta comes from the transfer amplitude and
    phi is the leading z-angle of the ZYZ factorization (the trailing z-angle,
    a phase accumulated before the crossing, is dropped and treated as
    bookkeeping).  Both extracted values are insensitive to the global phase.
    """
    h2 = ANG * np.diag([gap_mhz, 0.0]).astype(complex)
    pulse2 = replace(pulse, rabi_mhz=coupling_scale * pulse.rabi_mhz)
    u = pulse_propagator(h2, pulse2, frame=frame, tol=tol).u
    theta = 2.0 * math.atan2(abs(u[1, 0]), abs(u[0, 0]))
    phi = float(np.angle(u[1, 0]) - np.angle(u[0, 0]))
    return PassageParams(theta_rad=theta, phi_rad=phi)


def passage_unitary(params: PassageParams, pair: tuple[int, int], dim: int,
                    kind: str = "excitation") -> np.ndarray:
    """Embed one passage as a 2x2 block on (upper, lower) basis indices.

    Excitation applies the y-rotation first and the z-phase after the
    crossing; readout applies them in reversed order.  Acting on the lower
    state, the excitation block produces
    exp(i phi/2) cos(theta/2) |lo> - exp(-i phi/2) sin(theta/2) |up>.
    """
    up, lo = pair
    if up == lo:
        raise ValueError("passage indices must differ")
    if not (0 <= up < dim and 0 <= lo < dim):
        raise ValueError("passage indices out of range")
    if kind not in ("excitation", "readout"):
        raise ValueError(f"unknown passage kind {kind!r}")
    c = math.cos(params.theta_rad / 2)
    s = math.sin(params.theta_rad / 2)
    zp = np.exp(-0.5j * params.phi_rad)
    rz = np.array([[zp, 0.0], [0.0, zp.conjugate()]])
    ry = np.array([[c, -s], [s, c]], dtype=complex)
    block = rz @ ry if kind == "excitation" else ry @ rz
    u = np.eye(dim, dtype=complex)
    u[np.ix_([up, lo], [up, lo])] = block
    return u


def swept_transitions(sys: SpinSystem, pulse: ChirpPulse) -> tuple[Transition, ...]:
    """In-window single-quantum transitions in the order the sweep meets them."""
    table = transition_table(sys)
    hits = [t for t in table if t.is_sq
            and pulse.w_start_mhz <= t.freq_mhz <= pulse.w_end_mhz]
    hits.sort(key=lambda t: t.freq_mhz)
    return tuple(hits)


def sequential_passage_model(sys: SpinSystem, pulse: ChirpPulse, frame=None,
                             params=None, kind: str = "excitation",
                             tol: float = 1e-8) -> np.ndarray:
    """Idealized pulse unitary: one passage block per swept SQ transition.

    Valid when the system is secular (product eigenstates) and the swept
    transitions are separated by more than the power-broadened width; a
    warning is emitted otherwise.  params may be None (fit each transition
    numerically), a single PassageParams applied to every passage, or a dict
    keyed by (upper, lower) basis index pairs.
    """
    if sys.mode != "secular":
        raise ValueError("the sequential-passage model requires secular mode")
    hits = swept_transitions(sys, pulse)
    dim = sys.dim
    if not hits:
        warnings.warn("no transition inside the sweep window; "
                      "passage model is the identity", stacklevel=2)
        return np.eye(dim, dtype=complex)

    freqs = np.array([t.freq_mhz for t in hits])
    width = S1_COUPLING_SCALE * pulse.rabi_mhz
    if len(freqs) > 1 and np.diff(freqs).min() < width:
        warnings.warn(
            f"swept transitions closer than the power-broadened width "
            f"({width:.2f} MHz); sequential-passage model is approximate",
            stacklevel=2)

    fits: dict[float, PassageParams] = {}
    u = np.eye(dim, dtype=complex)
    for t in hits:
        pair = t.upper_lower_basis()
        if params is None:
            key = round(t.freq_mhz, 9)
            if key not in fits:
                fits[key] = fit_passage_params(pulse, t.freq_mhz, frame=frame, tol=tol)
            p = fits[key]
        elif isinstance(params, PassageParams):
            p = params
        else:
            p = params[pair]
        u = passage_unitary(p, pair, dim, kind=kind) @ u
    return u
