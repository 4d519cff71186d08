"""Spin-1 electron plus nuclear register: Hamiltonian and transition catalog.

The electron is an NV-style S=1 spin with zero-field splitting D and Larmor
terms (Omega_0 along z, Omega_perp transverse), coupled to a register of
nuclear spins (13C with s=1/2, 14N with s=1) through hyperfine constants.
In ``secular`` mode only terms diagonal in the electron m_S survive; ``full``
mode adds the transverse hyperfine pieces, nuclear Zeeman couplings and the
transverse electron Zeeman term.

All scalar parameters are MHz; built Hamiltonians are rad/ns (see units.py).
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

import numpy as np

from .linalg import op_on, spin_operators
from .units import ANG, GAMMA_E_MHZ_PER_G

MAX_DIM = 64

D_DEFAULT_MHZ = 2870.0


class Species(enum.Enum):
    C13 = "C13"
    N14 = "N14"

    @property
    def spin(self) -> float:
        return 0.5 if self is Species.C13 else 1.0

    @property
    def dim(self) -> int:
        return int(round(2 * self.spin + 1))


@dataclass(frozen=True)
class NuclearSpin:
    """One nuclear spin coupled to the electron.

    a_par/a_perp are the secular and transverse hyperfine constants in MHz;
    gamma_mhz_per_t is the nuclear gyromagnetic ratio (used only in full
    mode) and quadrupole_mhz adds P*Iz^2 for s=1 species.
    """

    species: Species
    a_par_mhz: float
    a_perp_mhz: float = 0.0
    gamma_mhz_per_t: float = 0.0
    quadrupole_mhz: float = 0.0

    def __post_init__(self):
        if isinstance(self.species, str):
            object.__setattr__(self, "species", Species(self.species))
        if not np.isfinite(self.a_par_mhz):
            raise ValueError("a_par_mhz must be finite")
        if self.a_perp_mhz < 0:
            raise ValueError("a_perp_mhz must be >= 0")
        if self.quadrupole_mhz and self.species is not Species.N14:
            raise ValueError("quadrupole term only applies to s=1 species (N14)")


@dataclass(frozen=True)
class SpinSystem:
    """Electron spin plus nuclear register with a mode switch.

    The magnetic field is stored as electron Larmor frequencies: omega0_mhz
    along the NV axis, omega_perp_mhz transverse.  Use the classmethods to
    construct from field values in gauss.
    """

    d_zfs_mhz: float = D_DEFAULT_MHZ
    omega0_mhz: float = 0.0
    omega_perp_mhz: float = 0.0
    nuclei: tuple[NuclearSpin, ...] = field(default_factory=tuple)
    mode: str = "secular"

    def __post_init__(self):
        object.__setattr__(self, "nuclei", tuple(self.nuclei))
        if self.d_zfs_mhz <= 0:
            raise ValueError("d_zfs_mhz must be positive")
        if self.mode not in ("secular", "full"):
            raise ValueError(f"mode must be 'secular' or 'full', got {self.mode!r}")
        if self.dim > MAX_DIM:
            raise ValueError(f"Hilbert space dimension {self.dim} exceeds cap {MAX_DIM}")

    @classmethod
    def from_field_gauss(cls, b_par_gauss: float, b_perp_gauss: float = 0.0, **kwargs) -> "SpinSystem":
        return cls(
            omega0_mhz=GAMMA_E_MHZ_PER_G * b_par_gauss,
            omega_perp_mhz=GAMMA_E_MHZ_PER_G * b_perp_gauss,
            **kwargs,
        )

    @classmethod
    def from_projected_field(cls, projected_gauss: float, angle_deg: float, **kwargs) -> "SpinSystem":
        """Build from the on-axis field projection and the misalignment angle."""
        theta = np.deg2rad(angle_deg)
        magnitude = projected_gauss / np.cos(theta)
        return cls.from_field_gauss(projected_gauss, magnitude * np.sin(theta), **kwargs)

    @property
    def electron_dim(self) -> int:
        return 3

    @property
    def nuclear_dims(self) -> tuple[int, ...]:
        return tuple(n.species.dim for n in self.nuclei)

    @property
    def nuclear_dim(self) -> int:
        out = 1
        for d in self.nuclear_dims:
            out *= d
        return out

    @property
    def dims(self) -> tuple[int, ...]:
        return (self.electron_dim,) + self.nuclear_dims

    @property
    def dim(self) -> int:
        return self.electron_dim * self.nuclear_dim

    @property
    def b_par_gauss(self) -> float:
        return self.omega0_mhz / GAMMA_E_MHZ_PER_G

    @property
    def b_perp_gauss(self) -> float:
        return self.omega_perp_mhz / GAMMA_E_MHZ_PER_G


# electron m_S values by basis index, order +1, 0, -1
ELECTRON_MS = (1.0, 0.0, -1.0)


def nuclear_configs(sys: SpinSystem) -> list[tuple[float, ...]]:
    """All nuclear product configurations (m_I tuples), slowest spin first."""
    axes = []
    for n in sys.nuclei:
        s = n.species.spin
        axes.append(tuple(s - k for k in range(n.species.dim)))
    return [cfg for cfg in itertools.product(*axes)] if axes else [()]


def basis_states(sys: SpinSystem) -> list[tuple[float, tuple[float, ...]]]:
    """(m_S, nuclear config) for every basis index, electron slowest."""
    cfgs = nuclear_configs(sys)
    return [(ms, cfg) for ms in ELECTRON_MS for cfg in cfgs]


def m0_indices(sys: SpinSystem) -> np.ndarray:
    """Basis indices of the electron m_S=0 block, one per nuclear config."""
    nd = sys.nuclear_dim
    return np.arange(nd, 2 * nd)


def excitation_diag(sys: SpinSystem) -> np.ndarray:
    """Diagonal of the excited-manifold projector: 1 on m_S=+-1, 0 on m_S=0."""
    nd = sys.nuclear_dim
    out = np.ones(sys.dim)
    out[nd:2 * nd] = 0.0
    return out


def config_label(cfg: tuple[float, ...]) -> str:
    if not cfg:
        return "-"
    return ",".join(f"{m:+g}" for m in cfg)


def build_hamiltonian(sys: SpinSystem) -> np.ndarray:
    """Static lab-frame Hamiltonian in rad/ns.

    H = D*Sz^2 + Omega0*Sz + Omega_perp*Sx
        + sum_i [ a_par_i*Sz*Iz_i + (full) a_perp_i*(Sx*Ix_i + Sy*Iy_i)
                  + (full) nuclear Zeeman + quadrupole ]
    """
    dims = sys.dims
    sx, sy, sz = spin_operators(1.0)
    h = sys.d_zfs_mhz * op_on(sz @ sz, 0, dims) + sys.omega0_mhz * op_on(sz, 0, dims)
    if sys.mode == "full":
        h = h + sys.omega_perp_mhz * op_on(sx, 0, dims)
    b_par_t = sys.b_par_gauss * 1e-4
    b_perp_t = sys.b_perp_gauss * 1e-4
    for k, nuc in enumerate(sys.nuclei):
        ix, iy, iz = spin_operators(nuc.species.spin)
        h = h + nuc.a_par_mhz * op_on(sz, 0, dims) @ op_on(iz, k + 1, dims)
        if nuc.quadrupole_mhz:
            h = h + nuc.quadrupole_mhz * op_on(iz @ iz, k + 1, dims)
        if sys.mode == "full":
            if nuc.a_perp_mhz:
                h = h + nuc.a_perp_mhz * (
                    op_on(sx, 0, dims) @ op_on(ix, k + 1, dims)
                    + op_on(sy, 0, dims) @ op_on(iy, k + 1, dims)
                )
            if nuc.gamma_mhz_per_t:
                h = h + nuc.gamma_mhz_per_t * (
                    b_par_t * op_on(iz, k + 1, dims) + b_perp_t * op_on(ix, k + 1, dims)
                )
    return ANG * h


@dataclass(frozen=True)
class Transition:
    """One eigenpair gap with its dominant-character assignment.

    `state_a`/`state_b` are eigenstate indices (energy ascending overall);
    `basis_a`/`basis_b` the dominant product-basis indices; `m_a`/`m_b` the
    corresponding electron characters.  `config` tags the shared nuclear
    configuration (or 'bra|ket' for nuclear-flip lines) and `overlap` is the
    smaller of the two dominant-character weights.
    """

    label: str
    freq_mhz: float
    state_a: int
    state_b: int
    basis_a: int
    basis_b: int
    m_a: float
    m_b: float
    config: str
    overlap: float

    @property
    def is_sq(self) -> bool:
        return self.label.startswith("SQ")

    def upper_lower_basis(self) -> tuple[int, int]:
        """(excited, ground) product-basis indices for a driven SQ line."""
        if not self.is_sq:
            raise ValueError("upper/lower split only defined for SQ transitions")
        if abs(self.m_a) > abs(self.m_b):
            return self.basis_a, self.basis_b
        return self.basis_b, self.basis_a


@dataclass(frozen=True)
class TransitionTable:
    entries: tuple[Transition, ...]

    def select(self, label: str) -> tuple[Transition, ...]:
        """Entries whose label starts with `label` (e.g. 'SQ', 'SQ+', 'DQ')."""
        return tuple(t for t in self.entries if t.label.startswith(label))

    def frequencies(self, label: str = "") -> np.ndarray:
        return np.array([t.freq_mhz for t in self.entries if t.label.startswith(label)])

    def in_window(self, lo_mhz: float, hi_mhz: float, label: str = "") -> tuple[Transition, ...]:
        return tuple(
            t for t in self.entries
            if t.label.startswith(label) and lo_mhz <= t.freq_mhz <= hi_mhz
        )

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)


def _single_flip(cfg_a: tuple[float, ...], cfg_b: tuple[float, ...]) -> bool:
    diffs = [abs(a - b) for a, b in zip(cfg_a, cfg_b) if a != b]
    return len(diffs) == 1 and abs(diffs[0] - 1.0) < 1e-12


def transition_table(sys: SpinSystem, overlap_threshold: float = 0.5) -> TransitionTable:
    """Catalog all eigenpair gaps, labeled by dominant product character.

    Labels: SQ+ (m_S 0 <-> +1, shared nuclear config), SQ- (0 <-> -1),
    DQ (-1 <-> +1), ZQ (same m_S, single nuclear flip), 'other' for the rest
    or when an eigenvector has no dominant character above the threshold.
    Frequencies are reported non-negative, in MHz.
    """
    h = build_hamiltonian(sys)
    evals, evecs = np.linalg.eigh(h)
    weights = np.abs(evecs) ** 2
    dominant = np.argmax(weights, axis=0)
    dom_weight = weights[dominant, np.arange(len(evals))]
    states = basis_states(sys)

    entries = []
    for i in range(len(evals)):
        for j in range(i + 1, len(evals)):
            freq = (evals[j] - evals[i]) / ANG
            overlap = float(min(dom_weight[i], dom_weight[j]))
            bi, bj = int(dominant[i]), int(dominant[j])
            (m_i, cfg_i), (m_j, cfg_j) = states[bi], states[bj]
            label = "other"
            config = f"{config_label(cfg_i)}|{config_label(cfg_j)}"
            if overlap > overlap_threshold and bi != bj:
                if cfg_i == cfg_j:
                    pair = {m_i, m_j}
                    if pair == {0.0, 1.0}:
                        label = "SQ+"
                    elif pair == {0.0, -1.0}:
                        label = "SQ-"
                    elif pair == {-1.0, 1.0}:
                        label = "DQ"
                    config = config_label(cfg_i)
                elif m_i == m_j and _single_flip(cfg_i, cfg_j):
                    label = "ZQ"
            entries.append(Transition(
                label=label,
                freq_mhz=float(abs(freq)),
                state_a=i,
                state_b=j,
                basis_a=bi,
                basis_b=bj,
                m_a=m_i,
                m_b=m_j,
                config=config,
                overlap=overlap,
            ))
    entries.sort(key=lambda t: t.freq_mhz)
    return TransitionTable(entries=tuple(entries))


def secular_energy_mhz(sys: SpinSystem, m_s: float, cfg: tuple[float, ...]) -> float:
    """Closed-form secular eigenvalue: D*m_S^2 + Omega0*m_S + sum a_par*m_S*m_I."""
    e = sys.d_zfs_mhz * m_s ** 2 + sys.omega0_mhz * m_s
    for nuc, m_i in zip(sys.nuclei, cfg):
        e += nuc.a_par_mhz * m_s * m_i
        e += nuc.quadrupole_mhz * m_i ** 2
    return e
