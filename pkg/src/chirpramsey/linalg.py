"""Dense linear algebra for small spin Hilbert spaces.

Basis convention: every spin is stored in the |m> basis ordered m = +s .. -s,
so for s=1 the indices are (|+1>, |0>, |-1>) and for s=1/2 they are
(|+1/2>, |-1/2>).  Composite spaces are lexicographic tensor products with
the electron index varying slowest.
"""

from __future__ import annotations

import numpy as np

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10

_SUPPORTED_SPINS = (0.5, 1.0)


def spin_operators(s: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (Sx, Sy, Sz) for spin s in the m = +s..-s basis.

    Only s = 1/2 and s = 1 are supported; anything else is rejected.
    """
    s = float(s)
    if s not in _SUPPORTED_SPINS:
        raise ValueError(f"unsupported spin s={s}; expected one of {_SUPPORTED_SPINS}")
    dim = int(round(2 * s + 1))
    m = s - np.arange(dim)
    sz = np.diag(m).astype(complex)
    # <m+1| S+ |m> = sqrt(s(s+1) - m(m+1)); rows are ordered by descending m
    raise_elem = np.sqrt(s * (s + 1) - m[1:] * (m[1:] + 1))
    sp = np.zeros((dim, dim), dtype=complex)
    sp[np.arange(dim - 1), np.arange(1, dim)] = raise_elem
    sx = (sp + sp.conj().T) / 2.0
    sy = (sp - sp.conj().T) / 2.0j
    return sx, sy, sz


def kron(a: np.ndarray, *rest: np.ndarray) -> np.ndarray:
    """Kronecker product of two or more operators, left factor slowest."""
    out = np.asarray(a)
    for b in rest:
        out = np.kron(out, np.asarray(b))
    return out


def op_on(op: np.ndarray, index: int, dims: tuple[int, ...]) -> np.ndarray:
    """Embed a single-subsystem operator at position `index` of a product space."""
    mats = [np.eye(d, dtype=complex) for d in dims]
    if op.shape != (dims[index], dims[index]):
        raise ValueError(f"operator shape {op.shape} does not match dims[{index}]={dims[index]}")
    mats[index] = op
    return kron(*mats) if len(mats) > 1 else mats[0].copy()


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    scale = max(1.0, float(np.max(np.abs(m))) if m.size else 1.0)
    return bool(np.max(np.abs(m - m.conj().T)) <= tol * scale)


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    u = np.asarray(u)
    eye = np.eye(u.shape[0], dtype=complex)
    return bool(np.max(np.abs(u.conj().T @ u - eye)) <= tol)


def expm_hermitian(h: np.ndarray, t: float = 1.0) -> np.ndarray:
    """exp(-i h t) through an eigendecomposition of Hermitian h.

    `h` and `t` must multiply to a dimensionless phase (rad/ns times ns in
    this package).  Non-Hermitian input is rejected rather than symmetrized.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    if not np.isfinite(t):
        raise ValueError("duration must be finite")
    if not is_hermitian(h):
        raise ValueError("matrix is not Hermitian within tolerance")
    evals, evecs = np.linalg.eigh(h)
    phases = np.exp(-1j * evals * t)
    return (evecs * phases) @ evecs.conj().T
