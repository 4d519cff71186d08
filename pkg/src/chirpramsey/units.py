"""Unit conventions shared across the package.

Scalar frequencies at public interfaces are plain MHz and durations are ns
(T2* is quoted in us where noted).  Matrices and everything handed to a
propagator carry angular frequency in rad/ns, so that exp(-i*H*t) needs no
extra 2*pi.  ``ANG`` converts between the two.
"""

import numpy as np

# rad/ns per MHz: omega[rad/ns] = ANG * f[MHz]
ANG = 2.0e-3 * np.pi

# electron gyromagnetic ratio used for field <-> Larmor conversion
GAMMA_E_MHZ_PER_G = 2.8025


def mhz_to_radns(f):
    return ANG * np.asarray(f, dtype=float)


def radns_to_mhz(w):
    return np.asarray(w, dtype=float) / ANG
