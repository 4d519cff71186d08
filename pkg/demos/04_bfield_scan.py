"""Magnetic field scan: the splitting check.

Across a set of axial fields, the two single-quantum lines split apart at
slope 2 in the Larmor frequency while the double-quantum line sits at
exactly that splitting.  Plotting one against the other is the standard
consistency check that line assignments are right.
"""

import csv
import os

import numpy as np
from scipy import stats

from chirpramsey import (ChirpPulse, RamseyKernel, SpinSystem, fft_spectrum,
                         find_peaks, two_level_rabi_mhz)

OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

W_START, W_BDW, TAU_P = 2650.8, 500.0, 50.0
W_REF = 2670.8
rabi = two_level_rabi_mhz(W_START, W_BDW, TAU_P)
pulse = ChirpPulse(w_start_mhz=W_START, w_bdw_mhz=W_BDW, tau_p_ns=TAU_P,
                   rabi_mhz=rabi)
print(f"one calibration ({rabi:.3f} MHz) reused for every field")

omega0s = np.array([40.0, 60.0, 85.0, 105.0, 120.0])
rows = []
print(f"{'omega0':>7} {'SQ-':>9} {'SQ+':>9} {'split':>9} {'DQ':>9}")
for om in omega0s:
    sys = SpinSystem(d_zfs_mhz=2870.0, omega0_mhz=float(om))
    rec = RamseyKernel(sys, pulse).fringe(dt1_ns=1.0, n_points=5000,
                                          w_ref_mhz=W_REF)
    peaks = find_peaks(fft_spectrum(rec))
    sq_lo = peaks.nearest(abs(2870.0 - om - W_REF)).freq_mhz
    sq_hi = peaks.nearest(abs(2870.0 + om - W_REF)).freq_mhz
    dq = peaks.nearest(2 * om).freq_mhz
    rows.append((om, sq_lo, sq_hi, sq_hi - sq_lo, dq))
    print(f"{om:7g} {sq_lo:9.3f} {sq_hi:9.3f} {sq_hi - sq_lo:9.3f} {dq:9.3f}")

split = np.array([r[3] for r in rows])
fit = stats.linregress(omega0s, split)
print(f"splitting slope vs omega0: {fit.slope:.5f} (expect 2)")
print(f"max |splitting - DQ line|: "
      f"{max(abs(r[3] - r[4]) for r in rows):.4f} MHz")

with open(os.path.join(OUT, "bfield_scan.csv"), "w", newline="") as fh:
    w = csv.writer(fh)
    w.writerow(["omega0_mhz", "sq_lo_mhz", "sq_hi_mhz", "splitting_mhz",
                "dq_mhz"])
    w.writerows(rows)
print(f"wrote {OUT}/bfield_scan.csv")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    pass
else:
    fig, ax = plt.subplots(figsize=(4.5, 3.2))
    ax.plot(omega0s, split, "o", label="SQ splitting")
    ax.plot(omega0s, [r[4] for r in rows], "x", label="DQ line")
    ax.plot(omega0s, fit.intercept + fit.slope * omega0s, "-", lw=0.8,
            label=f"fit, slope {fit.slope:.3f}")
    ax.set_xlabel("Larmor frequency (MHz)")
    ax.set_ylabel("frequency (MHz)")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(os.path.join(OUT, "bfield_scan.png"), dpi=150)
    print(f"wrote {OUT}/bfield_scan.png")
