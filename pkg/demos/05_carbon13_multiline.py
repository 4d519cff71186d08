"""A three-nucleus register resolved in one shot.

One strong carbon-13, one weak carbon-13, and the host nitrogen give
2 x 2 x 3 = 12 nuclear configurations, so each electron transition fans out
into 12 lines: four groups of six, with the two group pairs separated by
the strong hyperfine constant.  The broadband chirp excites all of them in
a single sequence; phase cycling then splits the forest into its SQ and DQ
halves.
"""

import os

import numpy as np

from chirpramsey import (ChirpPulse, NuclearSpin, PhaseLaw, RamseySequence,
                         Species, SpinSystem, fft_spectrum, find_peaks,
                         group_peaks, phase_cycle_combine, run_phase_pair,
                         two_level_rabi_mhz, write_spectrum_csv)

OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

nuclei = (NuclearSpin(Species.C13, a_par_mhz=126.5),
          NuclearSpin(Species.C13, a_par_mhz=6.55),
          NuclearSpin(Species.N14, a_par_mhz=2.15))
sys = SpinSystem.from_projected_field(3.7, 65.0, d_zfs_mhz=2870.0,
                                      nuclei=nuclei)
print(f"register dimension {sys.dim}, omega0 = {sys.omega0_mhz:.3f} MHz")

rabi = two_level_rabi_mhz(2750.3, 250.0, 60.0)
pulse = ChirpPulse(w_start_mhz=2750.3, w_bdw_mhz=250.0, tau_p_ns=60.0,
                   rabi_mhz=rabi)
seq = RamseySequence(pulse, dt1_ns=2.0, n_points=2500,
                     phase_law=PhaseLaw(w_ref_mhz=2750.3))
rec_a, rec_b = run_phase_pair(sys, seq)
spec_sum, spec_diff = phase_cycle_combine(fft_spectrum(rec_a),
                                          fft_spectrum(rec_b))

# inter-line ripple sits between 2.15 MHz neighbors, so keep 1.5 MHz clearance
sq_peaks = find_peaks(spec_diff, threshold=0.1, min_separation_mhz=1.5)
groups = group_peaks(sq_peaks, gap_mhz=5.0)
print(f"SQ channel: {len(sq_peaks)} lines in clusters of "
      f"{[len(g) for g in groups]}")
centers = [np.mean([p.freq_mhz for p in g]) for g in groups]
print("cluster centers (MHz):",
      ", ".join(f"{c:.2f}" for c in centers))
print(f"strong-carbon pair separations: {centers[2] - centers[0]:.3f} and "
      f"{centers[3] - centers[1]:.3f} MHz (hyperfine constant 126.5)")

dq_peaks = find_peaks(spec_sum, threshold=0.1, min_separation_mhz=1.5)
print(f"DQ channel: {len(dq_peaks)} lines around {2 * sys.omega0_mhz:.1f} MHz")

write_spectrum_csv(os.path.join(OUT, "c13_sq_channel.csv"), spec_diff, {})
write_spectrum_csv(os.path.join(OUT, "c13_dq_channel.csv"), spec_sum, {})
print(f"wrote c13_sq_channel.csv / c13_dq_channel.csv under {OUT}")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    pass
else:
    fig, ax = plt.subplots(figsize=(7, 3))
    ax.plot(spec_diff.freq_mhz, np.abs(spec_diff.amp), lw=0.6)
    for c in centers:
        ax.axvline(c, color="0.8", lw=0.6, zorder=0)
    ax.set_xlim(0, 250)
    ax.set_xlabel("frequency (MHz)")
    ax.set_ylabel("|amplitude| (SQ channel)")
    fig.tight_layout()
    fig.savefig(os.path.join(OUT, "c13_multiline.png"), dpi=150)
    print(f"wrote {OUT}/c13_multiline.png")
