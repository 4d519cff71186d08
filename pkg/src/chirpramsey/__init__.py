"""Broadband chirped-pulse Ramsey spectroscopy of single electron spins.

Simulates the two-chirp Ramsey protocol on an S=1 electron coupled to a
small nuclear register, and provides the matching spectral analysis: FFT
with peak refinement, phase cycling, line classification, and amplitude
calibration.  See the README for the physics conventions.
"""

__version__ = "0.1.0"

from .config import (AnalysisParams, ConfigError, ExperimentConfig,
                     OutputParams, PulseParams, SequenceParams, config_sha256,
                     parse_config, parse_config_file, serialize_config)
from .io import (read_fringe_csv, write_fringe_csv, write_peaks_csv,
                 write_spectrum_csv)
from .pulses import (CalibrationError, CalibrationResult, ChirpPulse,
                     ConvergenceError, FrameSpec, PassageParams,
                     calibrate_rabi, fit_passage_params, lz_seed_rabi_mhz,
                     passage_transfer, passage_unitary, pulse_propagator,
                     sequential_passage_model, swept_transitions)
from .ramsey import (FringeRecord, PhaseLaw, RamseyKernel, RamseySequence,
                     analytic_three_level, analytic_two_level, run_phase_pair,
                     run_ramsey, shot_noise, three_level_amplitudes)
from .scenarios import (CriterionResult, FIGURES, FigureReport,
                        bfield_report, calibration_report, engines_report,
                        fig4_report, fig5_report, fig6_report,
                        invariants_report, reproduce, two_level_rabi_mhz)
from .spectra import (Peak, PeakList, Spectrum, classify_by_slope,
                      classify_peaks, fft_spectrum, find_peaks, flip_ratio,
                      group_peaks, lorentzian_linewidth, phase_cycle_combine,
                      transition_slopes)
from .spinmodel import (NuclearSpin, Species, SpinSystem, Transition,
                        TransitionTable, build_hamiltonian, nuclear_configs,
                        secular_energy_mhz, transition_table)
from .units import ANG, GAMMA_E_MHZ_PER_G

__all__ = [
    "ANG", "AnalysisParams", "CalibrationError", "CalibrationResult",
    "ChirpPulse", "ConfigError", "ConvergenceError", "CriterionResult",
    "ExperimentConfig", "FIGURES", "FigureReport", "FrameSpec",
    "FringeRecord", "GAMMA_E_MHZ_PER_G", "NuclearSpin", "OutputParams",
    "PassageParams", "Peak", "PeakList", "PhaseLaw", "PulseParams",
    "RamseyKernel", "RamseySequence", "SequenceParams", "Species",
    "SpinSystem", "Spectrum", "Transition", "TransitionTable",
    "analytic_three_level", "analytic_two_level", "bfield_report",
    "build_hamiltonian", "calibrate_rabi", "calibration_report",
    "classify_by_slope", "classify_peaks", "config_sha256", "engines_report",
    "fft_spectrum", "fig4_report", "fig5_report", "fig6_report",
    "find_peaks", "fit_passage_params", "flip_ratio", "group_peaks",
    "invariants_report", "lorentzian_linewidth", "lz_seed_rabi_mhz",
    "nuclear_configs", "parse_config", "parse_config_file",
    "passage_transfer", "passage_unitary", "phase_cycle_combine",
    "pulse_propagator", "read_fringe_csv", "reproduce", "run_phase_pair",
    "run_ramsey", "secular_energy_mhz", "sequential_passage_model",
    "serialize_config", "shot_noise", "swept_transitions",
    "three_level_amplitudes", "transition_slopes", "transition_table",
    "two_level_rabi_mhz", "write_fringe_csv", "write_peaks_csv",
    "write_spectrum_csv",
]
