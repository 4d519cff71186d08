"""End-to-end acceptance runs.

Each test exercises one headline capability at its stated tolerance and
prints a single ACCEPTANCE line (plus per-check details) so the suite output
doubles as a run report.  The underlying simulation data is cached inside
chirpramsey.scenarios, so the whole file costs one build of each dataset.
"""

from chirpramsey import scenarios


def emit(number, title, results):
    ok = all(r.passed for r in results)
    print(f"\nACCEPTANCE {number}: {'PASS' if ok else 'FAIL'} - {title}")
    for r in results:
        print("  " + r.line())
    assert ok, f"acceptance {number} ({title}) failed"


def test_acceptance_1_reference_scan_line_positions():
    report = scenarios.fig4_report()
    emit(1, "single-quantum lines track the reference detuning; "
            "double-quantum line is reference-invariant", report.results)


def test_acceptance_2_hyperfine_triplets():
    report = scenarios.fig5_report()
    results = [r for r in report.results if "hyperfine" in r.name]
    assert len(results) == 2
    emit(2, "nitrogen hyperfine triplets at single and doubled spacing",
         results)


def test_acceptance_3_field_scan_classification():
    report = scenarios.bfield_report()
    emit(3, "field scan: SQ splitting equals the DQ frequency, slope 2",
         report.results)


def test_acceptance_4_phase_cycling_separation():
    report = scenarios.fig5_report()
    results = [r for r in report.results if "hyperfine" not in r.name]
    assert len(results) == 3
    emit(4, "phase cycling separates SQ and DQ spectra below the 1% residual",
         results)


def test_acceptance_5_carbon13_multiline():
    report = scenarios.fig6_report()
    emit(5, "carbon-13 register: 24 grouped SQ lines and clean DQ channel",
         report.results)


def test_acceptance_6_engine_agreement():
    report = scenarios.engines_report()
    emit(6, "numeric and passage-model engines agree on lines and weights",
         report.results)


def test_acceptance_7_numeric_invariants():
    report = scenarios.invariants_report()
    emit(7, "frame invariance, step convergence, Parseval, cycle "
            "reconstruction", report.results)


def test_acceptance_8_amplitude_calibration():
    report = scenarios.calibration_report()
    emit(8, "50% transfer calibration is portable across the window and "
            "brackets the seed", report.results)
