"""CSV emission and ingestion for fringe records, spectra, and peak lists.

Every file starts with '#'-prefixed provenance comments (config hash, seed,
package version) followed by a plain header row and comma-separated data.
No timestamps are written: rerunning the same configuration with the same
seed must reproduce files byte for byte.  Writes go through a temporary file
and an atomic rename.
"""

from __future__ import annotations

import os
import tempfile
from io import StringIO

import numpy as np

from .ramsey import FringeRecord
from .spectra import PeakList, Spectrum


def _fmt(x) -> str:
    return repr(float(x))


def provenance_lines(provenance: dict | None) -> list[str]:
    if not provenance:
        return []
    return [f"# {key}: {provenance[key]}" for key in sorted(provenance)]


def _atomic_write(path: str, lines: list[str]):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write("\n".join(lines) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_fringe_csv(path: str, record: FringeRecord, provenance: dict | None = None):
    lines = provenance_lines(provenance)
    if record.p0_sigma is not None:
        lines.append("t1_ns,p0,p0_sigma")
        for t, p, s in zip(record.t1_ns, record.p0, record.p0_sigma):
            lines.append(f"{_fmt(t)},{_fmt(p)},{_fmt(s)}")
    else:
        lines.append("t1_ns,p0")
        for t, p in zip(record.t1_ns, record.p0):
            lines.append(f"{_fmt(t)},{_fmt(p)}")
    _atomic_write(path, lines)


def write_spectrum_csv(path: str, spec: Spectrum, provenance: dict | None = None):
    lines = provenance_lines(provenance)
    lines.append("freq_MHz,re,im,abs")
    for f, a in zip(spec.freq_mhz, spec.amp):
        lines.append(f"{_fmt(f)},{_fmt(a.real)},{_fmt(a.imag)},{_fmt(abs(a))}")
    _atomic_write(path, lines)


def write_peaks_csv(path: str, peaks: PeakList, provenance: dict | None = None):
    lines = provenance_lines(provenance)
    lines.append("freq_MHz,abs_amp,class")
    for p in peaks:
        lines.append(f"{_fmt(p.freq_mhz)},{_fmt(p.abs_amp)},{p.label}")
    _atomic_write(path, lines)


def read_fringe_csv(path: str) -> FringeRecord:
    # genfromtxt(names=True) would consume the first provenance comment as
    # the header line, so strip comments before handing it the table
    with open(path) as fh:
        body = "".join(ln for ln in fh if not ln.startswith("#"))
    data = np.genfromtxt(StringIO(body), delimiter=",", names=True)
    sigma = data["p0_sigma"] if "p0_sigma" in (data.dtype.names or ()) else None
    return FringeRecord(t1_ns=np.atleast_1d(data["t1_ns"]),
                        p0=np.atleast_1d(data["p0"]),
                        p0_sigma=None if sigma is None else np.atleast_1d(sigma))
