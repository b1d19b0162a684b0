"""File formats: ensemble binary/CSV, curve and staircase tables, plot data.

Every writer goes through :func:`atomic_write`, so a failed run never
leaves a half-written file behind.

Binary ensemble layout (little-endian)::

    b"FALS"  u16 version  u64 n_walkers  u64 n_times
    f64[n_times] times    f64[n_times * n_walkers] J (row-major, time-major)
"""

from __future__ import annotations

import contextlib
import csv
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from . import analysis
from .errors import StateError
from .langevin import Ensemble
from .noise import empirical_char_function

MAGIC = b"FALS"
VERSION = 1
_HEADER = struct.Struct("<4sHQQ")


def fmt(x):
    return "" if x is None else format(float(x), ".17g")


@contextlib.contextmanager
def atomic_write(path, mode="w"):
    """Open a temporary sibling of ``path`` and rename it into place on success."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        kw = {"newline": ""} if "b" not in mode else {}
        with os.fdopen(fd, mode, **kw) as fh:
            yield fh
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(tmp)
        raise


def write_rows(path, header, rows):
    with atomic_write(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, (str, int, np.integer)) else fmt(v) for v in row])


def write_ensemble_bin(ensemble, path):
    J = np.ascontiguousarray(ensemble.J, dtype="<f8")
    n_times, n_walkers = J.shape
    with atomic_write(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, n_walkers, n_times))
        fh.write(np.asarray(ensemble.times, dtype="<f8").tobytes())
        fh.write(J.tobytes())


def read_ensemble_bin(path):
    raw = Path(path).read_bytes()
    magic, version, n_walkers, n_times = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValueError(f"{path}: not an ensemble file (magic {magic!r})")
    if version != VERSION:
        raise ValueError(f"{path}: unsupported ensemble format version {version}")
    off = _HEADER.size
    times = np.frombuffer(raw, "<f8", n_times, off).astype(float)
    off += 8 * n_times
    J = np.frombuffer(raw, "<f8", n_times * n_walkers, off).astype(float)
    return Ensemble(times, J.reshape(n_times, n_walkers))


def write_ensemble_csv(ensemble, path):
    pos = ensemble.positions
    n_times, n_walkers = ensemble.J.shape

    def rows():
        for i in range(n_times):
            for w in range(n_walkers):
                if pos is None:
                    yield ensemble.times[i], w, ensemble.J[i, w], "", "", ""
                else:
                    yield (ensemble.times[i], w, ensemble.J[i, w], int(pos.winding[i, w]),
                           pos.x[i, w], pos.y[i, w])

    write_rows(path, ["t", "walker", "J", "winding", "x", "y"], rows())


def read_ensemble_csv(path):
    data = np.genfromtxt(path, delimiter=",", names=True, usecols=(0, 1, 2))
    times = np.unique(data["t"])
    n_walkers = int(data["walker"].max()) + 1
    J = np.empty((times.size, n_walkers))
    ti = np.searchsorted(times, data["t"])
    J[ti, data["walker"].astype(int)] = data["J"]
    return Ensemble(times, J)


def write_ensemble(ensemble, path, format=None):
    format = format or ("csv" if str(path).endswith(".csv") else "bin")
    if format == "csv":
        write_ensemble_csv(ensemble, path)
    else:
        write_ensemble_bin(ensemble, path)


def read_ensemble(path):
    with open(path, "rb") as fh:
        head = fh.read(4)
    return read_ensemble_bin(path) if head == MAGIC else read_ensemble_csv(path)


def write_polyline_csv(curve, path):
    u, pts = curve.polyline
    write_rows(path, ["u", "x", "y"], zip(u, pts[:, 0], pts[:, 1]))


def write_staircase_csv(table, path):
    write_rows(path, ["u", "J"], zip(table.u, table.J))


def write_density_csv(snapshot, mu, D, t, path, bins="fd"):
    """Histogram and analytic densities at the histogram bin centers."""
    emp = analysis.empirical_density(snapshot, bins)
    cf = analysis.analytic_density(mu, D, t, emp.grid).pdf
    printed = analysis.analytic_density(mu, D, t, emp.grid, "paper").pdf if mu == 2.0 \
        else [None] * emp.grid.size
    write_rows(path, ["J", "pdf_empirical", "pdf_analytic", "pdf_paper_printed"],
               zip(emp.grid, emp.pdf, cf, printed))
    return emp


def emit_plot_data(ensemble, kind, path, *, mu=None, D=None, t=None, k_grid=None,
                   walker=0, bins="fd"):
    """Write one plot-ready CSV.

    ``density``: J, pdf_empirical, pdf_analytic, pdf_paper_printed at time ``t``.
    ``ecf``: k, re, im, se, analytic at time ``t``.
    ``msd``: t, mean, msd, n over all recorded times.
    ``trajectory2d``: t, x, y, winding of one walker (needs mapped positions).
    """
    cfg = ensemble.config
    if cfg is not None:
        mu = cfg.noise.mu if mu is None else mu
        D = cfg.noise.D if D is None else D
    t = float(ensemble.times[-1]) if t is None else t
    if kind == "density":
        write_density_csv(ensemble.snapshot(t), mu, D, t, path, bins)
    elif kind == "ecf":
        k = analysis.DEFAULT_K_GRID if k_grid is None else np.asarray(k_grid, dtype=float)
        ecf = empirical_char_function(ensemble.snapshot(t), k)
        ref = analysis.analytic_char_function(mu, D, t, k)
        write_rows(path, ["k", "re", "im", "se", "analytic"],
                   zip(k, ecf.value.real, ecf.value.imag, ecf.se, ref))
    elif kind == "msd":
        J = ensemble.J
        write_rows(path, ["t", "mean", "msd", "n"],
                   ((ensemble.times[i], J[i].mean(), np.mean(J[i] ** 2), J.shape[1])
                    for i in range(J.shape[0])))
    elif kind == "trajectory2d":
        pos = ensemble.positions
        if pos is None:
            raise StateError("trajectory2d needs positions; call map_to_curve first")
        write_rows(path, ["t", "x", "y", "winding"],
                   ((ensemble.times[i], pos.x[i, walker], pos.y[i, walker],
                     int(pos.winding[i, walker])) for i in range(ensemble.J.shape[0])))
    else:
        raise ValueError(f"unknown plot kind {kind!r}")
    return Path(path)
