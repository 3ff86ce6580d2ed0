"""CSV/JSON writers with atomic replacement, plus the run manifest."""

from __future__ import annotations

import csv
import hashlib
import json
import os
import platform
import tempfile
from pathlib import Path

import numpy as np

TRAJECTORY_COLUMNS = ("time_fs", "d_mean", "d_std", "pmol_mean", "pmol_std")
WEIGHT_COLUMNS = ("m_x", "q", "energy_eV", "weight_mean", "weight_std")
MANIFEST_NAME = "manifest.json"
FAILED_MARKER = "manifest.failed.json"


def fmt(x) -> str:
    """Round-trip-safe float text (17 significant digits)."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".17g")


def _atomic_write(path: Path, write) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            write(fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path, header, rows) -> Path:
    def write(fh):
        w = csv.writer(fh, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, str) else fmt(v) for v in row])

    _atomic_write(Path(path), write)
    return Path(path)


def read_csv(path) -> dict:
    """Columns of a numeric CSV as float arrays, keyed by header name."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(v) for v in row] for row in reader]
    data = np.array(rows, dtype=float).reshape(len(rows), len(header))
    return {name: data[:, i] for i, name in enumerate(header)}


def write_json(path, obj) -> Path:
    def write(fh):
        json.dump(obj, fh, indent=2, sort_keys=True, ensure_ascii=False, default=_json_default)
        fh.write("\n")

    _atomic_write(Path(path), write)
    return Path(path)


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def write_trajectory_csv(path, result=None) -> Path:
    """Ensemble time series; ``result=None`` writes a header-only file."""
    if result is None:
        return write_csv(path, TRAJECTORY_COLUMNS, [])
    rows = zip(result.times, result.d_mean, result.d_std, result.pmol_mean, result.pmol_std)
    return write_csv(path, TRAJECTORY_COLUMNS, rows)


def write_record_csv(path, record) -> Path:
    """Single-realization series (one row per time step)."""
    return write_csv(path, ("time_fs", "d", "pmol"), zip(record.times, record.width, record.p_mol))


def write_realization_csv(path, realization) -> Path:
    cols = realization.to_columns()
    return write_csv(path, tuple(cols), zip(*cols.values()))


def photon_weight_table(result, modes, extra=None) -> dict:
    table = {
        "columns": list(WEIGHT_COLUMNS),
        "rows": [
            [int(m), float(q), float(e), float(wm), float(ws)]
            for m, q, e, wm, ws in zip(modes.m_x, modes.q, modes.energies, result.w_mean, result.w_std)
        ],
        "n_realizations": result.n_realizations,
        "flags": list(result.flags),
        "manifest": MANIFEST_NAME,
    }
    if extra:
        table.update(extra)
    return table


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def blas_threads() -> str:
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        if os.environ.get(var):
            return f"{var}={os.environ[var]}"
    return f"default(cpu_count={os.cpu_count()})"


def write_manifest(out_dir, body: dict, files) -> Path:
    """Checksum every data file under ``out_dir`` and write the manifest last."""
    from polariton_wire import __version__
    from polariton_wire.disorder import RNG_ALGORITHM

    out_dir = Path(out_dir)
    checksums = {str(Path(f).relative_to(out_dir)): sha256_file(f) for f in sorted(map(Path, files))}
    manifest = {
        "code_version": __version__,
        "rng_algorithm": RNG_ALGORITHM,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "blas_threads": blas_threads(),
        **body,
        "files": checksums,
    }
    failed = out_dir / FAILED_MARKER
    if failed.exists():
        failed.unlink()
    return write_json(out_dir / MANIFEST_NAME, manifest)


def write_failure_marker(out_dir, error: BaseException, body=None) -> Path:
    return write_json(Path(out_dir) / FAILED_MARKER, {**(body or {}), "error": f"{type(error).__name__}: {error}"})


def verify_manifest(out_dir) -> dict:
    """Load a manifest and check every listed checksum; raises on mismatch."""
    out_dir = Path(out_dir)
    with open(out_dir / MANIFEST_NAME, encoding="utf-8") as fh:
        manifest = json.load(fh)
    for name, digest in manifest["files"].items():
        if sha256_file(out_dir / name) != digest:
            raise ValueError(f"{out_dir / name}: checksum differs from manifest")
    return manifest
