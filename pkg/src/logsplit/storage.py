"""Artifact emission: CSVs, manifests, data cards, reference cache.

Every float is rendered with 17 significant digits (round-trip exact),
every file is written to a temporary sibling and atomically renamed,
and manifests carry sha256 checksums of the artifacts they describe so
a replayed run can be byte-compared.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import time
import uuid
import zipfile

import numpy as np

from . import __version__, spectral


def fmt(x) -> str:
    """17-significant-digit decimal, round-trip exact for float64."""
    return f"{float(x):.17g}"


def _atomic_write_text(path, text: str) -> None:
    path = os.fspath(path)
    d = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path, header: list, rows) -> None:
    """Atomic CSV; floats via fmt, ints verbatim, strings raw."""

    def cell(v):
        if isinstance(v, str):
            return v
        if isinstance(v, (int, np.integer)):
            return str(int(v))
        return fmt(v)

    lines = [",".join(header)]
    lines.extend(",".join(cell(v) for v in row) for row in rows)
    _atomic_write_text(path, "\n".join(lines) + "\n")


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def write_manifest(path, *, kind: str, config: dict, artifacts: list, extra: dict | None = None) -> None:
    """Run manifest: id, echoed config, checksummed artifact list.

    artifacts are paths relative to the manifest's directory; they must
    exist already (the manifest is written last, atomically).
    """
    base = os.path.dirname(os.fspath(path)) or "."
    checks = {}
    for art in artifacts:
        rel = os.path.relpath(os.fspath(art), base)
        checks[rel] = sha256_file(os.path.join(base, rel))
    doc = {
        "run_id": str(uuid.uuid4()),
        "kind": kind,
        "version": __version__,
        "created_unix": time.time(),
        "config": config,
        "checksums": checks,
    }
    if extra:
        doc.update(extra)
    _atomic_write_text(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def verify_manifest(path) -> dict:
    """Recompute artifact checksums; returns {relpath: ok}."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    base = os.path.dirname(os.fspath(path)) or "."
    out = {}
    for rel, want in doc.get("checksums", {}).items():
        full = os.path.join(base, rel)
        out[rel] = os.path.exists(full) and sha256_file(full) == want
    return out


def write_mass_csv(path, trajectory) -> None:
    """Schema: step, t, mass, mass_over_initial (mass = squared L2 norm)."""
    tau = trajectory.config.tau
    m0 = trajectory.mass_values[0]
    rows = (
        (int(s), s * tau, m, m / m0)
        for s, m in zip(trajectory.mass_steps, trajectory.mass_values)
    )
    write_csv(path, ["step", "t", "mass", "mass_over_initial"], rows)


def write_errors_csv(path, rows) -> None:
    """Schema: tau, N, t, err, mass_drift; t is the nominal label."""
    write_csv(path, ["tau", "N", "t", "err", "mass_drift"], rows)


def write_orders_csv(path, rows) -> None:
    """Schema: t, slope, intercept, r2 (ln-ln fit per measure time)."""
    write_csv(path, ["t", "slope", "intercept", "r2"], rows)


def write_props_csv(path, rows) -> None:
    """Schema: inequality, samples, worst_margin."""
    write_csv(path, ["inequality", "samples", "worst_margin"], rows)


def write_shift_bounds_csv(path, rows) -> None:
    """Schema: r, t, c0, err, upper, lower."""
    write_csv(
        path,
        ["r", "t", "c0", "err", "upper", "lower"],
        ((row.r, row.t, row.c0, row.err, row.upper, row.lower) for row in rows),
    )


def write_profiles_csv(path, labeled_fields, oversample: int = 2) -> None:
    """Nodal profiles for plotting.  Schema: t, x, re, im."""

    def rows():
        for label, field in labeled_fields:
            phys = spectral.synthesize(field, oversample=oversample)
            for x, v in zip(phys.grid.axis_nodes, phys.values):
                yield (label, x, v.real, v.imag)

    write_csv(path, ["t", "x", "re", "im"], rows())


def write_data_card(path, *, family: str, params: dict, norms: dict, coeff_file) -> None:
    """Human-readable sidecar describing a generated initial-data artifact."""
    base = os.path.dirname(os.fspath(path)) or "."
    rel = os.path.relpath(os.fspath(coeff_file), base)
    doc = {
        "family": family,
        "params": params,
        "norms": {k: float(v) for k, v in norms.items()},
        "coeff_file": rel,
        "coeff_sha256": sha256_file(os.path.join(base, rel)),
        "version": __version__,
    }
    _atomic_write_text(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def read_data_card(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


# reference-trajectory cache: one .npz per (data, discretisation) key,
# guarded by a sha256 of the payload arrays recorded alongside.

CACHE_ENV = "LOGSPLIT_CACHE_DIR"


def cache_dir(explicit=None) -> str:
    if explicit:
        return os.fspath(explicit)
    env = os.environ.get(CACHE_ENV)
    if env:
        return env
    return os.path.join(tempfile.gettempdir(), "logsplit-cache")


def _payload_digest(arrays: dict) -> str:
    h = hashlib.sha256()
    for name in sorted(arrays):
        h.update(name.encode())
        arr = np.ascontiguousarray(arrays[name])
        h.update(str(arr.dtype).encode())
        h.update(str(arr.shape).encode())
        h.update(arr.tobytes())
    return h.hexdigest()


def cache_store(key: str, arrays: dict, directory=None) -> str:
    d = cache_dir(directory)
    os.makedirs(d, exist_ok=True)
    path = os.path.join(d, f"{key}.npz")
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".npz")
    os.close(fd)
    try:
        np.savez(tmp, __digest__=np.frombuffer(_payload_digest(arrays).encode(), dtype=np.uint8), **arrays)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def cache_load(key: str, directory=None) -> dict | None:
    """Returns the stored arrays, or None on miss/corruption.

    A digest mismatch (manual edits, torn writes) is treated as a miss;
    the caller recomputes and overwrites.
    """
    path = os.path.join(cache_dir(directory), f"{key}.npz")
    if not os.path.exists(path):
        return None
    try:
        with np.load(path) as z:
            arrays = {k: z[k] for k in z.files if k != "__digest__"}
            stored = bytes(z["__digest__"]).decode()
    except (OSError, ValueError, KeyError, zipfile.BadZipFile):
        return None
    if _payload_digest(arrays) != stored:
        return None
    return arrays
