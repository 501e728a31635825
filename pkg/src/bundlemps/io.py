"""File formats: spectrum / MPS binary caches, CSV matrices and PGM heatmaps.

Binary layouts (all little-endian)::

    SPEC1:  b"SPEC1" | u32 header_len | header | f64[M] energies
            | f64[M*M] states (row-major) | u32 crc32(everything before)
            header = u8 kind (0 tfim, 1 xxz) | u32 N | f64 hx | f64 delta | u32 M

    BMPS1:  b"BMPS1" | u32 N | u32 g | u32 center | u32 n_idx | i64[n_idx]
            | u32[4N] (left, phys, right, bundle) per site
            | f64 entries of every tensor in site order, row-major
            | u32 crc32(everything before)
"""

from __future__ import annotations

import csv
import io as _io
import os
import struct
import tempfile
import zlib
from pathlib import Path

import numpy as np

from .errors import CacheIntegrityError
from .models import ModelSpec, Spectrum
from .mps import BundledMPS

SPEC_MAGIC = b"SPEC1"
MPS_MAGIC = b"BMPS1"
_KINDS = {"tfim": 0, "xxz": 1}


def atomic_write(path, data: bytes | str):
    """Write to a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, mode, **({} if mode == "wb" else {"newline": ""})) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _with_crc(body: bytes) -> bytes:
    return body + struct.pack("<I", zlib.crc32(body) & 0xFFFFFFFF)


def _check_crc(blob: bytes, what: str) -> bytes:
    if len(blob) < 4:
        raise CacheIntegrityError(f"{what}: file truncated")
    body, (crc,) = blob[:-4], struct.unpack("<I", blob[-4:])
    if zlib.crc32(body) & 0xFFFFFFFF != crc:
        raise CacheIntegrityError(f"{what}: checksum mismatch (corrupted cache)")
    return body


# --- spectrum cache ---------------------------------------------------------

def spectrum_to_bytes(spec: Spectrum) -> bytes:
    model = spec.model
    m = spec.size
    header = struct.pack(
        "<BIddI", _KINDS[model.kind], model.sites,
        float(model.transverse_field if model.transverse_field is not None else np.nan),
        float(model.anisotropy if model.anisotropy is not None else np.nan), m,
    )
    body = b"".join([
        SPEC_MAGIC, struct.pack("<I", len(header)), header,
        np.ascontiguousarray(spec.energies, dtype="<f8").tobytes(),
        np.ascontiguousarray(spec.states, dtype="<f8").tobytes(),
    ])
    return _with_crc(body)


def spectrum_from_bytes(blob: bytes, what: str = "spectrum cache") -> Spectrum:
    if blob[:5] != SPEC_MAGIC:
        raise CacheIntegrityError(f"{what}: bad magic {blob[:5]!r}")
    body = _check_crc(blob, what)
    (hlen,) = struct.unpack_from("<I", body, 5)
    kind_code, n, hx, delta, m = struct.unpack_from("<BIddI", body, 9)
    off = 9 + hlen
    kind = {v: k for k, v in _KINDS.items()}[kind_code]
    model = ModelSpec(kind, n,
                      transverse_field=None if kind != "tfim" else hx,
                      anisotropy=None if kind != "xxz" else delta)
    expected = off + 8 * m + 8 * m * m
    if len(body) != expected:
        raise CacheIntegrityError(f"{what}: payload size {len(body)} != {expected}")
    energies = np.frombuffer(body, dtype="<f8", count=m, offset=off).astype(np.float64)
    states = np.frombuffer(body, dtype="<f8", count=m * m, offset=off + 8 * m)
    return Spectrum(model, energies, states.reshape(m, m).astype(np.float64))


def save_spectrum(spec: Spectrum, path):
    atomic_write(path, spectrum_to_bytes(spec))


def load_spectrum(path) -> Spectrum:
    return spectrum_from_bytes(Path(path).read_bytes(), what=str(path))


# --- bundled MPS --------------------------------------------------------------

def mps_to_bytes(mps: BundledMPS) -> bytes:
    idx = [int(k) for k in mps.state_indices]
    parts = [MPS_MAGIC, struct.pack("<IIII", mps.n_sites, mps.g, mps.center, len(idx)),
             struct.pack(f"<{len(idx)}q", *idx)]
    parts.append(struct.pack(f"<{4 * mps.n_sites}I", *[d for t in mps.tensors for d in t.shape]))
    parts += [np.ascontiguousarray(t, dtype="<f8").tobytes() for t in mps.tensors]
    return _with_crc(b"".join(parts))


def mps_from_bytes(blob: bytes, what: str = "MPS cache") -> BundledMPS:
    if blob[:5] != MPS_MAGIC:
        raise CacheIntegrityError(f"{what}: bad magic {blob[:5]!r}")
    body = _check_crc(blob, what)
    n, g, center, n_idx = struct.unpack_from("<IIII", body, 5)
    off = 5 + 16
    idx = struct.unpack_from(f"<{n_idx}q", body, off)
    off += 8 * n_idx
    dims = struct.unpack_from(f"<{4 * n}I", body, off)
    off += 16 * n
    tensors = []
    for site in range(n):
        shape = dims[4 * site:4 * site + 4]
        count = int(np.prod(shape))
        arr = np.frombuffer(body, dtype="<f8", count=count, offset=off)
        tensors.append(arr.reshape(shape).astype(np.float64))
        off += 8 * count
    if off != len(body):
        raise CacheIntegrityError(f"{what}: trailing or missing bytes")
    return BundledMPS(tuple(tensors), center, g, tuple(idx))


def save_mps(mps: BundledMPS, path):
    atomic_write(path, mps_to_bytes(mps))


def load_mps(path) -> BundledMPS:
    return mps_from_bytes(Path(path).read_bytes(), what=str(path))


# --- text outputs -------------------------------------------------------------

def matrix_to_csv(matrix) -> str:
    """Row-major CSV with 17 significant digits (round-trips float64)."""
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in np.asarray(matrix, dtype=float):
        writer.writerow([format(x, ".17g") for x in row])
    return buf.getvalue()


def write_csv(matrix, path):
    atomic_write(path, matrix_to_csv(matrix))


def read_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = [[float(x) for x in row] for row in csv.reader(fh) if row]
    return np.array(rows, dtype=float)


def quantize(log_matrix, floor_log10: float) -> np.ndarray:
    """Map ``[floor, max]`` linearly onto 0..255 (brighter = larger)."""
    a = np.asarray(log_matrix, dtype=float)
    top = float(a.max()) if a.size else floor_log10
    if top <= floor_log10:
        return np.zeros(a.shape, dtype=np.int64)
    scaled = (a - floor_log10) / (top - floor_log10) * 255.0
    return np.clip(np.rint(scaled), 0, 255).astype(np.int64)


def pgm_text(levels, comment: str | None = None) -> str:
    levels = np.asarray(levels, dtype=np.int64)
    rows, cols = levels.shape
    lines = ["P2"]
    if comment:
        lines += [f"# {line}" for line in comment.splitlines()]
    lines += [f"{cols} {rows}", "255"]
    lines += [" ".join(str(int(v)) for v in row) for row in levels]
    return "\n".join(lines) + "\n"


def write_pgm(log_matrix, path, floor_log10: float, comment: str | None = None):
    atomic_write(path, pgm_text(quantize(log_matrix, floor_log10), comment))


def read_pgm(path) -> np.ndarray:
    tokens = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0]
            tokens += line.split()
    if not tokens or tokens[0] != "P2":
        raise ValueError(f"{path}: not an ASCII PGM (P2) file")
    cols, rows, _maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    values = np.array([int(t) for t in tokens[4:]], dtype=np.int64)
    if values.size != rows * cols:
        raise ValueError(f"{path}: expected {rows * cols} pixels, found {values.size}")
    return values.reshape(rows, cols)
