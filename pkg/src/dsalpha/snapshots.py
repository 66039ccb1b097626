"""Binary field snapshots (magic "DSA1").

Layout, little-endian, no padding:

    magic     4 bytes   b"DSA1"
    version   u16       currently 1
    nx, ny    u64, u64
    lx, ly    f64, f64
    t         f64
    model     u8        0=DSE 1=RDS1 2=RDS2 3=RDS3
    beta, rho, nu, alpha   f64 x 4
    payload   nx*ny complex samples as interleaved (re, im) f64 pairs,
              row-major with the x index first (y fastest)

Write-then-read is bit-exact; version or magic mismatches are rejected and
short payloads are reported with expected vs actual byte counts.
"""

import struct

import numpy as np

from .errors import SnapshotFormatError
from .fields import PHYSICAL, Field, complex_field
from .grid import Grid2D
from .models import ModelKind

MAGIC = b"DSA1"
VERSION = 1
_HEADER = struct.Struct("<4sHQQdddB4d")

_KIND_TAG = {ModelKind.DSE: 0, ModelKind.RDS1: 1, ModelKind.RDS2: 2, ModelKind.RDS3: 3}
_TAG_KIND = {v: k for k, v in _KIND_TAG.items()}


def write_snapshot(path, field: Field, t: float, spec) -> None:
    field.require_space(PHYSICAL)
    g = field.grid
    header = _HEADER.pack(
        MAGIC,
        VERSION,
        g.nx,
        g.ny,
        g.lx,
        g.ly,
        float(t),
        _KIND_TAG[spec.kind],
        spec.beta,
        spec.rho,
        spec.nu,
        spec.alpha,
    )
    payload = np.ascontiguousarray(field.values, dtype=np.complex128)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload.tobytes(order="C"))


def read_snapshot(path):
    """Returns (field, t, metadata dict with kind/beta/rho/nu/alpha)."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise SnapshotFormatError(
            f"snapshot shorter than its header: {len(raw)} < {_HEADER.size} bytes"
        )
    magic, version, nx, ny, lx, ly, t, tag, beta, rho, nu, alpha = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise SnapshotFormatError(f"bad snapshot magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise SnapshotFormatError(f"unsupported snapshot version {version}, expected {VERSION}")
    if tag not in _TAG_KIND:
        raise SnapshotFormatError(f"unknown model tag {tag}")
    expected = _HEADER.size + 16 * nx * ny
    if len(raw) != expected:
        raise SnapshotFormatError(
            f"truncated or oversized snapshot: expected {expected} bytes, got {len(raw)}"
        )
    values = np.frombuffer(raw, dtype="<c16", offset=_HEADER.size).reshape(nx, ny).copy()
    grid = Grid2D(nx, ny, lx, ly)
    meta = {
        "kind": _TAG_KIND[tag],
        "beta": beta,
        "rho": rho,
        "nu": nu,
        "alpha": alpha,
    }
    return complex_field(grid, values), float(t), meta
