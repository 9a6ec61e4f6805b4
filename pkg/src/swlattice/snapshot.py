"""Bit-exact field snapshots.

A snapshot is a directory:

    manifest.txt   UTF-8 "key = value" lines
    a.bin          1-cochain, little-endian float64, shape (N,N,N,N,4)
    phi.bin        spinor, little-endian float64 (re, im) interleaved per component
    kg.bin         0-cochain, little-endian float64

Manifest keys: format_version (=1), n_per_axis, spacing (float.hex),
flux (six integers m01 m02 m03 m12 m13 m23), and payload.<name> =
"<file> <nbytes> <crc32 as 8 hex digits>" for each payload.
"""

from __future__ import annotations

import zlib
from pathlib import Path

import numpy as np

from .fields import BundleData, Configuration
from .lattice import Lattice

FORMAT_VERSION = 1
LE = np.dtype("<f8")


class SnapshotError(ValueError):
    pass


class SnapshotVersionError(SnapshotError):
    pass


class SnapshotChecksumError(SnapshotError):
    pass


class SnapshotShapeError(SnapshotError):
    pass


def _payloads(c: Configuration) -> dict[str, bytes]:
    return {
        "a": np.ascontiguousarray(c.a, dtype=LE).tobytes(),
        "phi": np.ascontiguousarray(c.phi).view(float).astype(LE).tobytes(),
        "kg": np.ascontiguousarray(c.bundle.kg, dtype=LE).tobytes(),
    }


def _expected_sizes(n: int) -> dict[str, int]:
    s = n**4 * 8
    return {"a": 4 * s, "phi": 4 * s, "kg": s}


def save_snapshot(c: Configuration, path) -> Path:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    lat = c.lattice
    lines = [
        f"format_version = {FORMAT_VERSION}",
        f"n_per_axis = {lat.n}",
        f"spacing = {lat.h.hex()}",
        "flux = " + " ".join(str(m) for m in c.bundle.flux),
    ]
    for name, blob in _payloads(c).items():
        (path / f"{name}.bin").write_bytes(blob)
        lines.append(f"payload.{name} = {name}.bin {len(blob)} {zlib.crc32(blob):08x}")
    (path / "manifest.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_manifest(path) -> dict[str, str]:
    out = {}
    for i, line in enumerate((Path(path) / "manifest.txt").read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if "=" not in line:
            raise SnapshotError(f"manifest line {i} is not 'key = value': {line!r}")
        k, v = line.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def load_snapshot(path) -> Configuration:
    path = Path(path)
    man = read_manifest(path)
    version = man.get("format_version")
    if version != str(FORMAT_VERSION):
        raise SnapshotVersionError(f"snapshot format_version {version!r}, this reader supports {FORMAT_VERSION}")
    try:
        n = int(man["n_per_axis"])
        h = float.fromhex(man["spacing"])
        flux = tuple(int(m) for m in man["flux"].split())
    except KeyError as e:
        raise SnapshotError(f"manifest is missing key {e.args[0]!r}") from None
    lat = Lattice(n, h)
    expected = _expected_sizes(n)
    arrays = {}
    for name, size in expected.items():
        entry = man.get(f"payload.{name}")
        if entry is None:
            raise SnapshotError(f"manifest is missing payload.{name}")
        fname, nbytes, crc = entry.split()
        blob = (path / fname).read_bytes()
        if len(blob) != size or int(nbytes) != size:
            raise SnapshotShapeError(
                f"payload {name}: {len(blob)} bytes on disk, manifest says {nbytes}, N={n} needs {size}"
            )
        if zlib.crc32(blob) != int(crc, 16):
            raise SnapshotChecksumError(f"payload {name}: CRC-32 {zlib.crc32(blob):08x} != manifest {crc}")
        arrays[name] = np.frombuffer(blob, dtype=LE).astype(float)
    a = arrays["a"].reshape(lat.cochain_shape(1))
    phi = arrays["phi"].view(complex).reshape(lat.shape + (2,))
    kg = arrays["kg"].reshape(lat.shape)
    return Configuration(lat, a, phi, BundleData(flux, kg))
