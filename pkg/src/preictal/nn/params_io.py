"""Binary parameter files: magic, version, architecture tag, per-array shape
table, then raw little-endian float64 data.  Layout documented in
docs/formats.md."""
from __future__ import annotations

import struct

import numpy as np

from ..errors import DataError

MAGIC = b"MDL1"
VERSION = 1


def dump_arrays(arrays: dict[str, np.ndarray], arch_tag: str) -> bytes:
    out = [MAGIC, struct.pack("<I", VERSION)]
    tag = arch_tag.encode("utf-8")
    out.append(struct.pack("<H", len(tag)))
    out.append(tag)
    out.append(struct.pack("<I", len(arrays)))
    for name, arr in arrays.items():
        raw = name.encode("utf-8")
        out.append(struct.pack("<H", len(raw)))
        out.append(raw)
        out.append(struct.pack("<B", arr.ndim))
        out.append(struct.pack(f"<{arr.ndim}I", *arr.shape))
    for arr in arrays.values():
        out.append(np.ascontiguousarray(arr, dtype="<f8").tobytes())
    return b"".join(out)


def load_arrays(data: bytes) -> tuple[str, dict[str, np.ndarray]]:
    if data[:4] != MAGIC:
        raise DataError(f"bad parameter-file magic {data[:4]!r}")
    pos = 4
    (version,) = struct.unpack_from("<I", data, pos)
    pos += 4
    if version != VERSION:
        raise DataError(f"unsupported parameter-file version {version}")
    (tag_len,) = struct.unpack_from("<H", data, pos)
    pos += 2
    arch_tag = data[pos:pos + tag_len].decode("utf-8")
    pos += tag_len
    (count,) = struct.unpack_from("<I", data, pos)
    pos += 4
    shapes: list[tuple[str, tuple[int, ...]]] = []
    for _ in range(count):
        (name_len,) = struct.unpack_from("<H", data, pos)
        pos += 2
        name = data[pos:pos + name_len].decode("utf-8")
        pos += name_len
        (ndim,) = struct.unpack_from("<B", data, pos)
        pos += 1
        shape = struct.unpack_from(f"<{ndim}I", data, pos)
        pos += 4 * ndim
        shapes.append((name, shape))
    arrays = {}
    for name, shape in shapes:
        n = int(np.prod(shape)) if shape else 1
        end = pos + 8 * n
        if end > len(data):
            raise DataError(f"parameter file truncated in array {name!r}")
        arrays[name] = np.frombuffer(data[pos:end], dtype="<f8").reshape(shape).copy()
        pos = end
    if pos != len(data):
        raise DataError(f"{len(data) - pos} trailing bytes after parameter arrays")
    return arch_tag, arrays


def save_params(path, arrays: dict[str, np.ndarray], arch_tag: str):
    with open(path, "wb") as f:
        f.write(dump_arrays(arrays, arch_tag))


def load_params(path) -> tuple[str, dict[str, np.ndarray]]:
    with open(path, "rb") as f:
        return load_arrays(f.read())
