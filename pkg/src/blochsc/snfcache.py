"""On-disk cache of Smith decompositions, one file per matrix content hash.

File layout (all integers little-endian)::

    magic   b"BSNF"
    version u16
    nrows, ncols, rank            (encoded integers)
    D[0..rank)                    (encoded integers)
    U   nrows*nrows entries, row-major, sparse: count then (index, value) pairs
    V   ncols*ncols entries, same scheme

An encoded integer is a signed 32-bit length ``n`` followed by ``|n|`` bytes of
magnitude; the sign of ``n`` is the sign of the integer.  Writers publish via
``os.replace`` on a temporary file in the same directory, so readers never see
a partial file.
"""
from __future__ import annotations

import io
import os
import struct
import tempfile
from pathlib import Path
from typing import Dict, List, Optional

from .linalg import IntMatrix, SmithDecomposition

MAGIC = b"BSNF"
VERSION = 1
ENV_VAR = "BLOCHSC_CACHE_DIR"


class CacheFormatError(ValueError):
    pass


def encode_int(out: io.BufferedIOBase, n: int) -> None:
    mag = abs(n)
    body = mag.to_bytes((mag.bit_length() + 7) // 8, "little")
    length = len(body) if n >= 0 else -len(body)
    out.write(struct.pack("<i", length))
    out.write(body)


def decode_int(inp: io.BufferedIOBase) -> int:
    head = inp.read(4)
    if len(head) != 4:
        raise CacheFormatError("truncated integer header")
    (length,) = struct.unpack("<i", head)
    body = inp.read(abs(length))
    if len(body) != abs(length):
        raise CacheFormatError("truncated integer body")
    mag = int.from_bytes(body, "little")
    return -mag if length < 0 else mag


def _write_matrix(out, M: IntMatrix) -> None:
    entries = []
    for j, col in enumerate(M.columns()):
        for i, v in col.items():
            entries.append((i * M.ncols + j, v))
    entries.sort()
    encode_int(out, len(entries))
    for idx, v in entries:
        encode_int(out, idx)
        encode_int(out, v)


def _read_matrix(inp, n: int) -> IntMatrix:
    count = decode_int(inp)
    cols: List[Dict[int, int]] = [{} for _ in range(n)]
    for _ in range(count):
        idx = decode_int(inp)
        v = decode_int(inp)
        i, j = divmod(idx, n)
        if not (0 <= i < n):
            raise CacheFormatError("matrix index out of range")
        cols[j][i] = v
    return IntMatrix(n, n, cols)


def dumps(dec: SmithDecomposition, nrows: int, ncols: int) -> bytes:
    buf = io.BytesIO()
    buf.write(MAGIC)
    buf.write(struct.pack("<H", VERSION))
    for x in (nrows, ncols, dec.rank):
        encode_int(buf, x)
    for d in dec.D:
        encode_int(buf, d)
    _write_matrix(buf, dec.U)
    _write_matrix(buf, dec.V)
    return buf.getvalue()


def loads(data: bytes):
    """Return ``(nrows, ncols, SmithDecomposition)``."""
    inp = io.BytesIO(data)
    if inp.read(4) != MAGIC:
        raise CacheFormatError("bad magic")
    raw = inp.read(2)
    if len(raw) != 2 or struct.unpack("<H", raw)[0] != VERSION:
        raise CacheFormatError("unsupported cache version")
    nrows, ncols, rank = (decode_int(inp) for _ in range(3))
    D = tuple(decode_int(inp) for _ in range(rank))
    U = _read_matrix(inp, nrows)
    V = _read_matrix(inp, ncols)
    if inp.read(1):
        raise CacheFormatError("trailing bytes")
    return nrows, ncols, SmithDecomposition(D, U, V)


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "blochsc"


class SnfCache:
    """Directory of cached decompositions keyed by :meth:`IntMatrix.content_hash`."""

    def __init__(self, directory: Optional[os.PathLike] = None):
        self.directory = Path(directory) if directory is not None else default_cache_dir()
        self.hits = 0
        self.misses = 0

    def path_for(self, A: IntMatrix) -> Path:
        return self.directory / f"{A.content_hash()}.snf"

    def get(self, A: IntMatrix) -> Optional[SmithDecomposition]:
        path = self.path_for(A)
        try:
            data = path.read_bytes()
        except FileNotFoundError:
            self.misses += 1
            return None
        try:
            nrows, ncols, dec = loads(data)
        except CacheFormatError:
            self.misses += 1
            return None
        if (nrows, ncols) != (A.nrows, A.ncols):
            self.misses += 1
            return None
        self.hits += 1
        return dec

    def put(self, A: IntMatrix, dec: SmithDecomposition) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self.path_for(A)
        fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=".tmp-", suffix=".snf")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(dumps(dec, A.nrows, A.ncols))
            os.replace(tmp, path)
        except BaseException:
            try:
                os.unlink(tmp)
            except FileNotFoundError:
                pass
            raise
        return path

    def entries(self) -> List[Path]:
        if not self.directory.is_dir():
            return []
        return sorted(self.directory.glob("*.snf"))

    def stats(self) -> dict:
        files = self.entries()
        return {
            "directory": str(self.directory),
            "entries": len(files),
            "bytes": sum(f.stat().st_size for f in files),
        }

    def clear(self) -> int:
        files = self.entries()
        for f in files:
            f.unlink()
        return len(files)
