import io
import os

import pytest
from hypothesis import given
from hypothesis import strategies as st

from blochsc.linalg import IntMatrix, cokernel, smith
from blochsc.snfcache import ENV_VAR, CacheFormatError, SnfCache, decode_int, default_cache_dir, dumps, encode_int, loads


@given(st.integers(-(2**200), 2**200))
def test_int_encoding_roundtrip(n):
    buf = io.BytesIO()
    encode_int(buf, n)
    buf.seek(0)
    assert decode_int(buf) == n


def test_encoding_layout():
    buf = io.BytesIO()
    encode_int(buf, -258)
    assert buf.getvalue() == b"\xfe\xff\xff\xff" + b"\x02\x01"


@given(st.lists(st.lists(st.integers(-9, 9), min_size=3, max_size=3), min_size=1, max_size=4))
def test_dumps_loads_roundtrip(rows):
    A = IntMatrix.from_rows(rows)
    dec = smith(A)
    n, m, back = loads(dumps(dec, A.nrows, A.ncols))
    assert (n, m) == (A.nrows, A.ncols)
    assert back.D == dec.D
    assert back.U.to_rows() == dec.U.to_rows() and back.V.to_rows() == dec.V.to_rows()


def test_rejects_garbage():
    with pytest.raises(CacheFormatError):
        loads(b"NOPE")
    A = IntMatrix.from_rows([[2, 1], [0, 3]])
    data = dumps(smith(A), 2, 2)
    with pytest.raises(CacheFormatError):
        loads(data[:-1])
    with pytest.raises(CacheFormatError):
        loads(data + b"\x00")
    with pytest.raises(CacheFormatError):
        loads(data[:4] + b"\x09\x00" + data[6:])


def test_cache_hit_miss_and_clear(tmp_path):
    cache = SnfCache(tmp_path)
    A = IntMatrix.from_rows([[4, 6], [2, 8]])
    first = smith(A, cache=cache)
    assert cache.misses == 1 and cache.hits == 0
    second = smith(A, cache=cache)
    assert cache.hits == 1
    assert first.D == second.D and first.U.to_rows() == second.U.to_rows()
    assert cache.stats()["entries"] == 1
    assert not list(tmp_path.glob(".tmp-*"))
    assert cache.clear() == 1 and cache.entries() == []


def test_corrupt_file_is_a_miss(tmp_path):
    cache = SnfCache(tmp_path)
    A = IntMatrix.from_rows([[3]])
    cache.path_for(A).write_bytes(b"BSNF\x01\x00garbage")
    assert cache.get(A) is None
    assert str(cokernel(A, cache=cache)) == "Z/3"
    assert cache.get(A) is not None


def test_cached_bytes_are_reproducible(tmp_path):
    A = IntMatrix.from_rows([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    p1 = SnfCache(tmp_path / "a").put(A, smith(A))
    p2 = SnfCache(tmp_path / "b").put(A, smith(A))
    assert p1.read_bytes() == p2.read_bytes()


def test_default_dir_from_env(monkeypatch, tmp_path):
    monkeypatch.setenv(ENV_VAR, str(tmp_path))
    assert default_cache_dir() == tmp_path
    monkeypatch.delenv(ENV_VAR)
    assert default_cache_dir().name == "blochsc"
    assert os.fspath(SnfCache().directory).endswith("blochsc")
