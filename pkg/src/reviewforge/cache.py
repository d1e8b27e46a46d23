"""Persistent verdict cache: append-only log with an in-memory index.

On-disk format, little-endian:
  header: 8 bytes = magic b"RFVC" + uint32 version (currently 1)
  record: uint32 payload length, then payload =
          16-byte key | 1-byte label index | 3 x float64 probs | 1-byte supported

A torn final record (e.g. after a kill) is discarded by truncating the file
to the last complete record on open. Reads are lock-free against the index;
appends serialize through a lock.
"""

from __future__ import annotations

import struct
import threading
from pathlib import Path

MAGIC = b"RFVC"
VERSION = 1
_HEADER = MAGIC + struct.pack("<I", VERSION)
_LEN = struct.Struct("<I")
_PAYLOAD = struct.Struct("<16sBdddB")

LABELS = ("entailment", "neutral", "contradiction")
_LABEL_INDEX = {name: i for i, name in enumerate(LABELS)}

# value tuple: (label, p_entail, p_neutral, p_contradict, supported)
Entry = tuple[str, float, float, float, bool]


class VerdictCache:
    """Verdict store keyed by 128-bit content hashes.

    ``path=None`` gives a purely in-memory cache with the same interface.
    """

    def __init__(self, path: str | Path | None = None):
        self._index: dict[bytes, Entry] = {}
        self._lock = threading.Lock()
        self._fh = None
        if path is not None:
            self._open(Path(path))

    def _open(self, path: Path) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        if path.exists() and path.stat().st_size > 0:
            valid = self._load(path)
            with open(path, "r+b") as fh:
                fh.truncate(valid)
        else:
            with open(path, "wb") as fh:
                fh.write(_HEADER)
        self._fh = open(path, "ab")

    def _load(self, path: Path) -> int:
        """Populate the index; return the offset of the last complete record."""
        with open(path, "rb") as fh:
            header = fh.read(len(_HEADER))
            if header[:4] != MAGIC:
                raise ValueError(f"{path}: not a verdict cache file")
            if header != _HEADER:
                raise ValueError(f"{path}: unsupported cache version")
            valid = fh.tell()
            while True:
                raw_len = fh.read(_LEN.size)
                if len(raw_len) < _LEN.size:
                    break
                (length,) = _LEN.unpack(raw_len)
                payload = fh.read(length)
                if len(payload) < length or length != _PAYLOAD.size:
                    break
                key, label_i, pe, pn, pc, supported = _PAYLOAD.unpack(payload)
                self._index[key] = (LABELS[label_i], pe, pn, pc, bool(supported))
                valid = fh.tell()
        return valid

    def __len__(self) -> int:
        return len(self._index)

    def get(self, key: bytes) -> Entry | None:
        return self._index.get(key)

    def put_many(self, entries: list[tuple[bytes, Entry]]) -> None:
        with self._lock:
            for key, entry in entries:
                self._index[key] = entry
            if self._fh is not None:
                buf = bytearray()
                for key, (label, pe, pn, pc, supported) in entries:
                    payload = _PAYLOAD.pack(key, _LABEL_INDEX[label], pe, pn, pc, int(supported))
                    buf += _LEN.pack(len(payload)) + payload
                self._fh.write(bytes(buf))
                self._fh.flush()

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def __enter__(self) -> "VerdictCache":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
