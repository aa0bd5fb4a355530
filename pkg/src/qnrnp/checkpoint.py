"""Binary checkpoint files for resumable searches.

Layout (all integers little-endian, fixed width)::

    magic   4 bytes  b"QNCP"
    version u8
    id_len  u32, then id_len bytes of UTF-8 job id (canonical JSON)
    next_block u64, initial_count u64, certified_count u64,
    initial_first u64, initial_last u64, record_count u32
    records: record_count x (p u64, omega u8, k u8, extended u8, witness_lo u64)
    digest  8 bytes  blake2b(digest_size=8) of everything above

Files are written to a temporary name and renamed into place, so a crash
mid-write leaves the previous checkpoint intact.
"""

from __future__ import annotations

import hashlib
import os
import struct
from dataclasses import dataclass, field
from pathlib import Path

from .errors import CorruptCheckpoint

MAGIC = b"QNCP"
VERSION = 1
_HEAD = struct.Struct("<QQQQQI")
_RECORD = struct.Struct("<QBBBQ")
_DIGEST_SIZE = 8


@dataclass(frozen=True)
class WitnessRecord:
    """A verified prime from a final list, with the data needed for reporting."""

    p: int
    n: int
    omega: int
    k: int  # criterion k used for p, 0 if no k gave a positive theta
    extended: bool = False  # pair found only beyond (p-1)/2

    @property
    def pair(self) -> tuple[int, int]:
        return (self.n, self.n + 1)


@dataclass
class CheckpointState:
    job_id: str
    next_block: int = 0
    initial_count: int = 0
    certified_count: int = 0
    initial_first: int = 0
    initial_last: int = 0
    records: list[WitnessRecord] = field(default_factory=list)


def _digest(data: bytes) -> bytes:
    return hashlib.blake2b(data, digest_size=_DIGEST_SIZE).digest()


def encode(state: CheckpointState) -> bytes:
    jid = state.job_id.encode()
    parts = [
        MAGIC,
        bytes([VERSION]),
        struct.pack("<I", len(jid)),
        jid,
        _HEAD.pack(
            state.next_block,
            state.initial_count,
            state.certified_count,
            state.initial_first,
            state.initial_last,
            len(state.records),
        ),
    ]
    parts.extend(_RECORD.pack(r.p, r.omega, r.k, int(r.extended), r.n) for r in state.records)
    body = b"".join(parts)
    return body + _digest(body)


def decode(data: bytes, expected_id: str | None = None) -> CheckpointState:
    if len(data) < len(MAGIC) + 1 + 4 + _DIGEST_SIZE:
        raise CorruptCheckpoint("checkpoint truncated")
    body, digest = data[:-_DIGEST_SIZE], data[-_DIGEST_SIZE:]
    if _digest(body) != digest:
        raise CorruptCheckpoint("checkpoint digest mismatch")
    if body[:4] != MAGIC:
        raise CorruptCheckpoint("not a checkpoint file")
    if body[4] != VERSION:
        raise CorruptCheckpoint(f"unsupported checkpoint version {body[4]}")
    (id_len,) = struct.unpack_from("<I", body, 5)
    pos = 9
    job_id = body[pos : pos + id_len].decode()
    pos += id_len
    if expected_id is not None and job_id != expected_id:
        raise CorruptCheckpoint("checkpoint belongs to a different job")
    nb, ic, cc, first, last, nrec = _HEAD.unpack_from(body, pos)
    pos += _HEAD.size
    if len(body) != pos + nrec * _RECORD.size:
        raise CorruptCheckpoint("checkpoint record section has the wrong length")
    records = []
    for _ in range(nrec):
        p, om, k, ext, n = _RECORD.unpack_from(body, pos)
        pos += _RECORD.size
        records.append(WitnessRecord(p, n, om, k, bool(ext)))
    return CheckpointState(job_id, nb, ic, cc, first, last, records)


def checkpoint_path(directory: str | os.PathLike, job_id: str) -> Path:
    name = hashlib.blake2b(job_id.encode(), digest_size=8).hexdigest()
    return Path(directory) / f"{name}.qncp"


def checkpoint_save(directory: str | os.PathLike, state: CheckpointState) -> Path:
    path = checkpoint_path(directory, state.job_id)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    with open(tmp, "wb") as fh:
        fh.write(encode(state))
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)
    return path


def checkpoint_load(path: str | os.PathLike, expected_id: str | None = None) -> CheckpointState:
    return decode(Path(path).read_bytes(), expected_id)


def checkpoint_resume(directory: str | os.PathLike, job_id: str) -> CheckpointState:
    """State to continue ``job_id`` from; a fresh state when no checkpoint exists."""
    path = checkpoint_path(directory, job_id)
    if not path.exists():
        return CheckpointState(job_id)
    return checkpoint_load(path, job_id)
