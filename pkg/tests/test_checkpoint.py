import struct

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qnrnp.checkpoint import (
    MAGIC,
    CheckpointState,
    WitnessRecord,
    _digest,
    checkpoint_load,
    checkpoint_path,
    checkpoint_resume,
    checkpoint_save,
    decode,
    encode,
)
from qnrnp.criterion import QUARTER
from qnrnp.errors import CorruptCheckpoint
from qnrnp.search import DirectJob, execute, run_published_branch

u64 = st.integers(min_value=0, max_value=2**64 - 1)
records = st.builds(
    WitnessRecord,
    p=u64,
    n=u64,
    omega=st.integers(0, 255),
    k=st.integers(0, 255),
    extended=st.booleans(),
)
states = st.builds(
    CheckpointState,
    job_id=st.text(max_size=60),
    next_block=u64,
    initial_count=u64,
    certified_count=u64,
    initial_first=u64,
    initial_last=u64,
    records=st.lists(records, max_size=20),
)


@settings(max_examples=200, deadline=None)
@given(states)
def test_encode_decode_round_trip(state):
    data = encode(state)
    assert decode(data) == state
    assert encode(decode(data)) == data


def sample_state():
    return CheckpointState('{"kind": "x"}', 3, 10, 4, 31, 997, [WitnessRecord(31, 26, 3, 1, True), WitnessRecord(211, 26, 4, 2)])


def test_bad_digest():
    data = bytearray(encode(sample_state()))
    data[20] ^= 1
    with pytest.raises(CorruptCheckpoint, match="digest"):
        decode(bytes(data))


def _resealed(body: bytes) -> bytes:
    return body + _digest(body)


def test_bad_version_and_magic():
    body = encode(sample_state())[:-8]
    with pytest.raises(CorruptCheckpoint, match="version"):
        decode(_resealed(body[:4] + bytes([99]) + body[5:]))
    with pytest.raises(CorruptCheckpoint, match="not a checkpoint"):
        decode(_resealed(b"XXXX" + body[4:]))


def test_wrong_record_length():
    body = encode(sample_state())[:-8]
    with pytest.raises(CorruptCheckpoint, match="length"):
        decode(_resealed(body + b"\0"))


def test_truncated():
    with pytest.raises(CorruptCheckpoint, match="truncated"):
        decode(MAGIC)


def test_job_id_mismatch(tmp_path):
    state = sample_state()
    path = checkpoint_save(tmp_path, state)
    assert checkpoint_load(path, state.job_id) == state
    with pytest.raises(CorruptCheckpoint, match="different job"):
        checkpoint_load(path, '{"kind": "y"}')


def test_missing_file_gives_fresh_state(tmp_path):
    fresh = checkpoint_resume(tmp_path, "job")
    assert fresh == CheckpointState("job")
    assert not checkpoint_path(tmp_path, "job").exists()


def test_save_replaces_atomically(tmp_path):
    state = sample_state()
    path = checkpoint_save(tmp_path, state)
    state.next_block += 1
    assert checkpoint_save(tmp_path, state) == path
    assert checkpoint_load(path).next_block == 4
    assert sorted(p.name for p in tmp_path.iterdir()) == [path.name]


def test_header_layout():
    data = encode(sample_state())
    assert data[:4] == MAGIC
    (id_len,) = struct.unpack_from("<I", data, 5)
    assert data[9 : 9 + id_len] == b'{"kind": "x"}'


def _interrupted(job, tmp_path, steps):
    for _ in range(steps):
        r = execute(job, checkpoint_dir=tmp_path, checkpoint_every=1, max_blocks=1)
        if r.complete:
            break
    return execute(job, checkpoint_dir=tmp_path)


def test_direct_resume_matches_uninterrupted(tmp_path):
    job = DirectJob(1, 64, 3, 200_000, QUARTER, block=20_000)
    whole = execute(job)
    resumed = _interrupted(job, tmp_path, 4)
    assert resumed.complete and resumed == whole
    assert resumed.initial_count > 0


def test_branch_resume_matches_uninterrupted(tmp_path):
    whole = run_published_branch(12, 13370699342, block=4096)
    for _ in range(3):
        partial = run_published_branch(12, 13370699342, block=4096, checkpoint_dir=tmp_path, max_blocks=2)
        assert not partial.complete
    resumed = run_published_branch(12, 13370699342, block=4096, checkpoint_dir=tmp_path)
    assert resumed == whole and resumed.checkpoint
    # a finished job resumes to the same report without new work
    again = run_published_branch(12, 13370699342, block=4096, checkpoint_dir=tmp_path)
    assert again == whole
