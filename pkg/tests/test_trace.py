from __future__ import annotations

import io
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from raceward.trace import (
    Evidence,
    Op,
    RacePair,
    TraceError,
    TraceEvent,
    VectorClock,
    detect_races_hb,
    detect_races_lockset,
    dump_trace,
    happens_before,
    hb_closure_oracle,
    load_trace,
    oracle_races,
    validate,
    vector_clocks,
)
from raceward.trace.events import L, R, RCV, RL, RU, SND, SPAWN, U, W, WADD, WDONE, WWAIT
from raceward.trace.generate import (
    TraceShape,
    lock_protected,
    message_passing,
    precision_gap_family,
    random_reschedule,
    random_trace,
    random_traces,
    renumber,
    unsynchronized,
    waitgroup_add_in_child,
)


def keys(races):
    return [r.key for r in races]


def events_of(races):
    return {(r.first, r.second) for r in races}


# ------------------------------------------------------------------ examples


def test_unsynchronized_writes_race():
    (race,) = detect_races_hb(unsynchronized())
    assert race.key == (1, 2) and race.evidence is Evidence.HBUnordered
    assert race.to_text() == "race on a: task 1 write@1 vs task 2 write@2 [HBUnordered]"


def test_lock_protected_is_clean():
    assert detect_races_hb(lock_protected()) == []
    assert detect_races_lockset(lock_protected()) == []


def test_message_passing_is_ordered():
    assert detect_races_hb(message_passing()) == []


def test_waitgroup_add_in_child_races():
    trace = waitgroup_add_in_child(workers=2)
    races = detect_races_hb(trace)
    assert {(r.addr, r.first.op, r.second.op, r.second.task) for r in races} == {
        ("results[0]", Op.Write, Op.Read, 0),
        ("results[1]", Op.Write, Op.Read, 0),
    }
    assert keys(races) == keys(oracle_races(trace))


def test_waitgroup_add_before_spawn_is_ordered():
    trace = [
        WADD(1, 0, "wg", 1), SPAWN(2, 0, 1), W(3, 1, "r"), WDONE(4, 1, "wg"), WWAIT(5, 0, "wg"), R(6, 0, "r"),
    ]
    assert detect_races_hb(trace) == []


def test_precision_gap_family():
    for trace in precision_gap_family(6):
        assert detect_races_hb(trace) == []
        (race,) = detect_races_lockset(trace)
        assert race.evidence is Evidence.EmptyLockSetIntersection and race.addr == "a"
        rel = hb_closure_oracle(trace)
        i, j = trace.index(race.first), trace.index(race.second)
        assert rel.ordered(i, j)


def test_lockset_single_task_silent():
    trace = [L(1, 0, "m"), W(2, 0, "a"), U(3, 0, "m"), W(4, 0, "a"), R(5, 0, "a")]
    assert detect_races_lockset(trace) == [] and detect_races_hb(trace) == []


def test_lockset_read_only_sharing_silent():
    trace = [R(1, 0, "a"), SPAWN(2, 0, 1), R(3, 1, "a"), R(4, 0, "a")]
    assert detect_races_lockset(trace) == []


def test_lockset_read_lock_does_not_protect_writes():
    trace = [RL(1, 0, "m"), W(2, 0, "a"), RU(3, 0, "m"), RL(4, 1, "m"), W(5, 1, "a"), RU(6, 1, "m")]
    (race,) = detect_races_lockset(trace)
    assert race.key == (2, 5)
    # RUnlock only orders later exclusive locks, so HB sees the race too
    assert keys(detect_races_hb(trace)) == [(2, 5)]


def test_rwmutex_edges():
    # writer then reader: unlock -> rlock orders them
    trace = [L(1, 0, "m"), W(2, 0, "a"), U(3, 0, "m"), RL(4, 1, "m"), R(5, 1, "a"), RU(6, 1, "m")]
    assert detect_races_hb(trace) == []
    # reader then writer: runlock -> lock orders them
    trace = [RL(1, 0, "m"), R(2, 0, "a"), RU(3, 0, "m"), L(4, 1, "m"), W(5, 1, "a"), U(6, 1, "m")]
    assert detect_races_hb(trace) == []


def test_gr04_unguarded_append_trace():
    """Each goroutine reads the slice header and writes it back without a lock."""
    trace = [
        SPAWN(1, 0, 1), SPAWN(2, 0, 2),
        R(3, 1, "results.hdr"), W(4, 1, "results.hdr"),
        R(5, 2, "results.hdr"), W(6, 2, "results.hdr"),
    ]
    races = detect_races_hb(trace)
    assert keys(races) == [(3, 6), (4, 5), (4, 6)]


def test_gr09_payload_over_channel_is_ordered():
    """The worker sets a field, then sends on the channel the caller reads from."""
    trace = [SPAWN(1, 0, 1), W(2, 1, "f.err"), SND(3, 1, "ch"), RCV(4, 0, "ch"), R(5, 0, "f.err")]
    assert detect_races_hb(trace) == []
    # on timeout the caller reads the field without receiving
    timeout = [SPAWN(1, 0, 1), R(2, 0, "f.err"), W(3, 1, "f.err")]
    assert keys(detect_races_hb(timeout)) == [(2, 3)]


def test_chain_through_channel_ordered():
    trace = message_passing()
    rel = hb_closure_oracle(trace)
    assert rel.ordered(0, 3) and not rel.ordered(3, 0)


def test_independent_tasks_all_unordered():
    trace = [W(1, 1, "a"), W(2, 2, "b"), R(3, 1, "c"), R(4, 2, "d")]
    rel = hb_closure_oracle(trace)
    for i in (0, 2):
        for j in (1, 3):
            assert rel.concurrent(i, j)


# ------------------------------------------------------------------ oracle


RANDOM = random_traces(1000, seed=2024)


def test_random_suite_shape():
    assert all(1 <= len(t) <= 12 for t in RANDOM)
    assert all(len({e.task for e in t}) <= 4 for t in RANDOM)
    assert sum(1 for t in RANDOM if detect_races_hb(t)) > 100
    assert sum(1 for t in RANDOM if not detect_races_hb(t)) > 100


def test_hb_agrees_with_oracle_on_random_traces():
    disagreements = [t for t in RANDOM if keys(detect_races_hb(t)) != keys(oracle_races(t))]
    assert disagreements == []


def test_vector_clocks_match_closure():
    for trace in RANDOM:
        clocks = vector_clocks(trace)
        rel = hb_closure_oracle(trace)
        for i in range(len(trace)):
            for j in range(len(trace)):
                assert happens_before(clocks[i], clocks[j]) == rel.ordered(i, j), (trace, i, j)


def test_vector_clock_epoch_characterization():
    """e1 HB e2 iff e1 != e2 and VC(e1)[t1] <= VC(e2)[t1], with t1 = e1's task.

    The clocks can be equal at t1 (a receive knows its send exactly), so
    requiring strict inequality there would reject true HB pairs.
    """
    equal_at_own_task = 0
    for trace in RANDOM[:300]:
        clocks = vector_clocks(trace)
        rel = hb_closure_oracle(trace)
        for i, e in enumerate(trace):
            for j in range(len(trace)):
                if i == j:
                    continue
                epoch = clocks[i].get(e.task) <= clocks[j].get(e.task)
                assert epoch == rel.ordered(i, j)
                if rel.ordered(i, j) and clocks[i].get(e.task) == clocks[j].get(e.task):
                    equal_at_own_task += 1
    assert equal_at_own_task > 0
    send_recv = vector_clocks(message_passing())
    assert send_recv[1].get(1) == send_recv[2].get(1) and happens_before(send_recv[1], send_recv[2])


def test_hb_is_strict_partial_order():
    for trace in RANDOM[:300]:
        rel = hb_closure_oracle(trace)
        n = rel.size
        for i in range(n):
            assert not rel.ordered(i, i)
            for j in range(n):
                if rel.ordered(i, j):
                    assert not rel.ordered(j, i)
                    for k in range(n):
                        if rel.ordered(j, k):
                            assert rel.ordered(i, k)


def test_oracle_bound_refused():
    trace = [W(k, 0, "a") for k in range(1, 66)]
    with pytest.raises(ValueError, match="bound"):
        hb_closure_oracle(trace)
    hb_closure_oracle(trace[:64])


def test_schedule_independence():
    rng = random.Random(5)
    for trace in RANDOM[:300]:
        base = events_of_identity(trace, detect_races_hb(trace))
        for _ in range(3):
            order = random_reschedule(trace, rng)
            moved = renumber(trace, order)
            validate(moved)
            assert events_of_identity(moved, detect_races_hb(moved), order) == base


def events_of_identity(trace, races, order=None):
    """Races as unordered pairs of original event indices."""
    index = {e.seq: (order[k] if order else k) for k, e in enumerate(trace)}
    return {frozenset((index[r.first.seq], index[r.second.seq])) for r in races}


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 5), st.integers(1, 20))
def test_random_shapes_agree(seed, tasks, events):
    trace = random_trace(random.Random(seed), TraceShape(max_tasks=tasks, max_events=events))
    assert keys(detect_races_hb(trace)) == keys(oracle_races(trace))


def test_lockset_reports_are_conflicting_pairs():
    for trace in RANDOM:
        for race in detect_races_lockset(trace):
            assert race.first.seq < race.second.seq
        assert len({r.addr for r in detect_races_lockset(trace)}) == len(detect_races_lockset(trace))


# ------------------------------------------------------------------ validation


@pytest.mark.parametrize(
    "trace,seq,match",
    [
        ([W(2, 0, "a"), W(2, 1, "a")], 2, "seq not increasing"),
        ([U(1, 0, "m")], 1, "not held"),
        ([L(1, 0, "m"), U(2, 1, "m")], 2, "not held by task 1"),
        ([L(1, 0, "m"), L(2, 1, "m")], 2, "while it is held"),
        ([L(1, 0, "m"), RL(2, 1, "m")], 2, "write-locked"),
        ([RU(1, 0, "m")], 1, "not read-held"),
        ([RCV(1, 0, "c")], 1, "no pending send"),
        ([SND(1, 0, "c"), RCV(2, 0, "c")], 2, "its own send"),
        ([SND(1, 0, "c"), W(2, 0, "a")], 2, "blocked on unmatched send"),
        ([SPAWN(1, 0, 0)], 1, "spawns itself"),
        ([W(1, 1, "a"), SPAWN(2, 0, 1)], 2, "already exists"),
        ([WDONE(1, 0, "g")], 1, "zero counter"),
        ([WADD(1, 0, "g", 1), WWAIT(2, 0, "g")], 2, "counter 1"),
        ([WADD(1, 0, "g", -1)], 1, "negative"),
        ([WADD(1, 0, "g", 0)], 1, "n=0"),
    ],
)
def test_invalid_traces_name_first_offender(trace, seq, match):
    with pytest.raises(TraceError, match=match) as exc:
        detect_races_hb(trace)
    assert exc.value.seq == seq
    with pytest.raises(TraceError):
        detect_races_lockset(trace)


def test_wadd_needs_n():
    with pytest.raises(TraceError):
        TraceEvent(1, 0, Op.WgAdd, "g")
    with pytest.raises(TraceError):
        TraceEvent(1, 0, Op.Read, "a", 3)


def test_race_pair_invariants():
    with pytest.raises(ValueError):
        RacePair(R(1, 0, "a"), R(2, 1, "a"), Evidence.HBUnordered)
    with pytest.raises(ValueError):
        RacePair(W(1, 0, "a"), W(2, 0, "a"), Evidence.HBUnordered)
    with pytest.raises(ValueError):
        RacePair(W(1, 0, "a"), W(2, 1, "b"), Evidence.HBUnordered)
    with pytest.raises(ValueError):
        RacePair(L(1, 0, "a"), W(2, 1, "a"), Evidence.HBUnordered)


def test_vector_clock_basics():
    a = VectorClock({1: 2, 2: 0})
    b = a.tick(2)
    assert a.clock == {1: 2} and b.get(2) == 1 and b.get(9) == 0
    assert a <= b and not b <= a and happens_before(a, b)
    assert not happens_before(a, a)
    assert a.join(VectorClock({3: 4})) == VectorClock({1: 2, 3: 4})


# ------------------------------------------------------------------ I/O


def test_dump_load_round_trip():
    for trace in RANDOM[:100] + [waitgroup_add_in_child(2)] + precision_gap_family():
        assert load_trace(io.StringIO(dump_trace(trace))) == trace


def test_load_skips_comments_and_reports_bad_lines():
    text = '# demo\n\n{"seq":1,"task":0,"op":"w","addr":"a"}\n'
    assert load_trace(io.StringIO(text)) == [W(1, 0, "a")]
    with pytest.raises(TraceError, match="line 2"):
        load_trace(io.StringIO(text.replace("\n\n", "\nnot json\n")))
    with pytest.raises(TraceError):
        load_trace(io.StringIO('{"seq":1,"task":0,"op":"w"}\n'))
    with pytest.raises(TraceError):
        load_trace(io.StringIO('{"seq":1,"task":0,"op":"zap","addr":"a"}\n'))


def test_race_json():
    (race,) = detect_races_hb(unsynchronized())
    assert race.to_json() == (
        '{"addr":"a","first":{"seq":1,"task":1,"op":"w"},"second":{"seq":2,"task":2,"op":"w"},"evidence":"HBUnordered"}'
    )
