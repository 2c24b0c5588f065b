"""Instrumentation for the path store: trace recording, writer-discipline
checks and a vector-clock data-race detector.

All three implement the ``Monitor`` hook interface.  The store and the
generator call the hooks around every shared-memory access; with no monitor
attached the hooks cost a ``None`` check.

Access classes seen by the race detector:

* synchronizing cells: record flags, table sizes, tombstone bits and the
  per-vertex LocalFlag/PublicFlag.  A store is a release, a load an acquire.
* plain data: record contents and table slots.  Two accesses to the same
  plain location race unless one happens-before the other.
"""
from __future__ import annotations

import itertools
import json
import threading
from collections import defaultdict
from typing import Sequence

from .pathstore import (CYCLIC, EXTENDED, FLAG_NAMES, LEFT_READ, LENGTH, RIGHT_READ, SEQ, VALID,
                        ProtocolViolation, Record, is_simple)


class Monitor:
    """No-op base; subclasses override what they need."""

    def begin_run(self, succ: Sequence[Sequence[int]]) -> None: ...
    def end_run(self) -> None: ...

    # record contents
    def on_data_write(self, rec: Record, writer: int) -> None: ...
    def on_data_read(self, rec: Record, reader: int) -> None: ...
    def on_publish(self, v: int, rec: Record, writer: int) -> None: ...

    # record flags
    def on_flag_store(self, rec: Record, which: int, writer: int) -> None: ...
    def on_flag_load(self, rec: Record, which: int, reader: int) -> None: ...

    # level-2 tables
    def on_slot_write(self, v: int, i: int, writer: int) -> None: ...
    def on_slot_read(self, v: int, i: int, reader: int) -> None: ...
    def on_size_store(self, v: int, writer: int) -> None: ...
    def on_size_load(self, v: int, reader: int) -> None: ...
    def on_tombstone(self, v: int, i: int, rec: Record, writer: int) -> None: ...

    # logical events and worker flags
    def on_read_event(self, rec: Record, reader: int) -> None: ...
    def on_local_store(self, v: int, value: bool) -> None: ...
    def on_local_load(self, v: int) -> None: ...
    def on_public_store(self, v: int, value: bool) -> None: ...
    def on_public_load(self, v: int) -> None: ...

    # threads
    def on_fork(self): return None
    def on_thread_start(self, token) -> None: ...
    def on_thread_exit(self): return None
    def on_join(self, token) -> None: ...


_THREAD_HOOKS = ("on_fork", "on_thread_start", "on_thread_exit", "on_join")


class MultiMonitor(Monitor):
    """Fan each hook out to several monitors."""

    def __init__(self, *monitors: Monitor):
        self.monitors = monitors

    def __getattribute__(self, name):
        if name.startswith(("on_", "begin_", "end_")) and name not in _THREAD_HOOKS:
            mons = object.__getattribute__(self, "monitors")

            def fan(*args):
                for m in mons:
                    getattr(m, name)(*args)
            return fan
        return object.__getattribute__(self, name)

    def on_fork(self):
        return [m.on_fork() for m in self.monitors]

    def on_thread_start(self, token) -> None:
        for m, t in zip(self.monitors, token):
            m.on_thread_start(t)

    def on_thread_exit(self):
        return [m.on_thread_exit() for m in self.monitors]

    def on_join(self, token) -> None:
        for m, t in zip(self.monitors, token):
            m.on_join(t)


# ------------------------------------------------------------------ tracing

class TraceRecorder(Monitor):
    """Event log plus the monotonicity and read-once audits.

    Records are identified by their vertex sequence, which is unique within
    one run.  ``violations`` collects human-readable findings.
    """

    def __init__(self, keep_events: bool = True):
        self.keep_events = keep_events
        self.events: list[dict] = []
        self.violations: list[str] = []
        self.runs = 0
        self._lock = threading.Lock()
        self._reset()

    def _reset(self):
        self._seen_true: set[tuple] = set()
        self._reads: set[tuple] = set()
        self._public: dict[int, bool] = {}
        self._recs: dict[tuple, list] = {}

    def begin_run(self, succ) -> None:
        with self._lock:
            self.runs += 1
            self._reset()

    def _log(self, **ev):
        if self.keep_events:
            ev["run"] = self.runs
            self.events.append(ev)

    def on_publish(self, v, rec, writer):
        with self._lock:
            self._recs[tuple(rec[SEQ:])] = rec
            self._log(ev="append", vertex=v, path=list(rec[SEQ:]))

    def on_flag_store(self, rec, which, writer):
        # the hook fires just before the store lands, so it cannot count as
        # an observation of the new value
        if which != VALID:
            with self._lock:
                name = "extend" if which == EXTENDED else "flag"
                self._log(ev=name, path=list(rec[SEQ:]), flag=FLAG_NAMES[which], by=writer)

    def on_flag_load(self, rec, which, reader):
        key = (tuple(rec[SEQ:]), which)
        with self._lock:
            # sampled under the lock so observations are totally ordered
            if rec[which]:
                self._seen_true.add(key)
            elif key in self._seen_true:
                self.violations.append(f"flag {FLAG_NAMES[which]} of {list(key[0])} went true->false")

    def end_run(self) -> None:
        self.check_final()

    def check_final(self) -> None:
        """Nothing observed true may read false once the run has stopped."""
        with self._lock:
            for (seq, which) in self._seen_true:
                rec = self._recs.get(seq)
                if rec is not None and not rec[which]:
                    self.violations.append(f"flag {FLAG_NAMES[which]} of {list(seq)} went true->false")

    def on_read_event(self, rec, reader):
        key = (tuple(rec[SEQ:]), reader)
        with self._lock:
            if key in self._reads:
                self.violations.append(f"{list(key[0])} read twice by vertex {reader}")
            self._reads.add(key)
            self._log(ev="read", path=list(key[0]), by=reader)

    def on_tombstone(self, v, i, rec, writer):
        with self._lock:
            self._log(ev="tombstone", vertex=v, path=list(rec[SEQ:]))

    def on_public_store(self, v, value):
        with self._lock:
            if value and self._public.get(v) is False:
                self.violations.append(f"PublicFlag of vertex {v} reactivated")
            self._public[v] = value
            self._log(ev="public", vertex=v, value=value)

    def read_count(self) -> int:
        return len(self._reads)

    def dump(self, fp) -> None:
        json.dump({"events": self.events, "violations": self.violations}, fp)


def audit_quiescent(store, succ: Sequence[Sequence[int]]) -> list[str]:
    """Every record at a vertex with successors carries every read label."""
    out = []
    for v, table in enumerate(store.tables):
        slots = [LEFT_READ, RIGHT_READ][:len(succ[v])]
        for rec in table:
            missing = [FLAG_NAMES[s] for s in slots if not rec[s]]
            if missing:
                out.append(f"{list(rec[SEQ:])} at {v} missing {missing}")
    return out


# ----------------------------------------------------------- checked mode

class CheckedMonitor(Monitor):
    """Raises ``ProtocolViolation`` on any store access that breaks the
    writer rules:

    * contents, length, validity and the cyclic mark belong to the creating
      vertex (the record's last vertex) and are fixed before publication;
    * the left/right read labels belong to the first/second successor of the
      creating vertex; the extension label to any successor;
    * only the owning vertex tombstones, and only fully read records;
    * every appended record is a simple path.
    """

    def __init__(self):
        self.succ: Sequence[Sequence[int]] = ()
        self.checks = 0

    def begin_run(self, succ) -> None:
        self.succ = succ

    def _fail(self, msg: str):
        raise ProtocolViolation(msg)

    def on_publish(self, v, rec, writer):
        self.checks += 1
        seq = rec[SEQ:]
        if rec[VALID]:
            self._fail(f"record {seq} published twice")
        if not seq or seq[-1] != v or writer != v:
            self._fail(f"record {seq} appended at {v} by {writer}")
        if rec[LENGTH] != len(seq):
            self._fail(f"record {seq} length slot {rec[LENGTH]}")
        if not is_simple(seq):
            self._fail(f"record {seq} is not a simple path")
        if rec[CYCLIC] != (len(seq) >= 2 and seq[0] == seq[-1]):
            self._fail(f"record {seq} has a wrong cyclic mark")
        for a, b in zip(seq, seq[1:]):
            if b not in self.succ[a]:
                self._fail(f"record {seq} uses missing arc {a}->{b}")

    def on_flag_store(self, rec, which, writer):
        self.checks += 1
        creator = rec[-1]
        succ = self.succ[creator]
        if which in (VALID, CYCLIC):
            if writer != creator:
                self._fail(f"{FLAG_NAMES[which]} of {rec[SEQ:]} written by {writer}")
        elif which == LEFT_READ:
            if not succ or writer != succ[0]:
                self._fail(f"left read label of {rec[SEQ:]} written by {writer}")
        elif which == RIGHT_READ:
            if len(succ) < 2 or writer != succ[1]:
                self._fail(f"right read label of {rec[SEQ:]} written by {writer}")
        elif which == EXTENDED:
            if writer not in succ:
                self._fail(f"extension label of {rec[SEQ:]} written by {writer}")

    def on_tombstone(self, v, i, rec, writer):
        self.checks += 1
        if writer != v:
            self._fail(f"vertex {writer} tombstoned a record of {v}")
        succ = self.succ[v]
        if not succ:
            self._fail(f"record {rec[SEQ:]} at a vertex without successors tombstoned")
        if rec[CYCLIC]:
            self._fail(f"cyclic record {rec[SEQ:]} tombstoned")
        for s in [LEFT_READ, RIGHT_READ][:len(succ)]:
            if not rec[s]:
                self._fail(f"record {rec[SEQ:]} tombstoned before {FLAG_NAMES[s]}")


# ------------------------------------------------------------ race detector

class RaceDetector(Monitor):
    """Happens-before race detection with vector clocks.

    Each thread carries a vector clock.  Stores to synchronizing cells
    release the writer's clock into the cell; loads acquire it.  Plain
    locations remember their last write epoch and the read epochs since, so a
    race is two accesses (at least one a write) from different threads with
    no happens-before path between them.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._tls = threading.local()
        self._ids = itertools.count(1)
        self._clocks: dict[int, dict[int, int]] = {0: {0: 1}}
        self.races: list[tuple] = []
        self.accesses = 0
        self._reset_locations()

    def _reset_locations(self):
        self._sync: dict = defaultdict(dict)
        self._writes: dict = {}
        self._reads: dict = defaultdict(dict)

    def begin_run(self, succ) -> None:
        with self._lock:
            self._reset_locations()

    def _tid(self) -> int:
        return getattr(self._tls, "tid", 0)

    @staticmethod
    def _join(into: dict, other: dict) -> None:
        for k, c in other.items():
            if into.get(k, 0) < c:
                into[k] = c

    def release(self, loc) -> None:
        with self._lock:
            t = self._tid()
            vc = self._clocks[t]
            self._join(self._sync[loc], vc)
            vc[t] += 1

    def acquire(self, loc) -> None:
        with self._lock:
            cell = self._sync.get(loc)
            if cell:
                self._join(self._clocks[self._tid()], cell)

    def write(self, loc) -> None:
        with self._lock:
            self.accesses += 1
            t = self._tid()
            vc = self._clocks[t]
            last = self._writes.get(loc)
            if last is not None and last[0] != t and last[1] > vc.get(last[0], 0):
                self.races.append(("write-write", loc, last[0], t))
            for u, c in self._reads[loc].items():
                if u != t and c > vc.get(u, 0):
                    self.races.append(("read-write", loc, u, t))
            self._writes[loc] = (t, vc[t])
            self._reads[loc] = {}

    def read(self, loc) -> None:
        with self._lock:
            self.accesses += 1
            t = self._tid()
            vc = self._clocks[t]
            last = self._writes.get(loc)
            if last is not None and last[0] != t and last[1] > vc.get(last[0], 0):
                self.races.append(("write-read", loc, last[0], t))
            self._reads[loc][t] = vc[t]

    # thread lifecycle
    def on_fork(self):
        with self._lock:
            t = self._tid()
            vc = self._clocks[t]
            token = dict(vc)
            vc[t] += 1
            return token

    def on_thread_start(self, token) -> None:
        with self._lock:
            t = next(self._ids)
            self._tls.tid = t
            vc = dict(token)
            vc[t] = 1
            self._clocks[t] = vc

    def on_thread_exit(self):
        with self._lock:
            return dict(self._clocks[self._tid()])

    def on_join(self, token) -> None:
        with self._lock:
            self._join(self._clocks[self._tid()], token)

    # store hooks
    def on_data_write(self, rec, writer):
        self.write(("data", id(rec)))

    def on_data_read(self, rec, reader):
        self.read(("data", id(rec)))

    def on_flag_store(self, rec, which, writer):
        self.release(("flag", id(rec), which))

    def on_flag_load(self, rec, which, reader):
        self.acquire(("flag", id(rec), which))

    def on_slot_write(self, v, i, writer):
        self.write(("slot", v, i))

    def on_slot_read(self, v, i, reader):
        self.read(("slot", v, i))

    def on_size_store(self, v, writer):
        self.release(("size", v))

    def on_size_load(self, v, reader):
        self.acquire(("size", v))

    def on_tombstone(self, v, i, rec, writer):
        self.release(("dead", v, i))

    def on_local_store(self, v, value):
        self.release(("local", v))

    def on_local_load(self, v):
        self.acquire(("local", v))

    def on_public_store(self, v, value):
        self.release(("public", v))

    def on_public_load(self, v):
        self.acquire(("public", v))


def demo_unsafe_publication(detector: RaceDetector) -> int:
    """Publish a table slot before the record contents are written, with a
    second thread reading it.  Returns the number of races found; a working
    detector reports at least one."""
    from .pathstore import make_record

    box: list = []

    def producer():
        rec = make_record((0, 1))
        detector.on_slot_write(0, 0, 0)
        detector.on_size_store(0, 0)
        box.append(rec)
        detector.on_data_write(rec, 0)  # too late: already visible

    def consumer():
        while not box:
            pass
        detector.on_size_load(0, 1)
        detector.on_slot_read(0, 0, 1)
        detector.on_data_read(box[0], 1)

    before = len(detector.races)
    threads = []
    for fn in (producer, consumer):
        token = detector.on_fork()
        th = threading.Thread(target=_run_with_token, args=(detector, token, fn))
        threads.append(th)
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    for th in threads:
        detector.on_join(th.exit_token)
    return len(detector.races) - before


def _run_with_token(mon, token, fn):
    mon.on_thread_start(token)
    try:
        fn()
    finally:
        threading.current_thread().exit_token = mon.on_thread_exit()
