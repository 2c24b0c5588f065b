"""Order-oblivious prime path generation with one logical worker per vertex.

Each vertex keeps a list of simple paths ending at it.  A worker repeatedly
updates its vertex:

* prune: retire records that every successor has read and that were either
  extended or are covered by a one-vertex-longer record at the same vertex;
* read: take every not-yet-read record of each predecessor, extend it by the
  vertex when the result is still a simple path, and label it read;
* terminate: recompute LocalFlag (some record here is still unread by a
  successor) and clear PublicFlag once nothing upstream can produce work.

Workers never wait on each other.  The scheduler decides the interleaving;
any interleaving reaches the same fixed point.
"""
from __future__ import annotations

import os
import random
import threading
import time
from dataclasses import dataclass
from typing import Iterable, Sequence

from .cfg import Cfg, max_outdegree
from .pathstore import (CYCLIC, EXTENDED, LEFT_READ, RIGHT_READ, VALID, PathStore, Record,
                        make_record, rec_seq)
from .scc import backward_reachable, tarjan_scc

Path = tuple[int, ...]
SCHEDULE_MODES = ("round-robin", "seeded-random", "parallel")


class BudgetExceeded(RuntimeError):
    """The fixed-point iteration cap was hit.  Signals a liveness bug."""


class TerminationError(RuntimeError):
    """All workers stopped but the store is not at a fixed point."""


@dataclass(frozen=True)
class Schedule:
    mode: str = "round-robin"
    seed: int = 0
    workers: int = 1
    budget: int | None = None
    stall_timeout: float = 30.0

    def __post_init__(self):
        if self.mode not in SCHEDULE_MODES:
            raise ValueError(f"unknown schedule mode {self.mode!r}")
        if self.workers < 1:
            raise ValueError("need at least one worker")

    def describe(self) -> str:
        if self.mode == "seeded-random":
            return f"seeded-random(seed={self.seed})"
        if self.mode == "parallel":
            return f"parallel(workers={self.workers})"
        return self.mode


# ------------------------------------------------------------ path helpers

def can_extend(seq: Sequence[int], v: int) -> bool:
    """True when ``seq + [v]`` is a simple path (``seq`` must be acyclic)."""
    if len(seq) >= 2 and seq[0] == seq[-1]:
        return False
    return v == seq[0] or v not in seq


def extend_path(p: Record | Sequence[int], v: int) -> Record:
    """A new published-ready record for ``p`` followed by ``v``.

    Accepts a record (a list) or a vertex tuple; the input is not modified.
    """
    seq = rec_seq(p) if isinstance(p, list) else tuple(p)
    if not can_extend(seq, v):
        raise ValueError(f"cannot extend {list(seq)} by {v}")
    rec = make_record(seq + (v,))
    rec[VALID] = True
    return rec


def is_prime_path(g: Cfg, seq: Sequence[int]) -> bool:
    """A simple path is prime iff it is cyclic or extends at neither end."""
    if len(seq) >= 2 and seq[0] == seq[-1]:
        return True
    first, last = seq[0], seq[-1]
    on = set(seq)
    if any(w == first or w not in on for w in g.succ[last]):
        return False
    if any(x == last or x not in on for x in g.pred[first]):
        return False
    return True


def default_budget(n: int, max_list: int) -> int:
    return 10 * n * (1 + max_list)


# longest an idle parallel worker parks before polling again
IDLE_WAIT = 0.005


def _budget_override() -> int | None:
    raw = os.environ.get("PPFORGE_ITER_BUDGET")
    return int(raw) if raw else None


# ---------------------------------------------------------------- workers

class VertexGenerator:
    """Shared state for one generation run over ``g``."""

    def __init__(self, g: Cfg, monitor=None):
        if max_outdegree(g) > 2:
            raise ValueError("graph must be normalized to out-degree <= 2 first")
        self.g = g
        self.n = n = len(g)
        self.succ = g.succ
        self.pred = g.pred
        self.monitor = monitor
        self.read_slot = [{w: s for w, s in zip(g.succ[u], (LEFT_READ, RIGHT_READ))} for u in range(n)]
        self.my_slots = [(LEFT_READ, RIGHT_READ)[:len(g.succ[v])] for v in range(n)]
        d = tarjan_scc(g)
        self.peers = [d.members[d.scc_of[v]] for v in range(n)]
        self.upstream = [tuple(sorted(backward_reachable(g, v) - set(self.peers[v]))) for v in range(n)]
        if monitor is not None:
            monitor.begin_run(g.succ)
        self.store = PathStore(n, monitor=monitor)
        # LocalFlag starts raised wherever the initial record still has readers
        self.local = [bool(g.succ[v]) for v in range(n)]
        self.public = [True] * n
        # everything below is private to the owning worker
        self.cursor = [{u: 0 for u in g.pred[v]} for v in range(n)]
        self.unread = [[0] for _ in range(n)]
        self.pending: list[list[int]] = [[] for _ in range(n)]
        self.pending_mark = [0] * n
        self.recset: list[set[Path]] = [{(v,)} for v in range(n)]
        self.up_cursor = [0] * n
        self.rounds = 0

    # -- helpers owned by vertex v ------------------------------------------

    def _set_local(self, v: int, value: bool) -> None:
        if self.local[v] != value:
            if self.monitor is not None:
                self.monitor.on_local_store(v, value)
            self.local[v] = value

    def _load_local(self, v: int) -> bool:
        val = self.local[v]
        if self.monitor is not None:
            self.monitor.on_local_load(v)
        return val

    def _load_public(self, v: int) -> bool:
        val = self.public[v]
        if self.monitor is not None:
            self.monitor.on_public_load(v)
        return val

    def _collect(self, v: int) -> bool:
        """Move records that every successor has read out of ``unread`` and
        retire the extended ones.  Returns whether anything changed."""
        st = self.store
        slots = self.my_slots[v]
        unread = self.unread[v]
        # Successors read a table in index order and ``unread`` is sorted, so
        # the first record some successor has not read ends the scan.
        k = 0
        while k < len(unread):
            i = unread[k]
            rec = st.record(v, i, v)
            if not all(st.flag(rec, s, v) for s in slots):
                break
            k += 1
            if not slots or rec[CYCLIC]:
                continue  # end records and cycles are kept for finalization
            if st.flag(rec, EXTENDED, v):
                st.tombstone(v, i, v)
            else:
                self.pending[v].append(i)
        if k:
            self.unread[v] = unread[k:]
        return k > 0

    def _prune_covered(self, v: int) -> bool:
        """Retire pending records covered by a one-longer record at ``v``.
        Only rechecked when the list has grown since the last look."""
        size = len(self.store.tables[v])
        if not self.pending[v] or self.pending_mark[v] == size + len(self.pending[v]):
            return False
        st = self.store
        recs = self.recset[v]
        keep = []
        changed = False
        for i in self.pending[v]:
            seq = rec_seq(st.record(v, i, v))
            if any((x,) + seq in recs for x in self.pred[seq[0]]):
                st.tombstone(v, i, v)
                changed = True
            else:
                keep.append(i)
        self.pending[v] = keep
        self.pending_mark[v] = size + len(keep)
        return changed

    def _upstream_quiet(self, v: int) -> bool:
        """All upstream PublicFlags are down.  Flags never rise again once
        down, so the scan resumes where it last stopped."""
        ups = self.upstream[v]
        i = self.up_cursor[v]
        while i < len(ups):
            if self._load_public(ups[i]):
                self.up_cursor[v] = i
                return False
            i += 1
        self.up_cursor[v] = i
        return True

    def _peers_quiet(self, v: int) -> bool:
        """Double collect over (table size, LocalFlag) of the component."""
        st = self.store
        first = []
        for p in self.peers[v]:
            if self._load_local(p):
                return False
            first.append(st.size(p, v))
        for p, size in zip(self.peers[v], first):
            if self._load_local(p) or st.size(p, v) != size:
                return False
        return True

    # -- the update -----------------------------------------------------

    def update_vertex(self, v: int) -> bool:
        st = self.store
        mon = self.monitor
        progressed = self._collect(v)
        progressed |= self._prune_covered(v)

        recs = self.recset[v]
        cursor = self.cursor[v]
        for u in self.pred[v]:
            start = cursor[u]
            end = st.size(u, v)
            if start >= end:
                continue
            slot = self.read_slot[u][v]
            for i in range(start, end):
                q = st.record(u, i, v)
                seq = st.seq(q, v)
                if not st.flag(q, CYCLIC, v) and (v == seq[0] or v not in seq):
                    self._set_local(v, True)
                    new = seq + (v,)
                    h = st.publish(v, st.new_record(new, v), v)
                    recs.add(new)
                    self.unread[v].append(h[1])
                    st.set_flag(q, EXTENDED, v)
                st.set_flag(q, slot, v)
                if mon is not None:
                    mon.on_read_event(q, v)
            cursor[u] = end
            progressed = True

        progressed |= self._collect(v)
        if not self.unread[v]:
            if self.local[v]:
                self._set_local(v, False)
                progressed = True
            if (self.public[v]
                    and self._upstream_quiet(v)
                    and self._peers_quiet(v)):
                self._prune_covered(v)
                if mon is not None:
                    mon.on_public_store(v, False)
                self.public[v] = False
                progressed = True
        return progressed

    def is_fixed_point(self) -> bool:
        st = self.store
        for v in range(self.n):
            if self.public[v] or self.unread[v]:
                return False
            if any(self.cursor[v][u] != len(st.tables[u]) for u in self.pred[v]):
                return False
        return True

    # -- schedules ------------------------------------------------------

    def _budget(self, override: int | None) -> int:
        if override is not None:
            return override
        env = _budget_override()
        if env is not None:
            return env
        return default_budget(self.n, self.store.max_list_length())

    def run(self, sched: Schedule) -> PathStore:
        if sched.mode == "round-robin":
            self._run_round_robin(sched)
        elif sched.mode == "seeded-random":
            self._run_random(sched)
        else:
            self._run_parallel(sched)
        if not self.is_fixed_point():
            raise TerminationError("workers stopped before reaching the fixed point")
        if self.monitor is not None:
            self.monitor.end_run()
        return self.store

    def _run_round_robin(self, sched: Schedule) -> None:
        while any(self.public):
            self.rounds += 1
            if self.rounds > self._budget(sched.budget):
                raise BudgetExceeded(f"no fixed point after {self.rounds - 1} sweeps")
            for v in range(self.n):
                if self.public[v]:
                    self.update_vertex(v)

    def _run_random(self, sched: Schedule) -> None:
        rng = random.Random(sched.seed)
        active = [v for v in range(self.n) if self.public[v]]
        while active:
            self.rounds += 1
            if self.rounds > self._budget(sched.budget):
                raise BudgetExceeded(f"no fixed point after {self.rounds - 1} rounds")
            for _ in range(self.n):
                if not active:
                    break
                k = rng.randrange(len(active))
                v = active[k]
                self.update_vertex(v)
                if not self.public[v]:
                    active.pop(k)

    def _run_parallel(self, sched: Schedule) -> None:
        p = min(sched.workers, self.n)
        owned = _ownership(self.n, p)
        # Only sweeps that change something count against the budget; an
        # idle worker may legitimately sweep many times while the worker it
        # depends on is descheduled.  A genuine stall is caught by the
        # no-progress timeout instead.
        busy = [0] * len(owned)
        last_progress = [time.monotonic()] * len(owned)
        abort = threading.Event()
        errors: list[BaseException] = []
        mon = self.monitor
        stall = sched.stall_timeout
        # Idle workers park until another worker has something new for them.
        # A worker announces its output once, when it runs out of work or
        # exits, rather than after every sweep: on a single core each wakeup
        # costs an interpreter handoff.  This is a scheduling aid only; the
        # store protocol never waits, and the timeout keeps parked workers
        # polling even without an announcement.
        wake = threading.Condition()
        epoch = [0]

        def announce() -> None:
            with wake:
                epoch[0] += 1
                wake.notify_all()

        def worker(w: int, token) -> None:
            dirty = False
            try:
                if mon is not None:
                    mon.on_thread_start(token)
                mine = owned[w]
                while not abort.is_set():
                    active = [v for v in mine if self.public[v]]
                    if not active:
                        break
                    seen = epoch[0]
                    progressed = False
                    for v in active:
                        progressed |= self.update_vertex(v)
                    if progressed:
                        dirty = True
                        busy[w] += 1
                        last_progress[w] = time.monotonic()
                        budget = self._budget(sched.budget)
                        if busy[w] > budget:
                            raise BudgetExceeded(f"no fixed point after {budget} productive sweeps")
                        continue
                    if dirty:
                        dirty = False
                        announce()
                        continue
                    if time.monotonic() - max(last_progress) > stall:
                        raise BudgetExceeded(f"no progress by any worker for {stall}s")
                    with wake:
                        if epoch[0] == seen and not abort.is_set():
                            wake.wait(IDLE_WAIT)
            except BaseException as exc:  # surfaced in the caller
                abort.set()
                errors.append(exc)
            finally:
                announce()
                if mon is not None:
                    threading.current_thread().exit_token = mon.on_thread_exit()

        threads = []
        for w in range(len(owned)):
            token = mon.on_fork() if mon is not None else None
            threads.append(threading.Thread(target=worker, args=(w, token), daemon=True))
        for th in threads:
            th.start()
        for th in threads:
            th.join()
            if mon is not None:
                mon.on_join(th.exit_token)
        self.rounds = max(busy)
        if errors:
            raise errors[0]


def _ownership(n: int, p: int) -> list[list[int]]:
    """Contiguous blocks; interleaved ownership measured slower because
    workers hand off more often."""
    block = -(-n // p)
    return [list(range(w * block, min(n, (w + 1) * block))) for w in range(p)]


def run_vertex_generation(g: Cfg, sched: Schedule = Schedule(), monitor=None) -> PathStore:
    gen = VertexGenerator(g, monitor)
    store = gen.run(sched)
    store.rounds = gen.rounds
    return store


def finalize_pps(store: PathStore, g: Cfg) -> set[Path]:
    """Live, never-extended records that are maximal in ``g``."""
    out = set()
    for v in range(store.n):
        for _, rec in store.iterate_live(v):
            if rec[EXTENDED]:
                continue
            seq = rec_seq(rec)
            if is_prime_path(g, seq):
                out.add(seq)
    return out


def generate_pps(g: Cfg, sched: Schedule = Schedule(), monitor=None) -> set[Path]:
    return finalize_pps(run_vertex_generation(g, sched, monitor), g)


def sort_paths(paths: Iterable[Path]) -> list[Path]:
    return sorted(paths)
