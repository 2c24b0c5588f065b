"""Path records and the three-level append-only path store.

A record is a flat list::

    [valid, extended, left_read, right_read, cyclic, length, v0, v1, ...]

Level 1 is the per-vertex table directory, level 2 is each vertex's table of
record references with a parallel tombstone bit array, level 3 is the records
themselves.  Records live for the whole run; tombstoning only hides them.

Every flag is a separate cell that is only ever stored ``True``; there are no
read-modify-write operations.  A worker publishes a record by writing its
contents, then storing ``valid``, then appending the reference to its table.
An optional monitor observes every access (see ``ppforge.audit``).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

VALID, EXTENDED, LEFT_READ, RIGHT_READ, CYCLIC = range(5)
LENGTH = 5
SEQ = 6
FLAG_NAMES = ("PathValidity", "PathExtension", "LeftSuccessorRead", "RightSuccessorRead", "CyclicPath")
SLOT_BYTES = 4

Record = list
Handle = tuple[int, int]


class StoreOverflow(RuntimeError):
    def __init__(self, vertex: int, length: int, capacity: int):
        self.vertex = vertex
        super().__init__(f"record of length {length} at vertex {vertex} exceeds capacity {capacity}")


class ProtocolViolation(AssertionError):
    """A store access broke the single-writer or publication rules."""


def is_simple(seq: Sequence[int]) -> bool:
    n = len(seq)
    if n == 0:
        return False
    if n > 1 and seq[0] == seq[-1]:
        body = seq[:-1]
        return len(set(body)) == len(body)
    return len(set(seq)) == n


def make_record(seq: Sequence[int]) -> Record:
    """A fully written, unpublished record.  ``valid`` is still false."""
    cyclic = len(seq) >= 2 and seq[0] == seq[-1]
    return [False, False, False, False, cyclic, len(seq), *seq]


def rec_seq(rec: Record) -> tuple[int, ...]:
    return tuple(rec[SEQ:])


@dataclass
class StoreStats:
    allocated: int
    live: int
    tombstoned: int
    allocated_bytes: int
    live_bytes: int
    peak_bytes: int

    def as_dict(self) -> dict:
        return dict(self.__dict__)


class PathStore:
    def __init__(self, num_vertices: int, capacity: int | None = None, monitor=None):
        if num_vertices < 1:
            raise ValueError("store needs at least one vertex")
        self.n = num_vertices
        self.capacity = capacity if capacity is not None else num_vertices + 1
        self.monitor = monitor
        self.tables: list[list[Record]] = [[] for _ in range(num_vertices)]
        self.dead: list[list[bool]] = [[] for _ in range(num_vertices)]
        # bookkeeping is per vertex so each counter has a single writer
        self.live_count = [0] * num_vertices
        self._slots = [0] * num_vertices
        self._dead_slots = [0] * num_vertices
        for v in range(num_vertices):
            rec = self.new_record((v,), v)
            self.publish(v, rec, v)

    # -- writer side -----------------------------------------------------

    def new_record(self, seq: Sequence[int], writer: int) -> Record:
        if len(seq) > self.capacity:
            raise StoreOverflow(writer, len(seq), self.capacity)
        rec = make_record(seq)
        if self.monitor is not None:
            self.monitor.on_data_write(rec, writer)
        return rec

    def publish(self, v: int, rec: Record, writer: int) -> Handle:
        """Mark ``rec`` valid, then make it visible in ``v``'s table."""
        mon = self.monitor
        if mon is not None:
            mon.on_publish(v, rec, writer)
            mon.on_flag_store(rec, VALID, writer)
        rec[VALID] = True
        table = self.tables[v]
        i = len(table)
        self.dead[v].append(False)
        if mon is not None:
            mon.on_slot_write(v, i, writer)
            mon.on_size_store(v, writer)
        table.append(rec)
        self.live_count[v] += 1
        self._slots[v] += len(rec)
        return (v, i)

    append_path = publish

    def set_flag(self, rec: Record, which: int, writer: int) -> None:
        if which == VALID:
            raise ProtocolViolation("validity is only set by publish")
        if self.monitor is not None:
            self.monitor.on_flag_store(rec, which, writer)
        rec[which] = True

    def tombstone(self, v: int, i: int, writer: int) -> None:
        if self.monitor is not None:
            self.monitor.on_tombstone(v, i, self.tables[v][i], writer)
        if not self.dead[v][i]:
            self.dead[v][i] = True
            self.live_count[v] -= 1
            self._dead_slots[v] += len(self.tables[v][i])

    # -- reader side -----------------------------------------------------

    def size(self, v: int, reader: int) -> int:
        n = len(self.tables[v])
        if self.monitor is not None:
            self.monitor.on_size_load(v, reader)
        return n

    def record(self, v: int, i: int, reader: int) -> Record:
        rec = self.tables[v][i]
        if self.monitor is not None:
            self.monitor.on_slot_read(v, i, reader)
        return rec

    def flag(self, rec: Record, which: int, reader: int) -> bool:
        val = rec[which]
        if self.monitor is not None:
            self.monitor.on_flag_load(rec, which, reader)
        return val

    def seq(self, rec: Record, reader: int) -> tuple[int, ...]:
        if self.monitor is not None:
            self.monitor.on_data_read(rec, reader)
        return tuple(rec[SEQ:])

    def is_dead(self, v: int, i: int) -> bool:
        return self.dead[v][i]

    def iterate_live(self, v: int) -> Iterator[tuple[Handle, Record]]:
        """Visible records of ``v``: present, not tombstoned and valid."""
        table = self.tables[v]
        dead = self.dead[v]
        for i in range(len(table)):
            rec = table[i]
            if not dead[i] and rec[VALID]:
                yield (v, i), rec

    def live_paths(self, v: int) -> list[tuple[int, ...]]:
        return [rec_seq(r) for _, r in self.iterate_live(v)]

    def max_list_length(self) -> int:
        return max(self.live_count)

    def stats(self) -> StoreStats:
        allocated = sum(len(t) for t in self.tables)
        live = sum(self.live_count)
        alloc_bytes = sum(self._slots) * SLOT_BYTES
        return StoreStats(
            allocated=allocated,
            live=live,
            tombstoned=allocated - live,
            allocated_bytes=alloc_bytes,
            live_bytes=alloc_bytes - sum(self._dead_slots) * SLOT_BYTES,
            # nothing is reclaimed during a run, so the peak is everything allocated
            peak_bytes=alloc_bytes,
        )


def store_create(num_vertices: int, monitor=None) -> PathStore:
    return PathStore(num_vertices, monitor=monitor)
