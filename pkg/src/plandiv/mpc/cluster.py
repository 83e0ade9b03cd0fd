"""Deterministic MPC simulator with word-level space accounting.

Machines exchange messages in synchronous rounds: everything sent in round
t is visible at round t+1, and each machine's held words (store + staged
outbox, then store + delivered inbox) must stay within slack * S at every
barrier.  Word counts follow the model's accounting: one word per vertex
id, edge endpoint, weight, coordinate, or message header field; structural
pointers of rebuilt local data structures are not charged.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from ..errors import SpaceExceeded, UndeliverableMessage

__all__ = ["ClusterConfig", "Machine", "RoundTrace", "Cluster", "run_program", "word_count"]


def word_count(obj):
    """Words of a message or store payload under the model accounting."""
    if obj is None:
        return 0
    if isinstance(obj, (int, float, str, bool)):
        return 1
    if isinstance(obj, (tuple, list, set, frozenset)):
        return sum(word_count(x) for x in obj)
    if isinstance(obj, dict):
        return sum(word_count(k) + word_count(v) for k, v in obj.items())
    custom = getattr(obj, "mpc_words", None)
    if custom is not None:
        return custom() if callable(custom) else custom
    raise TypeError(f"cannot count words of {type(obj).__name__}")


@dataclass(frozen=True)
class ClusterConfig:
    S: int
    M: int
    fanout: int = 0          # 0: auto, max(2, ceil(M ** (1/3)))
    slack: float = 8.0
    seed: object = 0

    def resolved_fanout(self):
        if self.fanout:
            return self.fanout
        return max(2, math.ceil(self.M ** (1.0 / 3.0)))

    @property
    def budget(self):
        return int(self.slack * self.S)


class Machine:
    __slots__ = ("id", "store", "_store_words", "inbox", "peak_words")

    def __init__(self, mid):
        self.id = mid
        self.store = {}
        self._store_words = {}
        self.inbox = []
        self.peak_words = 0

    def put(self, key, payload, words=None):
        self.store[key] = payload
        self._store_words[key] = word_count(payload) if words is None else words
        return self._store_words[key]

    def get(self, key, default=None):
        return self.store.get(key, default)

    def pop(self, key):
        self._store_words.pop(key, None)
        return self.store.pop(key, None)

    @property
    def words(self):
        return sum(self._store_words.values())

    def note_peak(self, extra=0):
        w = self.words + extra
        if w > self.peak_words:
            self.peak_words = w
        return w


@dataclass
class RoundTrace:
    round: int
    phase: str
    max_words: int
    message_count: int
    message_words: int


class Cluster:
    """M machines, synchronous rounds, deterministic for a fixed seed."""

    def __init__(self, cfg: ClusterConfig):
        self.cfg = cfg
        self.machines = [Machine(i) for i in range(cfg.M)]
        self.round = 0
        self._trace = {}
        self.restarts = 0

    # -- deterministic per-(machine, round, tag) randomness ------------------

    def rng(self, mid, tag):
        return random.Random(f"{self.cfg.seed}|{mid}|{self.round}|{tag}")

    # -- rounds ---------------------------------------------------------------

    def _record(self, phase, max_words, n_msgs, msg_words):
        row = self._trace.get(self.round)
        if row is None:
            self._trace[self.round] = RoundTrace(
                self.round, phase, max_words, n_msgs, msg_words
            )
        else:
            row.max_words = max(row.max_words, max_words)
            row.message_count += n_msgs
            row.message_words += msg_words
            if phase not in row.phase:
                row.phase = f"{row.phase}+{phase}"

    def trace(self):
        return [self._trace[r] for r in sorted(self._trace)]

    def exchange(self, sends, phase=""):
        """One synchronous round: sends maps source machine id to a list of
        (dest, payload).  Asserts outbox and inbox budgets."""
        budget = self.cfg.budget
        peak = 0
        n_msgs = 0
        msg_words = 0
        staged = []
        for src in sorted(sends):
            out = sends[src]
            if not out:
                continue
            ow = 0
            for dest, payload in out:
                if not 0 <= dest < self.cfg.M:
                    raise UndeliverableMessage(f"machine {dest} does not exist")
                w = word_count(payload)
                ow += w
                staged.append((src, dest, payload, w))
            m = self.machines[src]
            total = m.note_peak(ow)
            peak = max(peak, total)
            if total > budget:
                raise SpaceExceeded(src, self.round, total, budget)
            n_msgs += len(out)
            msg_words += ow
        inbox_words = {}
        for src, dest, payload, w in staged:
            self.machines[dest].inbox.append((src, payload))
            inbox_words[dest] = inbox_words.get(dest, 0) + w
        for dest, iw in inbox_words.items():
            m = self.machines[dest]
            total = m.note_peak(iw)
            peak = max(peak, total)
            if total > budget:
                raise SpaceExceeded(dest, self.round, total, budget)
        for m in self.machines:
            peak = max(peak, m.note_peak())
        self._record(phase, peak, n_msgs, msg_words)
        self.round += 1

    def take_inbox(self, mid):
        msgs = self.machines[mid].inbox
        self.machines[mid].inbox = []
        msgs.sort(key=lambda sm: sm[0])
        return msgs

    def check_store(self, mid):
        m = self.machines[mid]
        total = m.note_peak()
        if total > self.cfg.budget:
            raise SpaceExceeded(mid, self.round, total, self.cfg.budget)

    # -- collective primitives ------------------------------------------------

    @staticmethod
    def _tree_depth(rel, f):
        d = 0
        while rel:
            rel = (rel - 1) // f
            d += 1
        return d

    def group_broadcast(self, lo, hi, payload, phase="broadcast", words=None):
        """Pipelined chunked heap-tree broadcast from machine lo to [lo, hi).

        The payload streams down the tree in chunks of at most ~6% of the
        budget, so per-round forwarding traffic stays within a fixed budget
        share while large payloads avoid chain-depth round counts: rounds =
        tree depth + chunks - 1."""
        size = hi - lo
        w = word_count(payload) if words is None else words
        key = f"__bcast:{phase}"
        self.machines[lo].put(key, payload, words=w)
        if size <= 1:
            return 0
        budget = self.cfg.budget
        q = max(1, math.ceil(w / max(1.0, 0.05 * budget)))
        chunk_w = max(1, math.ceil(w / q))
        f = self.cfg.resolved_fanout()
        while f > 1 and f * chunk_w > 0.15 * budget:
            f -= 1
        maxd = self._tree_depth(size - 1, f)
        depth = [self._tree_depth(rel, f) for rel in range(size)]
        got = [0] * size  # chunks received so far per relative index
        got[0] = q

        class _Chunk:
            __slots__ = ("idx",)

            def __init__(self, idx):
                self.idx = idx

            def mpc_words(self):
                return chunk_w

        rounds = maxd + q - 1
        for r in range(rounds):
            sends = {}
            for rel in range(size):
                c = r - depth[rel]
                if 0 <= c < q and got[rel] > c:
                    outs = []
                    for k in range(1, f + 1):
                        child = rel * f + k
                        if child < size:
                            outs.append((lo + child, _Chunk(c)))
                    if outs:
                        sends[lo + rel] = outs
            self.exchange(sends, phase=phase)
            for rel in range(1, size):
                m = self.machines[lo + rel]
                if m.inbox:
                    got[rel] += len(m.inbox)
                    m.inbox = []
                    if got[rel] >= q:
                        m.pop(f"__bpart:{phase}")
                        m.put(key, payload, words=w)
                    else:
                        m.put(f"__bpart:{phase}", got[rel], words=got[rel] * chunk_w)
        return rounds

    def collect_broadcast(self, lo, hi, phase="broadcast"):
        return [self.machines[mid].pop(f"__bcast:{phase}") for mid in range(lo, hi)]

    def group_converge(self, lo, hi, op, values, phase="converge"):
        """Converge-cast fold of per-machine values to machine lo.

        op must be associative (spot-checked); children fold into parents in
        machine order, so the root value is the ordered fold."""
        size = hi - lo
        if size == 0:
            return None
        vals = {rel: values[rel] for rel in range(size)}
        if size == 1:
            return vals[0]
        if size >= 3:
            a, b, c = values[0], values[1], values[2]
            assert op(op(a, b), c) == op(a, op(b, c)), "op must be associative"
        f = self.cfg.resolved_fanout()
        maxd = self._tree_depth(size - 1, f)
        for d in range(maxd, 0, -1):
            sends = {}
            for rel in range(size):
                if rel in vals and self._tree_depth(rel, f) == d:
                    sends.setdefault(lo + rel, []).append(
                        (lo + (rel - 1) // f, vals.pop(rel))
                    )
            self.exchange(sends, phase=phase)
            for rel in list(vals):
                if self._tree_depth(rel, f) == d - 1:
                    for _src, payload in self.take_inbox(lo + rel):
                        vals[rel] = op(vals[rel], payload)
        return vals[0]


def run_program(cfg: ClusterConfig, program, shards=None):
    """Run `program(cluster)` on a fresh cluster; returns (output, trace).

    shards: optional list (per machine) of (key, payload) pairs loaded
    before round 0; the initial distribution is charged to the store but
    costs no rounds.
    """
    cluster = Cluster(cfg)
    if shards:
        for mid, items in enumerate(shards):
            for key, payload in items:
                cluster.machines[mid].put(key, payload)
            cluster.check_store(mid)
    out = program(cluster)
    return out, cluster.trace()
