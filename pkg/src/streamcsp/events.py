"""Constraint streams: insert/delete events with strict-turnstile checking."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator

from .core import Constraint, CSPError, Instance, TruthTable


class TurnstileError(CSPError):
    pass


@dataclass(frozen=True)
class StreamEvent:
    op: int  # +1 insert, -1 delete
    indices: tuple[int, ...]
    signs: tuple[int, ...]

    def __post_init__(self):
        if self.op not in (1, -1):
            raise CSPError("event op must be +1 or -1")
        Constraint(self.indices, self.signs)  # validates shape

    @property
    def key(self) -> tuple:
        return self.indices, self.signs


@dataclass
class Stream:
    n: int
    k: int
    events: list[StreamEvent] = field(default_factory=list)

    def __iter__(self) -> Iterator[StreamEvent]:
        return iter(self.events)

    def __len__(self) -> int:
        return len(self.events)

    def extend(self, events: Iterable[StreamEvent]) -> "Stream":
        self.events.extend(events)
        return self

    def check_event(self, e: StreamEvent) -> None:
        if len(e.indices) != self.k:
            raise CSPError(f"event arity {len(e.indices)} differs from k={self.k}")
        for j in e.indices:
            if not 0 <= j < self.n:
                raise CSPError(f"variable {j} out of range for n={self.n}")


class TurnstileCounter:
    """Running multiplicity per constraint; rejects the first deletion that
    would make one negative."""

    def __init__(self):
        self.counts: Counter = Counter()
        self.total = 0

    def push(self, e: StreamEvent) -> None:
        c = self.counts[e.key] + e.op
        if c < 0:
            shown = " ".join(str(j + 1) for j in e.indices)
            raise TurnstileError(f"deletion of absent constraint on variables {shown} "
                                 f"with signs {e.signs}")
        if c:
            self.counts[e.key] = c
        else:
            del self.counts[e.key]
        self.total += e.op


def validate(stream: Stream) -> TurnstileCounter:
    tc = TurnstileCounter()
    for e in stream:
        stream.check_event(e)
        tc.push(e)
    return tc


def to_instance(stream: Stream, f: TruthTable | None = None) -> Instance:
    """Net multiset of a valid stream as a weighted instance."""
    if f is not None and f.k != stream.k:
        raise CSPError("stream arity differs from f")
    tc = validate(stream)
    items = [(Constraint(j, s), Fraction(c)) for (j, s), c in sorted(tc.counts.items())]
    return Instance(stream.n, tuple(items))


def from_instance(psi: Instance) -> Stream:
    """Insert-only stream for an instance with integer weights."""
    events = []
    for c, w in psi.constraints:
        if w.denominator != 1:
            raise CSPError("stream form needs integer weights")
        events.extend([StreamEvent(1, c.indices, c.signs)] * int(w))
    return Stream(psi.n, psi.k, events)
