"""Deferred-sample buffer (the when-to-learn stage).

Labeled samples that passed selection but triggered neither growth nor
adaptation wait here and re-enter the learning pipeline at end-of-stream or
when the system is idle.  The buffer is bounded FIFO; replay never
re-enqueues, so every sample is learned at most twice and buffered at most
once.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .model import StreamSample


@dataclass
class ReservedSample:
    sample: StreamSample
    stored_at: int
    reason: str = "no_grow_no_adapt"

    def __post_init__(self):
        if self.sample.label is None:
            raise ValueError("reserved samples must carry a label")


class ReservedBuffer:
    """Bounded FIFO of deferred labeled samples."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("capacity must be at least 1")
        self.capacity = capacity
        self._items: deque[ReservedSample] = deque(maxlen=capacity)

    def __len__(self) -> int:
        return len(self._items)

    def reserve(self, sample: StreamSample, stored_at: int) -> None:
        self._items.append(ReservedSample(sample, stored_at))

    def drain(self) -> list[ReservedSample]:
        """Remove and return all entries in arrival order."""
        items = list(self._items)
        self._items.clear()
        return items
