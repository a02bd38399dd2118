"""Window truncation used for train-time augmentation and evaluation sweeps.

Eleven fixed strategies pair a pre-snap start offset with an ending
event.  There is deliberately no (0, snap) entry: that window would be a
single frame of no value.  At train time a draw is a fixed strategy with
probability 0.6 (uniform over the eleven) and otherwise a fully random
in-bounds frame pair.
"""

from __future__ import annotations

from dataclasses import dataclass

from .play_data import PRE_SNAP_FRAMES, Window

END_EVENTS = ("snap", "pass_forward", "pass_arrival")

FIXED_PROB = 0.6


@dataclass(frozen=True)
class TruncationStrategy:
    """Start offset relative to snap plus an end: event name or raw frame."""

    start: int
    end: str | int

    @property
    def name(self):
        end = self.end if isinstance(self.end, str) else f"f{self.end}"
        return f"({self.start},{end})"


_FIXED = tuple(
    TruncationStrategy(start, end)
    for start in (-30, -20, -10, 0)
    for end in END_EVENTS
    if not (start == 0 and end == "snap")
)


def fixed_strategies():
    """The 11 fixed (start, end-event) pairs, in sweep order."""
    return _FIXED


def sample_truncation(rng, pass_arrival):
    """Draw one train-time strategy; random draws need the play's arrival frame.

    ``pass_arrival`` is snap-relative.  Random windows satisfy
    -PRE_SNAP_FRAMES <= start < end <= pass_arrival.
    """
    if pass_arrival < 1 - PRE_SNAP_FRAMES:
        raise ValueError(f"pass_arrival {pass_arrival} leaves no room for a window")
    if rng.random() < FIXED_PROB:
        return _FIXED[rng.integers(len(_FIXED))]
    start = int(rng.integers(-PRE_SNAP_FRAMES, pass_arrival))
    end = int(rng.integers(start + 1, pass_arrival + 1))
    return TruncationStrategy(start, end)


def resolve(strategy, window):
    """Snap-relative (start, end) frame pair for a strategy on a play window."""
    if isinstance(strategy.end, str):
        if strategy.end == "snap":
            end = 0
        elif strategy.end == "pass_forward":
            end = window.pass_forward
        elif strategy.end == "pass_arrival":
            end = window.pass_arrival
        else:
            raise ValueError(f"unknown end event {strategy.end!r}")
    else:
        end = strategy.end
    return strategy.start, end


def apply_truncation(seq, window, strategy):
    """Slice a feature tensor [A, T, F] down to a strategy's window.

    ``window`` describes what ``seq`` currently covers.  Frames keep their
    order; truncation only ever drops frames from the ends.  An empty or
    out-of-range result raises ValueError.
    """
    start, end = resolve(strategy, window)
    if start < window.start or end > window.end:
        raise ValueError(
            f"strategy {strategy.name} spans [{start}, {end}] outside window [{window.start}, {window.end}]"
        )
    if end < start:
        raise ValueError(f"strategy {strategy.name} yields an empty window")
    lo = start - window.start
    hi = end - window.start
    out = seq[:, lo : hi + 1]
    new_window = Window(start, end, window.pass_forward, window.pass_arrival)
    return out, new_window
