"""FSR, Jain fairness, switch latency and trial aggregation.

Degenerate inputs (no attempts, all-zero counts) yield ``None`` rather than a
number; reports render it as an empty CSV field / JSON null.
"""
from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from typing import Iterable, Sequence

Z_95 = 1.959963984540054
DEFAULT_SWITCH_WINDOW = 5


@dataclass(frozen=True)
class Decision:
    """One decision epoch of one device."""

    t: int
    time_ms: float
    channel: int
    sf: int
    success: bool


@dataclass(frozen=True)
class SwitchLatency:
    device: int
    change_ms: float
    decisions: int
    censored: bool = False


@dataclass
class MetricsRecord:
    attempts: int = 0
    successes: int = 0
    fsr_series: list[tuple[float, float]] = field(default_factory=list)
    received_per_channel: dict[int, int] = field(default_factory=dict)
    received_per_pair: dict[tuple[int, int], int] = field(default_factory=dict)
    switch_latencies: list[SwitchLatency] = field(default_factory=list)
    # channels the fairness index is computed over (the gateway's channels)
    fairness_channels: tuple[int, ...] = ()

    def record(self, time_ms: float, channel: int, sf: int, success: bool) -> None:
        self.attempts += 1
        if success:
            self.successes += 1
            self.received_per_channel[channel] = self.received_per_channel.get(channel, 0) + 1
            key = (channel, sf)
            self.received_per_pair[key] = self.received_per_pair.get(key, 0) + 1
        self.fsr_series.append((time_ms, self.successes / self.attempts))

    @property
    def fsr(self) -> float | None:
        return fsr(self.successes, self.attempts)

    @property
    def fairness(self) -> float | None:
        chans = self.fairness_channels or tuple(sorted(self.received_per_channel))
        return fairness([self.received_per_channel.get(c, 0) for c in chans])

    @property
    def mean_switch_latency(self) -> float | None:
        if not self.switch_latencies:
            return None
        return sum(s.decisions for s in self.switch_latencies) / len(self.switch_latencies)


def fsr(successes: int, attempts: int) -> float | None:
    if attempts == 0:
        return None
    return successes / attempts


def fairness(counts: Sequence[float]) -> float | None:
    """Jain's index (sum x)^2 / (n * sum x^2); ``None`` if every count is zero."""
    if not counts:
        return None
    total = sum(counts)
    sq = sum(c * c for c in counts)
    if sq == 0:
        return None
    return total * total / (len(counts) * sq)


def availability_changes(windows) -> list[tuple[float, frozenset[int], float]]:
    """(change time ms, newly available set, segment end ms) per schedule change.

    ``windows`` is a sequence of objects with ``from_min``, ``to_min`` and
    ``channels``. Windows that repeat the previous set are not changes.
    """
    out = []
    for prev, cur in zip(windows, windows[1:]):
        if set(prev.channels) != set(cur.channels):
            out.append([cur.from_min * 60_000.0, frozenset(cur.channels), math.inf])
    for i in range(len(out) - 1):
        out[i][2] = out[i + 1][0]
    return [tuple(x) for x in out]


def switch_latency(
    log: Sequence[Decision],
    changes: Iterable[tuple[float, frozenset[int], float]],
    window: int = DEFAULT_SWITCH_WINDOW,
    device: int = 0,
) -> list[SwitchLatency]:
    """Decisions needed after each change before ``window`` consecutive compliant picks.

    Only decisions taken between the change and the next change count.  A
    device that never settles inside that segment gets the segment's epoch
    count and ``censored=True``.
    """
    out = []
    for change_ms, allowed, end_ms in changes:
        seg = [d for d in log if change_ms <= d.time_ms < end_ms]
        run = 0
        found = None
        for i, d in enumerate(seg):
            if d.channel in allowed:
                run += 1
                if run == window:
                    found = i - window + 1
                    break
            else:
                run = 0
        if found is None and seg and run == len(seg):
            # compliant throughout a segment shorter than the window
            found = 0
        if found is None:
            out.append(SwitchLatency(device, change_ms, len(seg), censored=True))
        else:
            out.append(SwitchLatency(device, change_ms, found))
    return out


@dataclass(frozen=True)
class Summary:
    n: int
    mean: float | None
    std: float | None
    ci95: float | None

    def as_dict(self) -> dict:
        return {"n": self.n, "mean": self.mean, "std": self.std, "ci95": self.ci95}


def summarize(values: Iterable[float | None]) -> Summary:
    """Mean, sample std and normal-approximation 95% CI half-width."""
    xs = [v for v in values if v is not None]
    if not xs:
        return Summary(0, None, None, None)
    mean = statistics.fmean(xs)
    if len(xs) < 2:
        return Summary(len(xs), mean, None, None)
    std = statistics.stdev(xs)
    return Summary(len(xs), mean, std, Z_95 * std / math.sqrt(len(xs)))


def aggregate_trials(records: Sequence[MetricsRecord]) -> dict[str, Summary]:
    if len(records) < 2:
        raise ValueError("aggregate_trials needs at least two records")
    return {
        "fsr": summarize(r.fsr for r in records),
        "fairness": summarize(r.fairness for r in records),
        "mean_switch_latency": summarize(r.mean_switch_latency for r in records),
    }
