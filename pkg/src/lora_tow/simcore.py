"""Discrete-event simulation of LoRa devices sharing a multichannel gateway.

Each device runs decide -> CCA -> transmit -> ACK / retransmit -> feedback
-> sleep once per transmission interval. Wi-SUN interferers transmit
short frames on a scheduled channel after their own listen-before-talk.

Collisions are resolved when a frame is put on the medium: every frame
already on air that overlaps it in time is checked pairwise. Whether the
gateway actually decodes a frame is settled at the frame's end, once no
further overlap is possible.

All randomness flows from per-device, per-interferer and medium streams
derived from ``(master seed, trial, stream, index)``, so a run is a pure
function of (config, seed, trial).
"""
from __future__ import annotations

import hashlib
import heapq
import json
import math
import random
from dataclasses import dataclass, field
from typing import IO, Sequence

from .airtime import InterferenceKernel, time_on_air
from .bandit import JointSelector
from .metrics import Decision, MetricsRecord, availability_changes, switch_latency
from .scenario import MINUTE_MS, CollisionConfig, ScenarioConfig

LORA = "lora"
WISUN = "wisun"

# Simultaneous events run in this order: frames ending at t leave the air
# before anybody senses the channel at t.
_FRAME_END = 0
_WISUN_TICK = 1
_DEVICE = 2

_STREAM_DEVICE = 0
_STREAM_MEDIUM = 1
_STREAM_WISUN = 2


def derive_seed(master: int, trial: int, stream: int, index: int) -> int:
    """64-bit seed for one random stream.

    The seed depends only on its own coordinates, so adding trials or devices
    never changes the streams of existing ones.
    """
    key = f"{master}:{trial}:{stream}:{index}".encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")


@dataclass(slots=True, eq=False)
class FrameEvent:
    source: int
    kind: str
    channel: int
    sf: int | None
    start_ms: float
    duration_ms: float
    lost: bool = False
    decoded: bool | None = None

    @property
    def end_ms(self) -> float:
        return self.start_ms + self.duration_ms

    def overlaps(self, other: "FrameEvent") -> bool:
        return self.start_ms < other.end_ms and other.start_ms < self.end_ms

    def as_record(self) -> dict:
        return {
            "time_ms": self.start_ms, "source": self.source, "kind": self.kind,
            "channel": self.channel, "sf": self.sf, "decoded": self.decoded,
        }


class GatewaySchedule:
    """Availability windows (ms) plus the set of (channel, sf) demodulators."""

    def __init__(self, windows: Sequence[tuple[float, float, frozenset[int]]],
                 demodulators: set[tuple[int, int]]) -> None:
        self.windows = list(windows)
        self.demodulators = set(demodulators)

    @classmethod
    def from_config(cls, cfg: ScenarioConfig) -> "GatewaySchedule":
        windows = [(w.from_min * MINUTE_MS, w.to_min * MINUTE_MS, frozenset(w.channels))
                   for w in cfg.gateway.availability]
        if cfg.gateway.demodulators is not None:
            demods = set(cfg.gateway.demodulators)
        else:
            sfs = set(cfg.devices.sfs)
            for g in cfg.devices.groups:
                sfs.update(g.sfs or ())
            demods = {(ch, sf) for ch in cfg.gateway.channels for sf in sfs}
        return cls(windows, demods)

    def available_throughout(self, channel: int, start: float, end: float) -> bool:
        if not self.windows:
            return False
        last = len(self.windows) - 1
        for i, (lo, hi, chans) in enumerate(self.windows):
            if i == last:
                hi = math.inf  # the final window extends past the horizon
            if lo < end and start < hi and channel not in chans:
                return False
        return True

    def available_at(self, t: float) -> frozenset[int]:
        for lo, hi, chans in self.windows:
            if lo <= t < hi:
                return chans
        return self.windows[-1][2] if self.windows else frozenset()

    def can_decode(self, frame: FrameEvent) -> bool:
        return ((frame.channel, frame.sf) in self.demodulators
                and self.available_throughout(frame.channel, frame.start_ms, frame.end_ms))


class Medium:
    """Frames currently (or about to be) on air, bucketed by channel."""

    def __init__(self, kernel: InterferenceKernel, collision: CollisionConfig, rng: random.Random) -> None:
        self.kernel = kernel
        self.collision = collision
        self.rng = rng
        self.frames: dict[int, list[FrameEvent]] = {}

    def _live(self, channel: int, now: float) -> list[FrameEvent]:
        lst = self.frames.get(channel)
        if not lst:
            return []
        if any(f.end_ms <= now for f in lst):
            lst = [f for f in lst if f.end_ms > now]
            self.frames[channel] = lst
        return lst

    def busy(self, channel: int, now: float, miss_prob: float = 0.0,
             rng: random.Random | None = None) -> bool:
        """Instantaneous energy sense on ``channel``.

        Frames that begin exactly at ``now`` (or later) are not yet on air.
        """
        for f in self._live(channel, now):
            if f.start_ms < now:
                if miss_prob > 0.0 and rng.random() < miss_prob:
                    continue
                return True
        return False

    def add(self, frame: FrameEvent, now: float) -> None:
        radius = self.kernel.radius
        for ch in range(frame.channel - radius, frame.channel + radius + 1):
            for other in self._live(ch, now):
                if other.overlaps(frame):
                    self._interact(frame, other, abs(ch - frame.channel))
        self.frames.setdefault(frame.channel, []).append(frame)

    def _interact(self, new: FrameEvent, old: FrameEvent, distance: int) -> None:
        if distance == 0:
            if new.kind == WISUN or old.kind == WISUN:
                _mark_lora_lost(new, old)
            elif new.sf == old.sf or self.collision.inter_sf:
                if self.collision.capture and old.start_ms < new.start_ms:
                    new.lost = True
                else:
                    new.lost = old.lost = True
            return
        g = self.kernel.g(distance)
        if g > 0.0 and self.rng.random() < g:
            _mark_lora_lost(new, old)


def _mark_lora_lost(*frames: FrameEvent) -> None:
    for f in frames:
        if f.kind == LORA:
            f.lost = True


def gw_decode(frame: FrameEvent, gw: GatewaySchedule) -> bool:
    """Final decode verdict for a LoRa frame whose overlaps are all known."""
    return not frame.lost and gw.can_decode(frame)


@dataclass(eq=False)
class DeviceState:
    id: int
    channels: tuple[int, ...]
    sfs: tuple[int, ...]
    selector: JointSelector
    ti_ms: float
    tr: int
    payload: int
    phase_ms: float
    rng: random.Random
    decision_log: list[Decision] = field(default_factory=list)
    attempts_started: int = 0
    # state of the attempt in progress
    epoch_ms: float = 0.0
    pair: tuple[int, int] = (0, 0)
    trial: int = 0

    @property
    def channel(self) -> int:
        return self.channels[self.pair[0]]

    @property
    def sf(self) -> int:
        return self.sfs[self.pair[1]]


@dataclass(eq=False)
class WiSunDevice:
    id: int
    phase_ms: float
    rng: random.Random


class Simulation:
    """One run of a scenario. Use :func:`run_simulation` for the common case."""

    def __init__(
        self,
        cfg: ScenarioConfig,
        seed: int = 0,
        trial: int = 0,
        *,
        phases: Sequence[float] | None = None,
        event_log: IO[str] | None = None,
    ) -> None:
        self.cfg = cfg
        self.seed = seed
        self.trial = trial
        self.event_log = event_log
        self._log_rows: list[dict] = []
        self.gw = GatewaySchedule.from_config(cfg)
        self.medium = Medium(cfg.interference, cfg.collision,
                             random.Random(derive_seed(seed, trial, _STREAM_MEDIUM, 0)))
        self.metrics = MetricsRecord(fairness_channels=cfg.gateway.channels)
        h = cfg.horizon
        self.horizon_ms = h.minutes * MINUTE_MS if h.minutes is not None else math.inf
        self.max_attempts = h.attempts
        self._queue: list = []
        self._seq = 0
        self.frames_emitted: list[FrameEvent] = []

        d = cfg.devices
        self.devices: list[DeviceState] = []
        for i, (chans, sfs) in enumerate(d.expand()):
            rng = random.Random(derive_seed(seed, trial, _STREAM_DEVICE, i))
            phase = rng.uniform(0.0, d.ti_ms)
            if phases is not None:
                phase = float(phases[i])
            sel = JointSelector(cfg.policy.name, len(chans), len(sfs), **cfg.policy.params())
            self.devices.append(DeviceState(
                id=i + 1, channels=tuple(chans), sfs=tuple(sfs), selector=sel, ti_ms=d.ti_ms,
                tr=_group_tr(cfg, i), payload=d.payload, phase_ms=phase, rng=rng,
            ))

        self.wisun: list[WiSunDevice] = []
        self._wisun_sched: list[tuple[float, float, int | None]] = []
        if cfg.wisun is not None:
            w = cfg.wisun
            self._wisun_sched = [(s.from_min * MINUTE_MS, s.to_min * MINUTE_MS, s.channel) for s in w.schedule]
            for j in range(w.count):
                rng = random.Random(derive_seed(seed, trial, _STREAM_WISUN, j))
                self.wisun.append(WiSunDevice(id=j + 1, phase_ms=rng.uniform(0.0, w.ti_ms), rng=rng))

    # -- queue ------------------------------------------------------------

    def _push(self, time: float, kind: int, source: int, obj) -> None:
        self._seq += 1
        heapq.heappush(self._queue, (time, kind, source, self._seq, obj))

    # -- device lifecycle -------------------------------------------------

    def _schedule_epoch(self, dev: DeviceState, not_before: float) -> None:
        if self.max_attempts is not None and dev.attempts_started >= self.max_attempts:
            return
        k = max(0, math.ceil((not_before - dev.phase_ms) / dev.ti_ms))
        t = dev.phase_ms + k * dev.ti_ms
        while t < not_before:  # guard against float round-off in ceil
            k += 1
            t = dev.phase_ms + k * dev.ti_ms
        if t >= self.horizon_ms:
            return
        self._push(t, _DEVICE, dev.id, ("epoch", dev))

    def _start_epoch(self, dev: DeviceState, now: float) -> None:
        dev.attempts_started += 1
        dev.epoch_ms = now
        dev.pair = dev.selector.decide(dev.rng)
        dev.trial = 0
        self._cca(dev, now)

    def _cca(self, dev: DeviceState, now: float) -> None:
        mac = self.cfg.mac
        if self.medium.busy(dev.channel, now, mac.cca_miss_prob, dev.rng):
            dev.trial += 1
            if dev.trial > dev.tr:
                self._finish(dev, False, now)
            else:
                self._push(now + dev.rng.uniform(0.0, mac.backoff_max_ms), _DEVICE, dev.id, ("cca", dev))
            return
        start = now + mac.cca_turnaround_ms
        frame = FrameEvent(dev.id, LORA, dev.channel, dev.sf, start,
                           float(time_on_air(self.cfg.bandwidth_khz, dev.sf, dev.payload)))
        self.medium.add(frame, now)
        self.frames_emitted.append(frame)
        self._push(frame.end_ms, _FRAME_END, dev.id, (frame, dev))

    def _frame_end(self, frame: FrameEvent, dev: DeviceState, now: float) -> None:
        frame.decoded = gw_decode(frame, self.gw)
        self._log(frame)
        if frame.decoded:
            self._finish(dev, True, now)
            return
        mac = self.cfg.mac
        dev.trial += 1
        retry_at = now + mac.ack_wait_ms
        if dev.trial > dev.tr:
            self._finish(dev, False, retry_at)
            return
        if mac.retry_backoff_ms > 0.0:
            retry_at += dev.rng.uniform(0.0, mac.retry_backoff_ms)
        self._push(retry_at, _DEVICE, dev.id, ("cca", dev))

    def _finish(self, dev: DeviceState, success: bool, now: float) -> None:
        dev.selector.feedback(dev.pair, success)
        dev.decision_log.append(Decision(dev.selector.t - 1, dev.epoch_ms, dev.channel, dev.sf, success))
        self.metrics.record(now, dev.channel, dev.sf, success)
        self._schedule_epoch(dev, max(now, dev.epoch_ms + dev.ti_ms))

    # -- Wi-SUN -----------------------------------------------------------

    def _wisun_channel(self, t: float) -> int | None:
        for lo, hi, ch in self._wisun_sched:
            if lo <= t < hi:
                return ch
        return None

    def _wisun_end(self) -> float:
        end = self._wisun_sched[-1][1] if self._wisun_sched else 0.0
        return min(end, self.horizon_ms)

    def _wisun_tick(self, w: WiSunDevice, now: float) -> None:
        frames = wisun_step(self, w, now)
        for f in frames:
            self._log(f)
        nxt = now + self.cfg.wisun.ti_ms
        if nxt < self._wisun_end():
            self._push(nxt, _WISUN_TICK, w.id, w)

    # -- run ----------------------------------------------------------------

    def _log(self, frame: FrameEvent) -> None:
        if self.event_log is not None:
            self._log_rows.append(frame.as_record())

    def run(self) -> MetricsRecord:
        for dev in self.devices:
            self._schedule_epoch(dev, dev.phase_ms)
        wend = self._wisun_end()
        for w in self.wisun:
            if w.phase_ms < wend:
                self._push(w.phase_ms, _WISUN_TICK, w.id, w)

        q = self._queue
        while q:
            now, kind, _source, _seq, obj = heapq.heappop(q)
            if kind == _FRAME_END:
                frame, dev = obj
                self._frame_end(frame, dev, now)
            elif kind == _WISUN_TICK:
                self._wisun_tick(obj, now)
            else:
                action, dev = obj
                if action == "epoch":
                    self._start_epoch(dev, now)
                else:
                    self._cca(dev, now)

        changes = availability_changes(self.cfg.gateway.availability)
        if changes:
            for dev in self.devices:
                self.metrics.switch_latencies.extend(switch_latency(dev.decision_log, changes, device=dev.id))
        if self.event_log is not None:
            self._log_rows.sort(key=lambda r: (r["time_ms"], r["kind"], r["source"]))
            for row in self._log_rows:
                self.event_log.write(json.dumps(row) + "\n")
        return self.metrics


def wisun_step(sim: Simulation, w: WiSunDevice, now: float) -> list[FrameEvent]:
    """One Wi-SUN interval: LBT on the scheduled channel, send if clear (no retries)."""
    ch = sim._wisun_channel(now)
    if ch is None or sim.medium.busy(ch, now):
        return []
    frame = FrameEvent(w.id, WISUN, ch, None, now, sim.cfg.wisun.frame_ms)
    sim.medium.add(frame, now)
    return [frame]


def _group_tr(cfg: ScenarioConfig, index: int) -> int:
    seen = 0
    for g in cfg.devices.groups:
        if index < seen + g.count:
            return g.tr if g.tr is not None else cfg.devices.tr
        seen += g.count
    return cfg.devices.tr


def run_simulation(cfg: ScenarioConfig, seed: int = 0, trial: int = 0, **kwargs) -> MetricsRecord:
    return Simulation(cfg, seed, trial, **kwargs).run()
