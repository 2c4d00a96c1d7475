"""Scenario configuration: dataclasses, YAML (de)serialisation, validation, presets.

Times in the config file are minutes for schedules and horizons and
milliseconds for per-frame MAC timing. Everything is converted to ms in
memory. See ``docs/config_schema.md`` for the full key reference.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from .airtime import BANDWIDTHS_KHZ, SPREADING_FACTORS, TABLE_PAYLOAD, InterferenceKernel
from .bandit import (
    DEFAULT_ALPHA,
    DEFAULT_AMP,
    DEFAULT_BETA,
    DEFAULT_EPSILON,
    DEFAULT_OMEGA_MAX,
    POLICIES,
)

MINUTE_MS = 60_000.0


class ConfigError(ValueError):
    """Raised for unparseable or invalid scenario configs.

    ``violations`` holds one ``"field.path: message"`` string per problem.
    """

    def __init__(self, message: str, violations: list[str] | None = None) -> None:
        self.violations = list(violations or [])
        if self.violations:
            message = message + "\n  " + "\n  ".join(self.violations)
        super().__init__(message)


@dataclass(frozen=True)
class DeviceGroup:
    """A block of devices overriding the scenario-wide channel / SF sets."""

    count: int
    sfs: tuple[int, ...] | None = None
    channels: tuple[int, ...] | None = None
    tr: int | None = None


@dataclass(frozen=True)
class DeviceConfig:
    count: int = 30
    channels: tuple[int, ...] = (1, 3, 5)
    sfs: tuple[int, ...] = (7,)
    ti_ms: float = 10_000.0
    tr: int = 3
    payload: int = TABLE_PAYLOAD
    groups: tuple[DeviceGroup, ...] = ()

    def expand(self) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
        """Per-device (channels, sfs), device order = group order."""
        if not self.groups:
            return [(self.channels, self.sfs)] * self.count
        out = []
        for g in self.groups:
            out.extend([(g.channels or self.channels, g.sfs or self.sfs)] * g.count)
        return out


@dataclass(frozen=True)
class PolicyConfig:
    name: str = "tow"
    alpha: float = DEFAULT_ALPHA
    beta: float = DEFAULT_BETA
    amp: float = DEFAULT_AMP
    epsilon: float = DEFAULT_EPSILON
    omega_max: float = DEFAULT_OMEGA_MAX

    def params(self) -> dict[str, float]:
        return dict(alpha=self.alpha, beta=self.beta, amp=self.amp,
                    epsilon=self.epsilon, omega_max=self.omega_max)


@dataclass(frozen=True)
class AvailabilityWindow:
    from_min: float
    to_min: float
    channels: tuple[int, ...]


@dataclass(frozen=True)
class GatewayConfig:
    availability: tuple[AvailabilityWindow, ...] = (AvailabilityWindow(0.0, 30.0, (1, 3, 5)),)
    # None = every available channel x every device SF
    demodulators: tuple[tuple[int, int], ...] | None = None

    @property
    def channels(self) -> tuple[int, ...]:
        seen: set[int] = set()
        for w in self.availability:
            seen.update(w.channels)
        return tuple(sorted(seen))


@dataclass(frozen=True)
class WiSunWindow:
    from_min: float
    to_min: float
    channel: int | None  # None = idle


@dataclass(frozen=True)
class WiSunConfig:
    count: int = 20
    bitrate_kbps: float = 50.0
    payload: int = 200
    ti_ms: float = 1000.0
    schedule: tuple[WiSunWindow, ...] = ()

    @property
    def frame_ms(self) -> float:
        return self.payload * 8.0 / self.bitrate_kbps


@dataclass(frozen=True)
class CollisionConfig:
    capture: bool = False
    inter_sf: bool = False


@dataclass(frozen=True)
class MacConfig:
    ack_wait_ms: float = 100.0
    backoff_max_ms: float = 500.0
    # time between the CCA sample and the first transmitted symbol; frames
    # that start inside this gap are not sensed (calibrated, see README)
    cca_turnaround_ms: float = 100.0
    # probability that CCA misses an on-air frame
    cca_miss_prob: float = 0.0
    # extra uniform delay in [0, x] before a retransmission after a NACK
    retry_backoff_ms: float = 0.0


@dataclass(frozen=True)
class Horizon:
    minutes: float | None = 30.0
    attempts: int | None = None


@dataclass(frozen=True)
class ScenarioConfig:
    name: str = "custom"
    bandwidth_khz: float = 125.0
    devices: DeviceConfig = field(default_factory=DeviceConfig)
    policy: PolicyConfig = field(default_factory=PolicyConfig)
    gateway: GatewayConfig = field(default_factory=GatewayConfig)
    wisun: WiSunConfig | None = None
    interference: InterferenceKernel = field(default_factory=InterferenceKernel)
    collision: CollisionConfig = field(default_factory=CollisionConfig)
    mac: MacConfig = field(default_factory=MacConfig)
    horizon: Horizon = field(default_factory=Horizon)
    trials: int = 10

    def replace(self, **changes: Any) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def with_policy(self, name: str) -> "ScenarioConfig":
        return self.replace(policy=dataclasses.replace(self.policy, name=name))

    def with_devices(self, count: int) -> "ScenarioConfig":
        if self.devices.groups:
            raise ConfigError("cannot override device count of a grouped scenario",
                              ["devices.count: scenario uses devices.groups"])
        return self.replace(devices=dataclasses.replace(self.devices, count=count))

    def to_dict(self) -> dict[str, Any]:
        return _to_plain(dataclasses.asdict(self))

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False, default_flow_style=None)

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def _to_plain(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {k: _to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_plain(v) for v in obj]
    return obj


# -- parsing ---------------------------------------------------------------


class _Reader:
    """Pulls typed fields out of nested dicts, collecting every problem."""

    def __init__(self) -> None:
        self.errors: list[str] = []

    def section(self, data: Any, path: str, known: set[str]) -> dict:
        if data is None:
            return {}
        if not isinstance(data, dict):
            self.errors.append(f"{path}: expected a mapping")
            return {}
        for key in data:
            if key not in known:
                self.errors.append(f"{path}.{key}: unknown key" if path else f"{key}: unknown key")
        return data

    def number(self, d: dict, key: str, path: str, default: Any, integer: bool = False) -> Any:
        if key not in d:
            return default
        v = d[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            self.errors.append(f"{path}.{key}: expected a number, got {v!r}")
            return default
        if integer:
            if float(v) != int(v):
                self.errors.append(f"{path}.{key}: expected an integer, got {v!r}")
                return default
            return int(v)
        return float(v)

    def boolean(self, d: dict, key: str, path: str, default: bool) -> bool:
        if key not in d:
            return default
        v = d[key]
        if not isinstance(v, bool):
            self.errors.append(f"{path}.{key}: expected true/false, got {v!r}")
            return default
        return v

    def int_list(self, d: dict, key: str, path: str, default: Any) -> Any:
        if key not in d:
            return default
        v = d[key]
        if v is None:
            return None
        if not isinstance(v, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in v):
            self.errors.append(f"{path}.{key}: expected a list of integers, got {v!r}")
            return default
        return tuple(v)


def config_from_dict(data: Any) -> ScenarioConfig:
    """Build and validate a :class:`ScenarioConfig` from parsed YAML/JSON data."""
    rd = _Reader()
    top = rd.section(data, "", {f.name for f in dataclasses.fields(ScenarioConfig)})
    base = ScenarioConfig()

    name = top.get("name", base.name)
    if not isinstance(name, str):
        rd.errors.append(f"name: expected a string, got {name!r}")
        name = base.name
    bandwidth = rd.number(top, "bandwidth_khz", "", base.bandwidth_khz)
    trials = rd.number(top, "trials", "", base.trials, integer=True)

    dv = rd.section(top.get("devices"), "devices", {f.name for f in dataclasses.fields(DeviceConfig)})
    dd = base.devices
    groups = []
    raw_groups = dv.get("groups") or []
    if not isinstance(raw_groups, list):
        rd.errors.append("devices.groups: expected a list")
        raw_groups = []
    for i, g in enumerate(raw_groups):
        gp = f"devices.groups[{i}]"
        gs = rd.section(g, gp, {"count", "sfs", "channels", "tr"})
        groups.append(DeviceGroup(
            count=rd.number(gs, "count", gp, 0, integer=True),
            sfs=rd.int_list(gs, "sfs", gp, None),
            channels=rd.int_list(gs, "channels", gp, None),
            tr=None if gs.get("tr") is None else rd.number(gs, "tr", gp, None, integer=True),
        ))
    devices = DeviceConfig(
        count=rd.number(dv, "count", "devices", dd.count, integer=True),
        channels=rd.int_list(dv, "channels", "devices", dd.channels),
        sfs=rd.int_list(dv, "sfs", "devices", dd.sfs),
        ti_ms=rd.number(dv, "ti_ms", "devices", dd.ti_ms),
        tr=rd.number(dv, "tr", "devices", dd.tr, integer=True),
        payload=rd.number(dv, "payload", "devices", dd.payload, integer=True),
        groups=tuple(groups),
    )

    pv = rd.section(top.get("policy"), "policy", {f.name for f in dataclasses.fields(PolicyConfig)})
    pd = base.policy
    pname = pv.get("name", pd.name)
    if not isinstance(pname, str):
        rd.errors.append(f"policy.name: expected a string, got {pname!r}")
        pname = pd.name
    policy = PolicyConfig(
        name=pname,
        alpha=rd.number(pv, "alpha", "policy", pd.alpha),
        beta=rd.number(pv, "beta", "policy", pd.beta),
        amp=rd.number(pv, "amp", "policy", pd.amp),
        epsilon=rd.number(pv, "epsilon", "policy", pd.epsilon),
        omega_max=rd.number(pv, "omega_max", "policy", pd.omega_max),
    )

    gv = rd.section(top.get("gateway"), "gateway", {"availability", "demodulators"})
    windows = []
    raw_av = gv.get("availability")
    if raw_av is None:
        windows = list(base.gateway.availability)
    elif not isinstance(raw_av, list):
        rd.errors.append("gateway.availability: expected a list")
    else:
        for i, w in enumerate(raw_av):
            wp = f"gateway.availability[{i}]"
            ws = rd.section(w, wp, {"from_min", "to_min", "channels"})
            windows.append(AvailabilityWindow(
                from_min=rd.number(ws, "from_min", wp, 0.0),
                to_min=rd.number(ws, "to_min", wp, 0.0),
                channels=rd.int_list(ws, "channels", wp, ()),
            ))
    demods = None
    raw_dm = gv.get("demodulators")
    if raw_dm is not None:
        if not isinstance(raw_dm, list) or not all(
            isinstance(p, list) and len(p) == 2 and all(isinstance(x, int) for x in p) for p in raw_dm
        ):
            rd.errors.append("gateway.demodulators: expected a list of [channel, sf] pairs")
        else:
            demods = tuple((int(a), int(b)) for a, b in raw_dm)
    gateway = GatewayConfig(availability=tuple(windows), demodulators=demods)

    wisun = None
    if top.get("wisun") is not None:
        wv = rd.section(top["wisun"], "wisun", {f.name for f in dataclasses.fields(WiSunConfig)})
        wd = WiSunConfig()
        sched = []
        raw_s = wv.get("schedule") or []
        if not isinstance(raw_s, list):
            rd.errors.append("wisun.schedule: expected a list")
            raw_s = []
        for i, w in enumerate(raw_s):
            wp = f"wisun.schedule[{i}]"
            ws = rd.section(w, wp, {"from_min", "to_min", "channel"})
            ch = ws.get("channel")
            if ch is not None and (isinstance(ch, bool) or not isinstance(ch, int)):
                rd.errors.append(f"{wp}.channel: expected an integer or null, got {ch!r}")
                ch = None
            sched.append(WiSunWindow(
                from_min=rd.number(ws, "from_min", wp, 0.0),
                to_min=rd.number(ws, "to_min", wp, 0.0),
                channel=ch,
            ))
        wisun = WiSunConfig(
            count=rd.number(wv, "count", "wisun", wd.count, integer=True),
            bitrate_kbps=rd.number(wv, "bitrate_kbps", "wisun", wd.bitrate_kbps),
            payload=rd.number(wv, "payload", "wisun", wd.payload, integer=True),
            ti_ms=rd.number(wv, "ti_ms", "wisun", wd.ti_ms),
            schedule=tuple(sched),
        )

    iv = rd.section(top.get("interference"), "interference", {"radius", "g1", "g2"})
    idf = InterferenceKernel()
    radius = rd.number(iv, "radius", "interference", idf.radius, integer=True)
    g1 = rd.number(iv, "g1", "interference", idf.g1)
    g2 = rd.number(iv, "g2", "interference", idf.g2)

    cv = rd.section(top.get("collision"), "collision", {"capture", "inter_sf"})
    collision = CollisionConfig(
        capture=rd.boolean(cv, "capture", "collision", False),
        inter_sf=rd.boolean(cv, "inter_sf", "collision", False),
    )

    mv = rd.section(top.get("mac"), "mac", {f.name for f in dataclasses.fields(MacConfig)})
    md = MacConfig()
    mac = MacConfig(**{
        f.name: rd.number(mv, f.name, "mac", getattr(md, f.name)) for f in dataclasses.fields(MacConfig)
    })

    hv = rd.section(top.get("horizon"), "horizon", {"minutes", "attempts"})
    if "minutes" in hv or "attempts" in hv:
        horizon = Horizon(
            minutes=None if hv.get("minutes") is None else rd.number(hv, "minutes", "horizon", None),
            attempts=None if hv.get("attempts") is None else rd.number(hv, "attempts", "horizon", None, integer=True),
        )
    else:
        horizon = base.horizon

    # kernel validation is part of the collected report, not a constructor raise
    kernel_errors = _kernel_errors(radius, g1, g2)
    rd.errors.extend(kernel_errors)
    kernel = InterferenceKernel() if kernel_errors else InterferenceKernel(radius=radius, g1=g1, g2=g2)

    cfg = ScenarioConfig(
        name=name, bandwidth_khz=bandwidth, devices=devices, policy=policy, gateway=gateway,
        wisun=wisun, interference=kernel, collision=collision, mac=mac, horizon=horizon, trials=trials,
    )
    errors = rd.errors + validation_errors(cfg)
    if errors:
        raise ConfigError("invalid scenario config", errors)
    return cfg


def _kernel_errors(radius: int, g1: float, g2: float) -> list[str]:
    errs = []
    if not 0 <= radius <= 2:
        errs.append(f"interference.radius: must be in 0..2, got {radius}")
    if not 0.0 <= g1 <= 1.0:
        errs.append(f"interference.g1: must lie in [0, 1], got {g1}")
    if not 0.0 <= g2 <= 1.0:
        errs.append(f"interference.g2: must lie in [0, 1], got {g2}")
    if g2 > g1:
        errs.append(f"interference.g2: coupling must be non-increasing in distance (g2={g2} > g1={g1})")
    return errs


def validation_errors(cfg: ScenarioConfig) -> list[str]:
    """Every violated invariant of ``cfg`` as ``"path: message"`` strings."""
    errs: list[str] = []
    d = cfg.devices
    if cfg.bandwidth_khz not in BANDWIDTHS_KHZ:
        errs.append(f"bandwidth_khz: unsupported bandwidth {cfg.bandwidth_khz} (allowed {list(BANDWIDTHS_KHZ)})")
    if cfg.trials < 1:
        errs.append("trials: must be >= 1")
    if d.count < 1:
        errs.append("devices.count: must be >= 1")
    if not d.channels:
        errs.append("devices.channels: must not be empty")
    if any(c < 1 for c in d.channels):
        errs.append("devices.channels: channel numbers must be >= 1")
    if len(set(d.channels)) != len(d.channels):
        errs.append("devices.channels: duplicate channel")
    if not d.sfs:
        errs.append("devices.sfs: must not be empty")
    if any(s not in SPREADING_FACTORS for s in d.sfs):
        errs.append(f"devices.sfs: values must lie in 7..12, got {list(d.sfs)}")
    if len(set(d.sfs)) != len(d.sfs):
        errs.append("devices.sfs: duplicate SF")
    if d.ti_ms <= 0:
        errs.append("devices.ti_ms: must be > 0")
    if d.tr < 0:
        errs.append("devices.tr: must be >= 0")
    if d.payload != TABLE_PAYLOAD:
        errs.append(f"devices.payload: only {TABLE_PAYLOAD} B is supported, got {d.payload}")
    if d.groups:
        if sum(g.count for g in d.groups) != d.count:
            errs.append("devices.groups: group counts must sum to devices.count")
        for i, g in enumerate(d.groups):
            if g.count < 0:
                errs.append(f"devices.groups[{i}].count: must be >= 0")
            if g.sfs is not None and (not g.sfs or any(s not in SPREADING_FACTORS for s in g.sfs)):
                errs.append(f"devices.groups[{i}].sfs: values must lie in 7..12 and be non-empty")
            if g.channels is not None and (not g.channels or any(c < 1 for c in g.channels)):
                errs.append(f"devices.groups[{i}].channels: must be non-empty channel numbers >= 1")
            if g.tr is not None and g.tr < 0:
                errs.append(f"devices.groups[{i}].tr: must be >= 0")

    p = cfg.policy
    if p.name not in POLICIES:
        errs.append(f"policy.name: unknown policy {p.name!r} (expected one of {', '.join(POLICIES)})")
    for key in ("alpha", "beta", "epsilon"):
        v = getattr(p, key)
        if not 0.0 <= v <= 1.0:
            errs.append(f"policy.{key}: must lie in [0, 1], got {v}")
    if p.amp < 0:
        errs.append(f"policy.amp: must be >= 0, got {p.amp}")
    if p.omega_max <= 0:
        errs.append(f"policy.omega_max: must be > 0, got {p.omega_max}")

    h = cfg.horizon
    if (h.minutes is None) == (h.attempts is None):
        errs.append("horizon: set exactly one of minutes / attempts")
    elif h.minutes is not None and h.minutes <= 0:
        errs.append("horizon.minutes: must be > 0")
    elif h.attempts is not None and h.attempts < 1:
        errs.append("horizon.attempts: must be >= 1")

    av = cfg.gateway.availability
    if not av:
        errs.append("gateway.availability: must contain at least one window")
    else:
        if av[0].from_min != 0:
            errs.append("gateway.availability[0].from_min: schedule must start at 0")
        for i, w in enumerate(av):
            if w.to_min <= w.from_min:
                errs.append(f"gateway.availability[{i}]: to_min must exceed from_min")
            if i and w.from_min != av[i - 1].to_min:
                errs.append(f"gateway.availability[{i}].from_min: windows must be contiguous")
        if h.minutes is not None and av[-1].to_min < h.minutes:
            errs.append("gateway.availability: schedule must cover the run horizon")
    if cfg.gateway.demodulators is not None:
        for i, (ch, sf) in enumerate(cfg.gateway.demodulators):
            if sf not in SPREADING_FACTORS:
                errs.append(f"gateway.demodulators[{i}]: SF {sf} outside 7..12")

    if cfg.wisun is not None:
        w = cfg.wisun
        if w.count < 0:
            errs.append("wisun.count: must be >= 0")
        if w.bitrate_kbps <= 0:
            errs.append("wisun.bitrate_kbps: must be > 0")
        if w.payload <= 0:
            errs.append("wisun.payload: must be > 0")
        if w.ti_ms <= 0:
            errs.append("wisun.ti_ms: must be > 0")
        for i, s in enumerate(w.schedule):
            if s.to_min <= s.from_min:
                errs.append(f"wisun.schedule[{i}]: to_min must exceed from_min")
            if i and s.from_min != w.schedule[i - 1].to_min:
                errs.append(f"wisun.schedule[{i}].from_min: windows must be contiguous")

    m = cfg.mac
    for key in ("ack_wait_ms", "backoff_max_ms", "cca_turnaround_ms", "retry_backoff_ms"):
        if getattr(m, key) < 0:
            errs.append(f"mac.{key}: must be >= 0")
    if not 0.0 <= m.cca_miss_prob <= 1.0:
        errs.append("mac.cca_miss_prob: must lie in [0, 1]")
    return errs


def load_config(source: str | Path) -> ScenarioConfig:
    """Load a scenario from a YAML file path or from YAML text."""
    if isinstance(source, Path) or ("\n" not in str(source) and Path(str(source)).exists()):
        text = Path(source).read_text()
    else:
        text = str(source)
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark is not None else ""
        raise ConfigError(f"config parse error{where}: {getattr(exc, 'problem', exc)}") from exc
    if data is None:
        data = {}
    return config_from_dict(data)


# -- presets ---------------------------------------------------------------

SWEEP_DEVICES = (2, 5, 10, 15, 20, 25, 30)

# Calibrated channel-access model shared by every preset (see README).
_MAC = MacConfig()
_KERNEL = InterferenceKernel()


def _static(channels: tuple[int, ...], minutes: float) -> tuple[AvailabilityWindow, ...]:
    return (AvailabilityWindow(0.0, minutes, channels),)


def _ch_static() -> ScenarioConfig:
    return ScenarioConfig(
        name="ch-static",
        devices=DeviceConfig(count=30, channels=(1, 3, 5, 7, 9), sfs=(7,), ti_ms=10_000.0, tr=3),
        gateway=GatewayConfig(availability=_static((1, 3, 5), 30.0)),
        interference=_KERNEL,
        mac=_MAC,
        horizon=Horizon(minutes=30.0),
    )


def _ch_dynamic() -> ScenarioConfig:
    return _ch_static().replace(
        name="ch-dynamic",
        gateway=GatewayConfig(availability=(
            AvailabilityWindow(0.0, 10.0, (1, 3, 5)),
            AvailabilityWindow(10.0, 20.0, (1, 3)),
            AvailabilityWindow(20.0, 30.0, (3, 5)),
            AvailabilityWindow(30.0, 40.0, (1, 5)),
        )),
        horizon=Horizon(minutes=40.0),
    )


CHSF_SETTINGS = {
    1: ((7,), ()),
    2: ((8,), ()),
    3: ((9,), ()),
    4: ((7, 8, 9), "groups"),
    5: ((7, 8, 9), ()),
}


def apply_chsf_setting(cfg: ScenarioConfig, setting: int) -> ScenarioConfig:
    """Rewrite the SF configuration of a CH-SF scenario to one of settings 1-5."""
    if setting not in CHSF_SETTINGS:
        raise ConfigError(f"unknown CH-SF setting {setting}", [f"setting: expected 1..5, got {setting}"])
    d = cfg.devices
    if setting in (1, 2, 3):
        dev = dataclasses.replace(d, sfs=CHSF_SETTINGS[setting][0], groups=())
    elif setting == 4:
        base, rem = divmod(d.count, 3)
        counts = [base + (1 if i < rem else 0) for i in range(3)]
        dev = dataclasses.replace(d, sfs=(7, 8, 9), groups=tuple(
            DeviceGroup(count=c, sfs=(sf,)) for c, sf in zip(counts, (7, 8, 9))
        ))
    else:
        dev = dataclasses.replace(d, sfs=(7, 8, 9), groups=())
    return cfg.replace(devices=dev)


def _chsf_static() -> ScenarioConfig:
    return ScenarioConfig(
        name="chsf-static",
        devices=DeviceConfig(count=30, channels=(1, 3, 5), sfs=(7, 8, 9), ti_ms=20_000.0, tr=0),
        gateway=GatewayConfig(availability=_static((1, 3, 5), 100.0)),
        interference=_KERNEL,
        mac=_MAC,
        horizon=Horizon(minutes=None, attempts=200),
    )


def _chsf_wisun() -> ScenarioConfig:
    return _chsf_static().replace(
        name="chsf-wisun",
        gateway=GatewayConfig(availability=_static((1, 3, 5), 50.0)),
        wisun=WiSunConfig(count=20, bitrate_kbps=50.0, payload=200, ti_ms=1000.0, schedule=(
            WiSunWindow(0.0, 20.0, None),
            WiSunWindow(20.0, 30.0, 1),
            WiSunWindow(30.0, 40.0, 3),
            WiSunWindow(40.0, 50.0, 5),
        )),
        horizon=Horizon(minutes=50.0),
    )


def _adjacent(name: str, channels: tuple[int, ...]) -> ScenarioConfig:
    return _ch_static().replace(
        name=name,
        devices=DeviceConfig(count=30, channels=channels, sfs=(7,), ti_ms=10_000.0, tr=3),
        gateway=GatewayConfig(availability=_static(channels, 30.0)),
    )


def _adjacent_wisun() -> ScenarioConfig:
    return _ch_static().replace(
        name="adjacent-wisun",
        devices=DeviceConfig(count=30, channels=(1, 4, 7, 10, 14), sfs=(7,), ti_ms=10_000.0, tr=3),
        gateway=GatewayConfig(availability=_static((1, 4, 7), 40.0)),
        wisun=WiSunConfig(count=20, bitrate_kbps=50.0, payload=200, ti_ms=1000.0, schedule=(
            WiSunWindow(0.0, 10.0, None),
            WiSunWindow(10.0, 20.0, 1),
            WiSunWindow(20.0, 30.0, 4),
            WiSunWindow(30.0, 40.0, 7),
        )),
        horizon=Horizon(minutes=40.0),
    )


_PRESETS = {
    "ch-static": _ch_static,
    "ch-dynamic": _ch_dynamic,
    "chsf-static": _chsf_static,
    "chsf-sf7": lambda: apply_chsf_setting(_chsf_static(), 1).replace(name="chsf-sf7"),
    "chsf-sf8": lambda: apply_chsf_setting(_chsf_static(), 2).replace(name="chsf-sf8"),
    "chsf-sf9": lambda: apply_chsf_setting(_chsf_static(), 3).replace(name="chsf-sf9"),
    "chsf-mixed": lambda: apply_chsf_setting(_chsf_static(), 4).replace(name="chsf-mixed"),
    "chsf-wisun": _chsf_wisun,
    "adjacent-1": lambda: _adjacent("adjacent-1", (2, 4, 6)),
    "adjacent-2": lambda: _adjacent("adjacent-2", (2, 5, 8)),
    "adjacent-wisun": _adjacent_wisun,
}

PRESET_NAMES = tuple(_PRESETS)


def builtin(name: str) -> ScenarioConfig:
    try:
        factory = _PRESETS[name]
    except KeyError:
        raise ConfigError(
            f"unknown preset {name!r}; available presets: {', '.join(PRESET_NAMES)}",
            [f"builtin: {name!r} is not a preset"],
        ) from None
    return factory()
