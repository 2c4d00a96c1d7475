from __future__ import annotations

import dataclasses
import random

import pytest

from lora_tow.scenario import (
    AvailabilityWindow,
    CollisionConfig,
    DeviceConfig,
    DeviceGroup,
    GatewayConfig,
    Horizon,
    MacConfig,
    PolicyConfig,
    ScenarioConfig,
)
from lora_tow.airtime import InterferenceKernel

# Filled by tests/test_acceptance.py, printed once at the end of the session.
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])


@pytest.fixture
def rng():
    return random.Random(12345)


def tiny_config(
    *,
    count: int = 1,
    channels=(1,),
    sfs=(7,),
    tr: int = 0,
    minutes: float = 1.0,
    attempts: int | None = None,
    gw_channels=None,
    groups=(),
    policy: str = "random",
    kernel: InterferenceKernel | None = None,
    collision: CollisionConfig | None = None,
    mac: MacConfig | None = None,
    ti_ms: float = 10_000.0,
) -> ScenarioConfig:
    gw = tuple(channels) if gw_channels is None else tuple(gw_channels)
    span = minutes if attempts is None else 1000.0
    return ScenarioConfig(
        name="tiny",
        devices=DeviceConfig(count=count, channels=tuple(channels), sfs=tuple(sfs), ti_ms=ti_ms, tr=tr,
                             groups=tuple(groups)),
        policy=PolicyConfig(name=policy),
        gateway=GatewayConfig(availability=(AvailabilityWindow(0.0, span, gw),)),
        interference=kernel or InterferenceKernel(radius=0, g1=0.0, g2=0.0),
        collision=collision or CollisionConfig(),
        mac=mac or MacConfig(),
        horizon=Horizon(minutes=None, attempts=attempts) if attempts is not None else Horizon(minutes=minutes),
        trials=2,
    )


@pytest.fixture
def make_config():
    return tiny_config


def group(count, **kw):
    return DeviceGroup(count=count, **kw)


def replace(obj, **kw):
    return dataclasses.replace(obj, **kw)
