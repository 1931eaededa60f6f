"""Wiring: build the whole twin from a scenario and drive its tick loop.

One TwinSystem holds the farm world, the IoT service, the scene store and
the interface service. In the default single-process mode the interface
server talks to the IoT server through an in-memory wire client carrying
the same JSON bytes as the socket transport used by --split.
"""
from __future__ import annotations

import threading
import time as wall_time

from planttwin.farm.host import WorldHost
from planttwin.farm.world import build_world
from planttwin.iot.api import build_router as build_iot_router
from planttwin.iot.service import IotService
from planttwin.net.client import DirectClient, WireClient
from planttwin.scene.compose import get_backend
from planttwin.scene.store import FrameStore
from planttwin.server.api import build_router as build_interface_router
from planttwin.server.api import channel_handler
from planttwin.server.audit import AuditLog
from planttwin.server.iot_client import IotApiClient
from planttwin.server.service import InterfaceService
from planttwin.cli.scenario import Scenario


class TwinSystem:
    """All services of one twin, tick-coupled in a single process."""

    def __init__(
        self,
        scenario: Scenario,
        audit_path: str | None = None,
        cadence: float | None = None,
        iot_wire: WireClient | None = None,
        iot_wire_factory=None,
    ):
        self.scenario = scenario
        world = build_world(scenario.factory, list(scenario.actuators))
        self.host = WorldHost(world)
        self.iot = IotService(self.host, list(scenario.sensors))
        self.iot_router = build_iot_router(self.iot)

        backend = get_backend(scenario.run.backend)
        self.store = FrameStore(backend=backend, panorama_height=scenario.run.panorama_height)
        self.audit = AuditLog(audit_path)
        if iot_wire is not None:
            wire = iot_wire
        elif iot_wire_factory is not None:
            wire = iot_wire_factory(self.iot_router)
        else:
            wire = DirectClient(self.iot_router)
        self.iot_wire = wire
        self.interface = InterfaceService(
            iot=IotApiClient(wire),
            store=self.store,
            objects=list(scenario.objects),
            camera_pos=scenario.camera.position,
            audit=self.audit,
            cadence=cadence if cadence is not None else scenario.run.cadence_s,
            queue_depth=scenario.run.queue_depth,
        )
        self.interface_router = build_interface_router(self.interface)
        self.ws_routes = {"/v1/channel": channel_handler(self.interface)}

    @property
    def tick_interval(self) -> float:
        return self.scenario.factory.tick_interval

    def tick(self) -> float:
        """One simulation step: world, telemetry ingest, twin cadence."""
        world = self.host.advance()
        self.iot.ingest_tick(world)
        self.interface.on_tick(world.time)
        return world.time

    def sim_time(self) -> float:
        return self.host.snapshot().time

    def close(self) -> None:
        self.audit.close()


class TickLoop:
    """Wall-paced background ticking for interactive runs."""

    def __init__(self, system: TwinSystem, time_scale: float = 1.0):
        self.system = system
        self.period = system.tick_interval / time_scale
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None

    def start(self) -> None:
        self._thread = threading.Thread(target=self._run, daemon=True)
        self._thread.start()

    def _run(self) -> None:
        next_due = wall_time.monotonic()
        while not self._stop.is_set():
            self.system.tick()
            next_due += self.period
            delay = next_due - wall_time.monotonic()
            if delay > 0:
                self._stop.wait(delay)
            else:
                next_due = wall_time.monotonic()

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=5)
            self._thread = None
