"""Single-writer ownership of the mutable world.

Exactly one agent advances the simulation; every reader gets an immutable
snapshot. Directives mutate actuator modes between ticks and take effect
at the next tick, matching how a real factory's devices would behave.
"""
from __future__ import annotations

import threading

from planttwin.farm.world import World, set_sim_actuator, tick
from planttwin.iot.registry import ActuatorDirective


class WorldHost:
    def __init__(self, world: World):
        self._world = world
        self._lock = threading.Lock()

    def snapshot(self) -> World:
        with self._lock:
            return self._world

    def apply_directive(self, directive: ActuatorDirective) -> World:
        with self._lock:
            self._world = set_sim_actuator(self._world, directive)
            return self._world

    def advance(self, dt: float | None = None) -> World:
        with self._lock:
            step = self._world.config.tick_interval if dt is None else dt
            self._world = tick(self._world, step)
            return self._world
