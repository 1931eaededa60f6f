"""Headless scripted runs: timed commands plus snapshot assertions.

The engine drives the tick loop itself (no wall clock, no sockets), so a
given scenario + script always produces byte-identical transcripts and
audit logs. Steps fire in listed order once simulated time reaches their
`at`; expectations watch every snapshot until they match or their
deadline passes.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass

from planttwin.errors import AssertionFailed, InvalidScenario
from planttwin.cli.runtime import TwinSystem

_SEGMENT = re.compile(r"^([A-Za-z_][\w-]*)(?:\[([^\]]+)\])?$")


@dataclass
class Expectation:
    step: int
    path: str
    equals: object
    deadline: float
    tolerance: float | None = None
    last_observed: object = "<no snapshot seen>"

    def matches(self, snapshot_body: dict) -> bool:
        observed = resolve_path(snapshot_body, self.path)
        self.last_observed = observed
        if (
            self.tolerance is not None
            and isinstance(observed, (int, float))
            and isinstance(self.equals, (int, float))
        ):
            return abs(observed - self.equals) <= self.tolerance
        return observed == self.equals


@dataclass
class Step:
    index: int
    at: float
    send: dict | None = None
    expect: dict | None = None


def resolve_path(body: dict, path: str):
    """Walk "objects[bed-a].severity.level" style selectors; lists of
    {id: ...} objects are indexed by id."""
    value = body
    for raw in path.split("."):
        match = _SEGMENT.match(raw)
        if match is None:
            return f"<bad path segment {raw!r}>"
        name, key = match.group(1), match.group(2)
        if not isinstance(value, dict) or name not in value:
            return f"<missing {name!r}>"
        value = value[name]
        if key is not None:
            if not isinstance(value, list):
                return f"<{name!r} is not indexable>"
            for entry in value:
                if isinstance(entry, dict) and entry.get("id") == key:
                    value = entry
                    break
            else:
                return f"<no entry {key!r} in {name!r}>"
    return value


def load_script(path: str) -> list[Step]:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise InvalidScenario("", f"cannot read script file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidScenario("", f"script is not valid JSON: {exc}") from exc
    return parse_script(raw)


def parse_script(raw) -> list[Step]:
    steps_raw = raw.get("steps") if isinstance(raw, dict) else raw
    if not isinstance(steps_raw, list):
        raise InvalidScenario("/steps", "script must be a list of steps")
    steps = []
    for i, entry in enumerate(steps_raw):
        pointer = f"/steps/{i}"
        if not isinstance(entry, dict):
            raise InvalidScenario(pointer, "step must be an object")
        unknown = set(entry) - {"at", "send", "expect"}
        if unknown:
            raise InvalidScenario(f"{pointer}/{sorted(unknown)[0]}", "unknown field")
        at = entry.get("at")
        if isinstance(at, bool) or not isinstance(at, (int, float)) or at < 0:
            raise InvalidScenario(f"{pointer}/at", "must be a number >= 0")
        has_send = isinstance(entry.get("send"), dict)
        has_expect = isinstance(entry.get("expect"), dict)
        if has_send == has_expect:
            raise InvalidScenario(pointer, "step needs exactly one of send/expect")
        if has_expect:
            expect = entry["expect"]
            if not isinstance(expect.get("path"), str):
                raise InvalidScenario(f"{pointer}/expect/path", "must be a string")
            if "equals" not in expect:
                raise InvalidScenario(f"{pointer}/expect/equals", "missing required field")
            within = expect.get("within", 0.0)
            if isinstance(within, bool) or not isinstance(within, (int, float)) or within < 0:
                raise InvalidScenario(f"{pointer}/expect/within", "must be a number >= 0")
        steps.append(
            Step(index=i, at=float(at), send=entry.get("send"), expect=entry.get("expect"))
        )
    return steps


class ScriptRunner:
    def __init__(self, system: TwinSystem, steps: list[Step]):
        self.system = system
        self.steps = sorted(steps, key=lambda s: (s.at, s.index))
        self.transcript: list[dict] = []
        self.armed: list[Expectation] = []
        self.failure: AssertionFailed | None = None

    def run(self) -> None:
        """Execute the script; raises AssertionFailed on the first failure."""
        if not self.steps:
            return
        session = self.system.interface.create_session()
        self._drain(session)
        pending = list(self.steps)
        now = self.system.sim_time()
        max_sim = self.system.scenario.run.max_sim_s
        while pending or self.armed:
            while pending and pending[0].at <= now + 1e-9:
                step = pending.pop(0)
                self._dispatch(session, step, now)
            self._check_deadlines(now)
            if not pending and not self.armed:
                break
            if now >= max_sim:
                survivor = self.armed[0] if self.armed else None
                if survivor is not None:
                    self._fail(survivor)
                raise AssertionFailed(
                    pending[0].index, "script finished", f"exceeded max_sim_s={max_sim}"
                )
            now = self.system.tick()
            self._drain(session)

    def _dispatch(self, session, step: Step, now: float) -> None:
        if step.send is not None:
            self.transcript.append(
                {"event": "send", "at": now, "step": step.index, "command": step.send}
            )
            self.system.interface.route_command(session.id, step.send, command_seq=step.index)
            self._drain(session)
        else:
            expect = step.expect
            self.armed.append(
                Expectation(
                    step=step.index,
                    path=expect["path"],
                    equals=expect["equals"],
                    deadline=step.at + float(expect.get("within", 0.0)),
                    tolerance=expect.get("tolerance"),
                )
            )

    def _drain(self, session) -> None:
        while True:
            message = session.channel.pop(timeout=0)
            if message is None:
                return
            self.transcript.append({"event": "receive", "message": message})
            if message["type"] == "snapshot":
                self._evaluate(message["body"])

    def _evaluate(self, snapshot_body: dict) -> None:
        still_armed = []
        for expectation in self.armed:
            if expectation.matches(snapshot_body):
                self.transcript.append(
                    {
                        "event": "assert_pass",
                        "step": expectation.step,
                        "at": snapshot_body.get("timestamp"),
                        "path": expectation.path,
                        "observed": expectation.last_observed,
                    }
                )
            else:
                still_armed.append(expectation)
        self.armed = still_armed

    def _check_deadlines(self, now: float) -> None:
        for expectation in self.armed:
            if now > expectation.deadline + 1e-9:
                self._fail(expectation)

    def _fail(self, expectation: Expectation) -> None:
        self.transcript.append(
            {
                "event": "assert_fail",
                "step": expectation.step,
                "path": expectation.path,
                "expected": expectation.equals,
                "observed": expectation.last_observed,
            }
        )
        raise AssertionFailed(expectation.step, expectation.equals, expectation.last_observed)

    def transcript_text(self) -> str:
        return "".join(json.dumps(entry, sort_keys=True) + "\n" for entry in self.transcript)


def run_script(system: TwinSystem, steps: list[Step]) -> tuple[int, str]:
    """Returns (exit_code, transcript_text)."""
    runner = ScriptRunner(system, steps)
    try:
        runner.run()
    except AssertionFailed:
        return 3, runner.transcript_text()
    return 0, runner.transcript_text()
