import pathlib

import pytest

from planttwin.cli.runtime import TwinSystem
from planttwin.cli.scenario import Scenario, load_scenario
from planttwin.net.client import DirectClient, TransportError
from planttwin.net.http import Router

REPO_ROOT = pathlib.Path(__file__).resolve().parent.parent
DEMO_SCENARIO = REPO_ROOT / "scenarios" / "demo.json"
DEMO_SCRIPT = REPO_ROOT / "scenarios" / "demo_script.json"
GOLDEN_DIR = pathlib.Path(__file__).resolve().parent / "golden"


@pytest.fixture(scope="session")
def demo_scenario() -> Scenario:
    return load_scenario(str(DEMO_SCENARIO))


class InstrumentedWire(DirectClient):
    """In-memory wire to the IoT router that records traffic for the
    stream-separation checks and injects transport faults on demand."""

    def __init__(self, router: Router):
        super().__init__(router)
        self.requests = []  # (method, path, x-origin header)
        self.fail_next = 0  # raise TransportError for this many calls

    def request(self, method, path, *, query=None, json_body=None, body=None, headers=None):
        origin = (headers or {}).get("x-origin", "")
        self.requests.append((method, path, origin))
        if self.fail_next > 0:
            self.fail_next -= 1
            raise TransportError(f"injected fault on {method} {path}")
        return super().request(
            method, path, query=query, json_body=json_body, body=body, headers=headers
        )

    def command_calls(self):
        return [r for r in self.requests if r[2] == "command"]


@pytest.fixture
def system(demo_scenario):
    twin = TwinSystem(demo_scenario, iot_wire_factory=InstrumentedWire)
    twin.wire = twin.iot_wire
    yield twin
    twin.close()
