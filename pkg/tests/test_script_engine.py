import json

import pytest

from planttwin.errors import AssertionFailed, InvalidScenario
from planttwin.cli.runtime import TwinSystem
from planttwin.cli.script import ScriptRunner, load_script, parse_script, resolve_path, run_script
from tests.conftest import DEMO_SCRIPT


@pytest.fixture
def demo_steps():
    return load_script(str(DEMO_SCRIPT))


class TestParsing:
    def test_demo_script_loads(self, demo_steps):
        assert len(demo_steps) == 6
        assert demo_steps[0].send is not None
        assert demo_steps[1].expect["equals"] == "critical"

    def test_step_needs_exactly_one_of_send_expect(self):
        with pytest.raises(InvalidScenario):
            parse_script([{"at": 1.0}])
        with pytest.raises(InvalidScenario):
            parse_script([{"at": 1.0, "send": {}, "expect": {"path": "x", "equals": 1}}])

    def test_unknown_step_field_rejected(self):
        with pytest.raises(InvalidScenario):
            parse_script([{"at": 1.0, "send": {}, "note": "hi"}])

    def test_negative_at_rejected(self):
        with pytest.raises(InvalidScenario):
            parse_script([{"at": -1.0, "send": {}}])


class TestPathResolution:
    BODY = {
        "timestamp": 5.0,
        "objects": [
            {"id": "bed-a", "severity": {"level": "none"}, "values": {"temperature": 22.5}},
        ],
        "actuators": [{"id": "heater-1", "active": True}],
    }

    def test_id_indexing(self):
        assert resolve_path(self.BODY, "objects[bed-a].severity.level") == "none"
        assert resolve_path(self.BODY, "actuators[heater-1].active") is True
        assert resolve_path(self.BODY, "objects[bed-a].values.temperature") == 22.5

    def test_missing_pieces_described_not_raised(self):
        assert "missing" in resolve_path(self.BODY, "nothing.here")
        assert "no entry" in resolve_path(self.BODY, "objects[bed-z].severity")


class TestEngine:
    def test_demo_script_passes(self, demo_scenario, demo_steps):
        system = TwinSystem(demo_scenario)
        code, transcript = run_script(system, demo_steps)
        system.close()
        assert code == 0
        events = [json.loads(line)["event"] for line in transcript.splitlines()]
        assert events.count("assert_pass") == 2
        assert events.count("assert_fail") == 0

    def test_empty_script_empty_transcript(self, demo_scenario):
        system = TwinSystem(demo_scenario)
        code, transcript = run_script(system, [])
        system.close()
        assert code == 0
        assert transcript == ""

    def test_never_true_assertion_fails_with_step_index(self, demo_scenario):
        system = TwinSystem(demo_scenario)
        steps = parse_script(
            [{"at": 0.0, "expect": {"path": "objects[bed-a].severity.level",
                                    "equals": "critical", "within": 3.0}}]
        )
        runner = ScriptRunner(system, steps)
        with pytest.raises(AssertionFailed) as excinfo:
            runner.run()
        system.close()
        assert excinfo.value.step == 0
        assert excinfo.value.expected == "critical"
        assert excinfo.value.observed == "none"
        events = [e["event"] for e in runner.transcript]
        assert "assert_fail" in events

    def test_transcript_and_audit_are_byte_identical_across_runs(
        self, demo_scenario, demo_steps, tmp_path
    ):
        outputs = []
        for run_index in range(2):
            audit_path = tmp_path / f"audit-{run_index}.jsonl"
            system = TwinSystem(demo_scenario, audit_path=str(audit_path))
            code, transcript = run_script(system, demo_steps)
            system.close()
            assert code == 0
            outputs.append((transcript.encode(), audit_path.read_bytes()))
        assert outputs[0][0] == outputs[1][0]
        assert outputs[0][1] == outputs[1][1]
        assert len(outputs[0][1]) > 0

    def test_numeric_tolerance_matching(self, demo_scenario):
        system = TwinSystem(demo_scenario)
        steps = parse_script(
            [{"at": 0.0, "expect": {"path": "objects[bed-a].values.temperature",
                                    "equals": 22.0, "tolerance": 0.5, "within": 5.0}}]
        )
        code, _ = run_script(system, steps)
        system.close()
        assert code == 0
