"""Object highlight state machine: normal, active (hovered), issue.

Issue dominates active dominates normal. Hovering off an object with an
open issue keeps the issue visible; clearing the issue returns to normal
until the next hover event.
"""
from __future__ import annotations

from dataclasses import dataclass

MODES = ("normal", "active", "issue")
EVENTS = ("hover_on", "hover_off", "issue_raised", "issue_cleared")


@dataclass(frozen=True)
class HighlightState:
    mode: str = "normal"
    severity: str | None = None  # set iff mode == "issue"

    def to_wire(self) -> dict:
        wire: dict = {"mode": self.mode}
        if self.severity is not None:
            wire["severity"] = self.severity
        return wire


NORMAL = HighlightState("normal")
ACTIVE = HighlightState("active")


def issue(severity: str) -> HighlightState:
    return HighlightState("issue", severity)


def transition(state: HighlightState, event: str, severity: str | None = None) -> HighlightState:
    if event not in EVENTS:
        raise ValueError(f"unknown highlight event {event!r}")
    if event == "issue_raised":
        if severity is None:
            raise ValueError("issue_raised needs a severity")
        return issue(severity)  # dominates whatever was shown
    if event == "issue_cleared":
        return NORMAL if state.mode == "issue" else state
    if state.mode == "issue":
        return state  # hover events never displace an issue
    if event == "hover_on":
        return ACTIVE
    return NORMAL  # hover_off
