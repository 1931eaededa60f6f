"""Typed errors shared across services.

Every error carries a stable wire code and the HTTP status it maps to,
so services can serialize failures as ``{"error": {"code", "message"}}``
without per-endpoint translation tables.
"""
from __future__ import annotations


class TwinError(Exception):
    """Base for all typed errors. Subclasses set `code` and `http_status`."""

    code = "InternalError"
    http_status = 500

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)
        self.message = message or self.code

    def to_wire(self) -> dict:
        return {"error": {"code": self.code, "message": self.message}}


class UnknownFieldKind(TwinError):
    code = "UnknownFieldKind"
    http_status = 404


class OutOfExtent(TwinError):
    code = "OutOfExtent"
    http_status = 422


class UnknownActuator(TwinError):
    code = "UnknownActuator"
    http_status = 404


class InvalidDirective(TwinError):
    code = "InvalidDirective"
    http_status = 422


class NoSensorsOfKind(TwinError):
    code = "NoSensorsOfKind"
    http_status = 404


class UnknownObject(TwinError):
    code = "UnknownObject"
    http_status = 404


class UnknownSession(TwinError):
    code = "UnknownSession"
    http_status = 404


class ClientLocalCommand(TwinError):
    code = "ClientLocalCommand"
    http_status = 422


class MissingTargetRange(TwinError):
    code = "MissingTargetRange"
    http_status = 422


class EmptyFrameSet(TwinError):
    code = "EmptyFrameSet"
    http_status = 422


class DuplicateYaw(TwinError):
    code = "DuplicateYaw"
    http_status = 422


class MalformedImage(TwinError):
    code = "MalformedImage"
    http_status = 422


class UncoveredRegion(TwinError):
    code = "UncoveredRegion"
    http_status = 422


class NoPanorama(TwinError):
    code = "NoPanorama"
    http_status = 404


class BackendUnavailable(TwinError):
    code = "BackendUnavailable"
    http_status = 500


class PanoramaInvariantError(TwinError):
    code = "PanoramaInvariant"
    http_status = 500


class IotUnreachable(TwinError):
    code = "IotUnreachable"
    http_status = 502


class IotRejected(TwinError):
    """Downstream IoT server rejected the call; wraps the origin code."""

    code = "IotRejected"
    http_status = 502

    def __init__(self, origin_code: str, message: str = ""):
        super().__init__(message or origin_code)
        self.origin_code = origin_code

    def to_wire(self) -> dict:
        return {
            "error": {
                "code": self.code,
                "origin": self.origin_code,
                "message": self.message,
            }
        }


class InvalidScenario(TwinError):
    """Scenario file rejected; `pointer` is a JSON pointer to the bad field."""

    code = "InvalidScenario"
    http_status = 422

    def __init__(self, pointer: str, message: str):
        super().__init__(f"{pointer}: {message}")
        self.pointer = pointer


class PortInUse(TwinError):
    code = "PortInUse"
    http_status = 500


class ServerUnreachable(TwinError):
    code = "ServerUnreachable"
    http_status = 502


class AssertionFailed(TwinError):
    """A scripted assertion did not hold within its deadline."""

    code = "AssertionFailed"
    http_status = 500

    def __init__(self, step: int, expected: object, observed: object):
        super().__init__(
            f"step {step}: expected {expected!r}, observed {observed!r}"
        )
        self.step = step
        self.expected = expected
        self.observed = observed
