"""planttwin: run and exercise the whole twin from one entry point.

  planttwin run --scenario scenarios/demo.json
  planttwin capture-sim --scenario scenarios/demo.json --server http://127.0.0.1:8700
  planttwin script --scenario scenarios/demo.json --script scenarios/demo_script.json
  planttwin validate --scenario scenarios/demo.json
  planttwin serve-iot / serve-interface   (used by --split; also standalone)

Exit codes: 0 ok, 2 invalid scenario/script, 3 assertion failed,
4 port in use, 5 server unreachable, 1 anything else.
"""
from __future__ import annotations

import argparse
import os
import signal
import socket
import subprocess
import sys
import threading
import time as wall_time
from urllib.parse import urlsplit

from planttwin.errors import (
    AssertionFailed,
    InvalidScenario,
    PortInUse,
    ServerUnreachable,
    TwinError,
)
from planttwin.cli.capture import render_capture_sweep, upload_frames
from planttwin.cli.runtime import TickLoop, TwinSystem
from planttwin.cli.scenario import load_scenario
from planttwin.cli.script import load_script, run_script
from planttwin.farm.host import WorldHost
from planttwin.farm.world import build_world
from planttwin.iot.api import build_router as build_iot_router
from planttwin.iot.service import IotService
from planttwin.net.client import SocketClient, TransportError
from planttwin.net.httpserver import ApiServer

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INVALID = 2
EXIT_ASSERTION = 3
EXIT_PORT = 4
EXIT_UNREACHABLE = 5


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except InvalidScenario as err:
        print(f"invalid scenario: {err.message}", file=sys.stderr)
        return EXIT_INVALID
    except AssertionFailed as err:
        print(f"assertion failed: {err.message}", file=sys.stderr)
        return EXIT_ASSERTION
    except PortInUse as err:
        print(f"port in use: {err.message}", file=sys.stderr)
        return EXIT_PORT
    except ServerUnreachable as err:
        print(f"server unreachable: {err.message}", file=sys.stderr)
        return EXIT_UNREACHABLE
    except TwinError as err:
        print(f"error: {err.code}: {err.message}", file=sys.stderr)
        return EXIT_ERROR


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="planttwin", description="Desk-scale plant factory digital twin"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run all services from a scenario file")
    run.add_argument("--scenario", required=True)
    run.add_argument("--iot-port", type=int, default=None)
    run.add_argument("--interface-port", type=int, default=None)
    run.add_argument("--split", action="store_true",
                     help="run iot and interface servers as separate processes")
    run.add_argument("--audit-log", default=None)
    run.add_argument("--cadence", type=float, default=None,
                     help="snapshot cadence in simulated seconds")
    run.add_argument("--time-scale", type=float, default=None,
                     help="simulated seconds per wall second multiplier")
    run.set_defaults(handler=cmd_run)

    script = sub.add_parser("script", help="run a timed command/assertion script headlessly")
    script.add_argument("--scenario", required=True)
    script.add_argument("--script", required=True, dest="script_path")
    script.add_argument("--transcript", default=None, help="write transcript JSON lines here")
    script.add_argument("--audit-log", default=None)
    script.set_defaults(handler=cmd_script)

    capture = sub.add_parser("capture-sim", help="render synthetic frames and upload them")
    capture.add_argument("--scenario", required=True)
    capture.add_argument("--server", default="http://127.0.0.1:8700")
    capture.set_defaults(handler=cmd_capture)

    validate = sub.add_parser("validate", help="validate a scenario file")
    validate.add_argument("--scenario", required=True)
    validate.set_defaults(handler=cmd_validate)

    serve_iot = sub.add_parser("serve-iot", help="serve only the IoT server (with the farm sim)")
    serve_iot.add_argument("--scenario", required=True)
    serve_iot.add_argument("--port", type=int, default=0)
    serve_iot.add_argument("--time-scale", type=float, default=None)
    serve_iot.add_argument("--parent-pid", type=int, default=None,
                           help="exit when this process dies (used by run --split)")
    serve_iot.set_defaults(handler=cmd_serve_iot)

    serve_iface = sub.add_parser("serve-interface", help="serve only the interface server")
    serve_iface.add_argument("--scenario", required=True)
    serve_iface.add_argument("--port", type=int, default=0)
    serve_iface.add_argument("--iot-url", required=True)
    serve_iface.add_argument("--audit-log", default=None)
    serve_iface.add_argument("--cadence", type=float, default=None)
    serve_iface.add_argument("--time-scale", type=float, default=None)
    serve_iface.add_argument("--parent-pid", type=int, default=None,
                             help="exit when this process dies (used by run --split)")
    serve_iface.set_defaults(handler=cmd_serve_interface)
    return parser


def _wait_for_signal(parent_pid: int | None = None) -> None:
    """Block until SIGINT/SIGTERM; with parent_pid, also exit if that
    process dies, so split-mode children never outlive their parent."""
    done = threading.Event()

    def stop(signum, frame):
        done.set()

    signal.signal(signal.SIGINT, stop)
    signal.signal(signal.SIGTERM, stop)
    if parent_pid is None:
        done.wait()
        return
    while not done.wait(timeout=1.0):
        try:
            os.kill(parent_pid, 0)
        except OSError:
            return  # parent is gone; shut down with it


def _wait_healthy(host: str, port: int, deadline_s: float = 5.0) -> dict:
    client = SocketClient(host, port, timeout=1.0)
    deadline = wall_time.monotonic() + deadline_s
    last = None
    while wall_time.monotonic() < deadline:
        try:
            response = client.request("GET", "/v1/health")
            if response.status == 200:
                return response.json()
        except TransportError as exc:
            last = exc
        wall_time.sleep(0.05)
    raise ServerUnreachable(f"{host}:{port} not healthy within {deadline_s}s: {last}")


def _free_port() -> int:
    with socket.socket() as probe:
        probe.bind(("127.0.0.1", 0))
        return probe.getsockname()[1]


# ------------------------------------------------------------------ commands

def cmd_run(args) -> int:
    scenario = load_scenario(args.scenario)
    iot_port = args.iot_port if args.iot_port is not None else scenario.run.iot_port
    iface_port = (
        args.interface_port if args.interface_port is not None else scenario.run.interface_port
    )
    time_scale = args.time_scale if args.time_scale is not None else scenario.run.time_scale
    if args.split:
        return _run_split(args, scenario, iot_port, iface_port, time_scale)

    system = TwinSystem(scenario, audit_path=args.audit_log, cadence=args.cadence)
    iot_server = ApiServer(system.iot_router)
    iface_server = ApiServer(system.interface_router, ws_routes=system.ws_routes)
    try:
        iot_host, iot_bound = iot_server.start("127.0.0.1", iot_port)
        iface_host, iface_bound = iface_server.start("127.0.0.1", iface_port)
    except PortInUse:
        iot_server.stop()
        raise
    ticker = TickLoop(system, time_scale=time_scale)
    ticker.start()
    _wait_healthy(iot_host, iot_bound)
    _wait_healthy(iface_host, iface_bound)
    print(f"iot server listening on http://{iot_host}:{iot_bound}")
    print(f"interface server listening on http://{iface_host}:{iface_bound}")
    print(f"farm sim ticking every {scenario.factory.tick_interval}s (x{time_scale})")
    sys.stdout.flush()
    try:
        _wait_for_signal()
    finally:
        ticker.stop()
        iface_server.stop()
        iot_server.stop()
        system.close()
    return EXIT_OK


def _run_split(args, scenario, iot_port: int, iface_port: int, time_scale: float) -> int:
    iot_port = iot_port or _free_port()
    iface_port = iface_port or _free_port()
    base = [sys.executable, "-m", "planttwin.cli.app"]
    parent = ["--parent-pid", str(os.getpid())]
    iot_cmd = base + ["serve-iot", "--scenario", args.scenario, "--port", str(iot_port)] + parent
    iface_cmd = base + [
        "serve-interface", "--scenario", args.scenario, "--port", str(iface_port),
        "--iot-url", f"http://127.0.0.1:{iot_port}",
    ] + parent
    if args.time_scale is not None:
        iot_cmd += ["--time-scale", str(args.time_scale)]
        iface_cmd += ["--time-scale", str(args.time_scale)]
    if args.audit_log:
        iface_cmd += ["--audit-log", args.audit_log]
    if args.cadence is not None:
        iface_cmd += ["--cadence", str(args.cadence)]
    children = [subprocess.Popen(iot_cmd), subprocess.Popen(iface_cmd)]
    try:
        _wait_healthy("127.0.0.1", iot_port)
        _wait_healthy("127.0.0.1", iface_port)
        print(f"iot server listening on http://127.0.0.1:{iot_port} (pid {children[0].pid})")
        print(f"interface server listening on http://127.0.0.1:{iface_port} (pid {children[1].pid})")
        sys.stdout.flush()
        _wait_for_signal()
    finally:
        for child in children:
            if child.poll() is None:
                child.terminate()
        for child in children:
            try:
                child.wait(timeout=10)
            except subprocess.TimeoutExpired:
                child.kill()
                child.wait()
    return EXIT_OK


def cmd_script(args) -> int:
    scenario = load_scenario(args.scenario)
    steps = load_script(args.script_path)
    system = TwinSystem(scenario, audit_path=args.audit_log)
    try:
        code, transcript = run_script(system, steps)
    finally:
        system.close()
    if args.transcript:
        with open(args.transcript, "w", encoding="utf-8") as fh:
            fh.write(transcript)
    else:
        sys.stdout.write(transcript)
    if code == EXIT_OK:
        print(f"script passed ({len(steps)} steps)", file=sys.stderr)
    return code


def cmd_capture(args) -> int:
    scenario = load_scenario(args.scenario)
    parsed = urlsplit(args.server)
    client = SocketClient(parsed.hostname or "127.0.0.1", parsed.port or 80, timeout=10.0)
    frames = render_capture_sweep(scenario)
    version = upload_frames(client, frames)
    print(f"uploaded {len(frames)} frames; panorama version {version}")
    return EXIT_OK


def cmd_validate(args) -> int:
    scenario = load_scenario(args.scenario)
    print(
        f"scenario '{scenario.name}' ok: {len(scenario.sensors)} sensors, "
        f"{len(scenario.actuators)} actuators, {len(scenario.objects)} objects"
    )
    return EXIT_OK


def cmd_serve_iot(args) -> int:
    scenario = load_scenario(args.scenario)
    time_scale = args.time_scale if args.time_scale is not None else scenario.run.time_scale
    world = build_world(scenario.factory, list(scenario.actuators))
    host = WorldHost(world)
    service = IotService(host, list(scenario.sensors))
    server = ApiServer(build_iot_router(service))
    bound_host, bound_port = server.start("127.0.0.1", args.port)

    stop = threading.Event()

    def tick_loop():
        period = scenario.factory.tick_interval / time_scale
        while not stop.is_set():
            snapshot = host.advance()
            service.ingest_tick(snapshot)
            stop.wait(period)

    ticker = threading.Thread(target=tick_loop, daemon=True)
    ticker.start()
    print(f"iot server listening on http://{bound_host}:{bound_port}")
    sys.stdout.flush()
    try:
        _wait_for_signal(args.parent_pid)
    finally:
        stop.set()
        ticker.join(timeout=5)
        server.stop()
    return EXIT_OK


def cmd_serve_interface(args) -> int:
    scenario = load_scenario(args.scenario)
    time_scale = args.time_scale if args.time_scale is not None else scenario.run.time_scale
    parsed = urlsplit(args.iot_url)
    iot_wire = SocketClient(parsed.hostname or "127.0.0.1", parsed.port or 80, timeout=5.0)

    from planttwin.scene.compose import get_backend
    from planttwin.scene.store import FrameStore
    from planttwin.server.api import build_router, channel_handler
    from planttwin.server.audit import AuditLog
    from planttwin.server.iot_client import IotApiClient
    from planttwin.server.service import InterfaceService

    cadence = args.cadence if args.cadence is not None else scenario.run.cadence_s
    store = FrameStore(
        backend=get_backend(scenario.run.backend),
        panorama_height=scenario.run.panorama_height,
    )
    service = InterfaceService(
        iot=IotApiClient(iot_wire),
        store=store,
        objects=list(scenario.objects),
        camera_pos=scenario.camera.position,
        audit=AuditLog(args.audit_log),
        cadence=cadence,
        queue_depth=scenario.run.queue_depth,
    )
    server = ApiServer(build_router(service), ws_routes={"/v1/channel": channel_handler(service)})
    bound_host, bound_port = server.start("127.0.0.1", args.port)

    stop = threading.Event()

    def poll_loop():
        # follow the iot server's simulated clock at snapshot cadence
        period = cadence / time_scale
        while not stop.is_set():
            try:
                health = service.iot.health()
                service.on_tick(float(health.payload.get("sim_time", 0.0)))
            except TwinError:
                pass  # iot temporarily unreachable; keep polling
            stop.wait(period)

    poller = threading.Thread(target=poll_loop, daemon=True)
    poller.start()
    print(f"interface server listening on http://{bound_host}:{bound_port}")
    sys.stdout.flush()
    try:
        _wait_for_signal(args.parent_pid)
    finally:
        stop.set()
        poller.join(timeout=5)
        server.stop()
        service.audit.close()
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
