"""WebSocket transport for live sessions, plus static frontend hosting.

Each connection gets its own LiveSession; response deliveries run on asyncio
timers paced by the wall clock (realtime sessions map virtual seconds 1:1 to
wall seconds). Non-WebSocket HTTP requests are served from the configured
static directory so the browser workbench and the protocol share one port.
"""

import asyncio
import http
import json
import mimetypes
import time
from pathlib import Path

from .protocol import LiveSession
from .trace import persist_trace

WS_PATH = "/ws"


class SessionConnection:
    """Bridges one WebSocket to a LiveSession with wall-clock pacing."""

    def __init__(self, websocket, trace_dir=None):
        self.websocket = websocket
        self.session = LiveSession()
        self.started = None
        self.trace_dir = trace_dir
        self._pump = None

    def now(self):
        if self.started is None:
            self.started = time.monotonic()
        return time.monotonic() - self.started

    async def send(self, messages):
        for msg in messages:
            await self.websocket.send(json.dumps(msg))

    async def run(self):
        try:
            async for raw in self.websocket:
                try:
                    msg = json.loads(raw)
                except json.JSONDecodeError:
                    await self.send([{"type": "error", "code": "bad_message",
                                      "detail": "frame is not valid JSON"}])
                    continue
                if isinstance(msg, dict) and msg.get("type") == "hello":
                    self.started = time.monotonic()
                out = self.session.handle(msg, self.now())
                await self.send(out)
                self._ensure_pump()
                if self.session.closed:
                    self._persist()
        finally:
            if self._pump is not None:
                self._pump.cancel()

    def _ensure_pump(self):
        if self._pump is None or self._pump.done():
            self._pump = asyncio.ensure_future(self._pump_timers())

    async def _pump_timers(self):
        """Fire queued response deliveries at their wall-clock due times."""
        while not self.session.closed:
            due = self.session.next_due()
            if due is None:
                return
            delay = due - self.now()
            if delay > 0:
                await asyncio.sleep(delay)
                continue
            await self.send(self.session.fire_next())

    def _persist(self):
        if self.trace_dir and self.session.trace is not None:
            path = Path(self.trace_dir)
            path.mkdir(parents=True, exist_ok=True)
            name = f"live-{int(time.time() * 1000)}.jsonl"
            persist_trace(self.session.trace, path / name)


def _static_response(static_dir, path):
    root = Path(static_dir).resolve()
    rel = path.lstrip("/") or "index.html"
    target = (root / rel).resolve()
    if not str(target).startswith(str(root)) or not target.is_file():
        return http.HTTPStatus.NOT_FOUND, [], b"not found"
    ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
    return (http.HTTPStatus.OK, [("Content-Type", ctype)],
            target.read_bytes())


async def serve(port, static_dir=None, trace_dir=None, host="0.0.0.0"):
    """Run the session service until cancelled."""
    import websockets

    def process_request(connection, request):
        if request.path == WS_PATH:
            return None  # proceed with the WebSocket handshake
        if static_dir is None:
            return connection.respond(http.HTTPStatus.NOT_FOUND, "not found")
        status, headers, body = _static_response(static_dir, request.path)
        response = connection.respond(status, "")
        response.body = body
        for key, value in headers:
            response.headers[key] = value
        return response

    async def handler(websocket):
        await SessionConnection(websocket, trace_dir=trace_dir).run()

    async with websockets.serve(handler, host, port,
                                process_request=process_request):
        print(f"session service listening on ws://{host}:{port}{WS_PATH}")
        if static_dir:
            print(f"workbench at http://{host}:{port}/ (serving {static_dir})")
        await asyncio.Future()
