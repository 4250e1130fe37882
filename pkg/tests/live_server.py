"""Run a genface app in a background uvicorn thread on an ephemeral port."""

from __future__ import annotations

import json
import threading
import time

import httpx
import uvicorn


class LiveServer:
    def __init__(self, app):
        config = uvicorn.Config(app, host="127.0.0.1", port=0, log_level="warning", lifespan="off")
        self.server = uvicorn.Server(config)
        self.thread = threading.Thread(target=self.server.run, daemon=True)

    def __enter__(self) -> "LiveServer":
        self.thread.start()
        deadline = time.time() + 10
        while not self.server.started:
            if time.time() > deadline:
                raise RuntimeError("server did not start in time")
            time.sleep(0.01)
        sock = self.server.servers[0].sockets[0]
        self.base_url = "http://127.0.0.1:%d" % sock.getsockname()[1]
        return self

    def __exit__(self, *exc) -> None:
        self.server.should_exit = True
        self.thread.join(timeout=10)


def collect_stream_frames(url: str, count: int, out: list, ready: threading.Event,
                          timeout: float = 30.0) -> None:
    """Read SSE data frames until ``count`` collected; appends dicts to ``out``."""
    with httpx.stream("GET", url, timeout=timeout) as response:
        for line in response.iter_lines():
            if line.startswith("data: "):
                out.append(json.loads(line[len("data: "):]))
                ready.set()
                if len(out) >= count:
                    return
