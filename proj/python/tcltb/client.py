"""Pure-Python controller client for the tcl-testbed/1 wire protocol.

One JSON object per line over TCP. Typical loop:

    with ControllerClient("127.0.0.1", 47810) as c:
        hello = c.read()                     # {"type": "hello", ...}
        while (frame := c.read()) is not None:
            if frame["type"] == "state_report":
                c.send_requests(frame["step"], {0: "ON", 3: "OFF"})
"""

import json
import socket

PROTOCOL_VERSION = "tcl-testbed/1"


class ControllerClient:
    def __init__(self, host="127.0.0.1", port=47810, timeout=30.0):
        self._sock = socket.create_connection((host, port), timeout=timeout)
        self._buf = b""

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def close(self):
        if self._sock is not None:
            self._sock.close()
            self._sock = None

    def read(self):
        """Next frame as a dict, or None when the server closes."""
        while b"\n" not in self._buf:
            chunk = self._sock.recv(65536)
            if not chunk:
                return None
            self._buf += chunk
        line, self._buf = self._buf.split(b"\n", 1)
        return json.loads(line.decode("utf-8"))

    def send(self, frame):
        data = json.dumps(frame, separators=(",", ":")).encode("utf-8") + b"\n"
        self._sock.sendall(data)

    def send_requests(self, step, desired_modes):
        """desired_modes: mapping of house id -> "ON"/"OFF"."""
        self.send(
            {
                "type": "switch_requests",
                "step": step,
                "requests": [
                    {"house_id": int(hid), "desired_mode": mode}
                    for hid, mode in sorted(desired_modes.items())
                ],
            }
        )
