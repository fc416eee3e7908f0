"""Suite-wide guards and helpers.

The whole test suite runs with outbound network blocked: only loopback
TCP connections (for the local test servers) are allowed. Individual
tests can additionally assert that *no* socket at all is touched via
``forbid_all_sockets``.
"""

from __future__ import annotations

import contextlib
import socket

import pytest

_REAL_CONNECT = socket.socket.connect
_LOOPBACK_HOSTS = {"127.0.0.1", "::1", "localhost"}


class NetworkBlockedError(RuntimeError):
    pass


def _guarded_connect(self, address, *args, **kwargs):
    if self.family in (socket.AF_INET, socket.AF_INET6):
        host = address[0] if isinstance(address, tuple) else str(address)
        if host not in _LOOPBACK_HOSTS:
            raise NetworkBlockedError(f"outbound network blocked in tests: {address!r}")
    return _REAL_CONNECT(self, address, *args, **kwargs)


@pytest.fixture(autouse=True)
def _block_external_network(monkeypatch):
    monkeypatch.setattr(socket.socket, "connect", _guarded_connect)
    yield


@contextlib.contextmanager
def forbid_all_sockets():
    """Strict guard: any connect attempt at all is a failure."""

    def _blocked(self, address, *args, **kwargs):
        raise AssertionError(f"socket connect during offline run: {address!r}")

    original = socket.socket.connect
    socket.socket.connect = _blocked
    try:
        yield
    finally:
        socket.socket.connect = original
