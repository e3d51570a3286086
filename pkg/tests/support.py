"""Shared helpers for the test suite."""

from pathlib import Path

FIXTURES = Path(__file__).parent / "fixtures"


def fixture_path(name: str) -> Path:
    return FIXTURES / name


def stub_url(server) -> str:
    host, port = server.server_address
    return f"http://{host}:{port}"
