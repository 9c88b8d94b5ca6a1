"""Shared fixtures.

The full demo pipeline takes a few seconds, so it runs once per session and
is shared by every test that needs a realistic end-to-end output tree. It
runs twice, through the CLI entry point, because the determinism check
compares the two trees byte for byte.
"""

import json

import pytest

from calltopics import cli


@pytest.fixture(scope="session")
def demo_runs(tmp_path_factory):
    dir_a = tmp_path_factory.mktemp("demo_a")
    dir_b = tmp_path_factory.mktemp("demo_b")
    assert cli.main(["demo", str(dir_a), "--seed", "11"]) == 0
    assert cli.main(["demo", str(dir_b), "--seed", "11"]) == 0
    summary = json.loads((dir_a / "summary.json").read_text())
    return {"dir_a": dir_a, "dir_b": dir_b, "summary": summary}
