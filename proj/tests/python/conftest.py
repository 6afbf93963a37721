import json
import os
import subprocess

import pytest


@pytest.fixture
def cli():
    exe = os.environ.get("DSPROTO_CLI")
    if not exe:
        pytest.skip("DSPROTO_CLI not set")

    def run(*args, stdin=None, check=True):
        proc = subprocess.run([exe, *map(str, args)], input=stdin, capture_output=True, text=True)
        if check and proc.returncode != 0:
            raise AssertionError(f"exit {proc.returncode}: {proc.stderr}")
        return proc

    return run


def write_evidence(path, records, frame=None):
    with open(path, "w") as f:
        if frame:
            f.write(json.dumps({"frame": frame}) + "\n")
        for rid, masses in records:
            entries = [{"focal": "*" if focal == "*" else list(focal), "mass": m} for focal, m in masses]
            f.write(json.dumps({"id": rid, "masses": entries}) + "\n")
    return path


def write_prior(path, masses):
    path.write_text(json.dumps({"masses": masses}))
    return path
