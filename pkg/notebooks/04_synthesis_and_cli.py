"""
Synthesis and the command line
==============================

``synthesize`` picks a construction from the party dimensions alone. The
same pipeline is available as the ``gnl`` command.
"""

import json
import tempfile
from pathlib import Path

from genuine_nonlocality import NeedsExternalSeed, certify_set, synthesize
from genuine_nonlocality.cli import run

for dims in [(3, 5), (4, 3, 5), (3, 3, 3, 3)]:
    states, plan = synthesize(dims)
    # certify_set follows the attached plan when there is one
    cert = certify_set(states)
    print(f"{dims}: {len(states)} states, {cert.kind} certificate, {cert.verdict.value}")

try:
    synthesize((3, 3, 3))
except NeedsExternalSeed as exc:
    print(exc)

# Build, then verify from files. The last stdout line is machine-greppable.
with tempfile.TemporaryDirectory() as tmp:
    out, report = Path(tmp, "set.json"), Path(tmp, "cert.json")
    run(["build", "boundary", "--x", "3", "--y", "4", "--out", str(out)])
    code = run(["verify", "--set", str(out), "--report", str(report)])
    print("exit code", code)
    print(json.dumps(json.loads(report.read_text())["bipartitions"][0], indent=2))
