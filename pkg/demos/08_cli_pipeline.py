"""
The batch pipeline
==================

The same runs through the ``gqp`` command line, writing CSV and JSON.
"""

import json
import tempfile
from pathlib import Path

from gqp.cli import main

root = Path(__file__).resolve().parent.parent
out = Path(tempfile.mkdtemp())
for cmd in ("solve", "verify", "oracle"):
    code = main([cmd, "--config", str(root / "configs" / "sine_gauss_1d.json"), "--out", str(out / cmd)])
    print(cmd, "exit", code, sorted(p.name for p in (out / cmd).iterdir()))

summary = json.loads((out / "verify" / "verify.json").read_text())
print("verify ok:", summary["ok"], " diagnostics:", summary["diagnostics"])
