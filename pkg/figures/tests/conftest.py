"""Generate real solver artifacts once per session through the opfeast CLI.

The figures package consumes only the CLI's file formats, so the fixtures
shell out to the installed `opfeast` entry point rather than importing it.
"""

import json
import subprocess
import sys

import pytest


def cli(*args):
    proc = subprocess.run([sys.executable, "-m", "opfeast.cli", *args],
                          capture_output=True, text=True)
    assert proc.returncode in (0, 2), proc.stderr
    return proc


@pytest.fixture(scope="session")
def artifacts(tmp_path_factory):
    root = tmp_path_factory.mktemp("artifacts")

    sweep_cfg = root / "sweep.json"
    sweep_cfg.write_text(json.dumps({
        "problem": "regular-slep", "mode": "feast",
        "sweep": {"n": [5, 10, 20]}, "feast": {"m": 1, "tol": 1e-9},
        "threads": 1}))
    cli("run", str(sweep_cfg), "--out", str(root / "sweep"))

    osc_cfg = root / "osc.json"
    osc_cfg.write_text(json.dumps({
        "problem": "oscillator", "mode": "feast", "n": 2,
        "feast": {"m": 1, "tol": 1e-10},
        "emit": {"coefficients": True, "eigenfunctions": True,
                 "residual_history": True},
        "threads": 1}))
    cli("run", str(osc_cfg), "--out", str(root / "osc"))

    for n in (1, 2, 3):
        beam_cfg = root / f"beam{n}.json"
        beam_cfg.write_text(json.dumps({
            "problem": "beam", "mode": "rqi", "n": n,
            "emit": {"coefficients": True, "eigenfunctions": True}}))
        cli("run", str(beam_cfg), "--out", str(root / f"beam{n}"))

    hp_cfg = root / "hp.json"
    hp_cfg.write_text(json.dumps({
        "problem": "halfplane-synthetic", "mode": "feast",
        "filter": {"kind": "halfplane", "a": 1.0, "ell": 40},
        "feast": {"m": 1, "tol": 1e-9}, "seed": 1,
        "emit": {"filter_grid": True}, "threads": 1}))
    cli("run", str(hp_cfg), "--out", str(root / "hp"))

    cli("filter-grid", "--kind", "halfplane", "--a", "1", "--ell", "20",
        "--points", "40", "32", "--out", str(root / "grid.csv"))
    return root
