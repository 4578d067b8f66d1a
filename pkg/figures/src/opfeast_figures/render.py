"""Render the five figure kinds from solver output files.

Kinds and their inputs:

  error-vs-n       eig_error_vs_n.csv          log-log + n^-2 guide line
  coeff-decay      *_coeffs.csv (1+)           semilog coefficient magnitudes
  filter-heatmap   filter_grid.csv             |s| heatmap, log color scale
  beam-modes       eigenfunctions.json (1+)    stacked mode gallery
  spectrum-filter  results.json filter_grid.csv  heatmap + computed spectrum

Invoked as `figures <kind> <inputs...> -o out.svg`; a PNG twin is written
next to the SVG. Rendering never mutates inputs and is deterministic for
fixed inputs (fixed hash salt, no embedded dates).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "opfeast-figures"

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.colors import LogNorm

KINDS = ("error-vs-n", "coeff-decay", "filter-heatmap", "beam-modes",
         "spectrum-filter")


class SchemaError(Exception):
    """An input file does not match the expected opfeast artifact schema."""


@dataclass
class FigureJob:
    kind: str
    inputs: list
    output: Path
    title: str = ""
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}; "
                              f"expected one of {', '.join(KINDS)}")
        self.inputs = [Path(p) for p in self.inputs]
        self.output = Path(self.output)
        for p in self.inputs:
            if not p.exists():
                raise SchemaError(f"input does not exist: {p}")


# ---------------------------------------------------------------------------
# input readers (schema-checked)
# ---------------------------------------------------------------------------

def _read_csv(path: Path, required_prefixes: tuple) -> list:
    with open(path) as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise SchemaError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if len(header) < len(required_prefixes) or not all(
            h.lower().startswith(p) for h, p in zip(header, required_prefixes)):
        raise SchemaError(f"{path}: header {header} does not match "
                          f"expected columns {list(required_prefixes)}")
    body = [r for r in rows[1:] if r and any(c.strip() for c in r)]
    if not body:
        raise SchemaError(f"{path}: no data rows")
    try:
        return [[float(c) for c in r[: len(required_prefixes)]] for r in body]
    except ValueError as exc:
        raise SchemaError(f"{path}: non-numeric data ({exc})") from exc


def _read_chebfun(obj: dict):
    try:
        dom = obj["domain"]
        c = np.asarray(obj["coeffs_re"], dtype=float) \
            + 1j * np.asarray(obj["coeffs_im"], dtype=float)
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"bad serialized function object: {exc}") from exc

    def evaluate(x):
        t = (2.0 * np.asarray(x) - (dom[0] + dom[1])) / (dom[1] - dom[0])
        b1 = np.zeros_like(t, dtype=complex)
        b2 = np.zeros_like(t, dtype=complex)
        for ck in c[:0:-1]:
            b1, b2 = 2.0 * t * b1 - b2 + ck, b1
        return (t * b1 - b2 + c[0]).real

    return dom, evaluate


def _read_functions_json(path: Path) -> list:
    try:
        doc = json.loads(path.read_text())
        funs = doc["functions"]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise SchemaError(f"{path}: not a functions file ({exc})") from exc
    if not funs:
        raise SchemaError(f"{path}: no functions")
    return [_read_chebfun(f) for f in funs]


def _read_results_json(path: Path) -> dict:
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from exc
    if doc.get("schema") != "opfeast-result-v1" or "result" not in doc:
        raise SchemaError(f"{path}: not an opfeast results.json")
    return doc


# ---------------------------------------------------------------------------
# renderers
# ---------------------------------------------------------------------------

def _render_error_vs_n(job: FigureJob, ax):
    data = np.array(_read_csv(job.inputs[0], ("n", "lambda_hat_re",
                                              "lambda_hat_im", "lambda_ref",
                                              "rel_diff")))
    n, rel = data[:, 0], data[:, 4]
    ax.loglog(n, rel, "o-", color="m", label="computed")
    guide = rel[0] * (n / n[0]) ** -2.0
    line, = ax.loglog(n, guide, "k--", label=r"$O(n^{-2})$")
    line.set_gid("guide-n-2")
    ax.set_xlabel("mode index n")
    ax.set_ylabel("relative difference to asymptote")
    ax.legend()


def _render_coeff_decay(job: FigureJob, ax):
    for path in job.inputs:
        data = np.array(_read_csv(path, ("index", "abs_coeff")))
        mags = np.maximum(data[:, 1], 1e-20)
        ax.semilogy(data[:, 0], mags, lw=0.8, label=path.stem)
    ax.set_xlabel("Chebyshev coefficient index k")
    ax.set_ylabel(r"$|c_k|$")
    if len(job.inputs) > 1:
        ax.legend(fontsize=7)


def _heatmap(ax, path: Path):
    data = np.array(_read_csv(path, ("re", "im", "abs_s")))
    re = np.unique(data[:, 0])
    im = np.unique(data[:, 1])
    if len(re) * len(im) != len(data):
        raise SchemaError(f"{path}: grid is not rectangular")
    mag = data[:, 2].reshape(len(im), len(re))
    floor = max(mag[mag > 0].min() if np.any(mag > 0) else 1e-16, 1e-16)
    mesh = ax.pcolormesh(re, im, np.maximum(mag, floor),
                         norm=LogNorm(vmin=floor, vmax=max(mag.max(), 2 * floor)),
                         shading="nearest")
    mesh.set_gid("filter-heatmap-log")
    ax.set_xlabel("Re(z)")
    ax.set_ylabel("Im(z)")
    return mesh


def _render_filter_heatmap(job: FigureJob, ax):
    mesh = _heatmap(ax, job.inputs[0])
    plt.colorbar(mesh, ax=ax, label="|s(z)| (log scale)")


def _render_beam_modes(job: FigureJob, ax):
    offset = 0.0
    yticks, ylabels = [], []
    for k, path in enumerate(job.inputs):
        funs = _read_functions_json(path)
        label = f"mode {k + 1}"
        results = path.parent / "results.json"
        if results.exists():
            try:
                doc = _read_results_json(results)
                lam = doc["result"].get("eigenvalue")
                if lam:
                    label = rf"$\lambda_{{{k + 1}}} \approx {lam[0]:.4g}$"
            except SchemaError:
                pass
        dom, f = funs[0]
        x = np.linspace(dom[0], dom[1], 400)
        y = f(x)
        y = y / np.abs(y).max()
        ax.plot(x / dom[1], y + offset, lw=1.2)
        ax.axhline(offset, color="0.8", lw=0.5, zorder=0)
        yticks.append(offset)
        ylabels.append(label)
        offset += 2.4
    ax.set_yticks(yticks)
    ax.set_yticklabels(ylabels)
    ax.set_xlabel("x / L")


def _render_spectrum_filter(job: FigureJob, ax):
    if len(job.inputs) < 2:
        raise SchemaError("spectrum-filter needs results.json and filter_grid.csv")
    results = [p for p in job.inputs if p.suffix == ".json"]
    grids = [p for p in job.inputs if p.suffix == ".csv"]
    if not results or not grids:
        raise SchemaError("spectrum-filter needs one .json and one .csv input")
    mesh = _heatmap(ax, grids[0])
    plt.colorbar(mesh, ax=ax, label="|s(z)| (log scale)")
    doc = _read_results_json(results[0])
    vals = np.array(doc["result"].get("ritz_values", []), dtype=float)
    flags = doc["result"].get("in_region", [False] * len(vals))
    if len(vals):
        inside = np.array(flags, dtype=bool)
        if inside.any():
            ax.plot(vals[inside, 0], vals[inside, 1], "ro", ms=6,
                    label="in region")
        if (~inside).any():
            ax.plot(vals[~inside, 0], vals[~inside, 1], "bo", ms=6,
                    label="outside")
        ax.legend(loc="upper right", fontsize=7)


_RENDERERS = {
    "error-vs-n": _render_error_vs_n,
    "coeff-decay": _render_coeff_decay,
    "filter-heatmap": _render_filter_heatmap,
    "beam-modes": _render_beam_modes,
    "spectrum-filter": _render_spectrum_filter,
}


def render(job: FigureJob) -> list:
    """Render one job; returns the written paths (SVG plus PNG twin)."""
    fig, ax = plt.subplots(figsize=(5.2, 3.9), dpi=130)
    try:
        _RENDERERS[job.kind](job, ax)
        if job.title:
            ax.set_title(job.title)
        fig.tight_layout()
        out = job.output
        out.parent.mkdir(parents=True, exist_ok=True)
        written = []
        svg = out if out.suffix == ".svg" else out.with_suffix(".svg")
        fig.savefig(svg, format="svg", metadata={"Date": None})
        written.append(svg)
        png = out.with_suffix(".png")
        fig.savefig(png, format="png")
        written.append(png)
        return written
    finally:
        plt.close(fig)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="figures",
        description="Regenerate survey figures from opfeast output files")
    ap.add_argument("kind", choices=KINDS)
    ap.add_argument("inputs", nargs="+", help="input CSV/JSON artifact paths")
    ap.add_argument("-o", "--output", required=True, help="output image (.svg)")
    ap.add_argument("--title", default="")
    args = ap.parse_args(argv)
    try:
        job = FigureJob(kind=args.kind, inputs=args.inputs,
                        output=Path(args.output), title=args.title)
        written = render(job)
    except SchemaError as exc:
        print(f"figures: {exc}", file=sys.stderr)
        return 1
    for p in written:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
