"""Command-line front door: run configs, demos, catalog queries, filter dumps.

Exit codes: 0 converged, 1 configuration error, 2 solver ran but did not
converge (results are still written).  All numeric output is serialized as
decimal with 17 significant digits; results.json is byte-identical across
reruns of the same config and seed, except for the timestamp field.
"""

from __future__ import annotations

import argparse
import datetime
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .chebfun import ChebFun, SplitWeight
from .errors import ConfigError, OpfeastError, StagnationError
from .eigensolver import EigResult, FeastConfig, contfeast
from .expressions import parse_coeff_expression
from .filters import RationalFilter, disk_filter, halfplane_filter
from .operators import BoundaryCondition, LinDiffOp, Pencil
from .problems import ProblemSpec, by_name, catalog, slep_asymptotic
from .rqi import beam_initial_guess, rqi_iterate

log = logging.getLogger("opfeast")


# ---------------------------------------------------------------------------
# deterministic JSON with 17 significant digits
# ---------------------------------------------------------------------------

def _format_float(x: float) -> str:
    if x != x or x in (float("inf"), float("-inf")):
        return '"%s"' % x
    return "%.17g" % x


def dumps17(obj, indent=0) -> str:
    """JSON text with floats at 17 significant digits and sorted keys."""
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = ",\n".join(
            f'{pad}  {json.dumps(str(k))}: {dumps17(v, indent + 1)}'
            for k, v in sorted(obj.items()))
        return "{\n" + items + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = ", ".join(dumps17(v, indent) for v in obj)
        return "[" + items + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_float(float(obj))
    if isinstance(obj, complex):
        return dumps17([obj.real, obj.imag], indent)
    return json.dumps(obj)


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------

def _build_filter(spec: dict) -> RationalFilter:
    kind = spec.get("kind")
    if kind == "disk":
        c = spec.get("center", [0.0, 0.0])
        return disk_filter(complex(c[0], c[1]), float(spec["radius"]),
                           int(spec.get("ell", 16)))
    if kind == "halfplane":
        return halfplane_filter(float(spec.get("a", 1.0)), int(spec.get("ell", 40)))
    raise ConfigError(f"filter.kind must be 'disk' or 'halfplane', got {kind!r}")


def _build_op(obj: dict) -> LinDiffOp:
    domain = tuple(obj.get("domain", (-1.0, 1.0)))
    coeffs = []
    for c in obj["coeffs"]:
        if isinstance(c, str):
            coeffs.append(parse_coeff_expression(c, domain))
        elif isinstance(c, (int, float)):
            coeffs.append(ChebFun.constant(float(c), domain))
        elif isinstance(c, dict):
            coeffs.append(ChebFun.from_json(c))
        else:
            raise ConfigError(f"bad coefficient entry: {c!r}")
    if "order" in obj and int(obj["order"]) != len(coeffs) - 1:
        raise ConfigError(f"operator order {obj['order']} does not match "
                          f"{len(coeffs)} coefficients")
    return LinDiffOp(coeffs)


def _build_weight(obj, domain):
    if obj in (None, "unit"):
        return None
    if isinstance(obj, str):
        return parse_coeff_expression(obj, domain)
    if isinstance(obj, dict) and "split" in obj:
        left, right = obj["split"]
        return SplitWeight(ChebFun.from_json(left), ChebFun.from_json(right))
    if isinstance(obj, dict) and "split_abs_power" in obj:
        from .chebfun import abs_power_weight
        return abs_power_weight(int(obj["split_abs_power"]), domain)
    if isinstance(obj, dict):
        return ChebFun.from_json(obj)
    raise ConfigError(f"bad weight entry: {obj!r}")


def _build_problem(obj) -> ProblemSpec:
    if isinstance(obj, str):
        try:
            return by_name(obj)
        except KeyError as exc:
            raise ConfigError(str(exc)) from exc
    if not isinstance(obj, dict):
        raise ConfigError("problem must be a catalog name or an inline object")
    # boundary rows may sit at the problem level or inside the operator block
    bc_doc = obj.get("bcs") or obj.get("op", {}).get("bcs") \
        or obj.get("op1", {}).get("bcs") or []
    bcs = tuple(BoundaryCondition.from_json(b) for b in bc_doc)
    if "op1" in obj:
        op = Pencil(_build_op(obj["op1"]), _build_op(obj["op2"]))
    elif "op" in obj:
        op = _build_op(obj["op"])
    else:
        raise ConfigError("inline problem needs 'op' or 'op1'/'op2'")
    weight = _build_weight(obj.get("weight"), op.domain)
    return ProblemSpec(name=obj.get("name", "inline"), operator=op, bcs=bcs,
                       weight=weight, suggested_m=int(obj.get("m", 1)))


class RunConfig:
    """Validated run description (one JSON document per run)."""

    def __init__(self, doc: dict, overrides: dict | None = None):
        if not isinstance(doc, dict):
            raise ConfigError("config root must be a JSON object")
        overrides = overrides or {}
        self.problem = _build_problem(doc.get("problem", "oscillator"))
        self.mode = doc.get("mode", "feast")
        if self.mode not in ("feast", "rqi"):
            raise ConfigError(f"mode must be 'feast' or 'rqi', got {self.mode!r}")
        self.seed = int(overrides.get("seed", doc.get("seed", 0)))
        self.out = Path(overrides.get("out") or doc.get("out", "."))
        self.threads = int(overrides.get("threads", doc.get("threads", 0)) or 0)
        self.emit = dict(doc.get("emit", {}))
        self.sweep = doc.get("sweep")
        self.n = int(overrides.get("n", doc.get("n", 1)))
        self.doc = doc

        feast = dict(doc.get("feast", {}))
        rqi = dict(doc.get("rqi", {}))
        for key, target in (("tol", "tol"), ("m", "m"), ("max_iter", "max_iters")):
            if overrides.get(key) is not None:
                feast[target] = overrides[key]
                if key == "tol":
                    rqi["tol"] = overrides[key]
                if key == "max_iter":
                    rqi["max_iters"] = overrides[key]
        self.feast_params = feast
        self.rqi_params = rqi

        fdoc = doc.get("filter")
        if overrides.get("ell") is not None and fdoc:
            fdoc = {**fdoc, "ell": overrides["ell"]}
        self.filter_doc = fdoc
        self.ell_override = overrides.get("ell")

    def filter_for(self, n: int) -> RationalFilter:
        if self.filter_doc:
            return _build_filter(self.filter_doc)
        if self.problem.region is None:
            raise ConfigError("no filter given and the problem has no region generator")
        desc = self.problem.region(n)
        if self.ell_override is not None:
            desc = {**desc, "ell": self.ell_override}
        return _build_filter(desc)

    def feast_config(self, n: int) -> FeastConfig:
        p = self.feast_params
        return FeastConfig(
            m=int(p.get("m", self.problem.suggested_m)),
            filter=self.filter_for(n),
            tol=float(p.get("tol", 1e-10)),
            max_iters=int(p.get("max_iters", 10)),
            seed=self.seed,
            adapt_rank=bool(p.get("adapt_rank", False)),
            rank_tol=float(p.get("rank_tol", 1e-13)),
            reseed_mode=p.get("reseed_mode", "ritz"),
            rand_cutoff=p.get("rand_cutoff"),
            ode_tol=p.get("ode_tol"),
        )


# ---------------------------------------------------------------------------
# artifact writing
# ---------------------------------------------------------------------------

def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(text)


def _write_results(out: Path, payload: dict):
    payload = dict(payload)
    payload["schema"] = "opfeast-result-v1"
    payload["version"] = __version__
    payload["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    _write(out / "results.json", dumps17(payload) + "\n")


def _emit_feast_artifacts(out: Path, result: EigResult, emit: dict):
    if emit.get("residual_history", True):
        rows = ["iteration,residual (H-norm / spectral radius)"]
        rows += [f"{i + 1},{r:.17g}" for i, r in enumerate(result.residual_history)]
        _write(out / "residual_history.csv", "\n".join(rows) + "\n")
    if emit.get("eigenfunctions") and result.ritz_functions is not None:
        funs = [c.to_json() for c in result.ritz_functions.columns]
        _write(out / "eigenfunctions.json", dumps17({"functions": funs}) + "\n")
    if emit.get("coefficients") and result.ritz_functions is not None:
        for j, c in enumerate(result.ritz_functions.columns):
            c.dump_coefficient_csv(out / f"eigenfunction_{j:02d}_coeffs.csv")


def _filter_grid_csv(filt: RationalFilter, window, n_re, n_im) -> str:
    re, im, mag = filt.grid_values(*window, n_re=n_re, n_im=n_im)
    rows = ["re (eigenvalue plane),im (eigenvalue plane),abs_s (filter magnitude)"]
    for i, y in enumerate(im):
        for j, x in enumerate(re):
            rows.append(f"{x:.17g},{y:.17g},{mag[i, j]:.17g}")
    return "\n".join(rows) + "\n"


def _default_window(filt: RationalFilter):
    if filt.kind == "disk":
        c, r = filt.center, filt.radius
        return (c.real - 2 * r, c.real + 2 * r, c.imag - 2 * r, c.imag + 2 * r)
    return (-15.0, 15.0, -15.0, 15.0)


# ---------------------------------------------------------------------------
# run / demo drivers
# ---------------------------------------------------------------------------

def _execute(cfg: RunConfig) -> int:
    cfg.out.mkdir(parents=True, exist_ok=True)
    executor = None
    if cfg.threads != 1:
        workers = cfg.threads if cfg.threads > 0 else (os.cpu_count() or 1)
        if workers > 1:
            executor = ThreadPoolExecutor(max_workers=workers)
    try:
        if cfg.mode == "rqi":
            return _execute_rqi(cfg)
        return _execute_feast(cfg, executor)
    finally:
        if executor is not None:
            executor.shutdown()


def _execute_rqi(cfg: RunConfig) -> int:
    spec = cfg.problem
    if isinstance(spec.operator, Pencil):
        raise ConfigError("rqi mode supports plain operators, not pencils")
    p = cfg.rqi_params
    if "initial" in p:
        f0 = parse_coeff_expression(p["initial"], spec.domain)
    elif spec.name == "beam":
        f0 = beam_initial_guess(cfg.n, spec.domain[1])
    else:
        k = cfg.n
        a, b = spec.domain
        f0 = ChebFun.fit(lambda x: np.sin(k * np.pi * (x - a) / (b - a)), spec.domain)
    trace = rqi_iterate(spec.operator, f0, spec.bcs,
                        tol=float(p.get("tol", 1e-10)),
                        max_iters=int(p.get("max_iters", 12)),
                        weight=spec.weight)
    payload = {"problem": spec.name, "mode": "rqi", "n": cfg.n,
               "result": trace.to_json()}
    _write_results(cfg.out, payload)
    if cfg.emit.get("coefficients") and trace.eigenfunction is not None:
        trace.eigenfunction.dump_coefficient_csv(cfg.out / "eigenfunction_coeffs.csv")
    if cfg.emit.get("eigenfunctions") and trace.eigenfunction is not None:
        _write(cfg.out / "eigenfunctions.json",
               dumps17({"functions": [trace.eigenfunction.to_json()]}) + "\n")
    log.info("rqi finished: lambda=%s converged=%s", trace.eigenvalue, trace.converged)
    return 0 if trace.converged else 2


def _execute_feast(cfg: RunConfig, executor) -> int:
    spec = cfg.problem
    if cfg.sweep:
        return _execute_sweep(cfg, executor)
    fc = cfg.feast_config(cfg.n)
    code = 0
    try:
        result = contfeast(spec.operator, spec.bcs, fc, weight=spec.weight,
                           executor=executor)
    except StagnationError as exc:
        log.warning("stagnation: %s", exc)
        result = exc.result
        code = 2
    if not result.converged:
        code = 2
    payload = {"problem": spec.name, "mode": "feast", "n": cfg.n,
               "filter": fc.filter.to_json(), "result": result.to_json()}
    _write_results(cfg.out, payload)
    _emit_feast_artifacts(cfg.out, result, cfg.emit)
    if cfg.emit.get("filter_grid"):
        _write(cfg.out / "filter_grid.csv",
               _filter_grid_csv(fc.filter, _default_window(fc.filter), 80, 80))
    log.info("contFEAST finished: %d in-region values, converged=%s",
             int(result.in_region.sum()), result.converged)
    return code


def _execute_sweep(cfg: RunConfig, executor) -> int:
    spec = cfg.problem
    ns = [int(n) for n in cfg.sweep.get("n", [])]
    if not ns:
        raise ConfigError("sweep.n must be a non-empty list of mode indices")
    kind = "regular" if spec.name == "regular-slep" else (
        "indefinite" if spec.name == "indefinite-slep" else None)
    entries = []
    rows = ["n (mode index),lambda_hat_re,lambda_hat_im,lambda_ref,rel_diff (dimensionless)"]
    all_converged = True
    for n in ns:
        fc = cfg.feast_config(n)
        result = contfeast(spec.operator, spec.bcs, fc, weight=spec.weight,
                           executor=executor)
        lam = _closest_ritz(result, fc)
        ref = slep_asymptotic(n, kind) if kind else float("nan")
        rel = abs(lam - ref) / abs(ref) if ref == ref else float("nan")
        all_converged = all_converged and result.converged
        entries.append({"n": n, "lambda_hat": [lam.real, lam.imag],
                        "lambda_ref": ref, "rel_diff": rel,
                        "iterations": result.iterations,
                        "converged": bool(result.converged)})
        rows.append(f"{n},{lam.real:.17g},{lam.imag:.17g},{ref:.17g},{rel:.17g}")
    payload = {"problem": spec.name, "mode": "feast", "sweep": entries}
    _write_results(cfg.out, payload)
    _write(cfg.out / "eig_error_vs_n.csv", "\n".join(rows) + "\n")
    return 0 if all_converged else 2


def _closest_ritz(result: EigResult, fc: FeastConfig) -> complex:
    vals = result.ritz_values
    if fc.filter.kind == "disk":
        dist = np.abs(vals - fc.filter.center)
    else:
        dist = -vals.real
    return complex(vals[int(np.argmin(dist))])


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _common_flags(p: argparse.ArgumentParser):
    p.add_argument("--tol", type=float, default=None, help="solver tolerance")
    p.add_argument("--ell", type=int, default=None, help="filter quadrature degree")
    p.add_argument("--m", type=int, default=None, help="subspace dimension")
    p.add_argument("--max-iter", type=int, default=None, help="iteration cap")
    p.add_argument("--seed", type=int, default=None, help="random seed")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads for the filter fan-out (1 = bitwise reproducible)")
    p.add_argument("--out", type=str, default=None, help="output directory")


def _overrides(args) -> dict:
    raw = {"tol": args.tol, "ell": args.ell, "m": args.m,
           "max_iter": args.max_iter, "seed": args.seed,
           "threads": args.threads, "out": args.out,
           "n": getattr(args, "n", None)}
    return {k: v for k, v in raw.items() if v is not None}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="opfeast",
                                 description="Differential-operator eigensolver "
                                             "(filtered subspace iteration and RQI)")
    sub = ap.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a JSON config file")
    p_run.add_argument("config", type=str)
    _common_flags(p_run)

    p_demo = sub.add_parser("demo", help="run a catalog problem with defaults")
    p_demo.add_argument("name", type=str)
    p_demo.add_argument("--mode", choices=("feast", "rqi"), default=None)
    p_demo.add_argument("--n", type=int, default=1, help="mode index / region index")
    _common_flags(p_demo)

    p_prob = sub.add_parser("problems", help="catalog queries")
    p_prob.add_argument("action", choices=("list", "show"))
    p_prob.add_argument("name", nargs="?", default=None)

    p_grid = sub.add_parser("filter-grid", help="dump |s| over a complex window as CSV")
    p_grid.add_argument("--kind", choices=("disk", "halfplane"), default="disk")
    p_grid.add_argument("--center", type=float, nargs=2, default=(0.0, 0.0))
    p_grid.add_argument("--radius", type=float, default=1.0)
    p_grid.add_argument("--a", type=float, default=1.0)
    p_grid.add_argument("--ell", type=int, default=None)
    p_grid.add_argument("--window", type=float, nargs=4, default=None,
                        metavar=("RE_MIN", "RE_MAX", "IM_MIN", "IM_MAX"))
    p_grid.add_argument("--points", type=int, nargs=2, default=(80, 80))
    p_grid.add_argument("--out", type=str, default="filter_grid.csv")
    return ap


def _demo_doc(name: str, mode: str | None, n: int) -> dict:
    spec = by_name(name)
    doc: dict = {"problem": name, "emit": {"residual_history": True}}
    if name == "beam" or mode == "rqi":
        doc["mode"] = "rqi"
        doc["n"] = n
        return doc
    doc["mode"] = "feast"
    doc["n"] = n
    if name == "thin-film":
        doc["feast"] = {"m": spec.suggested_m, "tol": 1e-8, "max_iters": 6}
        doc["filter"] = {"kind": "halfplane", "a": 1.0, "ell": 20}
    elif name == "halfplane-synthetic":
        doc["feast"] = {"m": spec.suggested_m, "tol": 1e-9}
        doc["filter"] = {"kind": "halfplane", "a": 1.0, "ell": 40}
    elif name == "indefinite-slep":
        doc["feast"] = {"m": 1, "tol": 1e-9, "ode_tol": 5e-14}
    else:
        doc["feast"] = {"m": spec.suggested_m, "tol": 1e-10}
    return doc


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("OPFEAST_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            path = Path(args.config)
            if not path.exists():
                print(f"config error: no such file: {path}", file=sys.stderr)
                return 1
            try:
                doc = json.loads(path.read_text())
            except json.JSONDecodeError as exc:
                print(f"config error: {path}:{exc.lineno}:{exc.colno}: {exc.msg}",
                      file=sys.stderr)
                return 1
            cfg = RunConfig(doc, _overrides(args))
            return _execute(cfg)

        if args.command == "demo":
            try:
                doc = _demo_doc(args.name, args.mode, args.n)
            except KeyError as exc:
                print(f"config error: {exc.args[0]}", file=sys.stderr)
                return 1
            cfg = RunConfig(doc, _overrides(args))
            return _execute(cfg)

        if args.command == "problems":
            if args.action == "list":
                print(dumps17({"problems": [s.name for s in catalog()]}))
                return 0
            if not args.name:
                print("config error: 'problems show' needs a name", file=sys.stderr)
                return 1
            try:
                print(dumps17(by_name(args.name).to_json()))
                return 0
            except KeyError as exc:
                print(f"config error: {exc.args[0]}", file=sys.stderr)
                return 1

        if args.command == "filter-grid":
            if args.kind == "disk":
                filt = disk_filter(complex(*args.center), args.radius, args.ell or 16)
            else:
                filt = halfplane_filter(args.a, args.ell or 40)
            window = tuple(args.window) if args.window else _default_window(filt)
            text = _filter_grid_csv(filt, window, args.points[0], args.points[1])
            _write(Path(args.out), text)
            return 0
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except OpfeastError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
