"""Command-line front end: barrier verification, solving, classification.

Every run writes a ``run_manifest.json`` echoing the resolved
configuration, the library version and a configuration hash; artifacts
embed the same hash, and ``rerun --manifest`` re-executes a manifest and
reproduces the artifact bytes exactly.

Exit codes: 0 success (verify commands: all checks passed), 1
computation error, 2 invalid configuration, 3 verification ran but a
check failed.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .barriers import (TuskHouseBarrierSpec, estimate_alpha_and_beta,
                       make_exterior_ball_barrier, make_irregularity_barrier,
                       make_petrovskii_barrier, verify_barrier,
                       verify_irregularity_barrier)
from .data import data_by_name
from .geometry import SpacetimePoint, domain_from_json, petrovskii, point
from .operator import OperatorParams
from .regularity import THETA_IRR, THETA_REG, classify, petrovskii_sweep
from .sampling import build_sample_set
from .solver import SolverParams, solve

__all__ = ["main", "build_parser", "run_config"]


def _json_bytes(obj) -> bytes:
    return (json.dumps(obj, sort_keys=True, indent=2) + "\n").encode()


def _config_hash(config: dict) -> str:
    slim = {k: v for k, v in config.items() if k != "out"}
    return hashlib.sha256(_json_bytes(slim)).hexdigest()[:16]


def _write(path: Path, data: bytes):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)


def _emit_manifest(out: Path, config: dict):
    manifest = {"version": __version__, "config": config,
                "config_hash": _config_hash(config)}
    _write(out / "run_manifest.json", _json_bytes(manifest))


def _parse_fraction(txt: str) -> float:
    if "/" in txt:
        a, b = txt.split("/")
        return float(a) / float(b)
    return float(txt)


def _load_domain(spec: str):
    p = Path(spec)
    if p.exists():
        return domain_from_json(json.loads(p.read_text()))
    return domain_from_json(json.loads(spec))


# ---------------------------------------------------------------------------
# command implementations (dispatch on a resolved config dict)


def _run_verify_barrier(config: dict) -> int:
    out = Path(config["out"])
    family = config["family"]
    p, n = config["p"], config["n"]
    seed = config["seed"]
    n_samples = config["samples"]
    params = OperatorParams(p=p)
    if family == "petrovskii":
        bar = make_petrovskii_barrier(n, p)
        dom = petrovskii(bar.k, n)
        sampler = build_sample_set(dom, n_domain=n_samples, n_axis=n_samples // 10,
                                   n_band=n_samples // 10, seed=seed, t_anchor=0.0)
        rep = verify_barrier(bar.field, dom, point((0.0,) * n, 0.0), params,
                             sampler=sampler, seed=seed)
        payload = rep.to_json_dict()
        payload["family"] = family
        payload["params"] = {"p": p, "n": n, "k": bar.k, "a": bar.a}
        ok = rep.passed
    elif family == "irregularity":
        if config.get("A") is None:
            raise ConfigError("--A is required for the irregularity family")
        A = config["A"]
        if A <= 4.0 * (p - 1.0):
            raise ConfigError(f"irregularity family needs A > 4(p-1) = {4.0 * (p - 1.0)}")
        bar = make_irregularity_barrier(n, p, A)
        dom = petrovskii(A, n)
        rep = verify_irregularity_barrier(bar, dom, params, seed=seed,
                                          n_domain=n_samples,
                                          n_axis=n_samples // 10,
                                          n_band=n_samples // 10)
        payload = rep.to_json_dict()
        payload["family"] = family
        ok = rep.passed
    elif family == "exterior_ball":
        xi0 = point((0.0,) * n, 0.0)
        reports = {}
        ok = True
        for case, xi1, R1 in [
            ("tangent", point((1.0,) + (0.0,) * (n - 1), 0.0), 1.0),
            ("north_pole", point((0.0,) * n, -2.0 * (n + p - 2.0)), 2.0 * (n + p - 2.0)),
        ]:
            bar = make_exterior_ball_barrier(xi0, xi1, R1, n, p)
            dom = bar.verification_domain()
            sampler = build_sample_set(dom, n_domain=n_samples,
                                       n_axis=n_samples // 10,
                                       n_band=n_samples // 10, seed=seed,
                                       x_axis=xi0.x_array(), t_anchor=xi0.t)
            rep = verify_barrier(bar.field, dom, xi0, params, sampler=sampler,
                                 seed=seed)
            reports[case] = rep.to_json_dict()
            reports[case]["j"] = bar.j
            reports[case]["delta"] = bar.delta
            ok = ok and rep.passed
        payload = {"family": family, "pass": ok, "cases": reports,
                   "params": {"p": p, "n": n}}
    elif family == "tusk_house":
        spec = TuskHouseBarrierSpec(tuple(config["xhat"]), config["R"], config["R0"])
        alpha, beta, info = estimate_alpha_and_beta(spec, config["h"], p=p, seed=seed)
        ok = info["alpha1"] < 1.0 and beta > 0.0
        payload = {"family": family, "pass": ok, "alpha": alpha, "beta": beta,
                   **info, "params": {"p": p, "n": len(spec.xhat)}}
    else:  # pragma: no cover - argparse restricts choices
        raise ConfigError(f"unknown family {family}")
    payload["config_hash"] = _config_hash(config)
    _write(out / "barrier_report.json", _json_bytes(payload))
    _emit_manifest(out, config)
    return 0 if ok else 3


def _run_solve(config: dict) -> int:
    out = Path(config["out"])
    dom = _load_domain(config["domain"])
    F = data_by_name(config["data"], dom.n, config["p"])
    params = SolverParams(p=config["p"])
    gf = solve(dom, F, params, h=config["h"], keep="auto")
    kept = gf.kept_slices()
    want = min(config["slices"], kept.size)
    pick = kept[np.unique(np.linspace(0, kept.size - 1, want).astype(int))]
    lines = [",".join([f"x{i}" for i in range(dom.n)] + ["t", "u"])]
    for m in pick:
        U = gf.slices[int(m)]
        t = gf.grid.times[int(m)]
        good = np.flatnonzero(~np.isnan(U))
        for i in good:
            coords = gf.grid.points[i]
            cells = [repr(float(c)) for c in coords] + [repr(float(t)), repr(float(U[i]))]
            lines.append(",".join(cells))
    _write(out / "slices.csv", ("\n".join(lines) + "\n").encode())
    lo, hi = gf.range()
    summary = {
        "config_hash": _config_hash(config),
        "h": config["h"], "dt": gf.grid.dt, "n_slices": int(gf.grid.n_slices),
        "solution_range": [lo, hi],
        "data_range": [gf.data_min, gf.data_max],
    }
    if config["data"] in ("manufactured", "heat_mode"):
        err = 0.0
        for m in kept:
            U = gf.slices[int(m)]
            good = ~np.isnan(U)
            if np.any(good):
                t = np.full(int(np.count_nonzero(good)), gf.grid.times[int(m)])
                err = max(err, float(np.max(np.abs(
                    U[good] - F(gf.grid.points[good], t)))))
        summary["max_error_vs_closed_form"] = err
    _write(out / "solve_summary.json", _json_bytes(summary))
    _emit_manifest(out, config)
    return 0


def _run_classify(config: dict) -> int:
    out = Path(config["out"])
    dom = _load_domain(config["domain"])
    coords = [float(c) for c in config["point"].split(",")]
    xi0 = SpacetimePoint(tuple(coords[:-1]), coords[-1])
    rep = classify(dom, xi0, config["p"], config["grids"],
                   theta_reg=config["theta_reg"], theta_irr=config["theta_irr"],
                   seed=config["seed"])
    payload = rep.to_json_dict()
    payload["config_hash"] = _config_hash(config)
    _write(out / "regularity_report.json", _json_bytes(payload))
    _emit_manifest(out, config)
    return 0


def _run_sweep(config: dict) -> int:
    out = Path(config["out"])
    rows = petrovskii_sweep(config["p"], config["n"], config["A"], config["grids"],
                            theta_reg=config["theta_reg"],
                            theta_irr=config["theta_irr"], seed=config["seed"])
    lines = ["A,verdict,final_gap,threshold"]
    for row in rows:
        lines.append(f"{row['A']!r},{row['verdict']},{row['final_gap']!r},"
                     f"{row['threshold']!r}")
    _write(out / "petrovskii_sweep.csv", ("\n".join(lines) + "\n").encode())
    _emit_manifest(out, config)
    return 0


class ConfigError(ValueError):
    pass


_RUNNERS = {
    "verify-barrier": _run_verify_barrier,
    "solve": _run_solve,
    "classify": _run_classify,
    "petrovskii-sweep": _run_sweep,
}


def run_config(config: dict) -> int:
    """Dispatch a resolved configuration dict (the manifest payload)."""
    return _RUNNERS[config["command"]](config)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pparabolic",
                                 description="normalized p-parabolic toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default="./out")

    vb = sub.add_parser("verify-barrier", help="verify a barrier family")
    vb.add_argument("--family", required=True,
                    choices=["exterior_ball", "petrovskii", "irregularity",
                             "tusk_house"])
    vb.add_argument("--p", type=float, required=True)
    vb.add_argument("--n", type=int, required=True, choices=[1, 2])
    vb.add_argument("--A", type=float, default=None)
    vb.add_argument("--samples", type=int, default=10_000)
    vb.add_argument("--h", type=_parse_fraction, default=1.0 / 64.0,
                    help="solver resolution (tusk_house family)")
    vb.add_argument("--xhat", default="0", help="tusk apex direction (tusk_house)")
    vb.add_argument("--R", type=float, default=1.0)
    vb.add_argument("--R0", type=float, default=2.0)
    common(vb)

    sv = sub.add_parser("solve", help="solve with named data on a JSON domain")
    sv.add_argument("--domain", required=True)
    sv.add_argument("--data", required=True)
    sv.add_argument("--p", type=float, required=True)
    sv.add_argument("--h", type=_parse_fraction, required=True)
    sv.add_argument("--slices", type=int, default=8)
    common(sv)

    cl = sub.add_parser("classify", help="classify a boundary point")
    cl.add_argument("--domain", required=True)
    cl.add_argument("--point", required=True, help='e.g. "0,0" for (x, t)')
    cl.add_argument("--p", type=float, required=True)
    cl.add_argument("--grids", default="1/64,1/128")
    cl.add_argument("--theta-reg", type=float, default=THETA_REG)
    cl.add_argument("--theta-irr", type=float, default=THETA_IRR)
    common(cl)

    sw = sub.add_parser("petrovskii-sweep", help="classify a list of A values")
    sw.add_argument("--p", type=float, required=True)
    sw.add_argument("--n", type=int, required=True, choices=[1, 2])
    sw.add_argument("--A", required=True, help="comma list, e.g. 2,4,16,64")
    sw.add_argument("--grids", default="1/128,1/256",
                    help="ladder as fractions of each region's width")
    sw.add_argument("--theta-reg", type=float, default=THETA_REG)
    sw.add_argument("--theta-irr", type=float, default=THETA_IRR)
    common(sw)

    rr = sub.add_parser("rerun", help="re-execute a run from its manifest")
    rr.add_argument("--manifest", required=True)
    rr.add_argument("--out", default=None, help="override the output directory")
    return ap


def _resolve_config(args: argparse.Namespace) -> dict:
    cfg = {"command": args.command, "seed": args.seed, "out": args.out}
    if args.command == "verify-barrier":
        cfg.update(family=args.family, p=args.p, n=args.n, A=args.A,
                   samples=args.samples, h=args.h,
                   xhat=[float(c) for c in str(args.xhat).split(",")],
                   R=args.R, R0=args.R0)
    elif args.command == "solve":
        cfg.update(domain=args.domain, data=args.data, p=args.p, h=args.h,
                   slices=args.slices)
    elif args.command == "classify":
        cfg.update(domain=args.domain, point=args.point, p=args.p,
                   grids=[_parse_fraction(g) for g in args.grids.split(",")],
                   theta_reg=args.theta_reg, theta_irr=args.theta_irr)
    elif args.command == "petrovskii-sweep":
        A_list = [float(a) for a in args.A.split(",")] if args.A else []
        cfg.update(p=args.p, n=args.n, A=A_list,
                   grids=[_parse_fraction(g) for g in args.grids.split(",")],
                   theta_reg=args.theta_reg, theta_irr=args.theta_irr)
    return cfg


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.command == "rerun":
        manifest = json.loads(Path(args.manifest).read_text())
        config = manifest["config"]
        if args.out is not None:
            config = {**config, "out": args.out}
    else:
        config = _resolve_config(args)
    try:
        _validate(config)
        return run_config(config)
    except (ConfigError, ValueError, KeyError) as e:
        print(json.dumps({"error": type(e).__name__, "message": str(e)}),
              file=sys.stderr)
        return 2
    except Exception as e:  # computation failure
        print(json.dumps({"error": type(e).__name__, "message": str(e)}),
              file=sys.stderr)
        return 1


def _validate(config: dict):
    cmd = config.get("command")
    if cmd not in _RUNNERS:
        raise ConfigError(f"unknown command {cmd!r}")
    p = config.get("p")
    if p is not None and not 1.0 < p:
        raise ConfigError("p must exceed 1")
    if cmd == "verify-barrier" and config["family"] == "irregularity":
        A = config.get("A")
        if A is None:
            raise ConfigError("--A is required for the irregularity family")
        if A <= 4.0 * (p - 1.0):
            raise ConfigError(f"irregularity family needs A > 4(p-1) = {4.0 * (p - 1.0)}")


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
