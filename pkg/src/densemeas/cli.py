"""Command-line front end: ``densemeas {rounds,run,curve,rip,subgauss,concentration}``.

Every command prints one record holding its full effective configuration
(defaults and log base included), as ``key=value`` lines or, with ``--json``,
as a JSON object. Exit status: 0 success / exact recovery, 2 inexact
recovery, 1 any error.

``--config FILE`` reads a JSON document whose keys mirror the long flag names
(dashes or underscores). Top-level keys apply to every command; a nested
object under the command name (e.g. ``{"run": {"n": 64}}``) applies to that
command only. Flags given on the command line always win.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import analysis, basis as basis_mod, experiments, measurement, recovery
from .model import make_sparse_signal

EXIT_OK, EXIT_ERROR, EXIT_INEXACT = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_ERROR)


def _r_list(text: str) -> list:
    """``start:stop:step`` (stop inclusive) or a comma-separated list."""
    if ":" in text:
        parts = [int(p) for p in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise argparse.ArgumentTypeError("range must read start:stop:step with step > 0")
        return list(range(parts[0], parts[1] + 1, parts[2]))
    return [int(p) for p in text.split(",") if p.strip()]


def _float_list(text: str) -> list:
    return [float(p) for p in text.split(",") if p.strip()]


# Defaults live here rather than in argparse so that config-file values can
# sit between them and explicit flags.
DEFAULTS = {
    "rounds": dict(theorem=None, n=None, k=None, chi=None, eps=None, c=1.0, alpha=None, z="auto",
                   gamma=None, xi=None, c1=1.0, c2=1.0, log_base="10"),
    "run": dict(procedure=2, n=None, k=None, r=None, basis="identity", mode="centered", seed=0,
                value_dist="gaussian", scaled=False, identity_ensemble=False, tol=1e-8, max_iter=None),
    "curve": dict(procedure=2, n=None, k=None, r_list=None, basis="identity", mode="centered", trials=100,
                  seed=0, value_dist="gaussian", scaled=False, out=None, format="csv", log_base="10"),
    "rip": dict(ensemble=None, identity=False, n=None, r=None, k=None, mode="centered", seed=0, scaled=True),
    "subgauss": dict(source="rademacher", grid=None, trials=100000, seed=0),
    "concentration": dict(n=64, k=4, r=None, kappa=0.5, trials=2000, seed=0, mode="centered"),
}

REQUIRED = {
    "rounds": ("theorem", "n", "k"),
    "run": ("n", "k", "r"),
    "curve": ("n", "k", "r_list", "out"),
    "rip": ("k",),
    "subgauss": ("grid",),
    "concentration": ("r",),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a JSON record")
    common.add_argument("--config", help="JSON config file; flags override its values")

    p = _Parser(prog="densemeas", description="Dense quantum measurement toolkit")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    S = argparse.SUPPRESS

    r = sub.add_parser("rounds", parents=[common], help="round-count calculators")
    r.add_argument("--theorem", type=int, choices=(1, 2, 3), default=S)
    r.add_argument("--n", type=int, default=S)
    r.add_argument("--k", type=int, default=S)
    r.add_argument("--chi", type=float, default=S)
    r.add_argument("--eps", type=float, default=S)
    r.add_argument("--c", type=float, default=S)
    r.add_argument("--alpha", type=float, default=S)
    r.add_argument("--z", default=S, help="boundedness constant, or 'auto' for sqrt(n)")
    r.add_argument("--gamma", type=float, default=S)
    r.add_argument("--xi", type=float, default=S)
    r.add_argument("--c1", type=float, default=S)
    r.add_argument("--c2", type=float, default=S)
    r.add_argument("--log-base", choices=("10", "e", "2"), default=S)

    run = sub.add_parser("run", parents=[common], help="run one procedure end to end")
    run.add_argument("--procedure", type=int, choices=(1, 2), default=S)
    run.add_argument("--n", type=int, default=S)
    run.add_argument("--k", type=int, default=S)
    run.add_argument("--r", type=int, default=S)
    run.add_argument("--basis", choices=("identity", "walsh", "random", "dct"), default=S)
    run.add_argument("--mode", choices=("raw01", "centered"), default=S)
    run.add_argument("--seed", type=int, default=S)
    run.add_argument("--value-dist", choices=("unit", "gaussian", "uniform"), default=S)
    run.add_argument("--scaled", action="store_const", const=True, default=S)
    run.add_argument("--identity-ensemble", action="store_const", const=True, default=S,
                     help="force masks e_1..e_n (needs r == n and raw01 mode)")
    run.add_argument("--tol", type=float, default=S)
    run.add_argument("--max-iter", type=int, default=S)

    c = sub.add_parser("curve", parents=[common], help="Monte Carlo success-probability sweep")
    c.add_argument("--procedure", type=int, choices=(1, 2), default=S)
    c.add_argument("--n", type=int, default=S)
    c.add_argument("--k", type=int, default=S)
    c.add_argument("--r-list", type=_r_list, default=S, help="start:stop:step or comma list")
    c.add_argument("--basis", choices=("identity", "walsh", "random", "dct"), default=S)
    c.add_argument("--mode", choices=("raw01", "centered"), default=S)
    c.add_argument("--trials", type=int, default=S)
    c.add_argument("--seed", type=int, default=S)
    c.add_argument("--value-dist", choices=("unit", "gaussian", "uniform"), default=S)
    c.add_argument("--scaled", action="store_const", const=True, default=S)
    c.add_argument("--out", default=S)
    c.add_argument("--format", choices=("csv", "json"), default=S)
    c.add_argument("--log-base", choices=("10", "e", "2"), default=S)

    rip = sub.add_parser("rip", parents=[common], help="exact restricted isometry constant")
    rip.add_argument("--ensemble", default=S, help="ensemble text file")
    rip.add_argument("--identity", action="store_const", const=True, default=S)
    rip.add_argument("--n", type=int, default=S)
    rip.add_argument("--r", type=int, default=S)
    rip.add_argument("--k", type=int, default=S)
    rip.add_argument("--mode", choices=("raw01", "centered"), default=S)
    rip.add_argument("--seed", type=int, default=S)
    rip.add_argument("--unscaled", dest="scaled", action="store_const", const=False, default=S)

    sg = sub.add_parser("subgauss", parents=[common], help="sub-Gaussian tail fit")
    sg.add_argument("--source", choices=("rademacher", "gaussian", "mask"), default=S)
    sg.add_argument("--grid", type=_float_list, default=S)
    sg.add_argument("--trials", type=int, default=S)
    sg.add_argument("--seed", type=int, default=S)

    cc = sub.add_parser("concentration", parents=[common], help="norm concentration tail estimate")
    cc.add_argument("--n", type=int, default=S)
    cc.add_argument("--k", type=int, default=S)
    cc.add_argument("--r", type=int, default=S)
    cc.add_argument("--kappa", type=float, default=S)
    cc.add_argument("--trials", type=int, default=S)
    cc.add_argument("--seed", type=int, default=S)
    cc.add_argument("--mode", choices=("raw01", "centered"), default=S)
    return p


def _load_config(path, command) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(doc, dict):
        raise UsageError("config must be a JSON object")
    flat = {k: v for k, v in doc.items() if not isinstance(v, dict)}
    section = doc.get(command, {})
    if not isinstance(section, dict):
        raise UsageError(f"config section {command!r} must be an object")
    flat.update(section)
    known = DEFAULTS[command]
    out = {}
    for k, v in flat.items():
        key = k.replace("-", "_")
        if key in known:
            out[key] = v
        elif key not in DEFAULTS and key not in ("json",):
            # keys meant for other commands are ignored; unknown ones are not
            if not any(key in d for d in DEFAULTS.values()):
                raise UsageError(f"unknown config key {k!r}")
    if command == "curve" and isinstance(out.get("r_list"), str):
        out["r_list"] = _r_list(out["r_list"])
    if command == "subgauss" and isinstance(out.get("grid"), str):
        out["grid"] = _float_list(out["grid"])
    return out


def effective_config(args) -> dict:
    cmd = args.command
    cfg = dict(DEFAULTS[cmd])
    if getattr(args, "config", None):
        cfg.update(_load_config(args.config, cmd))
    for k in DEFAULTS[cmd]:
        if hasattr(args, k):
            cfg[k] = getattr(args, k)
    missing = [k for k in REQUIRED[cmd] if cfg.get(k) is None]
    if missing:
        raise UsageError("missing required setting(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))
    return cfg


# -- output ---------------------------------------------------------------


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    return v


def emit(record: dict, as_json: bool, stream=None) -> None:
    stream = sys.stdout if stream is None else stream
    record = _jsonable(record)
    if as_json:
        stream.write(json.dumps(record, sort_keys=True) + "\n")
        return
    for k in sorted(record):
        v = record[k]
        stream.write(f"{k}={v if isinstance(v, str) else json.dumps(v)}\n")


# -- commands -------------------------------------------------------------


def cmd_rounds(cfg: dict) -> tuple:
    base = analysis._parse_base(cfg["log_base"])
    n, K, th = cfg["n"], cfg["k"], cfg["theorem"]
    rec = dict(command="rounds", theorem=th, n=n, k=K, log_base=analysis.log_base_name(base))
    if th == 1:
        if cfg["chi"] is None or cfg["eps"] is None:
            raise UsageError("theorem 1 needs --chi and --eps")
        R = analysis.rounds_theorem1(n, K, cfg["chi"], cfg["eps"], cfg["c"], base=base)
        fail = cfg["eps"]
        rec.update(chi=cfg["chi"], eps=cfg["eps"], c=cfg["c"], event="delta_K < chi")
    elif th == 2:
        if cfg["alpha"] is None:
            raise UsageError("theorem 2 needs --alpha")
        Z = math.sqrt(n) if str(cfg["z"]).lower() == "auto" else float(cfg["z"])
        R = analysis.rounds_theorem2(n, K, Z, cfg["alpha"], base=base)
        fail = analysis.failure_prob_theoretical("t2", n=n, base=base)
        rec.update(alpha=cfg["alpha"], z=Z, event="exact recovery of z*")
    else:
        if cfg["xi"] is not None:
            R = analysis.rounds_theorem3(n, K, "xi_form", xi=cfg["xi"], c1=cfg["c1"], c2=cfg["c2"], base=base)
            rec.update(form="xi_form", xi=cfg["xi"], c1=cfg["c1"], c2=cfg["c2"])
        elif cfg["gamma"] is not None:
            R = analysis.rounds_theorem3(n, K, "gamma_form", gamma=cfg["gamma"], base=base)
            rec.update(form="gamma_form", gamma=cfg["gamma"])
        else:
            raise UsageError("theorem 3 needs --gamma or --xi")
        fail = analysis.failure_prob_theoretical("t3", R=R)
        rec.update(event="exact recovery of z*")
    rec.update(R=R, p=max(0.0, 1.0 - fail), failure=fail)
    return rec, EXIT_OK


def _validate_run(cfg):
    n, K, R = cfg["n"], cfg["k"], cfg["r"]
    if n < 1 or not 0 <= K <= n or R < 0:
        raise UsageError("need n >= 1, 0 <= k <= n and r >= 0")
    if cfg["basis"] == "walsh" and n & (n - 1):
        raise UsageError("walsh basis needs n to be a power of two")
    if cfg["identity_ensemble"]:
        if R != n or cfg["mode"] != "raw01" or cfg["procedure"] != 2:
            raise UsageError("--identity-ensemble needs procedure 2, r == n and raw01 mode")


def cmd_run(cfg: dict) -> tuple:
    _validate_run(cfg)
    masks = recovery.identity_masks(cfg["n"]) if cfg["identity_ensemble"] else None
    res = recovery.run_procedure(
        variant=f"procedure{cfg['procedure']}", n=cfg["n"], K=cfg["k"], R=cfg["r"], basis=cfg["basis"],
        mode=cfg["mode"], seed=cfg["seed"], value_dist=cfg["value_dist"], scaled=cfg["scaled"],
        masks=masks, tol=cfg["tol"], max_iter=cfg["max_iter"],
    )
    rec = dict(command="run", **{k: v for k, v in cfg.items()})
    rec.update(res.as_record())
    rec["variant"] = res.config["variant"]
    rec["max_iter"] = res.config["max_iter"]
    return rec, EXIT_OK if res.exact else EXIT_INEXACT


def cmd_curve(cfg: dict) -> tuple:
    R_list = cfg["r_list"]
    if not R_list or any(b <= a for a, b in zip(R_list, R_list[1:])) or R_list[0] < 0:
        raise UsageError("--r-list must be nonempty, nonnegative and strictly increasing")
    if cfg["basis"] == "walsh" and cfg["n"] & (cfg["n"] - 1):
        raise UsageError("walsh basis needs n to be a power of two")
    with analysis.log_base(cfg["log_base"]):
        curve = experiments.sweep_curve(
            cfg["n"], cfg["k"], R_list, variant=f"procedure{cfg['procedure']}", basis=cfg["basis"],
            mode=cfg["mode"], trials=cfg["trials"], master_seed=cfg["seed"], value_dist=cfg["value_dist"],
            scaled=cfg["scaled"],
        )
    try:
        experiments.write_curve(cfg["out"], curve, cfg["format"])
    except OSError as exc:
        raise UsageError(f"cannot write {cfg['out']}: {exc}") from None
    emp = curve.empirical
    hit = [p.rounds for p in curve.points if p.empirical >= 0.95]
    rec = dict(command="curve", **cfg)
    rec.update(rows=len(curve.points), max_empirical=float(emp.max()),
               first_R_at_0_95=hit[0] if hit else None)
    return rec, EXIT_OK


def cmd_rip(cfg: dict) -> tuple:
    K = cfg["k"]
    if cfg["ensemble"]:
        try:
            A = measurement.read_ensemble(cfg["ensemble"]).sensing_matrix
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read ensemble: {exc}") from None
        source = "file"
    elif cfg["identity"]:
        if cfg["n"] is None:
            raise UsageError("--identity needs --n")
        A = np.eye(cfg["n"])
        source = "identity"
    else:
        if cfg["n"] is None or cfg["r"] is None:
            raise UsageError("generate an ensemble with --n and --r, or pass --ensemble/--identity")
        A = measurement.assemble_ensemble(cfg["r"], cfg["n"], None, cfg["mode"], cfg["scaled"], cfg["seed"]).sensing_matrix
        source = "generated"
    try:
        delta, T = analysis.rip_constant(A, K, return_support=True)
    except analysis.CombinatorialLimitError as exc:
        raise UsageError(f"refusing to enumerate: {exc}") from None
    rec = dict(command="rip", **cfg)
    rec.update(source=source, rows=A.shape[0], cols=A.shape[1], delta=delta, worst_support=list(T),
               below_one_third=analysis.rip_recovery_condition(delta))
    return rec, EXIT_OK


SOURCES = {
    "rademacher": analysis.rademacher_source,
    "gaussian": analysis.gaussian_source,
    "mask": analysis.centered_mask_source,
}


def cmd_subgauss(cfg: dict) -> tuple:
    fit = analysis.subgaussian_tail_fit(SOURCES[cfg["source"]], cfg["grid"], cfg["trials"], cfg["seed"])
    rec = dict(command="subgauss", **cfg)
    rec.update(tails=list(fit.tails), c1=fit.c1, c2=fit.c2 if math.isfinite(fit.c2) else "inf",
               satisfied=fit.satisfied)
    return rec, EXIT_OK


def cmd_concentration(cfg: dict) -> tuple:
    n, K, R = cfg["n"], cfg["k"], cfg["r"]
    signal = make_sparse_signal(n, K, "gaussian", cfg["seed"])

    def factory(s):
        return measurement.assemble_ensemble(R, n, None, cfg["mode"], True, s).sensing_matrix

    res = analysis.concentration_check(factory, signal, cfg["kappa"], cfg["trials"], cfg["seed"])
    rec = dict(command="concentration", **cfg)
    rec.update(tail=res.tail, c_hat=res.c_hat)
    return rec, EXIT_OK


COMMANDS = {
    "rounds": cmd_rounds,
    "run": cmd_run,
    "curve": cmd_curve,
    "rip": cmd_rip,
    "subgauss": cmd_subgauss,
    "concentration": cmd_concentration,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_ERROR
    try:
        cfg = effective_config(args)
        record, status = COMMANDS[args.command](cfg)
    except (UsageError, ValueError, recovery.SolverError) as exc:
        print(f"densemeas {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    emit(record, args.json)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
