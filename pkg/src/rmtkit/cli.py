"""Command-line entry point.

Every estimator, verifier, probe, and experiment is a subcommand over a
config file. Exit statuses partition outcomes: 0 success, 1 flagged
statistical violation, 2 usage/config error, 3 numerical failure. Each run
writes a `<output>.resolved.toml` sidecar with the fully-resolved config so
outputs can be reproduced byte for byte.
"""

import argparse
import json
import math
import os
import sys

import numpy as np

from . import anticonc, config as cfgmod, experiments, io, linalg, sphere
from .ensembles import (
    SeedSpec,
    check_b_condition,
    check_hs_budget,
    check_pastur,
    sample_matrix,
)
from .errors import NumericalError, RmtkitError, ValidationError

SUBCOMMANDS = (
    "sample", "tail", "esd", "circular-law", "universality",
    "anticonc-verify", "crlcd", "sphere-probe", "identity-check",
)

_TABLE_KEYS = {
    "tail": {"n_list", "eps", "trials"},
    "esd": {"trials", "scale"},
    "circular_law": {"s_values", "t_values"},
    "universality": {"n_list", "trials", "z", "quantity"},
    "anticonc": {"verifier", "v", "w", "r", "m", "eps", "L", "u",
                 "c_grid", "radius", "nodes_per_axis"},
    "crlcd": {"v", "L", "u", "m", "modulus_max"},
    "sphere": {"probe", "delta", "rho", "eps", "trials", "vector_samples",
               "L", "u", "m"},
    "identity": {"n", "trials"},
    "sample": {"trials", "checks"},
}


def parse_invocation(argv):
    parser = argparse.ArgumentParser(
        prog="rmtkit",
        description="estimators, verifiers and experiments for "
                    "inhomogeneous complex random matrices",
    )
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--config", required=True, help="config file path")
    parser.add_argument("--output", default=None, help="data output path")
    parser.add_argument("--set", action="append", default=[], dest="overrides",
                        metavar="KEY=VALUE", help="override a config key")
    parser.add_argument("--seed", type=int, default=None,
                        help="override base_seed")
    parser.add_argument("--workers", type=int,
                        default=int(os.environ.get("RMTKIT_WORKERS", "1")),
                        help="worker count knob (outputs are independent of it)")
    parser.add_argument("--json-errors", action="store_true",
                        help="emit machine-readable errors on stderr")
    return parser.parse_args(argv)


def _complexify(v):
    return io.parse_complex(v) if isinstance(v, str) else complex(v)


def _vector(raw):
    return np.array([_complexify(x) for x in raw], dtype=np.complex128)


def _table(cfg, name):
    tbl = cfg.get(name, {})
    unknown = set(tbl) - _TABLE_KEYS[name]
    if unknown:
        raise ValidationError(f"unknown keys in [{name}]: {sorted(unknown)}")
    return tbl


def _dists_from_cfg(cfg, key="ensemble"):
    return cfgmod.build_distribution(cfg.get(key, {}))


def _seed(cfg):
    return SeedSpec(int(cfg.get("base_seed", 0)))


def _echo(payload):
    print(json.dumps(payload, indent=2, default=str))


def _default_output(inv, suffix):
    return inv.output or f"rmtkit-{inv.subcommand}{suffix}"


def run_sample(inv, cfg, base_dir):
    tbl = _table(cfg, "sample")
    ens = cfgmod.build_ensemble(cfg.get("ensemble", {}), base_dir)
    seed = _seed(cfg)
    A = sample_matrix(ens, seed)
    out = _default_output(inv, ".csv")
    io.write_matrix_csv(A, out)
    reports = {}
    if tbl.get("checks", True) and ens.uniform_dist():
        trials = int(tbl.get("trials", 50))
        reports["hs_budget"] = check_hs_budget(ens, trials, seed=seed).to_dict()
        reports["b_condition"] = check_b_condition(
            ens.entry_dist, ens.declared_b, trials, seed=seed).to_dict()
        reports["pastur"] = check_pastur(ens, 0.5, trials, seed=seed).to_dict()
    cfgmod.write_sidecar(cfg, out)
    _echo({"output": out, "n": ens.n, "checks": reports})
    return 1 if any(not r["ok"] for r in reports.values()) else 0


def _experiment_config(cfg, tbl, needs_y=False):
    dist_x = _dists_from_cfg(cfg, "ensemble")
    dist_y = None
    if needs_y:
        if "ensemble_y" not in cfg:
            raise ValidationError("this subcommand needs an [ensemble_y] table")
        dist_y = _dists_from_cfg(cfg, "ensemble_y")
    ens_tbl = cfg.get("ensemble", {})
    return experiments.ExperimentConfig(
        dist_x=dist_x, dist_y=dist_y,
        z=_complexify(tbl.get("z", 0.0)),
        n_list=tuple(tbl.get("n_list", [int(ens_tbl.get("n", 64))])),
        eps_list=tuple(tbl.get("eps", [0.5])),
        trials=int(tbl.get("trials", 100)),
        base_seed=int(cfg.get("base_seed", 0)),
        shift=_complexify(ens_tbl.get("shift", 0.0))
        if isinstance(ens_tbl.get("shift", 0.0), (int, float, str)) else 0.0,
        declared_b=float(ens_tbl.get("declared_b", 0.5)),
        declared_K=float(ens_tbl.get("declared_K", 2.0)),
    )


def run_tail(inv, cfg, base_dir):
    tbl = _table(cfg, "tail")
    ecfg = _experiment_config(cfg, tbl)
    res = experiments.run_tail_experiment(ecfg)
    out = _default_output(inv, ".csv")
    io.persist_results(res.to_records(), out,
                       fieldnames=["n", "eps", "trials", "prob", "stderr"])
    cfgmod.write_sidecar(cfg, out)
    _echo({"output": out, "C_fit": res.c_fit, "c_fit": res.c_rate_fit,
           "failed_trials": res.failed_trials})
    return 0


def run_esd(inv, cfg, base_dir):
    tbl = _table(cfg, "esd")
    ens = cfgmod.build_ensemble(cfg.get("ensemble", {}), base_dir)
    trials = int(tbl.get("trials", 1))
    scale_raw = tbl.get("scale", "invsqrt")
    scale = 1.0 / math.sqrt(ens.n) if scale_raw == "invsqrt" else float(scale_raw)
    base = int(cfg.get("base_seed", 0))
    records = []
    for t in range(trials):
        A = sample_matrix(ens, SeedSpec(base, t))
        esd = experiments.compute_esd(A, scale)
        for k, lam in enumerate(esd.eigenvalues):
            records.append({"trial": t, "k": k,
                            "re": float(lam.real), "im": float(lam.imag)})
    out = _default_output(inv, ".csv")
    io.persist_results(records, out, fieldnames=["trial", "k", "re", "im"])
    cfgmod.write_sidecar(cfg, out)
    _echo({"output": out, "trials": trials, "n": ens.n})
    return 0


def run_circular_law(inv, cfg, base_dir):
    tbl = _table(cfg, "circular_law")
    s_vals = tbl.get("s_values", list(np.linspace(-1.2, 1.2, 13)))
    t_vals = tbl.get("t_values", list(np.linspace(-1.2, 1.2, 13)))
    records = [
        {"s": float(s), "t": float(t),
         "value": experiments.circular_law_cdf(s, t)}
        for s in s_vals for t in t_vals
    ]
    out = _default_output(inv, ".csv")
    io.persist_results(records, out, fieldnames=["s", "t", "value"])
    cfgmod.write_sidecar(cfg, out)
    _echo({"output": out, "points": len(records)})
    return 0


def run_universality(inv, cfg, base_dir):
    tbl = _table(cfg, "universality")
    quantity = tbl.get("quantity", "esd-distance")
    ecfg = _experiment_config(cfg, tbl, needs_y=quantity != "circular-distance")
    out = _default_output(inv, ".csv")
    if quantity == "logdet":
        summary = experiments.log_det_comparison(ecfg)
        records = summary.to_records()
    elif quantity == "distance-sum":
        summary = experiments.distance_sum_comparison(ecfg)
        records = summary.to_records()
    elif quantity in ("esd-distance", "circular-distance"):
        records = []
        stats = {}
        for n in ecfg.n_list:
            ex = ecfg.ensemble(n, "x")
            vals = []
            for t in range(ecfg.trials):
                ax = sample_matrix(ex, SeedSpec(ecfg.base_seed, t))
                ea = experiments.compute_esd(ax, 1.0 / math.sqrt(n))
                if quantity == "circular-distance":
                    d = experiments.esd_distance(ea, "circular")
                else:
                    ey = ecfg.ensemble(n, "y")
                    ay = sample_matrix(ey, SeedSpec(ecfg.base_seed, t))
                    eb = experiments.compute_esd(ay, 1.0 / math.sqrt(n))
                    d = experiments.esd_distance(ea, eb)
                records.append({"trial": t, "n": n, "value": d})
                vals.append(d)
            stats[str(n)] = {"median": float(np.median(vals)),
                             "max": float(np.max(vals))}
        summary = experiments.ComparisonSummary(quantity, records, stats)
    else:
        raise ValidationError(f"unknown universality quantity {quantity!r}")
    io.persist_results(records, out, fieldnames=["trial", "n", "value"])
    cfgmod.write_sidecar(cfg, out)
    _echo({"output": out, "quantity": quantity, "stats": summary.stats})
    return 0


def run_anticonc_verify(inv, cfg, base_dir):
    tbl = _table(cfg, "anticonc")
    name = tbl.get("verifier")
    dists = _dists_from_cfg(cfg)
    seed = _seed(cfg)
    v = _vector(tbl.get("v", [1.0]))
    m = int(tbl.get("m", 20000))
    if name == "levy-p":
        rep = anticonc.verify_levy_p_bound(v, dists, float(tbl.get("r", 1.0)),
                                           m, seed)
    elif name == "tensorization":
        w = _vector(tbl.get("w", [1.0]))
        rep = anticonc.verify_p_tensorization(v, w, dists, m, seed)
    elif name == "p-integral":
        rep = anticonc.verify_p_integral_bound(
            v, dists, m, seed, radius=float(tbl.get("radius", 3.0)),
            nodes_per_axis=int(tbl.get("nodes_per_axis", 61)))
    elif name == "doubling":
        rep = anticonc.verify_doubling_bound(
            v, dists, float(tbl.get("r", 0.5)), seed, m=m,
            radius=float(tbl.get("radius", 3.0)),
            nodes_per_axis=int(tbl.get("nodes_per_axis", 61)))
    elif name == "crlcd-tail":
        rep = anticonc.verify_crlcd_tail_bound(
            v, dists, float(tbl.get("eps", 0.5)), float(tbl.get("L", 10.0)),
            float(tbl.get("u", 0.3)), seed, m=m)
    elif name == "uniform":
        _, rep = anticonc.verify_uniform_anticonc(
            v, dists, tuple(tbl.get("c_grid", [0.5, 0.3, 0.2, 0.1, 0.05])),
            m, seed)
    else:
        raise ValidationError(f"unknown verifier {name!r}")
    out = _default_output(inv, ".json")
    with open(out, "w") as fh:
        json.dump(rep.to_dict(), fh, indent=2, default=str)
    cfgmod.write_sidecar(cfg, out)
    _echo(rep.to_dict())
    return 1 if rep.flag else 0


def run_crlcd(inv, cfg, base_dir):
    tbl = _table(cfg, "crlcd")
    dists = _dists_from_cfg(cfg)
    v = _vector(tbl.get("v", [1.0]))
    kwargs = {"mc_samples": int(tbl.get("m", 20000))}
    if "modulus_max" in tbl:
        kwargs["modulus_max"] = float(tbl["modulus_max"])
    q = anticonc.CrlcdQuery(v=tuple(v.tolist()), L=float(tbl.get("L", 10.0)),
                            u=float(tbl.get("u", 0.3)), **kwargs)
    res = anticonc.crlcd(q, dists, _seed(cfg))
    out = _default_output(inv, ".json")
    with open(out, "w") as fh:
        json.dump(res.to_dict(), fh, indent=2, default=str)
    cfgmod.write_sidecar(cfg, out)
    _echo(res.to_dict())
    return 0


def run_sphere_probe(inv, cfg, base_dir):
    tbl = _table(cfg, "sphere")
    ens = cfgmod.build_ensemble(cfg.get("ensemble", {}), base_dir)
    params = sphere.SphereParams(delta=float(tbl.get("delta", 0.25)),
                                 rho=float(tbl.get("rho", 0.3)))
    probe = tbl.get("probe", "distance")
    seed = _seed(cfg)
    trials = int(tbl.get("trials", 50))
    if probe == "distance":
        rep = sphere.invertibility_via_distance_probe(
            ens, params, float(tbl.get("eps", 0.5)), trials, seed)
    elif probe == "compressible":
        rep = sphere.compressible_inf_probe(
            ens, params, int(tbl.get("vector_samples", 50)), trials, seed)
    elif probe == "single-vector":
        rng = seed.child("probe-vector").rng()
        v = sphere.sample_incompressible(ens.n, params, rng)
        rep = sphere.single_vector_invertibility(ens, v, trials, seed)
    elif probe == "crlcd-scan":
        rep = sphere.crlcd_incompressible_scan(
            ens, params, float(tbl.get("L", 10.0)), float(tbl.get("u", 0.3)),
            int(tbl.get("vector_samples", 5)), seed,
            mc_samples=int(tbl.get("m", 4000)))
    else:
        raise ValidationError(f"unknown sphere probe {probe!r}")
    out = _default_output(inv, ".json")
    with open(out, "w") as fh:
        json.dump(rep.to_dict(), fh, indent=2, default=str)
    cfgmod.write_sidecar(cfg, out)
    _echo(rep.to_dict())
    return 1 if rep.flag else 0


def run_identity_check(inv, cfg, base_dir):
    tbl = _table(cfg, "identity")
    n = int(tbl.get("n", 8))
    trials = int(tbl.get("trials", 20))
    seed = _seed(cfg)
    records = []
    worst = 0.0
    for t in range(trials):
        rng = SeedSpec(seed.base_seed, t).rng()
        A = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
        A += 3.0 * np.eye(n)  # keep instances well-conditioned
        lhs, rhs, rel_err = linalg.negative_second_moment_check(A)
        worst = max(worst, rel_err)
        records.append({"trial": t, "n": n, "value": rel_err})
    out = _default_output(inv, ".csv")
    io.persist_results(records, out, fieldnames=["trial", "n", "value"])
    cfgmod.write_sidecar(cfg, out)
    _echo({"output": out, "trials": trials, "max_rel_err": worst})
    return 0


_DISPATCH = {
    "sample": run_sample,
    "tail": run_tail,
    "esd": run_esd,
    "circular-law": run_circular_law,
    "universality": run_universality,
    "anticonc-verify": run_anticonc_verify,
    "crlcd": run_crlcd,
    "sphere-probe": run_sphere_probe,
    "identity-check": run_identity_check,
}


def dispatch(inv):
    cfg = io.load_config(inv.config)
    cfg = cfgmod.apply_overrides(cfg, inv.overrides)
    if inv.seed is not None:
        cfg["base_seed"] = int(inv.seed)
    cfg.setdefault("base_seed", 0)
    base_dir = os.path.dirname(os.path.abspath(inv.config))
    return _DISPATCH[inv.subcommand](inv, cfg, base_dir)


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    try:
        inv = parse_invocation(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return dispatch(inv)
    except ValidationError as exc:
        _fail(inv, "config", str(exc))
        return 2
    except NumericalError as exc:
        _fail(inv, "numerical", str(exc))
        return 3
    except RmtkitError as exc:
        _fail(inv, "runtime", str(exc))
        return 3


def _fail(inv, kind, message):
    if getattr(inv, "json_errors", False):
        sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    else:
        sys.stderr.write(f"rmtkit: {kind} error: {message}\n")


if __name__ == "__main__":
    sys.exit(main())
