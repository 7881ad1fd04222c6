"""Config resolution: nested key/value files -> validated domain objects.

Overrides arrive as dotted key=value strings from the CLI and win over file
values; unknown keys are rejected by name. The fully-resolved config can be
serialized back to the same text form for the provenance sidecar.
"""

import os

import numpy as np

from . import io
from .ensembles import DistributionSpec, EnsembleSpec
from .errors import ValidationError

_DIST_KEYS = {
    "complex_gaussian": {"variance"},
    "four_point": set(),
    "rademacher": set(),
    "lattice_uniform": {"support", "probs"},
    "constant": {"value"},
    "sparse_bernoulli": {"p", "value"},
}

ENSEMBLE_KEYS = {
    "n", "dist", "shift", "scale", "declared_b", "declared_K",
    "base_seed", "alpha", "beta",
} | {k for keys in _DIST_KEYS.values() for k in keys}


def build_distribution(table):
    fam = table.get("dist")
    if fam not in _DIST_KEYS:
        raise ValidationError(
            f"unknown dist {fam!r}; expected one of {sorted(_DIST_KEYS)}"
        )
    params = _DIST_KEYS[fam]
    if fam == "complex_gaussian":
        return DistributionSpec.complex_gaussian(table.get("variance", 1.0))
    if fam == "four_point":
        return DistributionSpec.four_point()
    if fam == "rademacher":
        return DistributionSpec.rademacher()
    if fam == "lattice_uniform":
        if not {"support", "probs"} <= set(table):
            raise ValidationError("lattice_uniform needs support and probs")
        supp = [io.parse_complex(s) if isinstance(s, str) else complex(s)
                for s in table["support"]]
        return DistributionSpec.lattice_uniform(supp, table["probs"])
    if fam == "constant":
        v = table.get("value", 0.0)
        return DistributionSpec.constant(
            io.parse_complex(v) if isinstance(v, str) else v
        )
    v = table.get("value", 1.0)
    return DistributionSpec.sparse_bernoulli(
        table.get("p", 0.5), io.parse_complex(v) if isinstance(v, str) else v
    )


def build_ensemble(table, base_dir=".", n_override=None):
    unknown = set(table) - ENSEMBLE_KEYS
    if unknown:
        raise ValidationError(f"unknown ensemble keys: {sorted(unknown)}")
    n = int(n_override if n_override is not None else table.get("n", 0))
    if n < 2:
        raise ValidationError("ensemble needs n >= 2")
    dist = build_distribution(table)
    shift = table.get("shift", 0.0)
    scale = table.get("scale", 1.0)
    kwargs = dict(
        declared_b=float(table.get("declared_b", 0.5)),
        declared_K=float(table.get("declared_K", 2.0)),
        alpha=table.get("alpha"),
        beta=table.get("beta"),
    )
    if isinstance(shift, (int, float)) and isinstance(scale, (int, float)):
        return EnsembleSpec.iid(n, dist, shift=shift, scale=scale, **kwargs)
    sh = io.resolve_matrix_field(shift, n, base_dir)
    sc = io.resolve_matrix_field(scale, n, base_dir, nonneg=True)
    return EnsembleSpec(n=n, shift=sh, scale=sc, entry_dist=dist, **kwargs)


def apply_overrides(cfg, overrides):
    """Apply dotted key=value strings; every path must already exist."""
    for item in overrides:
        if "=" not in item:
            raise ValidationError(f"override {item!r} is not key=value")
        key, raw = item.split("=", 1)
        parts = key.strip().split(".")
        node = cfg
        for p in parts[:-1]:
            if not isinstance(node, dict) or p not in node:
                raise ValidationError(f"unknown config key {key!r}")
            node = node[p]
        leaf = parts[-1]
        if not isinstance(node, dict) or leaf not in node:
            raise ValidationError(f"unknown config key {key!r}")
        node[leaf] = _coerce(raw.strip(), node[leaf])
    return cfg


def _coerce(raw, prev):
    if isinstance(prev, bool):
        if raw in ("true", "false"):
            return raw == "true"
        raise ValidationError(f"expected true/false, got {raw!r}")
    if isinstance(prev, int):
        return int(raw)
    if isinstance(prev, float):
        return float(raw)
    if isinstance(prev, list):
        return [_coerce(x.strip(), prev[0] if prev else 0.0)
                for x in raw.strip("[]").split(",") if x.strip()]
    return raw


def _toml_scalar(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return io.format_float(v)
    if isinstance(v, list):
        return "[" + ", ".join(_toml_scalar(x) for x in v) + "]"
    return '"' + str(v).replace("\\", "\\\\").replace('"', '\\"') + '"'


def dump_config(cfg):
    """Serialize a nested dict back to config text (stable key order)."""
    lines = []
    tables = []
    for k in sorted(cfg):
        v = cfg[k]
        if isinstance(v, dict):
            tables.append((k, v))
        else:
            lines.append(f"{k} = {_toml_scalar(v)}")
    for name, tbl in tables:
        lines.append("")
        lines.append(f"[{name}]")
        for k in sorted(tbl):
            v = tbl[k]
            if isinstance(v, dict):
                raise ValidationError("config nesting deeper than one table")
            lines.append(f"{k} = {_toml_scalar(v)}")
    return "\n".join(lines) + "\n"


def write_sidecar(cfg, output_path):
    """Persist the resolved config next to the data output."""
    sidecar = os.fspath(output_path) + ".resolved.toml"
    with open(sidecar, "w") as fh:
        fh.write(dump_config(cfg))
    return sidecar
