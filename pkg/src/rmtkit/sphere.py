"""Sparse / compressible / incompressible geometry on the complex unit sphere,
and Monte Carlo probes of the invertibility statements built on it.

The infimum over Comp/Incomp cannot be computed exactly; probes report
sampled minima with their sample counts, and the distance-lemma probe
upper-bounds its LHS by P(s_n <= eps rho / sqrt(n)), which makes the checked
inequality stronger than the target statement (a conservative substitute).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import anticonc, linalg
from .ensembles import SeedSpec, as_seed, sample_matrix
from .errors import ValidationError


@dataclass(frozen=True)
class SphereParams:
    delta: float
    rho: float

    def __post_init__(self):
        if not (0.0 < self.delta < 1.0 and 0.0 < self.rho < 1.0):
            raise ValidationError("delta and rho must lie in (0, 1)")

    def sparsity(self, n):
        k = int(self.delta * n)
        if k < 1:
            raise ValidationError("delta * n must be at least 1")
        return k


@dataclass
class Classification:
    kind: str  # "sparse" | "compressible" | "incompressible"
    dist_to_sparse: float

    @property
    def compressible(self):
        return self.kind != "incompressible"


def _check_unit(u):
    u = np.asarray(u, dtype=np.complex128)
    nrm = np.linalg.norm(u)
    if abs(nrm - 1.0) > 1e-10:
        raise ValidationError(f"expected a unit vector, got norm {nrm!r}")
    return u


def dist_to_sparse(u, delta):
    """l2 mass of u outside its floor(delta*n) largest-modulus coordinates.

    Ties broken toward the lowest index. This equals the exact distance to
    the cone of floor(delta*n)-sparse vectors.
    """
    u = _check_unit(u)
    n = u.size
    k = int(delta * n)
    if k < 1:
        raise ValidationError("delta * n must be at least 1")
    if k >= n:
        return 0.0
    order = np.argsort(-np.abs(u), kind="stable")
    tail = u[order[k:]]
    return float(np.linalg.norm(tail))


def classify(u, params):
    """Compressible iff dist_to_sparse <= rho (boundary included); sparse when 0."""
    u = _check_unit(u)
    n = u.size
    k = params.sparsity(n)
    d = dist_to_sparse(u, params.delta)
    if int(np.count_nonzero(u)) <= k:
        return Classification("sparse", d)
    if d <= params.rho:
        return Classification("compressible", d)
    return Classification("incompressible", d)


def sample_compressible(n, params, rng, max_tries=100):
    """Random unit vector within rho of a floor(delta*n)-sparse vector."""
    k = params.sparsity(n)
    for _ in range(max_tries):
        supp = rng.choice(n, size=k, replace=False)
        s = np.zeros(n, dtype=np.complex128)
        core = rng.normal(size=k) + 1j * rng.normal(size=k)
        s[supp] = core / np.linalg.norm(core)
        pert = rng.normal(size=n) + 1j * rng.normal(size=n)
        pert *= (0.9 * params.rho * rng.random()) / np.linalg.norm(pert)
        x = s + pert
        x /= np.linalg.norm(x)
        if dist_to_sparse(x, params.delta) <= params.rho:
            return x
    raise ValidationError("could not sample a compressible vector")


def sample_incompressible(n, params, rng, max_tries=100):
    """Uniform sphere point rejected until incompressible."""
    for _ in range(max_tries):
        x = rng.normal(size=n) + 1j * rng.normal(size=n)
        x /= np.linalg.norm(x)
        if classify(x, params).kind == "incompressible":
            return x
    raise ValidationError(
        "could not sample an incompressible vector; delta/rho too permissive"
    )


@dataclass
class ProbeReport:
    name: str
    flag: bool
    data: dict = field(default_factory=dict)

    def to_dict(self):
        return {"name": self.name, "flag": bool(self.flag), **self.data}


def single_vector_invertibility(ens, v, trials, seed=0, c_grid=None):
    """Empirical P(||Av|| <= c sqrt(n)) against the (1-c)^n tensorization decay.

    Reports the largest grid c whose empirical log-probability stays below
    n log(1-c) within a 3*SE margin.
    """
    v = _check_unit(v)
    seed = as_seed(seed)
    if c_grid is None:
        c_grid = np.geomspace(0.01, 0.9, 25)
    n = ens.n
    norms = np.empty(trials)
    for t in range(trials):
        A = sample_matrix(ens, SeedSpec(seed.base_seed, t))
        norms[t] = np.linalg.norm(A @ v)
    scan = []
    best = None
    for c in np.sort(np.asarray(c_grid, dtype=float)):
        p = float(np.mean(norms <= c * math.sqrt(n)))
        se = math.sqrt(max(p * (1 - p), 1.0 / trials) / trials)
        target = n * math.log1p(-c)
        # compare in probability domain to keep log(0) out of the report
        ok = p - 3.0 * se <= math.exp(target)
        scan.append({"c": float(c), "prob": p, "std_err": se,
                     "bound": math.exp(target), "ok": bool(ok)})
        if ok:
            best = float(c)
    return ProbeReport(
        "single_vector_invertibility", best is None,
        {"best_c": best, "trials": trials, "scan": scan},
    )


def compressible_inf_probe(ens, params, vector_samples, trials, seed=0,
                           thresholds=(0.05, 0.1, 0.2, 0.5)):
    """Sampled minimum of ||Ax||/sqrt(n) over compressible x, per matrix trial."""
    if vector_samples < 1:
        raise ValidationError("need at least one sampled vector")
    seed = as_seed(seed)
    n = ens.n
    vec_rng = seed.child("vectors").rng()
    V = np.column_stack(
        [sample_compressible(n, params, vec_rng) for _ in range(vector_samples)]
    )
    minima = np.empty(trials)
    for t in range(trials):
        A = sample_matrix(ens, SeedSpec(seed.base_seed, t))
        minima[t] = float(np.min(np.linalg.norm(A @ V, axis=0))) / math.sqrt(n)
    fractions = {
        str(th): float(np.mean(minima < th)) for th in thresholds
    }
    return ProbeReport(
        "compressible_inf_probe", False,
        {"trials": trials, "vector_samples": vector_samples,
         "min_of_minima": float(minima.min()),
         "median_minimum": float(np.median(minima)),
         "fraction_below": fractions},
    )


def invertibility_via_distance_probe(ens, params, eps, trials, seed=0):
    """Distance-lemma probe: P(s_n <= eps rho / sqrt(n)) vs the column-distance sum.

    The LHS proxy dominates the statement's infimum term, so a passing check
    is stronger than the lemma. I is the complement of the floor(delta n/2)
    largest-realized-norm columns, mirroring the second-moment pigeonhole.
    """
    n = ens.n
    if n < 4.0 / params.delta:
        raise ValidationError("need n >= 4/delta for the distance lemma")
    seed = as_seed(seed)
    drop = int(params.delta * n / 2)
    lhs_hits = np.empty(trials)
    rhs_sums = np.empty(trials)
    thr = eps * params.rho / math.sqrt(n)
    for t in range(trials):
        A = sample_matrix(ens, SeedSpec(seed.base_seed, t))
        sn = linalg.smallest_singular_value(A)
        lhs_hits[t] = 1.0 if sn <= thr else 0.0
        col_norms = np.linalg.norm(A, axis=0)
        order = np.argsort(-col_norms, kind="stable")
        keep = np.sort(order[drop:]) if drop > 0 else np.arange(n)
        cnt = 0
        for j in keep:
            others = [A[:, i] for i in range(n) if i != j]
            if linalg.dist_to_subspace(A[:, j], others) <= eps:
                cnt += 1
        rhs_sums[t] = cnt
    lhs = float(lhs_hits.mean())
    lhs_se = math.sqrt(max(lhs * (1 - lhs), 1.0 / trials) / trials)
    rhs = float(4.0 / (params.delta * n) * rhs_sums.mean())
    rhs_se = float(4.0 / (params.delta * n) * rhs_sums.std(ddof=1)
                   / math.sqrt(trials)) if trials > 1 else 0.0
    flag = lhs - 3.0 * lhs_se > rhs + 3.0 * rhs_se
    return ProbeReport(
        "invertibility_via_distance", flag,
        {"eps": eps, "trials": trials, "lhs": lhs, "lhs_std_err": lhs_se,
         "rhs": rhs, "rhs_std_err": rhs_se, "threshold": thr,
         "dropped_columns": drop},
    )


def crlcd_incompressible_scan(ens, params, L, u, vector_samples, seed=0,
                              column_index=0, mc_samples=4000, modulus_max=None):
    """CRLCD of sampled incompressible vectors against one matrix column.

    Estimates the column second moment T, reports the minimum CRLCD over the
    sampled vectors and the fitted h = min * sqrt(T) / n (asserted positive,
    never compared to a pinned constant).
    """
    seed = as_seed(seed)
    n = ens.n
    base_dists, scales = ens.column_dists(column_index)
    # absorb the variance profile into per-coordinate lattice scale: the
    # symmetrized column coordinate is scale_i * x~_i
    mu = ens.shift[:, column_index]
    t_est = float(np.sum(np.abs(mu) ** 2))
    # E|A_ij|^2 = |mu|^2 + sigma^2 E|x|^2, estimated by MC below
    probe_rng = seed.child("T").rng()
    xs = anticonc.sample_vector_matrix(base_dists, 2000, probe_rng)
    t_est += float(np.sum((np.abs(xs) ** 2).mean(axis=0) * scales**2))

    vec_rng = seed.child("vectors").rng()
    kwargs = {}
    if modulus_max is not None:
        kwargs["modulus_max"] = modulus_max
    values = []
    capped = 0
    for k in range(vector_samples):
        v = sample_incompressible(n, params, vec_rng)
        # fold the scale profile into the vector; the lattice distance sees
        # theta * (v_i sigma_i) * x~_i, and ||v * sigma|| stays within the
        # query's [1/2, 2] window after renormalizing theta units
        w = v * scales
        wnorm = np.linalg.norm(w)
        q = anticonc.CrlcdQuery(v=tuple((w / wnorm).tolist()), L=L, u=u,
                                mc_samples=mc_samples, **kwargs)
        res = anticonc.crlcd(q, base_dists, seed.child(f"crlcd{k}"))
        # value is in normalized units; undo the ||w|| rescale
        values.append(res.value / wnorm)
        if res.capped:
            capped += 1
    vmin = float(min(values))
    h_fit = vmin * math.sqrt(t_est) / n
    return ProbeReport(
        "crlcd_incompressible_scan", not h_fit > 0.0,
        {"vector_samples": vector_samples, "column_index": column_index,
         "T_estimate": t_est, "min_crlcd": vmin, "h_fit": h_fit,
         "capped_count": capped, "values": values},
    )
