"""Complex anti-concentration machinery.

Levy concentration estimation, the Bernoulli-masked exponential functional,
torus norms, expected lattice distances, the complex randomized least common
denominator (CRLCD) search, and one-sided statistical verifiers for the
inequalities that connect them. Verifiers flag with 3*SE guard bands; they
never silently fail.

The sup over centers in the Levy concentration function is approximated by
maximizing over the sample points themselves: any ball of radius r capturing
k samples lies within r of a captured sample, so the sample-centered count at
radius 2r dominates the true value at r. Reports carry both readings.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .ensembles import DistributionSpec, as_seed
from .errors import ValidationError

CRLCD_DEFAULT_MIN = 1e-2
CRLCD_DEFAULT_MAX = 1e3


# ---------------------------------------------------------------------------
# sampling helpers
# ---------------------------------------------------------------------------

def _as_dists(dists, n):
    if isinstance(dists, DistributionSpec):
        return [dists] * n
    dists = list(dists)
    if len(dists) != n:
        raise ValidationError(f"need {n} coordinate distributions, got {len(dists)}")
    return dists


def sample_vector_matrix(dists, m, rng):
    """(m, n) draws, column j from dists[j]; column-major order fixes the stream."""
    n = len(dists)
    X = np.empty((m, n), dtype=np.complex128)
    for j in range(n):
        X[:, j] = dists[j].sample(rng, (m,))
    return X


def sample_symmetrized_matrix(dists, m, rng):
    """(m, n) draws of X' - X'' per coordinate."""
    n = len(dists)
    X = np.empty((m, n), dtype=np.complex128)
    for j in range(n):
        X[:, j] = dists[j].sample(rng, (m,)) - dists[j].sample(rng, (m,))
    return X


def symmetrize_samples(dist, m, seed):
    """m draws of Z' - Z'' for a single distribution."""
    from .ensembles import symmetrize_samples as _sym

    return _sym(dist, m, seed)


# ---------------------------------------------------------------------------
# Levy concentration function
# ---------------------------------------------------------------------------

@dataclass
class ConcentrationEstimate:
    radius: float
    estimate: float
    std_err: float
    samples: int
    witness_center: complex

    def to_dict(self):
        return {
            "radius": self.radius,
            "estimate": self.estimate,
            "std_err": self.std_err,
            "samples": self.samples,
            "witness_center_re": self.witness_center.real,
            "witness_center_im": self.witness_center.imag,
        }


def levy_samples(v, dists, m, seed):
    """The m draws of S = sum_j v_j X_j used by the concentration estimator."""
    v = np.asarray(v, dtype=np.complex128)
    dists = _as_dists(dists, v.size)
    X = sample_vector_matrix(dists, m, as_seed(seed).rng())
    return X @ v


def levy_concentration_from_samples(S, r):
    """Sample-centered estimate of the concentration function at radius r.

    Exactly monotone in r for a fixed sample vector S.
    """
    if r < 0:
        raise ValidationError("radius must be nonnegative")
    m = S.size
    count, idx = kernels.max_ball_count(S.real, S.imag, r)
    est = count / m
    se = math.sqrt(max(est * (1.0 - est), 0.25 / m) / m)
    return ConcentrationEstimate(float(r), est, se, m, complex(S[idx]))


def levy_concentration(v, dists, r, m, seed):
    if m < 100:
        raise ValidationError("need m >= 100 samples")
    return levy_concentration_from_samples(levy_samples(v, dists, m, seed), r)


# ---------------------------------------------------------------------------
# P functional and torus norms
# ---------------------------------------------------------------------------

def _p_functional_samples(v, dists, m, seed):
    v = np.asarray(v, dtype=np.complex128)
    dists = _as_dists(dists, v.size)
    rng = as_seed(seed).rng()
    Xt = sample_symmetrized_matrix(dists, m, rng)
    mask = rng.integers(0, 2, Xt.shape).astype(np.float64)
    S = (Xt * mask) @ v
    return np.exp(-math.pi * np.abs(S) ** 2)


def p_functional(v, dists, m, seed):
    """E exp(-pi |<X_hat, v>|^2) with X_hat the Bernoulli(1/2)-masked symmetrization."""
    if m < 100:
        raise ValidationError("need m >= 100 samples")
    return float(_p_functional_samples(v, dists, m, seed).mean())


def p_functional_with_se(v, dists, m, seed):
    w = _p_functional_samples(v, dists, m, seed)
    return float(w.mean()), float(w.std(ddof=1) / math.sqrt(m))


def torus_norm(a, dist, m, seed):
    """(E ||Re(a * z~)||^2_{R/Z})^{1/2} by Monte Carlo."""
    if m < 100:
        raise ValidationError("need m >= 100 samples")
    z = symmetrize_samples(dist, m, seed)
    x = np.real(complex(a) * z)
    fx = x - np.floor(x + 0.5)
    return float(math.sqrt(np.mean(fx * fx)))


def expected_lattice_dist2(theta, v, dists, m, seed):
    """E dist^2(theta * v * X~, (Z+iZ)^n), fresh symmetrized sample."""
    if m < 100:
        raise ValidationError("need m >= 100 samples")
    v = np.asarray(v, dtype=np.complex128)
    dists = _as_dists(dists, v.size)
    Xt = sample_symmetrized_matrix(dists, m, as_seed(seed).rng())
    out = kernels.lattice_mean_dist2_grid(
        np.array([complex(theta)], dtype=np.complex128), v, Xt
    )
    return float(out[0])


# ---------------------------------------------------------------------------
# CRLCD
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CrlcdQuery:
    v: tuple
    L: float
    u: float
    modulus_min: float = CRLCD_DEFAULT_MIN
    modulus_max: float = CRLCD_DEFAULT_MAX
    points_per_decade: int = 40
    phase_points: int = 64
    mc_samples: int = 20000
    bisect_tol: float = 1e-3

    def __post_init__(self):
        if not self.modulus_min > 0:
            raise ValidationError("modulus grid must start above 0")
        if self.modulus_max <= self.modulus_min:
            raise ValidationError("empty modulus grid")
        if self.phase_points < 8:
            raise ValidationError("need at least 8 phase points")
        if not (self.L > 0 and 0.0 < self.u < 1.0):
            raise ValidationError("need L > 0 and u in (0, 1)")

    def moduli(self):
        decades = math.log10(self.modulus_max / self.modulus_min)
        npts = max(int(round(self.points_per_decade * decades)) + 1, 2)
        return np.geomspace(self.modulus_min, self.modulus_max, npts)

    def phases(self):
        k = np.arange(self.phase_points)
        return np.exp(2j * math.pi * k / self.phase_points)


@dataclass
class CrlcdResult:
    value: float
    witness_theta: complex
    lhs_at_witness: float
    bound_at_witness: float
    capped: bool

    def to_dict(self):
        d = {
            "value": self.value,
            "lhs_at_witness": self.lhs_at_witness,
            "bound_at_witness": self.bound_at_witness,
            "capped": bool(self.capped),
        }
        if self.witness_theta is not None:
            d["witness_theta_re"] = self.witness_theta.real
            d["witness_theta_im"] = self.witness_theta.imag
        return d


def crlcd(query, dists, seed):
    """Smallest |theta| with E dist^2(theta v * X~, lattice) < min(u|theta|^2 |v|^2, L^2).

    Scans a log-modulus x phase polar grid with one fixed symmetrized sample
    (common random numbers), then bisects on the modulus at the witness
    phase. Returns the modulus cap as a sentinel when no grid point
    qualifies.
    """
    v = np.asarray(query.v, dtype=np.complex128)
    vnorm2 = float(np.sum(np.abs(v) ** 2))
    if not 0.25 <= vnorm2 <= 4.0:
        raise ValidationError("crlcd expects ||v||_2 in [1/2, 2]")
    dists = _as_dists(dists, v.size)
    Xt = sample_symmetrized_matrix(dists, query.mc_samples, as_seed(seed).rng())
    moduli = query.moduli()
    phases = query.phases()
    L2 = query.L**2

    def bound(mod):
        return min(query.u * mod * mod * vnorm2, L2)

    prev = None
    for mod in moduli:
        thetas = mod * phases
        lhs = kernels.lattice_mean_dist2_grid(thetas, v, Xt)
        b = bound(mod)
        qual = lhs < b
        if qual.any():
            lhs_masked = np.where(qual, lhs, np.inf)
            j = int(np.argmin(lhs_masked))
            phase = phases[j]
            lo, hi = (prev, mod) if prev is not None else (mod, mod)
            while hi - lo > query.bisect_tol:
                mid = 0.5 * (lo + hi)
                lmid = kernels.lattice_mean_dist2_grid(
                    np.array([mid * phase]), v, Xt
                )[0]
                if lmid < bound(mid):
                    hi = mid
                else:
                    lo = mid
            theta = hi * phase
            lhs_w = float(
                kernels.lattice_mean_dist2_grid(np.array([theta]), v, Xt)[0]
            )
            return CrlcdResult(float(hi), complex(theta), lhs_w,
                               float(bound(hi)), False)
        prev = mod
    return CrlcdResult(float(query.modulus_max), None, math.nan, math.nan, True)


# ---------------------------------------------------------------------------
# verifiers
# ---------------------------------------------------------------------------

@dataclass
class VerifierReport:
    name: str
    lhs: float
    rhs: float
    std_errs: dict
    margin: float
    flag: bool
    parameters: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "std_errs": self.std_errs,
            "margin": self.margin,
            "flag": bool(self.flag),
            "parameters": self.parameters,
            **self.extra,
        }


def verify_levy_p_bound(v, dists, r, m, seed):
    """rho_{r,X}(v) <= exp(pi r^2) P_X(v), checked with guard bands."""
    seed = as_seed(seed)
    rho = levy_concentration(v, dists, r, m, seed)
    rho2 = levy_concentration(v, dists, 2.0 * r, m, seed)
    p, p_se = p_functional_with_se(v, dists, m, seed.child("pfun"))
    rhs = math.exp(math.pi * r * r) * p
    lhs_guard = rho.estimate - 3.0 * rho.std_err
    rhs_guard = math.exp(math.pi * r * r) * (p + 3.0 * p_se)
    flag = lhs_guard > rhs_guard
    return VerifierReport(
        "levy_p_bound", rho.estimate, rhs,
        {"rho": rho.std_err, "p": p_se},
        rhs_guard - lhs_guard, flag,
        parameters={"r": r, "m": m},
        extra={"rho_at_2r": rho2.estimate, "p_estimate": p},
    )


def verify_p_tensorization(v, w, dists, m, seed):
    """P_X(v) P_X(w) <= 2 P_XX(vw) for the doubled vector/vector pair."""
    seed = as_seed(seed)
    v = np.asarray(v, dtype=np.complex128)
    w = np.asarray(w, dtype=np.complex128)
    dists = _as_dists(dists, v.size)
    pv, sv = p_functional_with_se(v, dists, m, seed.child("pv"))
    pw, sw = p_functional_with_se(w, dists, m, seed.child("pw"))
    vw = np.concatenate([v, w])
    pvw, svw = p_functional_with_se(vw, dists + dists, m, seed.child("pvw"))
    lhs = pv * pw
    rhs = 2.0 * pvw
    lhs_guard = max(pv - 3 * sv, 0.0) * max(pw - 3 * sw, 0.0)
    rhs_guard = 2.0 * (pvw + 3 * svw)
    flag = lhs_guard > rhs_guard
    return VerifierReport(
        "p_tensorization", lhs, rhs,
        {"pv": sv, "pw": sw, "pvw": svw},
        rhs_guard - lhs_guard, flag, parameters={"m": m},
    )


def _real_torus_mean_sq(xis, v, Xt):
    """sum_i ||xi v_i||^2_{X_i} = E sum_i fracdist^2(Re(xi v_i X~_i)) per xi node."""
    out = np.empty(xis.shape[0])
    W = Xt * np.asarray(v)[None, :]
    for k, xi in enumerate(xis):
        x = np.real(xi * W)
        fx = x - np.floor(x + 0.5)
        out[k] = float(np.mean(np.sum(fx * fx, axis=1)))
    return out


def _square_grid(radius, nodes_per_axis):
    h = 2.0 * radius / nodes_per_axis
    centers = -radius + h * (np.arange(nodes_per_axis) + 0.5)
    xx, yy = np.meshgrid(centers, centers)
    return (xx + 1j * yy).ravel(), h * h


def verify_p_integral_bound(v, dists, m, seed, radius=3.0, nodes_per_axis=61):
    """P_X(v) <= integral of exp(-sum ||xi v_i||^2_{X_i} / 2) exp(-pi|xi|^2) dxi."""
    seed = as_seed(seed)
    if math.exp(-math.pi * radius * radius) >= 1e-12:
        raise ValidationError("quadrature truncation radius too small")
    v = np.asarray(v, dtype=np.complex128)
    dists = _as_dists(dists, v.size)
    p, p_se = p_functional_with_se(v, dists, m, seed.child("pfun"))
    Xt = sample_symmetrized_matrix(dists, m, seed.child("xt").rng())
    nodes, wgt = _square_grid(radius, nodes_per_axis)
    tns = _real_torus_mean_sq(nodes, v, Xt)
    integrand = np.exp(-0.5 * tns - math.pi * np.abs(nodes) ** 2)
    rhs = float(integrand.sum() * wgt)
    lhs_guard = p - 3.0 * p_se
    flag = lhs_guard > rhs
    return VerifierReport(
        "p_integral_bound", p, rhs, {"p": p_se}, rhs - lhs_guard, flag,
        parameters={"m": m, "radius": radius, "nodes_per_axis": nodes_per_axis},
    )


def verify_doubling_bound(w, dists, r, seed, m=5000, radius=3.0, nodes_per_axis=61):
    """rho_r(w)^2 <= 2 exp(2 pi r^2) * integral of the lattice-distance kernel."""
    seed = as_seed(seed)
    if math.exp(-math.pi * radius * radius) >= 1e-12:
        raise ValidationError("quadrature truncation radius too small")
    w = np.asarray(w, dtype=np.complex128)
    dists = _as_dists(dists, w.size)
    rho = levy_concentration(w, dists, r, m, seed)
    Xt = sample_symmetrized_matrix(dists, m, seed.child("xt").rng())
    nodes, wgt = _square_grid(radius, nodes_per_axis)
    d2 = kernels.lattice_mean_dist2_grid(nodes, w, Xt)
    integrand = np.exp(-0.5 * d2 - math.pi * np.abs(nodes) ** 2)
    rhs = float(2.0 * math.exp(2.0 * math.pi * r * r) * integrand.sum() * wgt)
    lhs = rho.estimate**2
    lhs_guard = max(rho.estimate - 3.0 * rho.std_err, 0.0) ** 2
    flag = lhs_guard > rhs
    return VerifierReport(
        "doubling_bound", lhs, rhs, {"rho": rho.std_err},
        rhs - lhs_guard, flag,
        parameters={"r": r, "m": m, "radius": radius,
                    "nodes_per_axis": nodes_per_axis},
    )


def verify_crlcd_tail_bound(v, dists, eps, L, u, seed, m=20000, query=None):
    """Fit the implied constant of the CRLCD tail bound; assert only C_hat <= 1e3."""
    seed = as_seed(seed)
    v = np.asarray(v, dtype=np.complex128)
    rho = levy_concentration(v, dists, eps, m, seed)
    if query is None:
        query = CrlcdQuery(v=tuple(v.tolist()), L=L, u=u, mc_samples=m)
    res = crlcd(query, dists, seed.child("crlcd"))
    tail = math.exp(-0.25 * math.pi * eps * eps * res.value * res.value)
    bracket = eps / math.sqrt(u) + math.exp(-0.25 * L * L) + tail
    c_hat = rho.estimate / bracket
    flag = c_hat > 1e3
    return VerifierReport(
        "crlcd_tail_bound", rho.estimate, bracket, {"rho": rho.std_err},
        1e3 - c_hat, flag,
        parameters={"eps": eps, "L": L, "u": u, "m": m},
        extra={"c_hat": c_hat, "crlcd_value": res.value,
               "crlcd_capped": bool(res.capped)},
    )


def verify_uniform_anticonc(v, dists, c_grid, m, seed):
    """Find the largest c in the grid with rho_c(v) + 3*SE <= 1 - c.

    Returns (best_c, report); report.flag is set when no grid value
    qualifies, which would contradict uniform anti-concentration for this
    vector/ensemble.
    """
    v = np.asarray(v, dtype=np.complex128)
    S = levy_samples(v, dists, m, seed)
    scan = []
    best = None
    for c in sorted(c_grid, reverse=True):
        est = levy_concentration_from_samples(S, c)
        ok = est.estimate + 3.0 * est.std_err <= 1.0 - c
        scan.append({"c": float(c), "rho": est.estimate,
                     "std_err": est.std_err, "ok": bool(ok)})
        if ok and best is None:
            best = float(c)
    flag = best is None
    lhs = scan[0]["rho"] if scan else math.nan
    report = VerifierReport(
        "uniform_anticonc", lhs, 1.0 - (best if best is not None else 0.0),
        {"rho": scan[0]["std_err"] if scan else math.nan},
        0.0 if not flag else -1.0, flag,
        parameters={"m": m, "c_grid": [float(c) for c in c_grid]},
        extra={"best_c": best, "scan": scan},
    )
    return best, report
