"""Headline experiments: smallest-singular-value tail curves, empirical
spectral distributions against the circular law, and the log-determinant /
row-distance / extreme-singular-value reduction quantities used to compare
two entry distributions.

Trials use per-trial seed streams and order-fixed aggregation, so outputs
are byte-identical regardless of how trials are scheduled.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .ensembles import DistributionSpec, EnsembleSpec, SeedSpec, as_seed
from .ensembles import sample_matrix
from .errors import EigenConvergenceError, NumericalError, ValidationError


@dataclass(frozen=True)
class ExperimentConfig:
    """Shared experiment parameters.

    dist_x / dist_y are entry distributions; ensembles at each n are built
    as shift*I + X with unit scale unless a prebuilt ensemble is supplied.
    """

    dist_x: DistributionSpec
    dist_y: DistributionSpec = None
    z: complex = 0.0
    n_list: tuple = (64,)
    eps_list: tuple = (0.5,)
    trials: int = 100
    base_seed: int = 0
    shift: complex = 0.0
    declared_b: float = 0.5
    declared_K: float = 2.0

    def __post_init__(self):
        if self.trials < 1:
            raise ValidationError("trials must be >= 1")
        if not self.n_list or any(int(n) < 2 for n in self.n_list):
            raise ValidationError("n_list must contain sizes >= 2")
        if any(e <= 0 for e in self.eps_list):
            raise ValidationError("eps values must be positive")
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        object.__setattr__(self, "eps_list", tuple(float(e) for e in self.eps_list))
        object.__setattr__(self, "z", complex(self.z))
        object.__setattr__(self, "shift", complex(self.shift))

    def ensemble(self, n, which="x"):
        dist = self.dist_x if which == "x" else self.dist_y
        if dist is None:
            raise ValidationError("config has no Y ensemble")
        return EnsembleSpec.iid(n, dist, shift=self.shift,
                                declared_b=self.declared_b,
                                declared_K=self.declared_K)


@dataclass
class TailResult:
    rows: list  # dicts: n, eps, trials, prob, stderr
    c_fit: float
    c_rate_fit: float
    failed_trials: int

    def to_records(self):
        return [dict(r) for r in self.rows]


def _fit_tail_constants(rows):
    """Nonnegative least squares of prob ~ C*(eps + exp(-c eps^2 n)).

    c is scanned on a grid; C then solves a 1-d nonnegative least squares in
    closed form. Fitted values are descriptive only.
    """
    eps = np.array([r["eps"] for r in rows])
    ns = np.array([r["n"] for r in rows])
    probs = np.array([r["prob"] for r in rows])
    best = (0.0, 0.0, math.inf)
    for c in np.geomspace(1e-4, 10.0, 200):
        basis = eps + np.exp(-c * eps**2 * ns)
        denom = float(basis @ basis)
        C = max(float(basis @ probs) / denom, 0.0) if denom > 0 else 0.0
        r = float(np.sum((probs - C * basis) ** 2))
        if r < best[2]:
            best = (C, float(c), r)
    return best[0], best[1]


def run_tail_experiment(cfg):
    """Empirical P(s_n <= eps/sqrt(n)) on a shared trial set per n.

    The same per-trial smallest singular value serves every eps, so the
    curve in eps is exactly nondecreasing. Eigensolver failures are excluded
    from the counts and reported.
    """
    rows = []
    failures = 0
    for n in cfg.n_list:
        ens = cfg.ensemble(n)
        svs = []
        for t in range(cfg.trials):
            A = sample_matrix(ens, SeedSpec(cfg.base_seed, t))
            try:
                svs.append(linalg.smallest_singular_value(A))
            except EigenConvergenceError:
                failures += 1
        svs = np.asarray(svs)
        good = svs.size
        if good == 0:
            raise NumericalError(f"all trials failed at n={n}")
        for eps in cfg.eps_list:
            p = float(np.mean(svs <= eps / math.sqrt(n)))
            se = math.sqrt(max(p * (1.0 - p), 1.0 / good) / good)
            rows.append({"n": n, "eps": eps, "trials": good,
                         "prob": p, "stderr": se})
    C, c = _fit_tail_constants(rows)
    return TailResult(rows=rows, c_fit=C, c_rate_fit=c, failed_trials=failures)


@dataclass
class Esd:
    """Empirical spectral distribution: joint CDF of eigenvalue Re/Im parts."""

    eigenvalues: np.ndarray

    def __post_init__(self):
        self.eigenvalues = np.asarray(self.eigenvalues, dtype=np.complex128).ravel()
        if self.eigenvalues.size == 0:
            raise ValidationError("an ESD needs at least one eigenvalue")

    @property
    def n(self):
        return self.eigenvalues.size

    def cdf(self, s, t):
        lam = self.eigenvalues
        return float(np.mean((lam.real <= s) & (lam.imag <= t)))

    def cdf_grid(self, s_vals, t_vals):
        """Vectorized cdf on the product grid, shape (len(s), len(t))."""
        re_sorted = np.sort(self.eigenvalues.real)
        lam = self.eigenvalues[np.argsort(self.eigenvalues.real, kind="stable")]
        # cumulative count over Re <= s, then filter Im <= t per column
        out = np.empty((len(s_vals), len(t_vals)))
        im = lam.imag
        for i, s in enumerate(s_vals):
            k = int(np.searchsorted(re_sorted, s, side="right"))
            head = im[:k]
            out[i] = [np.count_nonzero(head <= t) for t in t_vals]
        return out / self.n


def compute_esd(A, scale=1.0):
    """ESD of scale * A; eigensolver failures propagate."""
    A = np.asarray(A, dtype=np.complex128)
    lam = linalg.eigenvalues(scale * A)
    return Esd(lam.values)


def _quarter_cdf(s, t):
    """Area fraction of the unit disc in {Re <= s, Im <= t} for s,t in [-1,1].

    Integrates the chord width over the vertical strip using the closed form
    F(y) = (y*sqrt(1-y^2) + arcsin(y))/2 = integral of sqrt(1-y^2).
    """

    def F(y):
        y = min(max(y, -1.0), 1.0)
        return 0.5 * (y * math.sqrt(max(1.0 - y * y, 0.0)) + math.asin(y))

    # integral over x in [-1, s] of length of {y : y <= t, |y| <= sqrt(1-x^2)}
    # split at |x| = sqrt(1-t^2): below it the cap at t truncates the chord.
    s = min(max(s, -1.0), 1.0)
    if t >= 1.0:
        # full chords: area of the left half-plane cut
        return 2.0 * (F(s) - F(-1.0)) / math.pi
    if t <= -1.0:
        return 0.0
    xc = math.sqrt(max(1.0 - t * t, 0.0))
    total = 0.0
    # region where chord bottom -sqrt(1-x^2) >= ... two regimes in |x|:
    # |x| >= xc: the disc slice lies entirely below t iff t >= 0 else empty
    # handle by direct integration of min(t, top) - bottom when positive
    # piecewise closed form:
    lo = -1.0
    hi = s

    def seg_full(a, b):
        # integral of 2*sqrt(1-x^2) = chord height (top - bottom)
        return 2.0 * (F(b) - F(a))

    def seg_cap(a, b):
        # integral of (t + sqrt(1-x^2))
        return t * (b - a) + (F(b) - F(a))

    if t >= 0.0:
        # |x| <= xc: capped at t; |x| > xc: full chord
        a0 = max(lo, -xc)
        b0 = min(hi, xc)
        if lo < -xc:
            total += seg_full(lo, min(hi, -xc))
        if b0 > a0:
            total += seg_cap(a0, b0)
        if hi > xc:
            total += seg_full(xc, hi)
    else:
        # only |x| <= xc contributes, capped at t (t below center)
        a0 = max(lo, -xc)
        b0 = min(hi, xc)
        if b0 > a0:
            total += seg_cap(a0, b0)
    return total / math.pi


def circular_law_cdf(s, t):
    """CDF of the uniform measure on the unit disc at (s, t)."""
    return _quarter_cdf(float(s), float(t))


DEFAULT_GRID = (np.linspace(-2.5, 2.5, 201), np.linspace(-2.5, 2.5, 201))


def esd_distance(a, b, grid=None):
    """Kolmogorov-style max |mu_a - mu_b| over a grid plus all atoms.

    `b` may be another Esd or the string "circular" for the disc limit law.
    """
    if grid is None:
        grid = DEFAULT_GRID
    s_grid, t_grid = (np.asarray(g, dtype=float) for g in grid)
    if s_grid.size == 0 or t_grid.size == 0:
        raise ValidationError("grid must be nonempty")
    atoms = [a.eigenvalues]
    if isinstance(b, Esd):
        atoms.append(b.eigenvalues)
    pts = np.concatenate(atoms)
    s_vals = np.unique(np.concatenate([s_grid, pts.real]))
    t_vals = np.unique(np.concatenate([t_grid, pts.imag]))
    mu_a = a.cdf_grid(s_vals, t_vals)
    if isinstance(b, Esd):
        mu_b = b.cdf_grid(s_vals, t_vals)
    elif b == "circular":
        fs = np.array([[circular_law_cdf(s, t) for t in t_vals] for s in s_vals])
        mu_b = fs
    else:
        raise ValidationError("b must be an Esd or 'circular'")
    return float(np.max(np.abs(mu_a - mu_b)))


@dataclass
class ComparisonSummary:
    name: str
    rows: list  # dicts: trial, n, value
    stats: dict = field(default_factory=dict)

    def to_records(self):
        return [dict(r) for r in self.rows]


def _summary_stats(values):
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        return {"count": 0}
    q1, med, q3 = np.percentile(v, [25, 50, 75])
    return {"count": int(v.size), "mean": float(v.mean()),
            "median": float(med), "iqr": float(q3 - q1),
            "max": float(v.max())}


def log_det_comparison(cfg):
    """Per trial: (1/n) log|det(A_X/sqrt(n) - zI)| minus the same for A_Y."""
    rows = []
    degenerate = 0
    for n in cfg.n_list:
        ex, ey = cfg.ensemble(n, "x"), cfg.ensemble(n, "y")
        zi = cfg.z * np.eye(n, dtype=np.complex128)
        rt = math.sqrt(n)
        for t in range(cfg.trials):
            lx = linalg.log_abs_det(sample_matrix(ex, SeedSpec(cfg.base_seed, t)) / rt - zi)
            ly = linalg.log_abs_det(sample_matrix(ey, SeedSpec(cfg.base_seed, t)) / rt - zi)
            if not (math.isfinite(lx) and math.isfinite(ly)):
                degenerate += 1
                continue
            rows.append({"trial": t, "n": n, "value": (lx - ly) / n})
    abs_vals = [abs(r["value"]) for r in rows]
    stats = _summary_stats(abs_vals)
    stats["degenerate_trials"] = degenerate
    stats["per_n_median"] = {
        str(n): float(np.median([abs(r["value"]) for r in rows if r["n"] == n]))
        for n in cfg.n_list
    }
    return ComparisonSummary("log_det_comparison", rows, stats)


def distance_sum_comparison(cfg):
    """Row-distance analogue of the log-determinant comparison.

    Sums log dist(row_i/sqrt(n), span of rows < i) over the trailing index
    range i >= n - n^0.99 (1-based), for X and Y on shared seeds, and reports
    the per-trial difference of the two sums divided by n.
    """
    rows = []
    flagged = 0
    for n in cfg.n_list:
        ex, ey = cfg.ensemble(n, "x"), cfg.ensemble(n, "y")
        start = max(int(math.ceil(n - n**0.99)), 1)  # 1-based index
        zi = cfg.z * np.eye(n, dtype=np.complex128)
        rt = math.sqrt(n)
        for t in range(cfg.trials):
            vals = []
            bad = False
            for ens in (ex, ey):
                A = sample_matrix(ens, SeedSpec(cfg.base_seed, t)) / rt - zi
                span = linalg.IncrementalSpan()
                total = 0.0
                for i in range(n):  # 0-based row i is (i+1)-th
                    d, _ = span.distance(A[i])
                    if i + 1 >= start:
                        if d <= 0.0:
                            bad = True
                            break
                        total += math.log(d)
                    span.add(A[i])
                vals.append(total)
                if bad:
                    break
            if bad:
                flagged += 1
                continue
            rows.append({"trial": t, "n": n,
                         "value": (vals[0] - vals[1]) / n})
    stats = _summary_stats([abs(r["value"]) for r in rows])
    stats["near_singular_trials"] = flagged
    stats["index_range_start"] = {
        str(n): max(int(math.ceil(n - n**0.99)), 1) for n in cfg.n_list
    }
    return ComparisonSummary("distance_sum_comparison", rows, stats)


def extreme_sv_check(cfg, c_grid=(0.5, 1.0, 1.5, 2.0)):
    """Frequencies of sigma_1(A - z sqrt(n) I) >= n^C and sigma_n <= n^-C."""
    rows = []
    freq = {}
    for n in cfg.n_list:
        ens = cfg.ensemble(n, "x")
        shift = cfg.z * math.sqrt(n) * np.eye(n, dtype=np.complex128)
        s1 = np.empty(cfg.trials)
        sn = np.empty(cfg.trials)
        for t in range(cfg.trials):
            A = sample_matrix(ens, SeedSpec(cfg.base_seed, t)) - shift
            sv = linalg.singular_values(A).values
            s1[t], sn[t] = sv[0], sv[-1]
            rows.append({"trial": t, "n": n, "sigma_max": float(sv[0]),
                         "sigma_min": float(sv[-1])})
        for C in c_grid:
            freq[(n, float(C))] = {
                "p_large": float(np.mean(s1 >= n**C)),
                "p_small": float(np.mean(sn <= n ** (-C))),
            }
    return ComparisonSummary(
        "extreme_sv_check", rows,
        {"frequencies": {f"n={n},C={C}": v for (n, C), v in freq.items()}},
    )
