"""Inhomogeneous complex random matrix ensembles A = M + C * X.

M is a deterministic shift profile, C a nonnegative variance profile, and X
has independent entries drawn from per-entry (or one shared) distribution.
Also houses the Monte Carlo checks of the tail-bound hypotheses: the
Hilbert-Schmidt budget, the two-sided symmetrized anti-concentration
condition, and Pastur's truncated-second-moment condition.

Unit-variance convention: E|Z|^2 = 1; for the complex Gaussian the real and
imaginary parts are independent centered normals of variance 1/2 each.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x):
    """One round of the splitmix64 avalanche; the toolkit's seed mixer."""
    x = (x + _GOLDEN) & _MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


@dataclass(frozen=True)
class SeedSpec:
    """Derives one independent, reproducible generator per (base_seed, trial).

    stream seed = splitmix64(base_seed XOR (trial_index + 1) * golden), so
    identical inputs give bit-identical sample streams under any scheduling.
    """

    base_seed: int
    trial_index: int = 0

    def stream_seed(self):
        mixed = (self.base_seed & _MASK) ^ (((self.trial_index + 1) * _GOLDEN) & _MASK)
        return splitmix64(mixed)

    def rng(self):
        return np.random.Generator(np.random.PCG64(self.stream_seed()))

    def child(self, tag):
        """Substream for a named purpose (tag hashed into the base seed)."""
        h = 0
        for ch in tag.encode():
            h = splitmix64(h ^ ch)
        return SeedSpec(self.base_seed ^ h, self.trial_index)


def as_seed(seed):
    if isinstance(seed, SeedSpec):
        return seed
    return SeedSpec(int(seed))


# ---------------------------------------------------------------------------
# Entry distributions
# ---------------------------------------------------------------------------

FAMILIES = (
    "complex_gaussian",
    "four_point",
    "rademacher",
    "lattice_uniform",
    "constant",
    "sparse_bernoulli",
)

_FOUR_POINT = np.array([1, -1, 1j, -1j], dtype=np.complex128)


@dataclass(frozen=True)
class DistributionSpec:
    family: str
    variance: float = 1.0
    value: complex = 0j
    p: float = 0.5
    support: tuple = ()
    probs: tuple = ()

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValidationError(f"unknown distribution family {self.family!r}")
        if self.family == "complex_gaussian" and not self.variance > 0:
            raise ValidationError("complex_gaussian needs variance > 0")
        if self.family == "lattice_uniform":
            if len(self.support) == 0 or len(self.support) != len(self.probs):
                raise ValidationError("lattice_uniform needs matching support/probs")
            if any(p < 0 for p in self.probs):
                raise ValidationError("lattice_uniform probabilities must be >= 0")
            if abs(sum(self.probs) - 1.0) > 1e-12:
                raise ValidationError("lattice_uniform probabilities must sum to 1")
        if self.family == "sparse_bernoulli" and not 0.0 <= self.p <= 1.0:
            raise ValidationError("sparse_bernoulli needs p in [0, 1]")

    # constructors ---------------------------------------------------------
    @staticmethod
    def complex_gaussian(variance=1.0):
        return DistributionSpec("complex_gaussian", variance=float(variance))

    @staticmethod
    def four_point():
        """Uniform on {1, -1, i, -i}: zero mean, unit E|Z|^2, b-condition at 1/2."""
        return DistributionSpec("four_point")

    @staticmethod
    def rademacher():
        return DistributionSpec("rademacher")

    @staticmethod
    def lattice_uniform(support, probs):
        return DistributionSpec(
            "lattice_uniform",
            support=tuple(complex(z) for z in support),
            probs=tuple(float(p) for p in probs),
        )

    @staticmethod
    def constant(value):
        return DistributionSpec("constant", value=complex(value))

    @staticmethod
    def sparse_bernoulli(p, value):
        return DistributionSpec("sparse_bernoulli", p=float(p), value=complex(value))

    # sampling -------------------------------------------------------------
    def sample(self, rng, size=None):
        shape = () if size is None else size
        if self.family == "complex_gaussian":
            sd = math.sqrt(self.variance / 2.0)
            return rng.normal(0.0, sd, shape) + 1j * rng.normal(0.0, sd, shape)
        if self.family == "four_point":
            return _FOUR_POINT[rng.integers(0, 4, shape)]
        if self.family == "rademacher":
            return (2.0 * rng.integers(0, 2, shape) - 1.0).astype(np.complex128)
        if self.family == "lattice_uniform":
            vals = np.asarray(self.support, dtype=np.complex128)
            idx = rng.choice(len(vals), size=shape, p=np.asarray(self.probs))
            return vals[idx]
        if self.family == "constant":
            return np.full(shape, self.value, dtype=np.complex128)
        if self.family == "sparse_bernoulli":
            mask = rng.random(shape) < self.p
            return np.where(mask, self.value, 0j).astype(np.complex128)
        raise AssertionError("unreachable")


def sample_scalar(dist, seed):
    """One draw from dist using the stream of `seed`."""
    z = dist.sample(as_seed(seed).rng(), size=())
    return complex(z)


def symmetrize_samples(dist, m, seed):
    """m independent draws of Z' - Z'' (two independent copies of dist)."""
    if m < 1:
        raise ValidationError("need m >= 1 samples")
    rng = as_seed(seed).rng()
    return dist.sample(rng, (m,)) - dist.sample(rng, (m,))


# ---------------------------------------------------------------------------
# Ensembles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EnsembleSpec:
    n: int
    shift: np.ndarray  # (n, n) complex
    scale: np.ndarray  # (n, n) real nonnegative
    entry_dist: object  # DistributionSpec or (n, n) array of them
    declared_b: float = 0.5
    declared_K: float = 2.0
    alpha: float = None  # recorded sigma bounds, universality mode only
    beta: float = None

    def __post_init__(self):
        shift = np.asarray(self.shift, dtype=np.complex128)
        scale = np.asarray(self.scale, dtype=np.float64)
        if shift.shape != (self.n, self.n) or scale.shape != (self.n, self.n):
            raise ValidationError("shift and scale must both be n x n")
        if np.any(scale < 0):
            raise ValidationError("scale entries must be nonnegative")
        if not 0.0 < self.declared_b < 1.0:
            raise ValidationError("declared_b must lie in (0, 1)")
        if not self.declared_K > 0:
            raise ValidationError("declared_K must be positive")
        if self.alpha is not None and self.beta is not None:
            if not 0 < self.alpha <= self.beta:
                raise ValidationError("need 0 < alpha <= beta")
            if np.any(scale < self.alpha - 1e-12) or np.any(scale > self.beta + 1e-12):
                raise ValidationError("scale entries violate the [alpha, beta] band")
        object.__setattr__(self, "shift", shift)
        object.__setattr__(self, "scale", scale)

    @staticmethod
    def iid(n, dist, shift=0.0, scale=1.0, declared_b=0.5, declared_K=2.0,
            alpha=None, beta=None):
        """Homogeneous ensemble: scalar shift means shift * I."""
        sh = np.asarray(shift, dtype=np.complex128)
        if sh.ndim == 0:
            sh = complex(sh) * np.eye(n, dtype=np.complex128)
        sc = np.asarray(scale, dtype=np.float64)
        if sc.ndim == 0:
            sc = np.full((n, n), float(sc))
        return EnsembleSpec(n, sh, sc, dist, declared_b, declared_K, alpha, beta)

    @staticmethod
    def ginibre(n):
        """i.i.d. complex Gaussian entries with E|Z|^2 = 1."""
        return EnsembleSpec.iid(n, DistributionSpec.complex_gaussian(1.0),
                                declared_b=0.1, declared_K=1.5)

    def uniform_dist(self):
        return isinstance(self.entry_dist, DistributionSpec)

    def dist_at(self, i, j):
        if self.uniform_dist():
            return self.entry_dist
        return self.entry_dist[i][j]

    def column_dists(self, j):
        """Effective per-coordinate distributions of column j (scale absorbed)."""
        return [self.dist_at(i, j) for i in range(self.n)], self.scale[:, j].copy()


def sample_matrix(ens, seed):
    """A = shift + scale * X entrywise; deterministic given the seed."""
    rng = as_seed(seed).rng()
    n = ens.n
    if ens.uniform_dist():
        X = ens.entry_dist.sample(rng, (n, n))
    else:
        X = np.empty((n, n), dtype=np.complex128)
        for i in range(n):
            for j in range(n):
                X[i, j] = ens.dist_at(i, j).sample(rng, ())
    return ens.shift + ens.scale * X


# ---------------------------------------------------------------------------
# Hypothesis checks (Monte Carlo, reported with 3*SE guard bands)
# ---------------------------------------------------------------------------

@dataclass
class CheckReport:
    name: str
    estimate: float
    std_err: float
    threshold: float
    ok: bool
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "name": self.name,
            "estimate": self.estimate,
            "std_err": self.std_err,
            "threshold": self.threshold,
            "ok": bool(self.ok),
            **self.extra,
        }


def check_hs_budget(ens, trials, seed=0):
    """Estimate n^-2 sum E|A_ij|^2 and compare against declared_K."""
    if trials < 1:
        raise ValidationError("need trials >= 1")
    seed = as_seed(seed)
    vals = np.empty(trials)
    for t in range(trials):
        A = sample_matrix(ens, SeedSpec(seed.base_seed, t))
        vals[t] = np.sum(np.abs(A) ** 2) / ens.n**2
    est = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    ok = est <= ens.declared_K + 3.0 * se
    return CheckReport("hs_budget", est, se, ens.declared_K, ok)


def check_b_condition(dist, b, trials, seed=0):
    """P(b <= |Z' - Z''| <= 1/b) >= b, with the one-sided variant recorded too.

    Passes iff estimate - 3*SE >= b. The lower-only variant P(|Z~| >= b)
    is reported alongside (the literature states both forms).
    """
    if not 0.0 < b < 1.0:
        raise ValidationError("b must lie in (0, 1)")
    z = symmetrize_samples(dist, trials, seed)
    mod = np.abs(z)
    hit_two = (mod >= b) & (mod <= 1.0 / b)
    hit_low = mod >= b
    p2 = float(hit_two.mean())
    pl = float(hit_low.mean())
    se2 = math.sqrt(max(p2 * (1 - p2), 1e-300) / trials)
    sel = math.sqrt(max(pl * (1 - pl), 1e-300) / trials)
    if p2 in (0.0, 1.0):
        se2 = math.sqrt(0.25 / trials) if p2 == 1.0 else 0.0
    ok = p2 - 3.0 * se2 >= b
    return CheckReport(
        "b_condition", p2, se2, b, ok,
        extra={"lower_only_estimate": pl, "lower_only_std_err": sel,
               "lower_only_ok": bool(pl - 3.0 * sel >= b)},
    )


def check_pastur(ens, eps, trials, seed=0):
    """Estimate n^-2 sum E[|x_ij|^2 1{|x_ij| >= eps sqrt(n)}] for the noise x."""
    if not eps > 0:
        raise ValidationError("eps must be positive")
    if trials < 1:
        raise ValidationError("need trials >= 1")
    seed = as_seed(seed)
    thr = eps * math.sqrt(ens.n)
    vals = np.empty(trials)
    for t in range(trials):
        rng = SeedSpec(seed.base_seed, t).rng()
        if ens.uniform_dist():
            x = ens.entry_dist.sample(rng, (ens.n, ens.n))
        else:
            x = np.empty((ens.n, ens.n), dtype=np.complex128)
            for i in range(ens.n):
                for j in range(ens.n):
                    x[i, j] = ens.dist_at(i, j).sample(rng, ())
        m2 = np.abs(x) ** 2
        vals[t] = float(np.mean(m2 * (np.abs(x) >= thr)))
    est = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return CheckReport("pastur", est, se, eps, True,
                       extra={"eps_sqrt_n": thr})
